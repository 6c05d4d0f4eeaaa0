#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace wsym {

/// Raised on precondition violations of the public API.
class InvalidArgument : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

using Point = std::vector<double>;

/// Log-density W of the measure mu = e^W dx, together with its gradient.
struct Potential {
  std::function<double(std::span<const double>)> evaluate;
  std::function<void(std::span<const double>, std::span<double>)> gradient;
  std::string description;

  static Potential zero(std::string description = "W=0");
  /// W(x) = -|x|^2 / 2 + offset
  static Potential standard_gaussian(double offset = 0.0);
};

/// Axis-aligned box [lo_d, hi_d] in R^N.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dim() const { return lo.size(); }
  static Box cube(std::size_t dim, double lo, double hi);
};

/// The open connected set X carrying the measure.
struct DomainSpec {
  enum class Kind { FullSpace, Box, Cone, Slab, HalfSpace };

  Kind kind = Kind::FullSpace;
  std::size_t dim = 1;
  /// Box: the box itself.
  std::optional<wsym::Box> box;
  /// Cone: inward normals n_j, X = { <n_j, x> > 0 for all j }.
  std::vector<Point> cone_normals;
  /// Slab: X = R^{N-1} x (a, b) on the last axis; either bound may be infinite.
  double slab_lo = 0.0;
  double slab_hi = 0.0;
  /// HalfSpace: X = { <normal, x> > offset }.
  Point normal;
  double offset = 0.0;

  static DomainSpec full_space(std::size_t dim);
  static DomainSpec make_box(wsym::Box box);
  static DomainSpec cone(std::size_t dim, std::vector<Point> normals);
  /// Cone { x_i > 0 : i < k }.
  static DomainSpec orthant(std::size_t dim, std::size_t k);
  static DomainSpec slab(std::size_t dim, double a, double b);
  static DomainSpec half_space(Point normal, double offset);

  bool contains(std::span<const double> x) const;
  bool bounded() const { return kind == Kind::Box; }
  /// A point of X used to anchor tail estimates.
  Point interior_point() const;
  std::string kind_name() const;
};

/// Cartesian cell-centred discretization of X with per-cell mu-weights.
class WeightedGrid {
 public:
  /// tail_fraction: estimated exterior mass relative to the grid mass
  /// (0 for bounded X, infinity when mu is not finite).
  WeightedGrid(DomainSpec domain, Potential potential, wsym::Box box,
               std::size_t resolution, double tail_fraction = 0.0);

  const DomainSpec& domain() const { return domain_; }
  const Potential& potential() const { return potential_; }
  const wsym::Box& box() const { return box_; }
  std::size_t dim() const { return box_.dim(); }
  std::size_t resolution() const { return resolution_; }
  std::size_t size() const { return weights_.size(); }
  double spacing(std::size_t axis) const { return spacing_[axis]; }
  /// Largest cell side.
  double h() const;
  double cell_volume() const { return cell_volume_; }
  double tail_mass_bound() const { return tail_mass_bound_; }

  std::span<const double> weights() const { return weights_; }
  double weight(std::size_t i) const { return weights_[i]; }
  /// e^{W} at the centre of cell i (0 outside X).
  double density(std::size_t i) const { return weights_[i] / cell_volume_; }
  bool inside(std::size_t i) const { return inside_[i] != 0; }
  double total_mass() const { return total_mass_; }
  double max_cell_weight() const { return max_weight_; }

  std::size_t stride(std::size_t axis) const { return strides_[axis]; }
  /// Multi-index component of flat cell index i along axis.
  std::size_t coord(std::size_t i, std::size_t axis) const {
    return (i / strides_[axis]) % resolution_;
  }
  double center(std::size_t i, std::size_t axis) const {
    return box_.lo[axis] + (static_cast<double>(coord(i, axis)) + 0.5) * spacing_[axis];
  }
  void center(std::size_t i, std::span<double> out) const;
  Point center(std::size_t i) const;

  /// Neighbour along axis in direction +1/-1, or nullopt past the box face.
  std::optional<std::size_t> neighbor(std::size_t i, std::size_t axis, int dir) const;
  /// Whether the (virtual) cell just outside the box face next to i lies in X.
  bool ghost_inside(std::size_t i, std::size_t axis, int dir) const;

  bool same_shape(const WeightedGrid& other) const;
  /// Stable FNV-1a digest of geometry and weights.
  std::uint64_t fingerprint() const;

 private:
  DomainSpec domain_;
  Potential potential_;
  wsym::Box box_;
  std::size_t resolution_;
  double tail_mass_bound_;
  std::vector<double> spacing_;
  std::vector<std::size_t> strides_;
  double cell_volume_ = 0.0;
  std::vector<double> weights_;
  std::vector<std::uint8_t> inside_;
  double total_mass_ = 0.0;
  double max_weight_ = 0.0;
};

using GridPtr = std::shared_ptr<const WeightedGrid>;

/// Scalar field sampled at cell centres.
struct GridFunction {
  GridPtr grid;
  std::vector<double> values;

  GridFunction() = default;
  explicit GridFunction(GridPtr g, double fill = 0.0);
  GridFunction(GridPtr g, std::vector<double> v);
  /// Samples fn at every cell centre inside X (zero elsewhere).
  static GridFunction sample(GridPtr g, const std::function<double(std::span<const double>)>& fn);

  std::size_t size() const { return values.size(); }
  double operator[](std::size_t i) const { return values[i]; }
  double& operator[](std::size_t i) { return values[i]; }
};

/// Per-cell indicator mask; always false outside X.
struct BorelSet {
  GridPtr grid;
  std::vector<std::uint8_t> mask;

  BorelSet() = default;
  explicit BorelSet(GridPtr g);
  BorelSet(GridPtr g, std::vector<std::uint8_t> m);
  static BorelSet all(GridPtr g);
  static BorelSet from_predicate(GridPtr g, const std::function<bool(std::span<const double>)>& pred);

  bool contains(std::size_t i) const { return mask[i] != 0; }
  std::size_t count() const;
  bool empty() const { return count() == 0; }
  bool subset_of(const BorelSet& other) const;
};

/// Gradient samples, `dim` components per cell.
struct VectorField {
  GridPtr grid;
  std::size_t dim = 0;
  std::vector<double> values;

  std::span<const double> at(std::size_t i) const { return {values.data() + i * dim, dim}; }
};

/// Throws InvalidArgument unless a and b discretize the same grid.
void require_same_grid(const GridPtr& a, const GridPtr& b);

}  // namespace wsym
