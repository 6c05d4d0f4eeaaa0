#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "wsym/grid.hpp"

namespace wsym {

enum class ProfileFamily { Balls, HalfSpaces };

/// Superlevel family of f = h(param(x)) together with its cumulative mass
/// M(t) = mu(family member at t) and isoperimetric profile q.
///
/// Balls: param = |x|, member {|x| < t}, M increasing.
/// Half-spaces: param = <x, theta>, member {<x, theta> > t}, M decreasing.
class IsoperimetricProfile {
 public:
  std::string id;
  ProfileFamily family = ProfileFamily::Balls;
  Point theta;
  DomainSpec domain;
  Potential potential;
  /// Box used when the measure has infinite mass (or a natural window).
  std::optional<Box> default_box;
  double total_mass = 0.0;  // may be infinite
  bool closed_form = true;
  std::vector<std::string> notes;

  /// t -> mu(member at t)
  std::function<double(double)> cumulative;
  /// m -> t with cumulative(t) = m
  std::function<double(double)> cumulative_inverse;
  /// t -> weighted perimeter of the member at t
  std::function<double(double)> boundary_density;
  /// f = shape(param)
  std::function<double(double)> shape;

  double param(std::span<const double> x) const;
  double M(double t) const { return cumulative(t); }
  double M_inverse(double m) const { return cumulative_inverse(m); }
  double q(double m) const;
  double f(std::span<const double> x) const { return shape(param(x)); }
  /// sigma(x) = M(param(x)), the mass of the member whose boundary passes through x.
  double sigma(std::span<const double> x) const { return M(param(x)); }
  /// Range of the parameter over X (lo may be -inf, hi may be +inf).
  std::pair<double, double> param_range() const;
  /// Tabulated M as (t, M(t)) pairs over [t0, t1].
  std::vector<std::pair<double, double>> table(double t0, double t1, std::size_t nodes) const;
};

/// Monotone piecewise-linear table, inverse by bisection on the nodes.
class MonotoneTable {
 public:
  MonotoneTable() = default;
  MonotoneTable(std::vector<double> t, std::vector<double> m);
  double operator()(double t) const;
  double inverse(double m) const;
  double t_min() const { return t_.front(); }
  double t_max() const { return t_.back(); }

 private:
  std::vector<double> t_;
  std::vector<double> m_;
};

IsoperimetricProfile euclidean_ball_profile(std::size_t dim);

/// W(x) = w(|x|) with w convex; M is tabulated up to the farthest grid corner.
IsoperimetricProfile radial_logconvex_profile(const Potential& radial, std::size_t dim,
                                             const WeightedGrid& grid);
/// Variant taking w directly; the table covers [0, r_max].
IsoperimetricProfile radial_logconvex_profile(std::function<double(double)> w, std::size_t dim,
                                             double r_max, std::string description = "radial");

/// Density prod_{i<k} x_i^{alpha_i} on { x_i > 0 : i < k }.
IsoperimetricProfile cone_monomial_profile(const std::vector<double>& alphas, std::size_t dim);

IsoperimetricProfile gaussian_halfspace_profile(const Point& theta, std::size_t dim);

/// W(x) = -<Ax, x>/2, A given row-major (dim x dim).
IsoperimetricProfile anisotropic_gaussian_profile(const std::vector<double>& A, std::size_t dim);

/// A concave function on the vertical interval, with optional derivative.
struct ConcaveFunction {
  std::function<double(double)> value;
  std::function<double(double)> derivative;  // may be empty
  std::string description;
};

/// W(x) = phi(x_N) - c|x|^2 on the slab R^{N-1} x (a, b).
IsoperimetricProfile perturbed_gaussian_profile(const ConcaveFunction& phi, double c, double a,
                                               double b, std::size_t dim,
                                               std::optional<Point> theta = std::nullopt);

struct CheckResult {
  std::string name;
  bool pass = true;
  bool tested = true;
  double value = 0.0;
  std::string detail;
};

struct ProfileValidation {
  double f_inf = 0.0;
  double f_sup = 0.0;
  double grid_f_min = 0.0;
  double grid_f_max = 0.0;
  double min_grad_f_band = 0.0;
  double saturation_gap = 0.0;
  double isoperimetric_worst_ratio = 0.0;
  std::vector<CheckResult> checks;
  bool pass() const;
};

/// Numerical check of (H1), (H2) and conditions (i)-(iii) on a grid.
ProfileValidation validate_profile(const IsoperimetricProfile& profile, const GridPtr& grid,
                                   std::size_t samples, std::uint64_t seed);

/// Grid for a profile: its default box when present, else tail truncation.
GridPtr profile_grid(const IsoperimetricProfile& profile, std::size_t resolution,
                     double tail_tolerance = 1e-8);

/// Largest mass of a family member that stays inside the grid box.
double inscribed_mass(const IsoperimetricProfile& profile, const WeightedGrid& grid);

/// Throws unless the grid discretizes the profile's measure.
void require_profile_grid(const IsoperimetricProfile& profile, const WeightedGrid& grid);

}  // namespace wsym
