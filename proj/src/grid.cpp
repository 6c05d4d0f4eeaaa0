#include "wsym/grid.hpp"

#include <algorithm>
#include <cmath>
#include <cstring>
#include <numeric>

namespace wsym {

Potential Potential::zero(std::string description) {
  return Potential{
      [](std::span<const double>) { return 0.0; },
      [](std::span<const double>, std::span<double> g) { std::fill(g.begin(), g.end(), 0.0); },
      std::move(description)};
}

Potential Potential::standard_gaussian(double offset) {
  return Potential{
      [offset](std::span<const double> x) {
        double r2 = 0.0;
        for (double xi : x) r2 += xi * xi;
        return -0.5 * r2 + offset;
      },
      [](std::span<const double> x, std::span<double> g) {
        for (std::size_t d = 0; d < x.size(); ++d) g[d] = -x[d];
      },
      "W=-|x|^2/2"};
}

Box Box::cube(std::size_t dim, double lo, double hi) {
  return Box{std::vector<double>(dim, lo), std::vector<double>(dim, hi)};
}

DomainSpec DomainSpec::full_space(std::size_t dim) {
  DomainSpec d;
  d.kind = Kind::FullSpace;
  d.dim = dim;
  return d;
}

DomainSpec DomainSpec::make_box(wsym::Box b) {
  for (std::size_t k = 0; k < b.dim(); ++k) {
    if (!(b.lo[k] < b.hi[k]) || !std::isfinite(b.lo[k]) || !std::isfinite(b.hi[k])) {
      throw InvalidArgument("box bounds must be finite with lo < hi");
    }
  }
  DomainSpec d;
  d.kind = Kind::Box;
  d.dim = b.dim();
  d.box = std::move(b);
  return d;
}

DomainSpec DomainSpec::cone(std::size_t dim, std::vector<Point> normals) {
  for (const auto& n : normals) {
    if (n.size() != dim) throw InvalidArgument("cone normal has wrong dimension");
  }
  DomainSpec d;
  d.kind = Kind::Cone;
  d.dim = dim;
  d.cone_normals = std::move(normals);
  return d;
}

DomainSpec DomainSpec::orthant(std::size_t dim, std::size_t k) {
  if (k > dim) throw InvalidArgument("orthant: k exceeds dimension");
  std::vector<Point> normals;
  for (std::size_t i = 0; i < k; ++i) {
    Point n(dim, 0.0);
    n[i] = 1.0;
    normals.push_back(std::move(n));
  }
  return cone(dim, std::move(normals));
}

DomainSpec DomainSpec::slab(std::size_t dim, double a, double b) {
  if (!(a < b)) throw InvalidArgument("slab requires a < b");
  DomainSpec d;
  d.kind = Kind::Slab;
  d.dim = dim;
  d.slab_lo = a;
  d.slab_hi = b;
  return d;
}

DomainSpec DomainSpec::half_space(Point normal, double offset) {
  double n2 = 0.0;
  for (double v : normal) n2 += v * v;
  if (n2 <= 0.0) throw InvalidArgument("half-space normal must be nonzero");
  const double nn = std::sqrt(n2);
  for (double& v : normal) v /= nn;
  DomainSpec d;
  d.kind = Kind::HalfSpace;
  d.dim = normal.size();
  d.normal = std::move(normal);
  d.offset = offset / nn;
  return d;
}

bool DomainSpec::contains(std::span<const double> x) const {
  switch (kind) {
    case Kind::FullSpace:
      return true;
    case Kind::Box:
      for (std::size_t k = 0; k < dim; ++k) {
        if (!(x[k] > box->lo[k] && x[k] < box->hi[k])) return false;
      }
      return true;
    case Kind::Cone:
      for (const auto& n : cone_normals) {
        double s = 0.0;
        for (std::size_t k = 0; k < dim; ++k) s += n[k] * x[k];
        if (!(s > 0.0)) return false;
      }
      return true;
    case Kind::Slab:
      return x[dim - 1] > slab_lo && x[dim - 1] < slab_hi;
    case Kind::HalfSpace: {
      double s = 0.0;
      for (std::size_t k = 0; k < dim; ++k) s += normal[k] * x[k];
      return s > offset;
    }
  }
  return false;
}

Point DomainSpec::interior_point() const {
  Point p(dim, 0.0);
  switch (kind) {
    case Kind::FullSpace:
      break;
    case Kind::Box:
      for (std::size_t k = 0; k < dim; ++k) p[k] = 0.5 * (box->lo[k] + box->hi[k]);
      break;
    case Kind::Cone:
      // rays are anchored at the vertex
      break;
    case Kind::Slab: {
      const double a = slab_lo, b = slab_hi;
      double mid = 0.0;
      if (std::isfinite(a) && std::isfinite(b)) mid = 0.5 * (a + b);
      else if (std::isfinite(a)) mid = std::max(0.0, a + 1.0);
      else if (std::isfinite(b)) mid = std::min(0.0, b - 1.0);
      p[dim - 1] = mid;
      break;
    }
    case Kind::HalfSpace:
      if (offset >= 0.0) {
        for (std::size_t k = 0; k < dim; ++k) p[k] = normal[k] * (offset + 1.0);
      }
      break;
  }
  return p;
}

std::string DomainSpec::kind_name() const {
  switch (kind) {
    case Kind::FullSpace: return "full-space";
    case Kind::Box: return "box";
    case Kind::Cone: return "cone";
    case Kind::Slab: return "slab";
    case Kind::HalfSpace: return "half-space";
  }
  return "unknown";
}

WeightedGrid::WeightedGrid(DomainSpec domain, Potential potential, wsym::Box box,
                           std::size_t resolution, double tail_fraction)
    : domain_(std::move(domain)),
      potential_(std::move(potential)),
      box_(std::move(box)),
      resolution_(resolution),
      tail_mass_bound_(0.0) {
  const std::size_t n = box_.dim();
  if (n == 0) throw InvalidArgument("grid dimension must be positive");
  if (domain_.dim != n) throw InvalidArgument("domain and box dimensions differ");
  if (resolution_ < 4) throw InvalidArgument("resolution must be at least 4");
  spacing_.resize(n);
  strides_.resize(n);
  cell_volume_ = 1.0;
  std::size_t total = 1;
  for (std::size_t k = n; k-- > 0;) {
    strides_[k] = total;
    total *= resolution_;
  }
  for (std::size_t k = 0; k < n; ++k) {
    spacing_[k] = (box_.hi[k] - box_.lo[k]) / static_cast<double>(resolution_);
    cell_volume_ *= spacing_[k];
  }
  weights_.assign(total, 0.0);
  inside_.assign(total, 0);
  std::vector<double> x(n);
  for (std::size_t i = 0; i < total; ++i) {
    center(i, x);
    if (!domain_.contains(x)) continue;
    const double w = std::exp(potential_.evaluate(x)) * cell_volume_;
    if (!(w > 0.0) || !std::isfinite(w)) continue;
    inside_[i] = 1;
    weights_[i] = w;
  }
  // fixed-order pairwise reduction
  std::vector<double> partial(weights_);
  for (std::size_t len = partial.size(); len > 1;) {
    const std::size_t half = (len + 1) / 2;
    for (std::size_t i = 0; i + half < len; ++i) partial[i] += partial[i + half];
    len = half;
  }
  total_mass_ = partial.empty() ? 0.0 : partial[0];
  max_weight_ = weights_.empty() ? 0.0 : *std::max_element(weights_.begin(), weights_.end());
  tail_mass_bound_ = std::isinf(tail_fraction) ? tail_fraction : tail_fraction * total_mass_;
}

double WeightedGrid::h() const { return *std::max_element(spacing_.begin(), spacing_.end()); }

void WeightedGrid::center(std::size_t i, std::span<double> out) const {
  for (std::size_t k = 0; k < dim(); ++k) out[k] = center(i, k);
}

Point WeightedGrid::center(std::size_t i) const {
  Point p(dim());
  center(i, p);
  return p;
}

std::optional<std::size_t> WeightedGrid::neighbor(std::size_t i, std::size_t axis, int dir) const {
  const std::size_t c = coord(i, axis);
  if (dir > 0) {
    if (c + 1 >= resolution_) return std::nullopt;
    return i + strides_[axis];
  }
  if (c == 0) return std::nullopt;
  return i - strides_[axis];
}

bool WeightedGrid::ghost_inside(std::size_t i, std::size_t axis, int dir) const {
  Point x = center(i);
  x[axis] += dir > 0 ? spacing_[axis] : -spacing_[axis];
  return domain_.contains(x);
}

bool WeightedGrid::same_shape(const WeightedGrid& other) const {
  if (dim() != other.dim() || resolution_ != other.resolution_) return false;
  for (std::size_t k = 0; k < dim(); ++k) {
    if (box_.lo[k] != other.box_.lo[k] || box_.hi[k] != other.box_.hi[k]) return false;
  }
  return domain_.kind == other.domain_.kind;
}

std::uint64_t WeightedGrid::fingerprint() const {
  std::uint64_t h = 1469598103934665603ULL;
  auto mix = [&h](const void* data, std::size_t len) {
    const auto* b = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < len; ++i) {
      h ^= b[i];
      h *= 1099511628211ULL;
    }
  };
  const std::uint64_t d = dim(), r = resolution_;
  mix(&d, sizeof d);
  mix(&r, sizeof r);
  mix(box_.lo.data(), box_.lo.size() * sizeof(double));
  mix(box_.hi.data(), box_.hi.size() * sizeof(double));
  mix(weights_.data(), weights_.size() * sizeof(double));
  return h;
}

GridFunction::GridFunction(GridPtr g, double fill) : grid(std::move(g)) {
  values.assign(grid->size(), fill);
}

GridFunction::GridFunction(GridPtr g, std::vector<double> v) : grid(std::move(g)), values(std::move(v)) {
  if (values.size() != grid->size()) throw InvalidArgument("grid function size mismatch");
}

GridFunction GridFunction::sample(GridPtr g, const std::function<double(std::span<const double>)>& fn) {
  GridFunction u(g);
  Point x(g->dim());
  for (std::size_t i = 0; i < g->size(); ++i) {
    if (!g->inside(i)) continue;
    g->center(i, x);
    u.values[i] = fn(x);
  }
  return u;
}

BorelSet::BorelSet(GridPtr g) : grid(std::move(g)) { mask.assign(grid->size(), 0); }

BorelSet::BorelSet(GridPtr g, std::vector<std::uint8_t> m) : grid(std::move(g)), mask(std::move(m)) {
  if (mask.size() != grid->size()) throw InvalidArgument("mask size mismatch");
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!grid->inside(i)) mask[i] = 0;
  }
}

BorelSet BorelSet::all(GridPtr g) {
  BorelSet s(g);
  for (std::size_t i = 0; i < s.mask.size(); ++i) s.mask[i] = g->inside(i) ? 1 : 0;
  return s;
}

BorelSet BorelSet::from_predicate(GridPtr g, const std::function<bool(std::span<const double>)>& pred) {
  BorelSet s(g);
  Point x(g->dim());
  for (std::size_t i = 0; i < s.mask.size(); ++i) {
    if (!g->inside(i)) continue;
    g->center(i, x);
    s.mask[i] = pred(x) ? 1 : 0;
  }
  return s;
}

std::size_t BorelSet::count() const {
  return static_cast<std::size_t>(std::count(mask.begin(), mask.end(), std::uint8_t{1}));
}

bool BorelSet::subset_of(const BorelSet& other) const {
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (mask[i] && !other.mask[i]) return false;
  }
  return true;
}

void require_same_grid(const GridPtr& a, const GridPtr& b) {
  if (!a || !b) throw InvalidArgument("grid mismatch: missing grid");
  if (a == b) return;
  if (!a->same_shape(*b) || a->fingerprint() != b->fingerprint()) {
    throw InvalidArgument("grid mismatch");
  }
}

}  // namespace wsym
