#include "wsym/measure.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace wsym {
namespace {

constexpr double kDecayLogGap = 46.0;  // e^-46 ~ 1e-20
constexpr double kMaxRayLength = 1e4;
constexpr std::size_t kRaySamples = 20000;

struct RayTail {
  Point dir;
  bool enters_domain = false;
  bool integrable = true;
  double length = 0.0;             // integration cutoff S
  std::vector<double> s;           // sample abscissae
  std::vector<double> cumulative;  // normalised cumulative mass along the ray
};

std::vector<Point> ray_directions(std::size_t dim) {
  std::vector<Point> dirs;
  for (std::size_t k = 0; k < dim; ++k) {
    for (int sgn : {1, -1}) {
      Point d(dim, 0.0);
      d[k] = sgn;
      dirs.push_back(std::move(d));
    }
  }
  if (dim >= 2) {
    const std::size_t combos = std::size_t{1} << dim;
    const double inv = 1.0 / std::sqrt(static_cast<double>(dim));
    for (std::size_t m = 0; m < combos; ++m) {
      Point d(dim);
      for (std::size_t k = 0; k < dim; ++k) d[k] = ((m >> k) & 1U) ? -inv : inv;
      dirs.push_back(std::move(d));
    }
  }
  return dirs;
}

// log of s^{N-1} e^{W(c + s w)} restricted to X
double ray_log_integrand(const DomainSpec& domain, const Potential& potential, const Point& c,
                         const Point& dir, double s) {
  const std::size_t n = c.size();
  Point x(n);
  for (std::size_t k = 0; k < n; ++k) x[k] = c[k] + s * dir[k];
  if (!domain.contains(x)) return -kInfinity;
  double v = potential.evaluate(x);
  if (n > 1) v += static_cast<double>(n - 1) * std::log(std::max(s, 1e-300));
  return std::isfinite(v) ? v : (v > 0 ? kInfinity : -kInfinity);
}

RayTail analyse_ray(const DomainSpec& domain, const Potential& potential, const Point& c,
                    const Point& dir) {
  RayTail out;
  out.dir = dir;
  double length = 1.0;
  for (;;) {
    double peak = -kInfinity;
    double tail_peak = -kInfinity;
    constexpr std::size_t probes = 2000;
    for (std::size_t j = 1; j <= probes; ++j) {
      const double s = length * static_cast<double>(j) / probes;
      const double l = ray_log_integrand(domain, potential, c, dir, s);
      peak = std::max(peak, l);
      if (j > probes * 9 / 10) tail_peak = std::max(tail_peak, l);
    }
    if (peak == kInfinity) {
      out.enters_domain = true;
      out.integrable = false;
      return out;
    }
    if (peak > -kInfinity) out.enters_domain = true;
    if (out.enters_domain && tail_peak < peak - kDecayLogGap) break;
    if (!out.enters_domain && length >= kMaxRayLength) return out;
    length *= 2.0;
    if (length > kMaxRayLength) {
      out.integrable = !out.enters_domain;
      return out;
    }
  }
  out.length = length;
  out.s.resize(kRaySamples + 1);
  std::vector<double> logs(kRaySamples + 1);
  double peak = -kInfinity;
  for (std::size_t j = 0; j <= kRaySamples; ++j) {
    out.s[j] = length * static_cast<double>(j) / kRaySamples;
    logs[j] = j == 0 && c.size() > 1 ? -kInfinity
                                      : ray_log_integrand(domain, potential, c, dir, out.s[j]);
    peak = std::max(peak, logs[j]);
  }
  out.cumulative.assign(kRaySamples + 1, 0.0);
  const double ds = length / kRaySamples;
  for (std::size_t j = 1; j <= kRaySamples; ++j) {
    const double a = std::exp(logs[j - 1] - peak), b = std::exp(logs[j] - peak);
    out.cumulative[j] = out.cumulative[j - 1] + 0.5 * (a + b) * ds;
  }
  return out;
}

// smallest s with tail fraction <= tol
double ray_radius(const RayTail& ray, double tol) {
  const double total = ray.cumulative.back();
  if (total <= 0.0) return 0.0;
  for (std::size_t j = 0; j < ray.s.size(); ++j) {
    if ((total - ray.cumulative[j]) / total <= tol) return ray.s[j];
  }
  return ray.length;
}

double ray_tail_fraction(const RayTail& ray, double radius) {
  const double total = ray.cumulative.back();
  if (total <= 0.0) return 0.0;
  const auto it = std::lower_bound(ray.s.begin(), ray.s.end(), radius);
  if (it == ray.s.end()) return 0.0;
  const auto j = static_cast<std::size_t>(it - ray.s.begin());
  return std::max(0.0, (total - ray.cumulative[j]) / total);
}

// distance from c along dir until the box is left
double box_exit_distance(const Box& box, const Point& c, const Point& dir) {
  double t = kInfinity;
  for (std::size_t k = 0; k < c.size(); ++k) {
    if (dir[k] > 0) t = std::min(t, (box.hi[k] - c[k]) / dir[k]);
    else if (dir[k] < 0) t = std::min(t, (box.lo[k] - c[k]) / dir[k]);
  }
  return std::max(0.0, t);
}

// bounding box of the per-ray truncation radii, so anisotropic decay gets
// an anisotropic box
Box adapted_box(const DomainSpec& domain, const Point& c, const std::vector<RayTail>& rays,
                const std::vector<double>& radii) {
  const std::size_t n = domain.dim;
  Box b;
  b.lo.assign(n, 0.0);
  b.hi.assign(n, 0.0);
  std::vector<double> up(n, 0.0), down(n, 0.0);
  for (std::size_t r = 0; r < rays.size(); ++r) {
    for (std::size_t k = 0; k < n; ++k) {
      const double v = radii[r] * rays[r].dir[k];
      up[k] = std::max(up[k], v);
      down[k] = std::max(down[k], -v);
    }
  }
  const double fallback = std::max(1e-6, *std::max_element(radii.begin(), radii.end()));
  for (std::size_t k = 0; k < n; ++k) {
    // a side no ray enters is cut by X itself below
    b.lo[k] = c[k] - (down[k] > 0.0 ? std::max(down[k], 1e-6) : fallback);
    b.hi[k] = c[k] + (up[k] > 0.0 ? std::max(up[k], 1e-6) : fallback);
  }
  auto clamp_axis = [&](const Point& nrm, double offset) {
    // axis-aligned constraint <nrm, x> > offset
    for (std::size_t k = 0; k < n; ++k) {
      bool axis_aligned = std::abs(std::abs(nrm[k]) - 1.0) < 1e-14;
      for (std::size_t j = 0; j < n && axis_aligned; ++j) {
        if (j != k && nrm[j] != 0.0) axis_aligned = false;
      }
      if (!axis_aligned) continue;
      if (nrm[k] > 0) b.lo[k] = std::max(b.lo[k], offset);
      else b.hi[k] = std::min(b.hi[k], -offset);
    }
  };
  switch (domain.kind) {
    case DomainSpec::Kind::Cone:
      for (const auto& nrm : domain.cone_normals) clamp_axis(nrm, 0.0);
      break;
    case DomainSpec::Kind::HalfSpace:
      clamp_axis(domain.normal, domain.offset);
      break;
    case DomainSpec::Kind::Slab:
      b.lo[n - 1] = std::max(b.lo[n - 1], domain.slab_lo);
      b.hi[n - 1] = std::min(b.hi[n - 1], domain.slab_hi);
      break;
    default:
      break;
  }
  return b;
}

}  // namespace

WeightedGrid build_grid(const DomainSpec& domain, const Potential& potential,
                        std::size_t resolution, double tail_tolerance,
                        std::optional<Box> explicit_box) {
  if (resolution < 4) throw InvalidArgument("resolution must be at least 4");
  if (!(tail_tolerance > 0.0 && tail_tolerance < 1.0)) {
    throw InvalidArgument("tail_tolerance must lie in (0,1)");
  }
  if (!potential.evaluate) throw InvalidArgument("potential has no evaluator");
  if (explicit_box && explicit_box->dim() != domain.dim) {
    throw InvalidArgument("explicit box dimension differs from domain");
  }
  if (domain.bounded()) {
    return WeightedGrid(domain, potential, explicit_box ? *explicit_box : *domain.box, resolution, 0.0);
  }

  const Point c = domain.interior_point();
  std::vector<RayTail> rays;
  bool integrable = true;
  for (const auto& dir : ray_directions(domain.dim)) {
    RayTail ray = analyse_ray(domain, potential, c, dir);
    if (!ray.enters_domain) continue;
    if (!ray.integrable) integrable = false;
    rays.push_back(std::move(ray));
  }
  if (rays.empty()) integrable = false;

  if (explicit_box) {
    double tail = kInfinity;
    if (integrable) {
      tail = 0.0;
      for (const auto& ray : rays) {
        tail = std::max(tail, ray_tail_fraction(ray, box_exit_distance(*explicit_box, c, ray.dir)));
      }
    }
    return WeightedGrid(domain, potential, *explicit_box, resolution, tail);
  }
  if (!integrable) throw InvalidArgument("infinite-mass truncation requires explicit box");

  std::vector<double> radii;
  for (const auto& ray : rays) radii.push_back(ray_radius(ray, tail_tolerance));
  const Box box = adapted_box(domain, c, rays, radii);
  double tail = 0.0;
  for (const auto& ray : rays) tail = std::max(tail, ray_tail_fraction(ray, box_exit_distance(box, c, ray.dir)));
  return WeightedGrid(domain, potential, box, resolution, tail);
}

GridPtr make_grid(const DomainSpec& domain, const Potential& potential, std::size_t resolution,
                  double tail_tolerance, std::optional<Box> explicit_box) {
  return std::make_shared<const WeightedGrid>(
      build_grid(domain, potential, resolution, tail_tolerance, std::move(explicit_box)));
}

double measure_of(const BorelSet& set, const WeightedGrid& grid) {
  if (!set.grid || set.mask.size() != grid.size() || !set.grid->same_shape(grid)) {
    throw InvalidArgument("grid mismatch");
  }
  double m = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (set.mask[i]) m += grid.weight(i);
  }
  return m;
}

double lp_norm(const GridFunction& u, const BorelSet& set, double p) {
  require_same_grid(u.grid, set.grid);
  if (!(p >= 1.0)) throw InvalidArgument("lp_norm requires p >= 1");
  const WeightedGrid& g = *u.grid;
  if (std::isinf(p)) {
    double m = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (set.mask[i] && g.weight(i) > 0.0) m = std::max(m, std::abs(u.values[i]));
    }
    return m;
  }
  double s = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (set.mask[i]) s += std::pow(std::abs(u.values[i]), p) * g.weight(i);
  }
  return std::pow(s, 1.0 / p);
}

double lp_norm(const GridFunction& u, double p) { return lp_norm(u, BorelSet::all(u.grid), p); }

VectorField gradient(const GridFunction& u) {
  const WeightedGrid& g = *u.grid;
  const std::size_t n = g.dim();
  VectorField out{u.grid, n, std::vector<double>(g.size() * n, 0.0)};
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.inside(i)) continue;
    for (std::size_t d = 0; d < n; ++d) {
      auto up = g.neighbor(i, d, +1);
      auto dn = g.neighbor(i, d, -1);
      const bool has_up = up && g.inside(*up);
      const bool has_dn = dn && g.inside(*dn);
      const double h = g.spacing(d);
      double v = 0.0;
      if (has_up && has_dn) v = (u.values[*up] - u.values[*dn]) / (2.0 * h);
      else if (has_up) v = (u.values[*up] - u.values[i]) / h;
      else if (has_dn) v = (u.values[i] - u.values[*dn]) / h;
      out.values[i * n + d] = v;
    }
  }
  return out;
}

double dirichlet_energy(const GridFunction& u, const BorelSet& set, double p) {
  require_same_grid(u.grid, set.grid);
  if (!(p > 1.0) || std::isinf(p)) throw InvalidArgument("dirichlet_energy requires p in (1,inf)");
  const VectorField grad = gradient(u);
  const WeightedGrid& g = *u.grid;
  double e = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!set.mask[i]) continue;
    double n2 = 0.0;
    for (double c : grad.at(i)) n2 += c * c;
    e += std::pow(n2, 0.5 * p) * g.weight(i);
  }
  return e;
}

}  // namespace wsym
