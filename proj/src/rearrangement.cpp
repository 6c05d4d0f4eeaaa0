#include "wsym/rearrangement.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "wsym/measure.hpp"

namespace wsym {

double MonotoneStep::operator()(double t) const {
  if (values.empty()) return value_at_infinity;
  if (t < breakpoints.front()) return values.front();
  // first breakpoint strictly greater than t
  const auto it = std::upper_bound(breakpoints.begin(), breakpoints.end(), t);
  const auto k = static_cast<std::size_t>(it - breakpoints.begin());
  if (k >= breakpoints.size()) return value_at_infinity;
  return values[k - 1];
}

bool MonotoneStep::well_formed() const {
  if (breakpoints.empty() || breakpoints.size() != values.size() + 1) return false;
  for (std::size_t k = 1; k < breakpoints.size(); ++k) {
    if (!(breakpoints[k] > breakpoints[k - 1])) return false;
  }
  for (std::size_t k = 1; k < values.size(); ++k) {
    if (values[k] > values[k - 1]) return false;
  }
  return values.empty() || value_at_infinity <= values.back();
}

namespace {

struct LevelBlock {
  double value;
  double mass;
};

// Distinct positive |u| values in descending order with their block masses.
std::vector<LevelBlock> level_blocks(const GridFunction& u, const WeightedGrid& grid) {
  if (!u.grid || u.values.size() != grid.size() || !u.grid->same_shape(grid)) {
    throw InvalidArgument("grid mismatch");
  }
  std::vector<std::size_t> order;
  order.reserve(grid.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.weight(i) > 0.0 && std::abs(u.values[i]) > 0.0) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return std::abs(u.values[a]) > std::abs(u.values[b]);
  });
  std::vector<LevelBlock> blocks;
  for (std::size_t j = 0; j < order.size();) {
    const double v = std::abs(u.values[order[j]]);
    double m = 0.0;
    while (j < order.size() && std::abs(u.values[order[j]]) == v) m += grid.weight(order[j++]);
    blocks.push_back({v, m});
  }
  return blocks;
}

}  // namespace

MonotoneStep distribution_function(const GridFunction& u, const WeightedGrid& grid) {
  const auto blocks = level_blocks(u, grid);
  MonotoneStep phi;
  phi.value_at_infinity = 0.0;
  const std::size_t n = blocks.size();
  // breakpoints 0 < v_n < ... < v_1, value on [v_{k+1}, v_k) is the mass above v_{k+1}
  std::vector<double> above(n + 1, 0.0);
  for (std::size_t k = 0; k < n; ++k) above[k + 1] = above[k] + blocks[k].mass;
  phi.breakpoints.push_back(0.0);
  if (n == 0) return phi;
  phi.values.push_back(above[n]);
  for (std::size_t k = n; k-- > 0;) {
    phi.breakpoints.push_back(blocks[k].value);
    if (k > 0) phi.values.push_back(above[k]);
  }
  return phi;
}

MonotoneStep decreasing_rearrangement(const GridFunction& u, const WeightedGrid& grid) {
  const auto blocks = level_blocks(u, grid);
  MonotoneStep r;
  r.value_at_infinity = 0.0;
  r.breakpoints.push_back(0.0);
  double s = 0.0;
  for (const auto& b : blocks) {
    s += b.mass;
    r.breakpoints.push_back(s);
    r.values.push_back(b.value);
  }
  return r;
}

std::vector<double> sigma_field(const IsoperimetricProfile& profile, const WeightedGrid& grid) {
  require_profile_grid(profile, grid);
  std::vector<double> sigma(grid.size(), kInfinity);
  Point x(grid.dim());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!grid.inside(i)) continue;
    grid.center(i, x);
    sigma[i] = profile.sigma(x);
  }
  return sigma;
}

GridFunction symmetrize(const GridFunction& u, const BorelSet& omega,
                        const IsoperimetricProfile& profile, const WeightedGrid& grid) {
  require_same_grid(u.grid, omega.grid);
  GridFunction extended(u.grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (omega.mask[i]) extended.values[i] = u.values[i];
  }
  const MonotoneStep rearranged = decreasing_rearrangement(extended, grid);
  const std::vector<double> sigma = sigma_field(profile, grid);
  GridFunction out(u.grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (grid.inside(i)) out.values[i] = rearranged(sigma[i]);
  }
  return out;
}

BorelSet symmetrize_set(const BorelSet& omega, const IsoperimetricProfile& profile,
                        const WeightedGrid& grid) {
  const double m = measure_of(omega, grid);
  const std::vector<double> sigma = sigma_field(profile, grid);
  if (omega.mask == BorelSet::all(omega.grid).mask) return BorelSet::all(omega.grid);
  BorelSet out(omega.grid);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out.mask[i] = grid.inside(i) && sigma[i] < m ? 1 : 0;
  }
  return out;
}

double EquimeasurabilityReport::worst_norm_gap() const {
  double g = 0.0;
  for (double v : norm_gaps) g = std::max(g, v);
  return g;
}

EquimeasurabilityReport equimeasurability_report(const GridFunction& u, const GridFunction& u_sharp,
                                                 const WeightedGrid& grid, std::size_t levels,
                                                 double p_test) {
  require_same_grid(u.grid, u_sharp.grid);
  EquimeasurabilityReport rep;
  const MonotoneStep pu = distribution_function(u, grid);
  const MonotoneStep ps = distribution_function(u_sharp, grid);
  const double top = std::max(pu.breakpoints.back(), ps.breakpoints.back());
  const std::size_t n = std::max<std::size_t>(levels, 1);
  for (std::size_t j = 0; j < n; ++j) {
    const double t = top * static_cast<double>(j) / static_cast<double>(n);
    rep.max_distribution_gap = std::max(rep.max_distribution_gap, std::abs(pu(t) - ps(t)));
  }
  rep.exponents = {1.0, 2.0, p_test, kInfinity};
  for (double p : rep.exponents) {
    const double a = lp_norm(u, p), b = lp_norm(u_sharp, p);
    const double gap = std::abs(a - b);
    rep.abs_norm_gaps.push_back(gap);
    rep.norm_gaps.push_back(a > 0.0 ? gap / a : gap);
  }
  return rep;
}

}  // namespace wsym
