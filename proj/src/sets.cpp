#include "wsym/sets.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>

#include "wsym/measure.hpp"

namespace wsym {
namespace {

constexpr std::size_t kPad = 3;

// Grid extended by kPad ghost layers on every side.
struct PaddedGrid {
  std::size_t dim = 0;
  std::size_t res = 0;  // padded cells per axis
  std::vector<std::size_t> strides;
  std::vector<std::uint8_t> in_x;
  std::vector<double> density;
  std::vector<std::size_t> origin;  // padded index -> grid index (or npos)

  static constexpr std::size_t npos = static_cast<std::size_t>(-1);

  std::size_t coord(std::size_t i, std::size_t axis) const { return (i / strides[axis]) % res; }
};

PaddedGrid pad(const WeightedGrid& g) {
  PaddedGrid p;
  p.dim = g.dim();
  p.res = g.resolution() + 2 * kPad;
  p.strides.resize(p.dim);
  std::size_t total = 1;
  for (std::size_t k = p.dim; k-- > 0;) {
    p.strides[k] = total;
    total *= p.res;
  }
  p.in_x.assign(total, 0);
  p.density.assign(total, 0.0);
  p.origin.assign(total, PaddedGrid::npos);
  Point x(p.dim);
  for (std::size_t i = 0; i < total; ++i) {
    bool real = true;
    std::size_t gi = 0;
    for (std::size_t k = 0; k < p.dim; ++k) {
      const auto c = static_cast<long>(p.coord(i, k)) - static_cast<long>(kPad);
      if (c < 0 || c >= static_cast<long>(g.resolution())) real = false;
      else gi += static_cast<std::size_t>(c) * g.stride(k);
      x[k] = g.box().lo[k] + (static_cast<double>(c) + 0.5) * g.spacing(k);
    }
    if (real) {
      p.origin[i] = gi;
      if (g.inside(gi)) {
        p.in_x[i] = 1;
        p.density[i] = g.density(gi);
      }
      continue;
    }
    if (!g.domain().contains(x)) continue;
    const double d = std::exp(g.potential().evaluate(x));
    if (d > 0.0 && std::isfinite(d)) {
      p.in_x[i] = 1;
      p.density[i] = d;
    }
  }
  return p;
}

}  // namespace

double weighted_perimeter(const BorelSet& omega, const WeightedGrid& grid) {
  if (!omega.grid || omega.mask.size() != grid.size() || !omega.grid->same_shape(grid)) {
    throw InvalidArgument("grid mismatch");
  }
  const PaddedGrid p = pad(grid);
  std::vector<double> chi(p.in_x.size(), 0.0);
  for (std::size_t i = 0; i < chi.size(); ++i) {
    if (p.origin[i] != PaddedGrid::npos && omega.mask[p.origin[i]]) chi[i] = 1.0;
  }
  static constexpr double kernel[5] = {1.0, 4.0, 6.0, 4.0, 1.0};
  std::vector<double> tmp(chi.size());
  for (std::size_t axis = 0; axis < p.dim; ++axis) {
    const std::size_t st = p.strides[axis];
    for (std::size_t i = 0; i < chi.size(); ++i) {
      tmp[i] = 0.0;
      if (!p.in_x[i]) continue;
      const auto c = static_cast<long>(p.coord(i, axis));
      double num = 0.0, den = 0.0;
      for (long k = -2; k <= 2; ++k) {
        const long cc = c + k;
        if (cc < 0 || cc >= static_cast<long>(p.res)) continue;
        const std::size_t j = static_cast<std::size_t>(static_cast<long>(i) + k * static_cast<long>(st));
        if (!p.in_x[j]) continue;
        num += kernel[k + 2] * chi[j];
        den += kernel[k + 2];
      }
      tmp[i] = den > 0.0 ? num / den : 0.0;
    }
    chi.swap(tmp);
  }
  double vol = grid.cell_volume();
  double per = 0.0;
  for (std::size_t i = 0; i < chi.size(); ++i) {
    if (!p.in_x[i]) continue;
    double n2 = 0.0;
    for (std::size_t axis = 0; axis < p.dim; ++axis) {
      const std::size_t st = p.strides[axis];
      const std::size_t c = p.coord(i, axis);
      const bool up = c + 1 < p.res && p.in_x[i + st];
      const bool dn = c > 0 && p.in_x[i - st];
      const double h = grid.spacing(axis);
      double d = 0.0;
      if (up && dn) d = (chi[i + st] - chi[i - st]) / (2.0 * h);
      else if (up) d = (chi[i + st] - chi[i]) / h;
      else if (dn) d = (chi[i] - chi[i - st]) / h;
      n2 += d * d;
    }
    per += p.density[i] * std::sqrt(n2) * vol;
  }
  return per;
}

namespace {

struct Bump {
  Point center;
  double width;
  double amplitude;
};

std::vector<Bump> random_bumps(const WeightedGrid& g, std::mt19937_64& rng, std::size_t lo,
                               std::size_t hi, double min_width, double max_width, bool signed_amp) {
  std::vector<double> w(g.weights().begin(), g.weights().end());
  std::discrete_distribution<std::size_t> pick(w.begin(), w.end());
  std::uniform_int_distribution<std::size_t> count(lo, hi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const std::size_t n = count(rng);
  std::vector<Bump> bumps;
  for (std::size_t j = 0; j < n; ++j) {
    Bump b;
    b.center = g.center(pick(rng));
    for (std::size_t k = 0; k < g.dim(); ++k) b.center[k] += (unit(rng) - 0.5) * g.spacing(k);
    b.width = min_width + (max_width - min_width) * unit(rng);
    b.amplitude = 0.5 + unit(rng);
    if (signed_amp && unit(rng) < 0.35) b.amplitude = -b.amplitude;
    bumps.push_back(std::move(b));
  }
  return bumps;
}

double bump_field(const std::vector<Bump>& bumps, std::span<const double> x) {
  double v = 0.0;
  for (const auto& b : bumps) {
    double r2 = 0.0;
    for (std::size_t k = 0; k < x.size(); ++k) r2 += (x[k] - b.center[k]) * (x[k] - b.center[k]);
    v += b.amplitude * std::exp(-0.5 * r2 / (b.width * b.width));
  }
  return v;
}

double box_extent(const WeightedGrid& g) {
  double e = 0.0;
  for (std::size_t k = 0; k < g.dim(); ++k) e = std::max(e, g.box().hi[k] - g.box().lo[k]);
  return e;
}

}  // namespace

BorelSet random_borel_set(const GridPtr& grid, double target_mass, std::uint64_t seed) {
  const WeightedGrid& g = *grid;
  if (!(target_mass > 0.0 && target_mass < g.total_mass())) {
    throw InvalidArgument("target mass must lie in (0, total grid mass)");
  }
  std::mt19937_64 rng(seed);
  const double ext = box_extent(g);
  const auto bumps = random_bumps(g, rng, 5, 20, std::max(4.0 * g.h(), 0.04 * ext), 0.3 * ext, true);
  std::vector<double> field(g.size(), 0.0);
  std::vector<std::size_t> order;
  Point x(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (!g.inside(i)) continue;
    g.center(i, x);
    field[i] = bump_field(bumps, x);
    order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return field[a] > field[b]; });
  // smallest superlevel set whose mass is nearest to the target
  BorelSet s(grid);
  double mass = 0.0;
  for (std::size_t i : order) {
    const double next = mass + g.weight(i);
    if (std::abs(next - target_mass) > std::abs(mass - target_mass)) break;
    mass = next;
    s.mask[i] = 1;
  }
  return s;
}

BorelSet superlevel_set(const GridFunction& u, double t) {
  BorelSet s(u.grid);
  for (std::size_t i = 0; i < u.size(); ++i) {
    s.mask[i] = u.grid->inside(i) && std::abs(u.values[i]) > t ? 1 : 0;
  }
  return s;
}

namespace {

// 1D squared distance transform (lower envelope of parabolas).
void edt_1d(const std::vector<double>& f, std::vector<double>& d, double h) {
  const std::size_t n = f.size();
  std::vector<std::size_t> v(n);
  std::vector<double> z(n + 1);
  std::size_t k = 0;
  std::size_t first = n;
  for (std::size_t q = 0; q < n; ++q) {
    if (std::isfinite(f[q])) {
      first = q;
      break;
    }
  }
  if (first == n) {
    std::fill(d.begin(), d.end(), kInfinity);
    return;
  }
  v[0] = first;
  z[0] = -kInfinity;
  z[1] = kInfinity;
  auto pos = [h](std::size_t q) { return static_cast<double>(q) * h; };
  for (std::size_t q = first + 1; q < n; ++q) {
    if (!std::isfinite(f[q])) continue;
    double s;
    for (;;) {
      const std::size_t r = v[k];
      s = ((f[q] + pos(q) * pos(q)) - (f[r] + pos(r) * pos(r))) / (2.0 * (pos(q) - pos(r)));
      if (s <= z[k] && k > 0) {
        --k;
        continue;
      }
      break;
    }
    ++k;
    v[k] = q;
    z[k] = s;
    z[k + 1] = kInfinity;
  }
  k = 0;
  for (std::size_t q = 0; q < n; ++q) {
    while (z[k + 1] < pos(q)) ++k;
    const double dq = pos(q) - pos(v[k]);
    d[q] = dq * dq + f[v[k]];
  }
}

}  // namespace

GridFunction random_zero_trace_function(const BorelSet& omega, std::uint64_t seed) {
  const WeightedGrid& g = *omega.grid;
  const PaddedGrid p = pad(g);
  // sources: cells of X (real or ghost) outside omega
  std::vector<double> dist(p.in_x.size(), kInfinity);
  for (std::size_t i = 0; i < dist.size(); ++i) {
    if (!p.in_x[i]) continue;
    const bool in_omega = p.origin[i] != PaddedGrid::npos && omega.mask[p.origin[i]];
    if (!in_omega) dist[i] = 0.0;
  }
  for (std::size_t axis = 0; axis < p.dim; ++axis) {
    const std::size_t st = p.strides[axis];
    std::vector<double> line(p.res), out(p.res);
    for (std::size_t i = 0; i < dist.size(); ++i) {
      if (p.coord(i, axis) != 0) continue;
      for (std::size_t c = 0; c < p.res; ++c) line[c] = dist[i + c * st];
      edt_1d(line, out, g.spacing(axis));
      for (std::size_t c = 0; c < p.res; ++c) dist[i + c * st] = out[c];
    }
  }
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double ext = box_extent(g);
  const double cap = (0.08 + 0.2 * unit(rng)) * ext;
  const auto bumps = random_bumps(g, rng, 3, 10, 4.0 * g.h(), 0.25 * ext, false);

  GridFunction u(omega.grid);
  Point x(g.dim());
  for (std::size_t i = 0; i < p.in_x.size(); ++i) {
    const std::size_t gi = p.origin[i];
    if (gi == PaddedGrid::npos || !omega.mask[gi]) continue;
    g.center(gi, x);
    const double d = std::min(std::sqrt(dist[i]), cap);
    u.values[gi] = d * (1.0 + bump_field(bumps, x));
  }
  // one [1,2,1] pass per axis, then re-mask
  for (std::size_t axis = 0; axis < g.dim(); ++axis) {
    std::vector<double> next(u.values.size(), 0.0);
    for (std::size_t i = 0; i < g.size(); ++i) {
      if (!omega.mask[i]) continue;
      double num = 2.0 * u.values[i], den = 2.0;
      for (int dir : {-1, 1}) {
        if (auto n = g.neighbor(i, axis, dir); n && g.inside(*n)) {
          num += u.values[*n];
          den += 1.0;
        } else if (!n && g.ghost_inside(i, axis, dir)) {
          den += 1.0;
        }
      }
      next[i] = num / den;
    }
    u.values.swap(next);
  }
  return u;
}

}  // namespace wsym
