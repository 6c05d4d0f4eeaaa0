#include "wsym/variational.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <optional>

#include <Eigen/Sparse>
#include <Eigen/SparseCholesky>
#include <boost/math/quadrature/gauss.hpp>

#include "wsym/measure.hpp"

namespace wsym {
namespace {

using SpMat = Eigen::SparseMatrix<double>;
using Vec = Eigen::VectorXd;

double sample_norm2(const DiscreteEnergy& e, const std::vector<double>& u, std::size_t k) {
  double n2 = 0.0;
  for (std::size_t d = 0; d < e.components; ++d) {
    const auto& c = e.comps[k * e.components + d];
    if (c.coef == 0.0) continue;
    const double ua = c.a >= 0 ? u[static_cast<std::size_t>(c.a)] : 0.0;
    const double ub = c.b >= 0 ? u[static_cast<std::size_t>(c.b)] : 0.0;
    const double g = c.coef * (ua - ub);
    n2 += g * g;
  }
  return n2;
}

// sum_k weight_k * omega_k * coef^2 (e_a - e_b)(e_a - e_b)^T
SpMat assemble(const DiscreteEnergy& e, const std::vector<double>& sample_scale) {
  std::vector<Eigen::Triplet<double>> trip;
  trip.reserve(e.comps.size() * 4);
  for (std::size_t k = 0; k < e.samples(); ++k) {
    const double wk = e.sample_weight[k] * sample_scale[k];
    for (std::size_t d = 0; d < e.components; ++d) {
      const auto& c = e.comps[k * e.components + d];
      if (c.coef == 0.0) continue;
      const double v = wk * c.coef * c.coef;
      if (c.a >= 0) trip.emplace_back(c.a, c.a, v);
      if (c.b >= 0) trip.emplace_back(c.b, c.b, v);
      if (c.a >= 0 && c.b >= 0) {
        trip.emplace_back(c.a, c.b, -v);
        trip.emplace_back(c.b, c.a, -v);
      }
    }
  }
  const auto n = static_cast<Eigen::Index>(e.unknowns);
  SpMat K(n, n);
  K.setFromTriplets(trip.begin(), trip.end());
  return K;
}

double q_norm(const std::vector<double>& u, const std::vector<double>& mass, double q) {
  double s = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) s += std::pow(std::abs(u[i]), q) * mass[i];
  return std::pow(s, 1.0 / q);
}

void normalize_q(std::vector<double>& u, const std::vector<double>& mass, double q) {
  const double n = q_norm(u, mass, q);
  if (n > 0.0) {
    for (double& v : u) v /= n;
  }
}

// shift for factorizations that must also cope with pure-Neumann problems
double regular_shift(const SpMat& K, const std::vector<double>& mass) {
  const double tk = K.diagonal().sum();
  const double tm = std::accumulate(mass.begin(), mass.end(), 0.0);
  return tm > 0.0 ? 1e-10 * tk / tm : 0.0;
}

SpMat with_mass(SpMat K, const std::vector<double>& mass, double shift) {
  for (std::size_t i = 0; i < mass.size(); ++i) {
    const auto j = static_cast<Eigen::Index>(i);
    K.coeffRef(j, j) += shift * mass[i];
  }
  return K;
}

RawResult inverse_power(const DiscreteEnergy& energy, const std::vector<double>& mass,
                        const SolverOptions& opt) {
  const std::size_t n = energy.unknowns;
  const SpMat K = assemble(energy, std::vector<double>(energy.samples(), 1.0));
  const double shift = regular_shift(K, mass);
  Eigen::SimplicialLDLT<SpMat> solver(with_mass(K, mass, shift));
  RawResult r;
  if (solver.info() != Eigen::Success) return r;
  Vec M(static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) M(static_cast<Eigen::Index>(i)) = mass[i];
  Vec u = Vec::Ones(static_cast<Eigen::Index>(n));
  double lambda = u.dot(K * u) / u.dot(M.asDiagonal() * u);
  for (std::size_t it = 1; it <= opt.power_max_iter; ++it) {
    Vec v = solver.solve(M.asDiagonal() * u);
    v /= std::sqrt(v.dot(M.asDiagonal() * v));
    const double next = v.dot(K * v);
    u = v;
    r.iterations = it;
    const double change = std::abs(next - lambda) / std::max(std::abs(next), 1e-300);
    lambda = next;
    r.history.push_back(lambda);
    if (change < opt.power_tol) {
      r.converged = true;
      break;
    }
  }
  const Vec res = K * u - lambda * (M.asDiagonal() * u);
  r.residual = res.norm() / std::max(lambda * (M.asDiagonal() * u).norm(), 1e-300);
  if (u.sum() < 0) u = -u;
  r.value = lambda;
  r.u.assign(u.data(), u.data() + u.size());
  for (double& v : r.u) v = std::abs(v) < 1e-300 ? 0.0 : v;
  return r;
}

// Weighted Laplacian approximating the Hessian of the p-energy at u.
SpMat p_preconditioner(const DiscreteEnergy& e, const std::vector<double>& u, double p) {
  std::vector<double> n2(e.samples());
  double mean = 0.0, wsum = 0.0;
  for (std::size_t k = 0; k < e.samples(); ++k) {
    n2[k] = sample_norm2(e, u, k);
    mean += e.sample_weight[k] * n2[k];
    wsum += e.sample_weight[k];
  }
  mean = wsum > 0.0 ? mean / wsum : 0.0;
  const double eps2 = std::max(1e-6 * mean, 1e-300);
  const double c = p >= 2.0 ? p * (p - 1.0) : p;
  std::vector<double> scale(e.samples());
  for (std::size_t k = 0; k < e.samples(); ++k) {
    scale[k] = c * std::pow(n2[k] + eps2, 0.5 * (p - 2.0));
  }
  return assemble(e, scale);
}

struct Factor {
  Eigen::SimplicialLDLT<SpMat> ldlt;
  bool analyzed = false;

  bool refresh(const SpMat& P) {
    if (!analyzed) {
      ldlt.analyzePattern(P);
      analyzed = true;
    }
    ldlt.factorize(P);
    return ldlt.info() == Eigen::Success;
  }
  std::vector<double> solve(const std::vector<double>& g) {
    Eigen::Map<const Vec> gv(g.data(), static_cast<Eigen::Index>(g.size()));
    Vec d = ldlt.solve(gv);
    return {d.data(), d.data() + d.size()};
  }
};

}  // namespace

double DiscreteEnergy::value(const std::vector<double>& u, double p) const {
  double e = 0.0;
  for (std::size_t k = 0; k < samples(); ++k) {
    const double n2 = sample_norm2(*this, u, k);
    if (n2 > 0.0) e += sample_weight[k] * (p == 2.0 ? n2 : std::pow(n2, 0.5 * p));
  }
  return e;
}

void DiscreteEnergy::gradient(const std::vector<double>& u, double p, std::vector<double>& out) const {
  out.assign(unknowns, 0.0);
  for (std::size_t k = 0; k < samples(); ++k) {
    const double n2 = sample_norm2(*this, u, k);
    if (n2 <= 0.0) continue;
    const double f = sample_weight[k] * p * (p == 2.0 ? 1.0 : std::pow(n2, 0.5 * (p - 2.0)));
    for (std::size_t d = 0; d < components; ++d) {
      const auto& c = comps[k * components + d];
      if (c.coef == 0.0) continue;
      const double ua = c.a >= 0 ? u[static_cast<std::size_t>(c.a)] : 0.0;
      const double ub = c.b >= 0 ? u[static_cast<std::size_t>(c.b)] : 0.0;
      const double g = f * c.coef * c.coef * (ua - ub);
      if (c.a >= 0) out[static_cast<std::size_t>(c.a)] += g;
      if (c.b >= 0) out[static_cast<std::size_t>(c.b)] -= g;
    }
  }
}

GridProblem make_grid_problem(const BorelSet& omega) {
  if (!omega.grid) throw InvalidArgument("grid mismatch: missing grid");
  const WeightedGrid& g = *omega.grid;
  GridProblem pb;
  pb.grid = omega.grid;
  pb.local.assign(g.size(), -1);
  for (std::size_t i = 0; i < g.size(); ++i) {
    if (omega.mask[i] && g.inside(i)) {
      pb.local[i] = static_cast<int>(pb.cells.size());
      pb.cells.push_back(i);
      pb.mass.push_back(g.weight(i));
    }
  }
  const std::size_t n = g.dim();
  const std::size_t corners = std::size_t{1} << n;
  DiscreteEnergy& e = pb.energy;
  e.unknowns = pb.cells.size();
  e.components = n;
  e.sample_weight.reserve(pb.cells.size() * corners);
  e.comps.reserve(pb.cells.size() * corners * n);

  using Comp = DiscreteEnergy::Component;
  auto side = [&](std::size_t c, std::size_t axis, int dir) -> std::optional<Comp> {
    const double h = g.spacing(axis);
    const int self = pb.local[c];
    if (auto nb = g.neighbor(c, axis, dir)) {
      if (pb.local[*nb] >= 0) return Comp{pb.local[*nb], self, 1.0 / h};
      if (g.inside(*nb)) return Comp{-1, self, 2.0 / h};
      return std::nullopt;
    }
    if (g.ghost_inside(c, axis, dir)) return Comp{-1, self, 2.0 / h};
    return std::nullopt;
  };

  std::vector<Comp> plus(n), minus(n);
  for (std::size_t c : pb.cells) {
    for (std::size_t axis = 0; axis < n; ++axis) {
      const auto up = side(c, axis, +1);
      const auto dn = side(c, axis, -1);
      plus[axis] = up ? *up : (dn ? *dn : Comp{-1, -1, 0.0});
      minus[axis] = dn ? *dn : (up ? *up : Comp{-1, -1, 0.0});
      if ((plus[axis].a < 0 && plus[axis].coef > 0) || (minus[axis].a < 0 && minus[axis].coef > 0)) {
        pb.has_dirichlet = true;
      }
    }
    const double w = g.weight(c) / static_cast<double>(corners);
    for (std::size_t s = 0; s < corners; ++s) {
      e.sample_weight.push_back(w);
      for (std::size_t axis = 0; axis < n; ++axis) {
        e.comps.push_back(((s >> axis) & 1U) ? minus[axis] : plus[axis]);
      }
    }
  }
  return pb;
}

double solver_energy(const GridFunction& u, const BorelSet& omega, double p) {
  require_same_grid(u.grid, omega.grid);
  const GridProblem pb = make_grid_problem(omega);
  std::vector<double> x(pb.cells.size());
  for (std::size_t k = 0; k < pb.cells.size(); ++k) x[k] = u.values[pb.cells[k]];
  return pb.energy.value(x, p);
}

RawResult minimize_rayleigh(const DiscreteEnergy& energy, const std::vector<double>& mass, double p,
                            double q, const SolverOptions& opt, const std::vector<double>* init) {
  if (!(p > 1.0) || std::isinf(p)) throw InvalidArgument("p must lie in (1, inf)");
  if (!(q >= 1.0) || std::isinf(q)) throw InvalidArgument("q must be finite and >= 1");
  if (energy.unknowns == 0) throw InvalidArgument("empty problem");
  if (p == 2.0 && q == 2.0 && !opt.force_descent && !init && !opt.bump_init) {
    return inverse_power(energy, mass, opt);
  }
  std::vector<double> u;
  if (init) {
    u = *init;
  } else if (!opt.bump_init) {
    SolverOptions warm = opt;
    warm.power_tol = 1e-10;
    u = inverse_power(energy, mass, warm).u;
  }
  if (u.size() != energy.unknowns) u.assign(energy.unknowns, 1.0);
  for (double& v : u) v = std::abs(v);
  normalize_q(u, mass, q);

  RawResult r;
  double R = energy.value(u, p);
  r.history.push_back(R);
  Factor factor;
  std::vector<double> gE, grad(energy.unknowns), trial(energy.unknowns);
  double step0 = 1.0;
  double shift = 0.0;
  for (std::size_t it = 1; it <= opt.max_iter; ++it) {
    if ((it - 1) % opt.precond_refresh == 0) {
      SpMat P = p_preconditioner(energy, u, p);
      if (shift == 0.0) shift = regular_shift(P, mass);
      if (!factor.refresh(with_mass(P, mass, shift))) break;
    }
    energy.gradient(u, p, gE);
    for (std::size_t i = 0; i < u.size(); ++i) {
      const double a = std::abs(u[i]);
      const double nu = mass[i] * (q == 1.0 ? 1.0 : std::pow(a, q - 1.0)) * (u[i] >= 0 ? 1.0 : -1.0);
      grad[i] = gE[i] - p * R * nu;
    }
    std::vector<double> dir = factor.solve(grad);
    double slope = 0.0;
    for (std::size_t i = 0; i < u.size(); ++i) {
      dir[i] = -dir[i];
      slope += grad[i] * dir[i];
    }
    r.iterations = it;
    if (!(slope < 0.0)) {
      r.converged = true;
      break;
    }
    double alpha = step0;
    double next = R;
    bool accepted = false;
    while (alpha > 1e-14) {
      for (std::size_t i = 0; i < u.size(); ++i) trial[i] = std::abs(u[i] + alpha * dir[i]);
      normalize_q(trial, mass, q);
      next = energy.value(trial, p);
      if (next <= R + opt.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= opt.backtrack;
    }
    if (!accepted) {
      r.converged = std::abs(slope) <= 1e-12 * std::max(R, 1e-300);
      r.residual = std::abs(slope) / std::max(R, 1e-300);
      break;
    }
    step0 = std::min(1.0, 2.0 * alpha);
    u.swap(trial);
    const double change = std::abs(R - next) / std::max(std::abs(next), 1e-300);
    R = next;
    r.history.push_back(R);
    r.residual = change;
    if (change < opt.rel_tol) {
      r.converged = true;
      break;
    }
  }
  r.value = R;
  r.u = std::move(u);
  return r;
}

RawResult maximize_torsion(const DiscreteEnergy& energy, const std::vector<double>& mass, double p,
                           const SolverOptions& opt) {
  if (!(p > 1.0) || std::isinf(p)) throw InvalidArgument("p must lie in (1, inf)");
  if (energy.unknowns == 0) throw InvalidArgument("empty problem");
  const std::size_t n = energy.unknowns;
  RawResult r;
  const SpMat K = assemble(energy, std::vector<double>(energy.samples(), 1.0));
  Eigen::SimplicialLDLT<SpMat> ldlt(K);
  if (ldlt.info() != Eigen::Success) return r;
  Eigen::Map<const Vec> m(mass.data(), static_cast<Eigen::Index>(n));
  // E = u'Ku, so the minimizer of E/2 - m.u solves K u = m
  Vec u2 = ldlt.solve(m);
  std::vector<double> u(u2.data(), u2.data() + u2.size());
  auto linear = [&](const std::vector<double>& v) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i) s += mass[i] * v[i];
    return s;
  };
  if (p == 2.0) {
    const double E = energy.value(u, 2.0);
    r.value = linear(u) * linear(u) / E;
    const Vec res = K * u2 - m;
    r.residual = res.norm() / m.norm();
    r.converged = ldlt.info() == Eigen::Success;
    r.iterations = 1;
    r.u = std::move(u);
    return r;
  }
  for (double& v : u) v = std::abs(v);
  {
    // best multiple for the p-functional
    const double E = energy.value(u, p), L = linear(u);
    const double s = std::pow(L / E, 1.0 / (p - 1.0));
    for (double& v : u) v *= s;
  }
  auto J = [&](const std::vector<double>& v) { return energy.value(v, p) / p - linear(v); };
  double Jv = J(u);
  r.history.push_back(Jv);
  Factor factor;
  std::vector<double> gE, grad(n), trial(n);
  const double shift = regular_shift(K, mass);
  double step0 = 1.0;
  for (std::size_t it = 1; it <= opt.max_iter; ++it) {
    if ((it - 1) % opt.precond_refresh == 0) {
      SpMat P = p_preconditioner(energy, u, p);
      if (!factor.refresh(with_mass(P, mass, shift))) break;
    }
    energy.gradient(u, p, gE);
    for (std::size_t i = 0; i < n; ++i) grad[i] = gE[i] / p - mass[i];
    std::vector<double> dir = factor.solve(grad);
    double slope = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      dir[i] = -dir[i] * p;
      slope += grad[i] * dir[i];
    }
    r.iterations = it;
    if (!(slope < 0.0)) {
      r.converged = true;
      break;
    }
    double alpha = step0, next = Jv;
    bool accepted = false;
    while (alpha > 1e-14) {
      for (std::size_t i = 0; i < n; ++i) trial[i] = std::abs(u[i] + alpha * dir[i]);
      next = J(trial);
      if (next <= Jv + opt.armijo * alpha * slope) {
        accepted = true;
        break;
      }
      alpha *= opt.backtrack;
    }
    if (!accepted) {
      r.converged = std::abs(slope) <= 1e-12 * std::abs(Jv);
      r.residual = std::abs(slope) / std::max(std::abs(Jv), 1e-300);
      break;
    }
    step0 = std::min(1.0, 2.0 * alpha);
    u.swap(trial);
    const double change = std::abs(Jv - next) / std::max(std::abs(next), 1e-300);
    Jv = next;
    r.history.push_back(Jv);
    r.residual = change;
    if (change < opt.rel_tol * 1e-2) {
      r.converged = true;
      break;
    }
  }
  const double E = energy.value(u, p);
  r.value = std::pow(linear(u), p) / E;
  r.u = std::move(u);
  return r;
}

EigenResult first_eigenvalue(const BorelSet& omega, const WeightedGrid& grid, double p, double q,
                             const SolverOptions& opt) {
  if (!omega.grid || !omega.grid->same_shape(grid)) throw InvalidArgument("grid mismatch");
  if (!(measure_of(omega, grid) > 0.0)) throw InvalidArgument("omega has zero measure");
  const GridProblem pb = make_grid_problem(omega);
  RawResult raw = minimize_rayleigh(pb.energy, pb.mass, p, q, opt);
  EigenResult out;
  out.lambda = raw.value;
  out.iterations = raw.iterations;
  out.residual = raw.residual;
  out.converged = raw.converged;
  out.history = std::move(raw.history);
  out.minimizer = GridFunction(omega.grid);
  for (std::size_t k = 0; k < pb.cells.size(); ++k) out.minimizer.values[pb.cells[k]] = raw.u[k];
  return out;
}

TorsionResult torsional_rigidity(const BorelSet& omega, const WeightedGrid& grid, double p,
                                 const SolverOptions& opt) {
  if (!omega.grid || !omega.grid->same_shape(grid)) throw InvalidArgument("grid mismatch");
  if (!(measure_of(omega, grid) > 0.0)) throw InvalidArgument("omega has zero measure");
  const GridProblem pb = make_grid_problem(omega);
  TorsionResult out;
  out.state = GridFunction(omega.grid);
  if (!pb.has_dirichlet) {
    out.T = kInfinity;
    out.note = "no Dirichlet boundary: nonzero constants are admissible";
    return out;
  }
  RawResult raw = maximize_torsion(pb.energy, pb.mass, p, opt);
  out.T = raw.value;
  out.iterations = raw.iterations;
  out.residual = raw.residual;
  out.converged = raw.converged;
  for (std::size_t k = 0; k < pb.cells.size(); ++k) out.state.values[pb.cells[k]] = raw.u[k];
  return out;
}

ReducedProblem make_reduced_problem(const IsoperimetricProfile& profile, double m, double p,
                                    std::size_t n) {
  if (!(m > 0.0)) throw InvalidArgument("reduced problem needs positive mass");
  if (n < 8) throw InvalidArgument("reduced problem needs at least 8 elements");
  ReducedProblem rp;
  rp.nodes.resize(n + 1);
  const double half_pi = 0.5 * std::numbers::pi;
  for (std::size_t k = 0; k <= n; ++k) {
    const double s = std::sin(half_pi * static_cast<double>(k) / static_cast<double>(n));
    rp.nodes[k] = m * s * s;
  }
  rp.nodes[n] = m;
  DiscreteEnergy& e = rp.energy;
  e.unknowns = n;
  e.components = 1;
  rp.mass.assign(n, 0.0);
  auto qp = [&](double s) { return std::pow(profile.q(s), p); };
  for (std::size_t k = 0; k < n; ++k) {
    const double a = rp.nodes[k], b = rp.nodes[k + 1];
    const double len = b - a;
    e.sample_weight.push_back(boost::math::quadrature::gauss<double, 7>::integrate(qp, a, b));
    e.comps.push_back({k + 1 < n ? static_cast<int>(k + 1) : -1, static_cast<int>(k), 1.0 / len});
    rp.mass[k] += 0.5 * len;
    if (k + 1 < n) rp.mass[k + 1] += 0.5 * len;
  }
  return rp;
}

double reduced_eigenvalue(const IsoperimetricProfile& profile, double m, double p, double q,
                          std::size_t n, bool* converged) {
  const ReducedProblem rp = make_reduced_problem(profile, m, p, n);
  const RawResult r = minimize_rayleigh(rp.energy, rp.mass, p, q);
  if (converged) *converged = r.converged;
  return r.value;
}

double reduced_torsion(const IsoperimetricProfile& profile, double m, double p, std::size_t n,
                       bool* converged) {
  const ReducedProblem rp = make_reduced_problem(profile, m, p, n);
  const RawResult r = maximize_torsion(rp.energy, rp.mass, p);
  if (converged) *converged = r.converged;
  return r.value;
}

double p_laplacian_residual(const GridFunction& u, const BorelSet& omega, const WeightedGrid& grid,
                            const Potential& potential, double p, double lambda, double q) {
  require_same_grid(u.grid, omega.grid);
  if (!potential.gradient) throw InvalidArgument("potential has no gradient");
  const std::size_t n = grid.dim();
  const VectorField g = gradient(u);
  std::vector<double> flux(grid.size() * n, 0.0);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    const auto gi = g.at(i);
    double n2 = 0.0;
    for (double c : gi) n2 += c * c;
    const double f = n2 > 0.0 ? std::pow(n2, 0.5 * (p - 2.0)) : 0.0;
    for (std::size_t d = 0; d < n; ++d) flux[i * n + d] = f * gi[d];
  }
  const double unorm = lp_norm(u, omega, q);
  const double scale = unorm > 0.0 ? std::pow(unorm, p - q) : 0.0;
  // interior: two cells of omega on both sides along every axis
  auto interior = [&](std::size_t i) {
    if (!omega.mask[i]) return false;
    for (std::size_t d = 0; d < n; ++d) {
      for (int dir : {-1, 1}) {
        auto a = grid.neighbor(i, d, dir);
        if (!a || !omega.mask[*a]) return false;
        auto b = grid.neighbor(*a, d, dir);
        if (!b || !omega.mask[*b]) return false;
      }
    }
    return true;
  };
  Point x(n), gw(n);
  double acc = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (!interior(i)) continue;
    double div = 0.0;
    for (std::size_t d = 0; d < n; ++d) {
      const std::size_t up = *grid.neighbor(i, d, +1), dn = *grid.neighbor(i, d, -1);
      div += (flux[up * n + d] - flux[dn * n + d]) / (2.0 * grid.spacing(d));
    }
    grid.center(i, x);
    potential.gradient(x, gw);
    double drift = 0.0;
    for (std::size_t d = 0; d < n; ++d) drift += gw[d] * flux[i * n + d];
    const double ui = u.values[i];
    const double src = lambda * scale * (ui == 0.0 ? 0.0 : std::pow(std::abs(ui), q - 2.0) * ui);
    const double r = -div - drift - src;
    acc += r * r * grid.weight(i);
  }
  return std::sqrt(acc);
}

}  // namespace wsym
