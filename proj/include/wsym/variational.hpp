#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "wsym/grid.hpp"
#include "wsym/profiles.hpp"

namespace wsym {

/// Discrete p-energy sum_k c_k |g_k|^p, where every component of the
/// gradient sample g_k is coef * (u[a] - u[b]) and index -1 stands for a
/// prescribed zero value.
struct DiscreteEnergy {
  struct Component {
    int a = -1;
    int b = -1;
    double coef = 0.0;
  };
  std::size_t unknowns = 0;
  std::size_t components = 1;  // per sample
  std::vector<double> sample_weight;
  std::vector<Component> comps;  // sample-major

  std::size_t samples() const { return sample_weight.size(); }
  double value(const std::vector<double>& u, double p) const;
  /// dE/du
  void gradient(const std::vector<double>& u, double p, std::vector<double>& out) const;
};

/// Zero-trace discretization on omega: unknowns are the cells of omega.
///
/// Each cell contributes one gradient sample per corner (sign pattern), with
/// weight w_i / 2^N. A neighbour in omega gives a one-sided difference; a
/// neighbour in X outside omega (or a ghost cell in X) imposes zero at the
/// shared face; a neighbour outside X is replaced by the opposite side.
struct GridProblem {
  GridPtr grid;
  std::vector<int> local;            // cell -> unknown (or -1)
  std::vector<std::size_t> cells;    // unknown -> cell
  std::vector<double> mass;          // cell weights of the unknowns
  DiscreteEnergy energy;
  bool has_dirichlet = false;
};

GridProblem make_grid_problem(const BorelSet& omega);

/// Energy of a zero-trace function with respect to omega.
double solver_energy(const GridFunction& u, const BorelSet& omega, double p);

struct SolverOptions {
  double rel_tol = 1e-9;
  std::size_t max_iter = 100000;
  double armijo = 1e-4;
  double backtrack = 0.5;
  std::size_t precond_refresh = 5;
  double power_tol = 1e-12;
  std::size_t power_max_iter = 5000;
  bool bump_init = false;
  /// use the descent path even at p = q = 2
  bool force_descent = false;
};

struct EigenResult {
  double lambda = 0.0;
  GridFunction minimizer;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> history;
};

struct TorsionResult {
  double T = 0.0;
  GridFunction state;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::string note;
};

/// Result of a solve on an abstract energy (values per unknown).
struct RawResult {
  double value = 0.0;
  std::vector<double> u;
  std::size_t iterations = 0;
  double residual = 0.0;
  bool converged = false;
  std::vector<double> history;  // objective after each accepted step
};

/// inf E(u) / ||u||_q^p over the unknowns, with lumped masses.
RawResult minimize_rayleigh(const DiscreteEnergy& energy, const std::vector<double>& mass, double p,
                            double q, const SolverOptions& opt = {},
                            const std::vector<double>* init = nullptr);
/// sup (sum m u)^p / E(u).
RawResult maximize_torsion(const DiscreteEnergy& energy, const std::vector<double>& mass, double p,
                           const SolverOptions& opt = {});

EigenResult first_eigenvalue(const BorelSet& omega, const WeightedGrid& grid, double p, double q,
                             const SolverOptions& opt = {});
TorsionResult torsional_rigidity(const BorelSet& omega, const WeightedGrid& grid, double p,
                                 const SolverOptions& opt = {});

/// One-dimensional reduction for the family member of mass m: in the mass
/// coordinate s in (0, m), E = int |g'|^p q(s)^p ds and ||g||_q^q = int |g|^q ds,
/// g(m) = 0, free at s = 0.
struct ReducedProblem {
  std::vector<double> nodes;  // s_0 = 0 < ... < s_n = m
  DiscreteEnergy energy;
  std::vector<double> mass;
};

ReducedProblem make_reduced_problem(const IsoperimetricProfile& profile, double m, double p,
                                    std::size_t n = 8192);
double reduced_eigenvalue(const IsoperimetricProfile& profile, double m, double p, double q,
                          std::size_t n = 8192, bool* converged = nullptr);
double reduced_torsion(const IsoperimetricProfile& profile, double m, double p, std::size_t n = 8192,
                       bool* converged = nullptr);

/// Weighted L2 norm, over interior cells of omega, of
/// -div(|grad u|^{p-2} grad u) - |grad u|^{p-2} <grad W, grad u> - lambda ||u||_q^{p-q} |u|^{q-2} u.
double p_laplacian_residual(const GridFunction& u, const BorelSet& omega, const WeightedGrid& grid,
                            const Potential& potential, double p, double lambda, double q);

}  // namespace wsym
