#pragma once

#include <vector>

#include "wsym/grid.hpp"
#include "wsym/profiles.hpp"
#include "wsym/step.hpp"

namespace wsym {

/// Phi_u(t) = mu{|u| > t}, exact on the sorted distinct values of |u|.
MonotoneStep distribution_function(const GridFunction& u, const WeightedGrid& grid);

/// u*(s) = inf{ t >= 0 : Phi_u(t) <= s }; ties share one weight block.
MonotoneStep decreasing_rearrangement(const GridFunction& u, const WeightedGrid& grid);

/// Per-cell sigma_i = M(param(x_i)); zero weight cells get +infinity.
std::vector<double> sigma_field(const IsoperimetricProfile& profile, const WeightedGrid& grid);

/// u#(x_i) = (u restricted to omega)*(sigma_i).
GridFunction symmetrize(const GridFunction& u, const BorelSet& omega,
                        const IsoperimetricProfile& profile, const WeightedGrid& grid);

/// { x : M(param(x)) < mu(omega) }.
BorelSet symmetrize_set(const BorelSet& omega, const IsoperimetricProfile& profile,
                        const WeightedGrid& grid);

struct EquimeasurabilityReport {
  double max_distribution_gap = 0.0;
  std::vector<double> exponents;  // 1, 2, p_test, inf
  std::vector<double> norm_gaps;  // relative unless ||u|| = 0
  std::vector<double> abs_norm_gaps;
  double worst_norm_gap() const;
};

EquimeasurabilityReport equimeasurability_report(const GridFunction& u, const GridFunction& u_sharp,
                                                 const WeightedGrid& grid, std::size_t levels,
                                                 double p_test = 3.0);

}  // namespace wsym
