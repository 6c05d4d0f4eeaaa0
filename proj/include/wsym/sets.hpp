#pragma once

#include <cstdint>

#include "wsym/grid.hpp"

namespace wsym {

/// Weighted perimeter of omega relative to X.
///
/// The indicator is mollified with a separable binomial kernel (support 2h)
/// over cells of X, including three layers of ghost cells beyond the box
/// wherever those still lie in X, and e^W |grad| of the result is integrated.
/// Faces against the complement of X never contribute.
double weighted_perimeter(const BorelSet& omega, const WeightedGrid& grid);

/// Superlevel set of a random bump field with the given mu-mass
/// (attained within one cell weight). Deterministic in (grid, mass, seed).
BorelSet random_borel_set(const GridPtr& grid, double target_mass, std::uint64_t seed);

/// { |u| > t } restricted to cells of X.
BorelSet superlevel_set(const GridFunction& u, double t);

/// Nonnegative Lipschitz-type function vanishing outside omega: a capped
/// distance to the Dirichlet part of the complement, modulated by random
/// bumps and smoothed once.
GridFunction random_zero_trace_function(const BorelSet& omega, std::uint64_t seed);

}  // namespace wsym
