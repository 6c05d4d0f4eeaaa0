#pragma once

#include <limits>
#include <optional>

#include "wsym/grid.hpp"

namespace wsym {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

/// Builds the weighted grid for (X, e^W dx).
///
/// Bounded X uses its own box. Unbounded X is truncated to a box whose radius
/// is chosen from radial quadrature of e^W along a fan of rays so that the
/// estimated exterior mass is at most tail_tolerance * (total mass). Passing
/// an explicit box skips the truncation search (required for infinite mass).
WeightedGrid build_grid(const DomainSpec& domain, const Potential& potential,
                        std::size_t resolution, double tail_tolerance,
                        std::optional<Box> explicit_box = std::nullopt);

GridPtr make_grid(const DomainSpec& domain, const Potential& potential,
                  std::size_t resolution, double tail_tolerance,
                  std::optional<Box> explicit_box = std::nullopt);

double measure_of(const BorelSet& set, const WeightedGrid& grid);

/// (sum_{i in set} |u_i|^p w_i)^{1/p}; p = infinity gives the mu-essential sup.
double lp_norm(const GridFunction& u, const BorelSet& set, double p);
double lp_norm(const GridFunction& u, double p);

/// Central differences in the interior, one-sided where a neighbour is
/// missing or outside X; zero on cells outside X.
VectorField gradient(const GridFunction& u);

/// sum_{i in set} |grad u|_i^p w_i with the central-difference gradient.
double dirichlet_energy(const GridFunction& u, const BorelSet& set, double p);

}  // namespace wsym
