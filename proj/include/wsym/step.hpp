#pragma once

#include <cstddef>
#include <vector>

namespace wsym {

/// Right-continuous non-increasing step map on [0, inf).
///
/// On [breakpoints[k], breakpoints[k+1]) the map takes values[k]; past the
/// last breakpoint it takes value_at_infinity. Below the first breakpoint the
/// leading value is returned.
struct MonotoneStep {
  std::vector<double> breakpoints;
  std::vector<double> values;
  double value_at_infinity = 0.0;

  double operator()(double t) const;
  double leading_value() const { return values.empty() ? value_at_infinity : values.front(); }
  std::size_t steps() const { return values.size(); }
  /// Structural check: increasing breakpoints, non-increasing values.
  bool well_formed() const;
};

}  // namespace wsym
