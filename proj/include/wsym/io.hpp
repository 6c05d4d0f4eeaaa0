#pragma once

#include <iosfwd>
#include <string>

#include "wsym/grid.hpp"
#include "wsym/profiles.hpp"
#include "wsym/step.hpp"

namespace wsym {

/// Rows `index,x1,...,xN,value` in cell order.
void write_csv(std::ostream& os, const GridFunction& u);
void write_csv(std::ostream& os, const BorelSet& s);
/// Reads values back onto `grid`; the cell centres must match.
GridFunction read_grid_function_csv(std::istream& is, const GridPtr& grid);
BorelSet read_set_csv(std::istream& is, const GridPtr& grid);

/// Magic, dim, resolution, box bounds, then one float64 per cell (row-major,
/// last axis fastest). All fields little-endian.
void write_binary(std::ostream& os, const GridFunction& u);
void write_binary(std::ostream& os, const BorelSet& s);
GridFunction read_grid_function_binary(std::istream& is, const GridPtr& grid);
BorelSet read_set_binary(std::istream& is, const GridPtr& grid);

/// Rows `breakpoint,value`; the last row carries the final breakpoint and the
/// value at infinity.
void write_csv(std::ostream& os, const MonotoneStep& step);
MonotoneStep read_step_csv(std::istream& is);

/// Rows `t,M` of the profile's cumulative mass.
void write_profile_table_csv(std::ostream& os, const IsoperimetricProfile& profile, double t0,
                             double t1, std::size_t nodes);

void write_file(const std::string& path, const std::string& contents);

}  // namespace wsym
