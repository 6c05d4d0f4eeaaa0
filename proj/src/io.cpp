#include "wsym/io.hpp"

#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>
#include <istream>
#include <limits>
#include <ostream>
#include <sstream>

namespace wsym {
namespace {

constexpr char kMagic[8] = {'W', 'S', 'Y', 'M', 'G', 'F', '0', '1'};

static_assert(std::endian::native == std::endian::little, "binary layout assumes little-endian hosts");

void put_u64(std::ostream& os, std::uint64_t v) { os.write(reinterpret_cast<const char*>(&v), 8); }
void put_f64(std::ostream& os, double v) { os.write(reinterpret_cast<const char*>(&v), 8); }

std::uint64_t get_u64(std::istream& is) {
  std::uint64_t v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 8)) throw InvalidArgument("truncated binary field");
  return v;
}
double get_f64(std::istream& is) {
  double v = 0;
  if (!is.read(reinterpret_cast<char*>(&v), 8)) throw InvalidArgument("truncated binary field");
  return v;
}

template <class Value>
void write_rows(std::ostream& os, const WeightedGrid& g, Value value) {
  os << "index";
  for (std::size_t k = 0; k < g.dim(); ++k) os << ",x" << k + 1;
  os << ",value\n";
  const auto old = os.precision(17);
  Point x(g.dim());
  for (std::size_t i = 0; i < g.size(); ++i) {
    g.center(i, x);
    os << i;
    for (double c : x) os << ',' << c;
    os << ',' << value(i) << '\n';
  }
  os.precision(old);
}

std::vector<double> read_rows(std::istream& is, const WeightedGrid& g) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("index", 0) != 0) throw InvalidArgument("missing CSV header");
  std::vector<double> values(g.size(), 0.0);
  std::vector<bool> seen(g.size(), false);
  Point x(g.dim());
  const double tol = 1e-9 * std::max(1.0, g.h());
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    std::stringstream ss(line);
    std::string field;
    std::vector<double> f;
    while (std::getline(ss, field, ',')) f.push_back(std::stod(field));
    if (f.size() != g.dim() + 2) throw InvalidArgument("CSV row has wrong width");
    const auto i = static_cast<std::size_t>(f[0]);
    if (i >= g.size()) throw InvalidArgument("CSV index out of range");
    g.center(i, x);
    for (std::size_t k = 0; k < g.dim(); ++k) {
      if (std::abs(x[k] - f[k + 1]) > tol * std::max(1.0, std::abs(x[k]))) {
        throw InvalidArgument("CSV cell centre does not match the grid");
      }
    }
    values[i] = f.back();
    seen[i] = true;
  }
  for (bool s : seen) {
    if (!s) throw InvalidArgument("CSV is missing cells");
  }
  return values;
}

void write_header(std::ostream& os, const WeightedGrid& g) {
  os.write(kMagic, 8);
  put_u64(os, g.dim());
  put_u64(os, g.resolution());
  for (std::size_t k = 0; k < g.dim(); ++k) {
    put_f64(os, g.box().lo[k]);
    put_f64(os, g.box().hi[k]);
  }
}

void read_header(std::istream& is, const WeightedGrid& g) {
  char magic[8];
  if (!is.read(magic, 8) || std::memcmp(magic, kMagic, 8) != 0) throw InvalidArgument("bad binary magic");
  if (get_u64(is) != g.dim() || get_u64(is) != g.resolution()) {
    throw InvalidArgument("binary header does not match the grid");
  }
  for (std::size_t k = 0; k < g.dim(); ++k) {
    if (get_f64(is) != g.box().lo[k] || get_f64(is) != g.box().hi[k]) {
      throw InvalidArgument("binary box does not match the grid");
    }
  }
}

BorelSet to_set(const GridPtr& grid, const std::vector<double>& v) {
  BorelSet s(grid);
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (v[i] != 0.0 && v[i] != 1.0) throw InvalidArgument("set values must be 0 or 1");
    if (v[i] == 1.0 && !grid->inside(i)) throw InvalidArgument("set contains a cell outside X");
    s.mask[i] = v[i] == 1.0 ? 1 : 0;
  }
  return s;
}

}  // namespace

void write_csv(std::ostream& os, const GridFunction& u) {
  write_rows(os, *u.grid, [&](std::size_t i) { return u.values[i]; });
}

void write_csv(std::ostream& os, const BorelSet& s) {
  write_rows(os, *s.grid, [&](std::size_t i) { return static_cast<int>(s.mask[i]); });
}

GridFunction read_grid_function_csv(std::istream& is, const GridPtr& grid) {
  return GridFunction(grid, read_rows(is, *grid));
}

BorelSet read_set_csv(std::istream& is, const GridPtr& grid) { return to_set(grid, read_rows(is, *grid)); }

void write_binary(std::ostream& os, const GridFunction& u) {
  write_header(os, *u.grid);
  for (double v : u.values) put_f64(os, v);
}

void write_binary(std::ostream& os, const BorelSet& s) {
  write_header(os, *s.grid);
  for (auto m : s.mask) put_f64(os, m ? 1.0 : 0.0);
}

GridFunction read_grid_function_binary(std::istream& is, const GridPtr& grid) {
  read_header(is, *grid);
  GridFunction u(grid);
  for (double& v : u.values) v = get_f64(is);
  return u;
}

BorelSet read_set_binary(std::istream& is, const GridPtr& grid) {
  read_header(is, *grid);
  std::vector<double> v(grid->size());
  for (double& x : v) x = get_f64(is);
  return to_set(grid, v);
}

void write_csv(std::ostream& os, const MonotoneStep& step) {
  const auto old = os.precision(17);
  os << "breakpoint,value\n";
  for (std::size_t k = 0; k < step.values.size(); ++k) os << step.breakpoints[k] << ',' << step.values[k] << '\n';
  const double last = step.breakpoints.empty() ? 0.0 : step.breakpoints.back();
  os << last << ',' << step.value_at_infinity << '\n';
  os.precision(old);
}

MonotoneStep read_step_csv(std::istream& is) {
  std::string line;
  if (!std::getline(is, line) || line.rfind("breakpoint", 0) != 0) throw InvalidArgument("missing CSV header");
  std::vector<std::pair<double, double>> rows;
  while (std::getline(is, line)) {
    if (line.empty()) continue;
    const auto comma = line.find(',');
    if (comma == std::string::npos) throw InvalidArgument("step CSV row needs two fields");
    rows.emplace_back(std::stod(line.substr(0, comma)), std::stod(line.substr(comma + 1)));
  }
  if (rows.empty()) throw InvalidArgument("step CSV has no rows");
  MonotoneStep s;
  for (std::size_t k = 0; k + 1 < rows.size(); ++k) {
    s.breakpoints.push_back(rows[k].first);
    s.values.push_back(rows[k].second);
  }
  s.breakpoints.push_back(rows.back().first);
  s.value_at_infinity = rows.back().second;
  if (!s.well_formed()) throw InvalidArgument("step CSV is not a non-increasing step map");
  return s;
}

void write_profile_table_csv(std::ostream& os, const IsoperimetricProfile& profile, double t0, double t1,
                             std::size_t nodes) {
  const auto old = os.precision(17);
  os << "t,M\n";
  for (const auto& [t, m] : profile.table(t0, t1, nodes)) os << t << ',' << m << '\n';
  os.precision(old);
}

void write_file(const std::string& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw InvalidArgument("cannot open " + path + " for writing");
  f << contents;
  if (!f) throw InvalidArgument("failed writing " + path);
}

}  // namespace wsym
