#include "wsym/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include "wsym/measure.hpp"

namespace wsym {
namespace {

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(" \t\r\n");
  if (a == std::string::npos) return "";
  const auto b = s.find_last_not_of(" \t\r\n");
  return s.substr(a, b - a + 1);
}

std::string lower(std::string s) {
  std::transform(s.begin(), s.end(), s.begin(), [](unsigned char c) { return std::tolower(c); });
  return s;
}

double to_double(const std::string& key, const std::string& v) {
  const std::string l = lower(trim(v));
  if (l == "inf" || l == "+inf" || l == "infinity") return kInfinity;
  if (l == "-inf" || l == "-infinity") return -kInfinity;
  try {
    std::size_t used = 0;
    const double d = std::stod(l, &used);
    if (used != l.size() || std::isnan(d)) throw ConfigError(key, "not a number: '" + v + "'");
    return d;
  } catch (const std::logic_error&) {
    throw ConfigError(key, "not a number: '" + v + "'");
  }
}

std::uint64_t to_uint(const std::string& key, const std::string& v) {
  const std::string t = trim(v);
  if (t.empty() || t.find_first_not_of("0123456789") != std::string::npos) {
    throw ConfigError(key, "not a non-negative integer: '" + v + "'");
  }
  try {
    return std::stoull(t);
  } catch (const std::logic_error&) {
    throw ConfigError(key, "integer out of range: '" + v + "'");
  }
}

bool to_bool(const std::string& key, const std::string& v) {
  const std::string l = lower(trim(v));
  if (l == "1" || l == "true" || l == "yes" || l == "on") return true;
  if (l == "0" || l == "false" || l == "no" || l == "off") return false;
  throw ConfigError(key, "not a boolean: '" + v + "'");
}

std::vector<std::string> split(const std::string& v, char sep) {
  std::vector<std::string> out;
  std::stringstream ss(v);
  std::string item;
  while (std::getline(ss, item, sep)) {
    item = trim(item);
    if (!item.empty()) out.push_back(item);
  }
  return out;
}

std::vector<double> to_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  for (const auto& s : split(v, ',')) out.push_back(to_double(key, s));
  if (out.empty()) throw ConfigError(key, "empty list");
  return out;
}

const CatalogEntry* find_entry(const std::string& kind) {
  for (const auto& e : profile_catalog()) {
    if (e.kind == kind) return &e;
  }
  return nullptr;
}

// Profile parameter with the catalog default.
std::string param(const RunConfig& cfg, const std::string& name) {
  const auto it = cfg.profile_params.find(name);
  if (it != cfg.profile_params.end()) return it->second;
  for (const auto& s : find_entry(cfg.profile)->parameters) {
    if (s.name == name) return s.default_value;
  }
  return "";
}

std::function<double(double)> radial_function(const RunConfig& cfg) {
  const std::string w = lower(param(cfg, "w"));
  const double k = to_double("profile.k", param(cfg, "k"));
  if (k < 0.0) throw ConfigError("profile.k", "must be non-negative for a convex w");
  if (w == "quadratic") return [k](double r) { return k * r * r; };
  if (w == "logcosh") return [k](double r) { return k * std::log(std::cosh(r)); };
  if (w == "power") {
    const double beta = to_double("profile.beta", param(cfg, "beta"));
    if (!(beta >= 1.0)) throw ConfigError("profile.beta", "must be >= 1 for a convex w");
    return [k, beta](double r) { return k * std::pow(std::abs(r), beta); };
  }
  throw ConfigError("profile.w", "unknown radial function '" + w + "'");
}

ConcaveFunction concave_function(const RunConfig& cfg) {
  const std::string kind = lower(param(cfg, "phi"));
  if (kind == "zero") return {[](double) { return 0.0; }, [](double) { return 0.0; }, "phi=0"};
  if (kind == "affine") {
    const double s = to_double("profile.phi_slope", param(cfg, "phi_slope"));
    return {[s](double t) { return s * t; }, [s](double) { return s; }, "phi affine"};
  }
  if (kind == "quadratic") {
    const double k = to_double("profile.phi_k", param(cfg, "phi_k"));
    return {[k](double t) { return -k * t * t; }, [k](double t) { return -2.0 * k * t; }, "phi=-k t^2"};
  }
  if (kind == "breakpoints") {
    std::vector<std::pair<double, double>> pts;
    for (const auto& item : split(param(cfg, "phi_points"), ',')) {
      const auto c = item.find(':');
      if (c == std::string::npos) throw ConfigError("profile.phi_points", "expected t:value pairs");
      pts.emplace_back(to_double("profile.phi_points", item.substr(0, c)),
                       to_double("profile.phi_points", item.substr(c + 1)));
    }
    if (pts.size() < 2) throw ConfigError("profile.phi_points", "need at least two points");
    for (std::size_t k = 1; k < pts.size(); ++k) {
      if (!(pts[k].first > pts[k - 1].first)) throw ConfigError("profile.phi_points", "abscissae must increase");
    }
    for (std::size_t k = 2; k < pts.size(); ++k) {
      const double left = (pts[k - 1].second - pts[k - 2].second) / (pts[k - 1].first - pts[k - 2].first);
      const double right = (pts[k].second - pts[k - 1].second) / (pts[k].first - pts[k - 1].first);
      if (right > left) throw ConfigError("profile.phi_points", "slopes must not increase (phi concave)");
    }
    // piecewise linear, extended by the end slopes
    auto slope = [pts](std::size_t k) {
      return (pts[k + 1].second - pts[k].second) / (pts[k + 1].first - pts[k].first);
    };
    auto segment = [pts](double t) {
      std::size_t k = 0;
      while (k + 2 < pts.size() && t >= pts[k + 1].first) ++k;
      return k;
    };
    return {[pts, slope, segment](double t) {
              const std::size_t k = segment(t);
              return pts[k].second + slope(k) * (t - pts[k].first);
            },
            [slope, segment](double t) { return slope(segment(t)); }, "phi piecewise linear"};
  }
  throw ConfigError("profile.phi", "unknown concave function '" + kind + "'");
}

std::optional<Point> theta_param(const RunConfig& cfg, std::size_t dim, bool required) {
  const std::string v = param(cfg, "theta");
  if (v.empty()) {
    if (!required) return std::nullopt;
    Point e(dim, 0.0);
    e[0] = 1.0;
    return e;
  }
  auto t = to_list("profile.theta", v);
  if (t.size() != dim) throw ConfigError("profile.theta", "needs " + std::to_string(dim) + " entries");
  double n = 0.0;
  for (double x : t) n += x * x;
  n = std::sqrt(n);
  if (!(n > 0.0)) throw ConfigError("profile.theta", "must be nonzero");
  for (double& x : t) x /= n;
  return t;
}

}  // namespace

const std::vector<CatalogEntry>& profile_catalog() {
  static const std::vector<CatalogEntry> catalog{
      {"euclidean", "Lebesgue measure on R^N", "balls",
       {{"dim", "int", "2", "dimension N"}}},
      {"radial", "e^{w(|x|)} dx on R^N with w convex", "balls",
       {{"dim", "int", "2", "dimension N"},
        {"w", "quadratic|power|logcosh", "quadratic", "w(r) = k r^2, k r^beta or k log cosh r"},
        {"k", "float >= 0", "1", "coefficient of w"},
        {"beta", "float >= 1", "2", "exponent for w = power"}}},
      {"cone", "prod x_i^alpha_i dx on the orthant {x_i > 0, i <= k}", "balls",
       {{"dim", "int", "2", "dimension N"},
        {"alphas", "list of float > 0", "1,1", "exponents alpha_1..alpha_k (k <= N)"}}},
      {"gaussian", "standard Gaussian e^{-|x|^2/2} dx", "half-spaces",
       {{"dim", "int", "2", "dimension N"}, {"theta", "unit vector", "", "normal direction (default e_1)"}}},
      {"anisotropic", "e^{-<Ax,x>/2} dx with A symmetric positive definite", "half-spaces",
       {{"dim", "int", "2", "dimension N"},
        {"matrix", "row-major list of N*N floats", "", "matrix A (default identity)"}}},
      {"perturbed", "e^{phi(x_N) - c|x|^2} dx on R^{N-1} x (a, b) with phi concave", "half-spaces",
       {{"dim", "int >= 2", "2", "dimension N"},
        {"phi", "zero|affine|quadratic|breakpoints", "zero", "concave function of the last coordinate"},
        {"phi_slope", "float", "0", "slope for phi = affine"},
        {"phi_k", "float >= 0", "1", "phi(t) = -k t^2 for phi = quadratic"},
        {"phi_points", "t:v,t:v,...", "", "nodes of a piecewise linear concave phi"},
        {"c", "float > 0", "0.5", "Gaussian coefficient"},
        {"a", "float or -inf", "-inf", "lower end of the slab"},
        {"b", "float or inf", "inf", "upper end of the slab"},
        {"theta", "unit vector with zero last entry", "", "normal direction (default e_1)"}}},
  };
  return catalog;
}

void set_option(RunConfig& cfg, const std::string& raw_key, const std::string& raw_value) {
  const std::string key = trim(raw_key);
  const std::string value = trim(raw_value);
  if (key.rfind("profile.", 0) == 0) {
    cfg.profile_params[key.substr(8)] = value;
  } else if (key == "experiment") {
    cfg.experiment = lower(value);
  } else if (key == "study") {
    cfg.study = lower(value);
  } else if (key == "profile") {
    cfg.profile = lower(value);
  } else if (key == "res") {
    cfg.res = to_uint(key, value);
  } else if (key == "resolutions") {
    cfg.resolutions.clear();
    for (const auto& s : split(value, ',')) cfg.resolutions.push_back(to_uint(key, s));
  } else if (key == "p") {
    cfg.p = to_double(key, value);
  } else if (key == "q") {
    cfg.q = to_double(key, value);
  } else if (key == "samples") {
    cfg.samples = to_uint(key, value);
  } else if (key == "seed") {
    cfg.seed = to_uint(key, value);
  } else if (key == "out") {
    cfg.out = value;
  } else if (key == "threads") {
    cfg.threads = to_uint(key, value);
  } else if (key == "tolerance") {
    cfg.tolerance = to_double(key, value);
  } else if (key == "tail_tolerance") {
    cfg.tail_tolerance = to_double(key, value);
  } else if (key == "mass") {
    cfg.mass = to_double(key, value);
  } else if (key == "mass_fraction") {
    cfg.mass_fraction = to_double(key, value);
  } else if (key == "equality") {
    cfg.equality = to_bool(key, value);
  } else if (key == "dump_fields") {
    cfg.dump_fields = to_bool(key, value);
  } else {
    throw ConfigError(key, "unknown key");
  }
}

RunConfig parse_config(const std::string& text, RunConfig base) {
  std::stringstream ss(text);
  std::string line;
  while (std::getline(ss, line)) {
    const auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) throw ConfigError(line, "expected key = value");
    set_option(base, line.substr(0, eq), line.substr(eq + 1));
  }
  return base;
}

RunConfig load_config(const std::string& path, RunConfig base) {
  std::ifstream f(path);
  if (!f) throw ConfigError("config", "cannot read " + path);
  std::stringstream ss;
  ss << f.rdbuf();
  return parse_config(ss.str(), std::move(base));
}

IsoperimetricProfile make_profile(const RunConfig& cfg) {
  const CatalogEntry* entry = find_entry(cfg.profile);
  if (!entry) throw ConfigError("profile", "unknown profile kind '" + cfg.profile + "'");
  for (const auto& [k, v] : cfg.profile_params) {
    const bool known = std::any_of(entry->parameters.begin(), entry->parameters.end(),
                                   [&](const ParameterSchema& s) { return s.name == k; });
    if (!known) throw ConfigError("profile." + k, "not a parameter of profile '" + cfg.profile + "'");
  }
  const std::uint64_t dim = to_uint("profile.dim", param(cfg, "dim"));
  if (dim < 1 || dim > 3) throw ConfigError("profile.dim", "supported dimensions are 1 to 3");
  if (cfg.profile == "perturbed" && dim < 2) throw ConfigError("profile.dim", "perturbed profile needs dim >= 2");
  try {
    const std::string& kind = cfg.profile;
    if (kind == "euclidean") return euclidean_ball_profile(dim);
    if (kind == "radial") {
      return radial_logconvex_profile(radial_function(cfg), dim, 1.01 * std::sqrt(double(dim)),
                                      "w=" + param(cfg, "w"));
    }
    if (kind == "cone") return cone_monomial_profile(to_list("profile.alphas", param(cfg, "alphas")), dim);
    if (kind == "gaussian") return gaussian_halfspace_profile(*theta_param(cfg, dim, true), dim);
    if (kind == "anisotropic") {
      std::vector<double> A(dim * dim, 0.0);
      const std::string m = param(cfg, "matrix");
      if (m.empty()) {
        for (std::size_t i = 0; i < dim; ++i) A[i * dim + i] = 1.0;
      } else {
        A = to_list("profile.matrix", m);
        if (A.size() != dim * dim) throw ConfigError("profile.matrix", "needs dim*dim entries");
      }
      return anisotropic_gaussian_profile(A, dim);
    }
    if (kind == "perturbed") {
      return perturbed_gaussian_profile(concave_function(cfg), to_double("profile.c", param(cfg, "c")),
                                        to_double("profile.a", param(cfg, "a")),
                                        to_double("profile.b", param(cfg, "b")), dim,
                                        theta_param(cfg, dim, false));
    }
  } catch (const InvalidArgument& e) {
    throw ConfigError("profile", e.what());
  }
  throw ConfigError("profile", "unknown profile kind '" + cfg.profile + "'");
}

void validate(const RunConfig& cfg) {
  static const std::set<std::string> commands{"converge", "symmetrize", "eigen", "torsion"};
  if (!commands.count(cfg.experiment) && !parse_experiment(cfg.experiment)) {
    throw ConfigError("experiment", "unknown experiment '" + cfg.experiment + "'");
  }
  if (!parse_experiment(cfg.study)) throw ConfigError("study", "unknown experiment '" + cfg.study + "'");
  if (!(cfg.p > 1.0) || std::isinf(cfg.p)) throw ConfigError("p", "must lie in (1, inf)");
  if (!(cfg.q >= 1.0) || std::isinf(cfg.q)) throw ConfigError("q", "must be finite and >= 1");
  if (cfg.res < 4) throw ConfigError("res", "must be at least 4");
  for (std::size_t k = 0; k < cfg.resolutions.size(); ++k) {
    if (cfg.resolutions[k] < 4) throw ConfigError("resolutions", "entries must be at least 4");
    if (k > 0 && cfg.resolutions[k] <= cfg.resolutions[k - 1]) {
      throw ConfigError("resolutions", "must increase");
    }
  }
  if (cfg.samples < 1) throw ConfigError("samples", "must be positive");
  if (cfg.tolerance && !(*cfg.tolerance > 0.0)) throw ConfigError("tolerance", "must be positive");
  if (!(cfg.tail_tolerance > 0.0 && cfg.tail_tolerance < 1.0)) {
    throw ConfigError("tail_tolerance", "must lie in (0, 1)");
  }
  if (cfg.mass && !(*cfg.mass > 0.0)) throw ConfigError("mass", "must be positive");
  if (cfg.mass_fraction && !(*cfg.mass_fraction > 0.0 && *cfg.mass_fraction < 1.0)) {
    throw ConfigError("mass_fraction", "must lie in (0, 1)");
  }
  make_profile(cfg);
}

HarnessOptions make_harness_options(const RunConfig& cfg) {
  HarnessOptions o;
  o.threads = cfg.threads;
  o.tolerance = cfg.tolerance;
  o.equality_case = cfg.equality;
  o.mass = cfg.mass;
  o.mass_fraction = cfg.mass_fraction;
  return o;
}

ExperimentSpec make_experiment_spec(const RunConfig& cfg) {
  validate(cfg);
  const auto kind = parse_experiment(cfg.experiment == "converge" ? cfg.study : cfg.experiment);
  if (!kind) throw ConfigError("experiment", "'" + cfg.experiment + "' is not a verification experiment");
  ExperimentSpec s;
  s.kind = *kind;
  s.profile = make_profile(cfg);
  s.p = cfg.p;
  s.q = cfg.q;
  s.count = cfg.samples;
  s.seed = cfg.seed;
  s.tail_tolerance = cfg.tail_tolerance;
  s.options = make_harness_options(cfg);
  return s;
}

}  // namespace wsym
