#include "wsym/harness.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <exception>
#include <functional>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "wsym/measure.hpp"
#include "wsym/rearrangement.hpp"
#include "wsym/sets.hpp"

namespace wsym {
namespace {

using Clock = std::chrono::steady_clock;

constexpr double kNormTolerance = 0.02;
constexpr double kSaturationTolerance = 0.03;

void parallel_for(std::size_t n, std::size_t threads, const std::function<void(std::size_t)>& body) {
  if (threads == 0) threads = std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, n);
  std::vector<std::exception_ptr> errors(n);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n; i = next++) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t t = 0; t < threads; ++t) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

double reference_mass(const IsoperimetricProfile& profile, const WeightedGrid& grid) {
  return std::min(inscribed_mass(profile, grid), grid.total_mass());
}

double case_mass(const HarnessOptions& opt, double reference, std::uint64_t seed) {
  if (opt.mass) return *opt.mass;
  if (opt.mass_fraction) return *opt.mass_fraction * reference;
  std::mt19937_64 rng(seed ^ 0x9e3779b97f4a7c15ULL);
  std::uniform_real_distribution<double> frac(0.1, 0.9);
  return frac(rng) * reference;
}

ExperimentReport make_report(const std::string& name, const IsoperimetricProfile& profile,
                             const WeightedGrid& grid, double p, double q, std::uint64_t seed) {
  ExperimentReport r;
  r.experiment = name;
  r.profile = profile.id;
  r.grid = grid_info(grid);
  r.p = p;
  r.q = q;
  r.seed = seed;
  r.notes = profile.notes;
  return r;
}

Verdict one_sided(double margin, double tol) { return margin >= -tol ? Verdict::Pass : Verdict::Fail; }
Verdict two_sided(double margin, double tol) {
  return std::abs(margin) <= tol ? Verdict::Pass : Verdict::Fail;
}

struct SampledSet {
  BorelSet omega;
  double mass = 0.0;
};

SampledSet sample_set(const IsoperimetricProfile& profile, const GridPtr& grid, const HarnessOptions& opt,
                      double reference, std::uint64_t seed) {
  const double target = case_mass(opt, reference, seed);
  if (!(target > 0.0 && target < grid->total_mass())) {
    throw InvalidArgument("requested set mass is outside (0, grid mass)");
  }
  BorelSet omega = random_borel_set(grid, target, seed);
  if (opt.equality_case) omega = symmetrize_set(omega, profile, *grid);
  return {omega, measure_of(omega, *grid)};
}

template <class Fn>
ExperimentReport run_cases(ExperimentReport rep, std::size_t n, std::uint64_t seed, std::size_t threads,
                           Fn&& fn) {
  const auto t0 = Clock::now();
  rep.cases.resize(n);
  parallel_for(n, threads, [&](std::size_t i) {
    CaseRecord c = fn(seed + i);
    c.index = i;
    c.seed = seed + i;
    rep.cases[i] = std::move(c);
  });
  rep.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
  return rep;
}

nlohmann::ordered_json box_json(const Box& b) {
  return nlohmann::ordered_json{{"lo", b.lo}, {"hi", b.hi}};
}

// JSON cannot carry infinities; encode them as strings.
nlohmann::ordered_json number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace

std::string to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::NormPreservation: return "norm-preservation";
    case ExperimentKind::PolyaSzego: return "verify-ps";
    case ExperimentKind::FaberKrahn: return "verify-fk";
    case ExperimentKind::SaintVenant: return "verify-sv";
    case ExperimentKind::Saturation: return "verify-saturation";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::Pass: return "pass";
    case Verdict::Inconclusive: return "inconclusive";
    case Verdict::Fail: return "fail";
  }
  return "unknown";
}

std::optional<ExperimentKind> parse_experiment(const std::string& name) {
  static const std::map<std::string, ExperimentKind> names{
      {"norm-preservation", ExperimentKind::NormPreservation},
      {"norms", ExperimentKind::NormPreservation},
      {"symmetrize", ExperimentKind::NormPreservation},
      {"verify-ps", ExperimentKind::PolyaSzego},
      {"ps", ExperimentKind::PolyaSzego},
      {"polya-szego", ExperimentKind::PolyaSzego},
      {"verify-fk", ExperimentKind::FaberKrahn},
      {"fk", ExperimentKind::FaberKrahn},
      {"faber-krahn", ExperimentKind::FaberKrahn},
      {"verify-sv", ExperimentKind::SaintVenant},
      {"sv", ExperimentKind::SaintVenant},
      {"saint-venant", ExperimentKind::SaintVenant},
      {"verify-saturation", ExperimentKind::Saturation},
      {"saturation", ExperimentKind::Saturation},
  };
  const auto it = names.find(name);
  if (it == names.end()) return std::nullopt;
  return it->second;
}

double default_tolerance(std::size_t resolution) { return resolution >= 256 ? 0.02 : 0.05; }

GridInfo grid_info(const WeightedGrid& grid) {
  return {grid.dim(), grid.resolution(), grid.box(), grid.tail_mass_bound(), grid.total_mass(),
          grid.fingerprint()};
}

std::size_t ExperimentReport::count(Verdict v) const {
  return static_cast<std::size_t>(
      std::count_if(cases.begin(), cases.end(), [v](const CaseRecord& c) { return c.verdict == v; }));
}

double ExperimentReport::worst_margin() const {
  double w = 0.0;
  bool first = true;
  for (const auto& c : cases) {
    if (first || c.margin < w) w = c.margin;
    first = false;
  }
  return w;
}

Verdict ExperimentReport::verdict() const {
  Verdict v = Verdict::Pass;
  for (const auto& c : cases) v = std::max(v, c.verdict);
  return v;
}

std::string ExperimentReport::to_json(bool include_timing) const {
  nlohmann::ordered_json j;
  j["experiment"] = experiment;
  j["profile"] = profile;
  j["grid"] = {{"dim", grid.dim},
               {"resolution", grid.resolution},
               {"box", box_json(grid.box)},
               {"tail_mass_bound", number(grid.tail_mass_bound)},
               {"total_mass", number(grid.total_mass)},
               {"fingerprint", grid.fingerprint}};
  j["p"] = number(p);
  j["q"] = number(q);
  j["seed"] = seed;
  auto arr = nlohmann::ordered_json::array();
  for (const auto& c : cases) {
    nlohmann::ordered_json e;
    e["index"] = c.index;
    e["seed"] = c.seed;
    e["mass"] = number(c.mass);
    e["mass_sharp"] = number(c.mass_sharp);
    e["lhs"] = number(c.lhs);
    e["rhs"] = number(c.rhs);
    e["margin"] = number(c.margin);
    e["tolerance"] = number(c.tolerance);
    e["verdict"] = to_string(c.verdict);
    nlohmann::ordered_json ex = nlohmann::ordered_json::object();
    for (const auto& [k, v] : c.extra) ex[k] = number(v);
    e["extra"] = ex;
    if (!c.note.empty()) e["note"] = c.note;
    arr.push_back(e);
  }
  j["cases"] = arr;
  if (!resolutions.empty()) {
    auto rs = nlohmann::ordered_json::array();
    for (const auto& r : resolutions) {
      rs.push_back({{"resolution", r.resolution},
                    {"worst_violation", number(r.worst_violation)},
                    {"passes", r.passes},
                    {"cases", r.cases}});
    }
    j["resolutions"] = rs;
    j["convergence"] = convergence_verdict_detail;
  }
  j["summary"] = {{"cases", cases.size()},
                  {"pass", count(Verdict::Pass)},
                  {"inconclusive", count(Verdict::Inconclusive)},
                  {"fail", count(Verdict::Fail)},
                  {"worst_margin", number(worst_margin())},
                  {"verdict", to_string(verdict())}};
  j["notes"] = notes;
  if (include_timing) j["wall_time_seconds"] = wall_time;
  return j.dump(2) + "\n";
}

std::string ExperimentReport::to_csv() const {
  std::set<std::string> keys;
  for (const auto& c : cases) {
    for (const auto& [k, v] : c.extra) keys.insert(k);
  }
  std::ostringstream os;
  os.precision(17);
  os << "index,seed,mass,mass_sharp,lhs,rhs,margin,tolerance,verdict";
  for (const auto& k : keys) os << ',' << k;
  os << ",note\n";
  for (const auto& c : cases) {
    os << c.index << ',' << c.seed << ',' << c.mass << ',' << c.mass_sharp << ',' << c.lhs << ','
       << c.rhs << ',' << c.margin << ',' << c.tolerance << ',' << to_string(c.verdict);
    for (const auto& k : keys) {
      os << ',';
      const auto it = c.extra.find(k);
      if (it != c.extra.end()) os << it->second;
    }
    std::string note = c.note;
    std::replace(note.begin(), note.end(), ',', ';');
    os << ',' << note << '\n';
  }
  return os.str();
}

ExperimentReport verify_norm_preservation(const IsoperimetricProfile& profile, const GridPtr& grid,
                                          std::size_t n_samples, std::uint64_t seed,
                                          const HarnessOptions& opt) {
  require_profile_grid(profile, *grid);
  const double ref = reference_mass(profile, *grid);
  const double tol = opt.tolerance.value_or(kNormTolerance);
  auto rep = make_report(to_string(ExperimentKind::NormPreservation), profile, *grid, opt.p_test,
                         opt.p_test, seed);
  return run_cases(std::move(rep), n_samples, seed, opt.threads, [&](std::uint64_t s) {
    CaseRecord c;
    auto set = sample_set(profile, grid, opt, ref, s);
    auto u = random_zero_trace_function(set.omega, s);
    auto us = symmetrize(u, set.omega, profile, *grid);
    auto eq = equimeasurability_report(u, us, *grid, 64, opt.p_test);
    c.mass = set.mass;
    c.mass_sharp = measure_of(symmetrize_set(set.omega, profile, *grid), *grid);
    double worst = 0.0;
    static const char* keys[] = {"gap_p1", "gap_p2", "gap_ptest", "gap_inf"};
    for (std::size_t k = 0; k < eq.exponents.size(); ++k) {
      c.extra[keys[k]] = eq.norm_gaps[k];
      if (std::isfinite(eq.exponents[k])) worst = std::max(worst, eq.norm_gaps[k]);
    }
    c.extra["distribution_gap"] = eq.max_distribution_gap;

    // rearrangement of the characteristic function
    GridFunction chi(grid);
    for (std::size_t i = 0; i < grid->size(); ++i) chi.values[i] = set.omega.mask[i];
    const auto step = decreasing_rearrangement(chi, *grid);
    const double bp = step.steps() == 1 ? step.breakpoints[1] : 0.0;
    c.extra["chi_breakpoint_error"] = std::abs(bp - set.mass);
    c.extra["chi_steps"] = static_cast<double>(step.steps());
    c.extra["max_cell_weight"] = grid->max_cell_weight();

    c.lhs = worst;
    c.rhs = 0.0;
    c.margin = -worst;
    c.tolerance = tol;
    c.verdict = one_sided(c.margin, tol);
    if (step.steps() != 1 || c.extra["chi_breakpoint_error"] > grid->max_cell_weight()) {
      c.verdict = Verdict::Fail;
      c.note = "characteristic function rearrangement off by more than one cell";
    }
    return c;
  });
}

ExperimentReport verify_polya_szego(const IsoperimetricProfile& profile, const GridPtr& grid, double p,
                                    std::size_t n_samples, std::uint64_t seed,
                                    const HarnessOptions& opt) {
  require_profile_grid(profile, *grid);
  if (!(p > 1.0) || std::isinf(p)) throw InvalidArgument("p must lie in (1, inf)");
  const double ref = reference_mass(profile, *grid);
  const double tol = opt.tolerance.value_or(default_tolerance(grid->resolution()));
  auto rep = make_report(to_string(ExperimentKind::PolyaSzego), profile, *grid, p, p, seed);
  if (opt.equality_case) rep.notes.push_back("equality case: inputs are already symmetric");
  return run_cases(std::move(rep), n_samples, seed, opt.threads, [&](std::uint64_t s) {
    CaseRecord c;
    auto set = sample_set(profile, grid, opt, ref, s);
    BorelSet omega = set.omega;
    GridFunction u = random_zero_trace_function(omega, s);
    if (opt.equality_case) u = symmetrize(u, omega, profile, *grid);
    auto us = symmetrize(u, omega, profile, *grid);
    auto sharp = symmetrize_set(omega, profile, *grid);
    const double e = solver_energy(u, omega, p);
    const double es = solver_energy(us, sharp, p);
    auto eq = equimeasurability_report(u, us, *grid, 16, p);
    c.mass = set.mass;
    c.mass_sharp = measure_of(sharp, *grid);
    c.lhs = es;
    c.rhs = e;
    c.margin = e > 0.0 ? (e - es) / e : 0.0;
    c.tolerance = tol;
    c.verdict = opt.equality_case ? two_sided(c.margin, tol) : one_sided(c.margin, tol);
    c.extra["norm_gap_p"] = eq.norm_gaps[2];
    c.extra["norm_gap_1"] = eq.norm_gaps[0];
    return c;
  });
}

ExperimentReport verify_faber_krahn(const IsoperimetricProfile& profile, const GridPtr& grid, double p,
                                    double q, std::size_t n_sets, std::uint64_t seed,
                                    const HarnessOptions& opt) {
  require_profile_grid(profile, *grid);
  const double ref = reference_mass(profile, *grid);
  const double tol = opt.tolerance.value_or(default_tolerance(grid->resolution()));
  auto rep = make_report(to_string(ExperimentKind::FaberKrahn), profile, *grid, p, q, seed);
  if (opt.equality_case) rep.notes.push_back("equality case: sets are already symmetric");
  return run_cases(std::move(rep), n_sets, seed, opt.threads, [&](std::uint64_t s) {
    CaseRecord c;
    auto set = sample_set(profile, grid, opt, ref, s);
    auto lam = first_eigenvalue(set.omega, *grid, p, q, opt.solver);
    bool reduced_ok = false;
    const double lam_sharp = reduced_eigenvalue(profile, set.mass, p, q, opt.reduced_nodes, &reduced_ok);
    auto sharp = symmetrize_set(set.omega, profile, *grid);
    auto lam_grid = first_eigenvalue(sharp, *grid, p, q, opt.solver);
    c.mass = set.mass;
    c.mass_sharp = measure_of(sharp, *grid);
    c.lhs = lam_sharp;
    c.rhs = lam.lambda;
    c.margin = (lam.lambda - lam_sharp) / lam.lambda;
    c.tolerance = tol;
    c.extra["lambda_sharp_grid"] = lam_grid.lambda;
    c.extra["lambda_residual"] = lam.residual;
    c.extra["lambda_iterations"] = static_cast<double>(lam.iterations);
    c.verdict = opt.equality_case ? two_sided(c.margin, tol) : one_sided(c.margin, tol);
    if (!lam.converged || !reduced_ok) {
      c.verdict = Verdict::Inconclusive;
      c.note = "solver did not converge";
    }
    return c;
  });
}

ExperimentReport verify_saint_venant(const IsoperimetricProfile& profile, const GridPtr& grid, double p,
                                     std::size_t n_sets, std::uint64_t seed,
                                     const HarnessOptions& opt) {
  require_profile_grid(profile, *grid);
  const double ref = reference_mass(profile, *grid);
  const double tol = opt.tolerance.value_or(default_tolerance(grid->resolution()));
  auto rep = make_report(to_string(ExperimentKind::SaintVenant), profile, *grid, p, 1.0, seed);
  if (opt.equality_case) rep.notes.push_back("equality case: sets are already symmetric");
  return run_cases(std::move(rep), n_sets, seed, opt.threads, [&](std::uint64_t s) {
    CaseRecord c;
    auto set = sample_set(profile, grid, opt, ref, s);
    auto tor = torsional_rigidity(set.omega, *grid, p, opt.solver);
    bool reduced_ok = false;
    const double t_sharp = reduced_torsion(profile, set.mass, p, opt.reduced_nodes, &reduced_ok);
    auto sharp = symmetrize_set(set.omega, profile, *grid);
    auto t_grid = torsional_rigidity(sharp, *grid, p, opt.solver);
    c.mass = set.mass;
    c.mass_sharp = measure_of(sharp, *grid);
    c.lhs = tor.T;
    c.rhs = t_sharp;
    c.margin = (t_sharp - tor.T) / tor.T;
    c.tolerance = tol;
    c.extra["torsion_sharp_grid"] = t_grid.T;
    c.verdict = opt.equality_case ? two_sided(c.margin, tol) : one_sided(c.margin, tol);
    bool converged = tor.converged && reduced_ok && std::isfinite(tor.T);
    if (opt.check_duality) {
      auto lam1 = first_eigenvalue(set.omega, *grid, p, 1.0, opt.solver);
      const double gap = std::abs(tor.T * lam1.lambda - 1.0);
      c.extra["lambda_p1"] = lam1.lambda;
      c.extra["duality_gap"] = gap;
      converged = converged && lam1.converged;
      if (gap > opt.duality_tolerance) {
        c.verdict = Verdict::Fail;
        c.note = "duality gap above tolerance";
      }
    }
    if (!converged) {
      c.verdict = Verdict::Inconclusive;
      c.note = tor.note.empty() ? "solver did not converge" : tor.note;
    }
    return c;
  });
}

ExperimentReport verify_saturation(const IsoperimetricProfile& profile, const GridPtr& grid,
                                   std::size_t n_levels, const HarnessOptions& opt) {
  require_profile_grid(profile, *grid);
  if (n_levels == 0) throw InvalidArgument("need at least one level");
  const double ref = reference_mass(profile, *grid);
  const double tol = opt.tolerance.value_or(kSaturationTolerance);
  auto rep = make_report(to_string(ExperimentKind::Saturation), profile, *grid, 1.0, 1.0, 0);
  const auto f = GridFunction::sample(grid, [&](std::span<const double> x) { return profile.f(x); });
  return run_cases(std::move(rep), n_levels, 0, opt.threads, [&](std::uint64_t j) {
    CaseRecord c;
    const double frac = 0.1 + 0.8 * (static_cast<double>(j) + 0.5) / static_cast<double>(n_levels);
    const double m = frac * ref;
    const double r = profile.M_inverse(m);
    const double level = profile.shape(r);
    const BorelSet s = superlevel_set(f, level);
    const double per = weighted_perimeter(s, *grid);
    const double mass = measure_of(s, *grid);
    const double expect = profile.q(mass);
    c.mass = m;
    c.mass_sharp = mass;
    c.lhs = per;
    c.rhs = expect;
    c.margin = -std::abs(per - expect) / expect;
    c.tolerance = tol;
    c.verdict = two_sided(c.margin, tol);
    c.extra["level"] = level;
    c.extra["param"] = r;
    c.extra["q_nominal"] = profile.q(m);
    return c;
  });
}

SampledFields sample_fields(const IsoperimetricProfile& profile, const GridPtr& grid, std::uint64_t seed,
                            const HarnessOptions& opt) {
  require_profile_grid(profile, *grid);
  auto set = sample_set(profile, grid, opt, reference_mass(profile, *grid), seed);
  SampledFields f;
  f.u = random_zero_trace_function(set.omega, seed);
  if (opt.equality_case) f.u = symmetrize(f.u, set.omega, profile, *grid);
  f.u_sharp = symmetrize(f.u, set.omega, profile, *grid);
  f.omega_sharp = symmetrize_set(set.omega, profile, *grid);
  f.omega = std::move(set.omega);
  f.mass = set.mass;
  f.mass_sharp = measure_of(f.omega_sharp, *grid);
  return f;
}

ExperimentReport run_experiment(const ExperimentSpec& spec, const GridPtr& grid) {
  switch (spec.kind) {
    case ExperimentKind::NormPreservation:
      return verify_norm_preservation(spec.profile, grid, spec.count, spec.seed, spec.options);
    case ExperimentKind::PolyaSzego:
      return verify_polya_szego(spec.profile, grid, spec.p, spec.count, spec.seed, spec.options);
    case ExperimentKind::FaberKrahn:
      return verify_faber_krahn(spec.profile, grid, spec.p, spec.q, spec.count, spec.seed, spec.options);
    case ExperimentKind::SaintVenant:
      return verify_saint_venant(spec.profile, grid, spec.p, spec.count, spec.seed, spec.options);
    case ExperimentKind::Saturation:
      return verify_saturation(spec.profile, grid, spec.count, spec.options);
  }
  throw InvalidArgument("unknown experiment");
}

ExperimentReport convergence_study(const ExperimentSpec& spec, const std::vector<std::size_t>& resolutions) {
  if (resolutions.size() < 3) throw InvalidArgument("convergence study needs at least 3 resolutions");
  for (std::size_t k = 1; k < resolutions.size(); ++k) {
    if (resolutions[k] <= resolutions[k - 1]) throw InvalidArgument("resolutions must increase");
  }
  const auto t0 = Clock::now();
  ExperimentReport out;
  std::vector<double> violations;
  std::vector<ResolutionRecord> records;
  for (std::size_t res : resolutions) {
    auto grid = profile_grid(spec.profile, res, spec.tail_tolerance);
    auto rep = run_experiment(spec, grid);
    const double v = std::max(0.0, -rep.worst_margin());
    violations.push_back(v);
    records.push_back({res, v, rep.count(Verdict::Pass), rep.cases.size()});
    out = std::move(rep);
  }
  out.experiment = "converge-" + out.experiment;
  out.cases.clear();
  out.resolutions = records;
  for (std::size_t k = 0; k < violations.size(); ++k) {
    CaseRecord c;
    c.index = k;
    c.seed = spec.seed;
    c.lhs = violations[k];
    c.rhs = k == 0 ? violations[k] : 2.0 * violations[k - 1];
    c.margin = k == 0 ? 0.0 : c.rhs - c.lhs;
    c.tolerance = 1e-12;
    c.verdict = one_sided(c.margin, c.tolerance);
    c.extra["resolution"] = static_cast<double>(resolutions[k]);
    out.cases.push_back(c);
  }
  out.convergence_verdict_detail = "worst violation per resolution must not grow by more than a factor 2";
  out.wall_time = std::chrono::duration<double>(Clock::now() - t0).count();
  return out;
}

}  // namespace wsym
