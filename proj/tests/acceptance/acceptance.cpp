// One line per acceptance criterion; exit status is the number of failures.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "../unit/oracles.hpp"
#include "wsym/config.hpp"
#include "wsym/harness.hpp"
#include "wsym/measure.hpp"
#include "wsym/rearrangement.hpp"
#include "wsym/sets.hpp"
#include "wsym/variational.hpp"

using namespace wsym;

namespace {

struct Outcome {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& why) {
    if (!ok) {
      pass = false;
      if (!detail.empty()) detail += "; ";
      detail += why;
    }
  }
};

std::string fmt(const char* f, double a, double b = 0.0, double c = 0.0) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b, c);
  return buf;
}

HarnessOptions serial() {
  HarnessOptions o;
  o.threads = 1;
  return o;
}

struct Named {
  std::string name;
  IsoperimetricProfile profile;
};

IsoperimetricProfile radial_quadratic() {
  RunConfig cfg;
  cfg.profile = "radial";
  return make_profile(cfg);
}

IsoperimetricProfile anisotropic41() { return anisotropic_gaussian_profile({4, 0, 0, 1}, 2); }

double worst_gap(const ExperimentReport& r) {
  double w = 0.0;
  for (const auto& c : r.cases) w = std::max(w, c.lhs);
  return w;
}

Outcome norm_preservation() {
  Outcome o;
  const std::vector<Named> profiles{{"euclidean", euclidean_ball_profile(2)},
                                    {"gaussian", gaussian_halfspace_profile({1, 0}, 2)},
                                    {"cone", cone_monomial_profile({1, 1}, 2)},
                                    {"radial", radial_quadratic()},
                                    {"gaussian-1d", gaussian_halfspace_profile({1}, 1)}};
  std::string summary;
  for (const auto& [name, p] : profiles) {
    const std::size_t coarse = p.domain.dim == 1 ? 2048 : 128;
    auto a = verify_norm_preservation(p, profile_grid(p, coarse), 30, 1, serial());
    auto b = verify_norm_preservation(p, profile_grid(p, 2 * coarse), 30, 1, serial());
    const double ga = worst_gap(a), gb = worst_gap(b);
    o.require(a.verdict() == Verdict::Pass, name + " has gaps above 2%");
    o.require(ga <= 0.02, name + fmt(" worst gap %.4f", ga));
    o.require(gb * 1.5 <= ga, name + fmt(" gap %.2e -> %.2e does not shrink 1.5x", ga, gb));
    summary += name + fmt(" %.1e->%.1e ", ga, gb);
  }
  if (o.pass) o.detail = summary;
  return o;
}

Outcome chi_rearrangement() {
  Outcome o;
  auto p = gaussian_halfspace_profile({1, 0}, 2);
  auto g = profile_grid(p, 128);
  double worst = 0.0;
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const double target = (0.1 + 0.04 * static_cast<double>(seed)) * g->total_mass();
    auto omega = random_borel_set(g, target, seed);
    GridFunction chi(g);
    for (std::size_t i = 0; i < g->size(); ++i) chi.values[i] = omega.mask[i];
    auto step = decreasing_rearrangement(chi, *g);
    const double err = step.steps() == 1 ? std::abs(step.breakpoints[1] - measure_of(omega, *g)) : kInfinity;
    o.require(step.steps() == 1 && step.values[0] == 1.0 && step.breakpoints[0] == 0.0,
              "seed " + std::to_string(seed) + " is not a single unit step");
    worst = std::max(worst, err);
  }
  o.require(worst <= g->max_cell_weight(), fmt("breakpoint error %.3e above cell weight", worst));
  if (o.pass) o.detail = fmt("worst breakpoint error %.2e <= %.2e", worst, g->max_cell_weight());
  return o;
}

Outcome polya_szego() {
  Outcome o;
  const std::vector<Named> profiles{{"euclidean", euclidean_ball_profile(2)},
                                    {"gaussian", gaussian_halfspace_profile({1, 0}, 2)},
                                    {"cone", cone_monomial_profile({1, 1}, 2)},
                                    {"anisotropic", anisotropic41()}};
  double worst128 = kInfinity, worst256 = kInfinity, worst_eq = 0.0;
  for (const auto& [name, p] : profiles) {
    for (std::size_t res : {128, 256}) {
      auto g = profile_grid(p, res);
      for (double pp : {1.5, 2.0, 3.0}) {
        auto r = verify_polya_szego(p, g, pp, 30, 1, serial());
        o.require(r.count(Verdict::Fail) == 0,
                  name + fmt(" res %.0f p %.1f: worst margin %.4f", double(res), pp, r.worst_margin()));
        (res == 128 ? worst128 : worst256) = std::min(res == 128 ? worst128 : worst256, r.worst_margin());
      }
    }
    HarnessOptions eq = serial();
    eq.equality_case = true;
    auto r = verify_polya_szego(p, profile_grid(p, 128), 2.0, 10, 1, eq);
    o.require(r.verdict() == Verdict::Pass, name + " equality case outside the band");
    for (const auto& c : r.cases) worst_eq = std::max(worst_eq, std::abs(c.margin));
  }
  if (o.pass) {
    o.detail = fmt("worst margin %.4f (res 128, tau 5%%), %.4f (res 256, tau 2%%); equality |margin| <= %.4f",
                   worst128, worst256, worst_eq);
  }
  return o;
}

Outcome faber_krahn() {
  Outcome o;
  auto p = euclidean_ball_profile(2);
  HarnessOptions opt = serial();
  opt.mass = 1.0;
  auto r = verify_faber_krahn(p, profile_grid(p, 128), 2.0, 2.0, 20, 1, opt);
  const double disk = std::numbers::pi * oracle::j01() * oracle::j01();
  double worst_rel = 0.0;
  o.require(r.count(Verdict::Pass) == 20, "not every case passes");
  for (const auto& c : r.cases) {
    const double grid_sharp = c.extra.at("lambda_sharp_grid");
    o.require(grid_sharp <= c.rhs && c.lhs <= c.rhs, "lambda(Omega#) above lambda(Omega)");
    worst_rel = std::max({worst_rel, std::abs(grid_sharp / disk - 1.0), std::abs(c.lhs / disk - 1.0)});
  }
  o.require(worst_rel <= 0.02, fmt("lambda(Omega#) off pi j01^2 by %.4f", worst_rel));
  if (o.pass) o.detail = fmt("20/20 pass, lambda(Omega#) within %.2f%% of %.4f", 100 * worst_rel, disk);
  return o;
}

Outcome gaussian_half_line() {
  Outcome o;
  auto g = make_grid(DomainSpec::full_space(1), Potential::standard_gaussian(), 2048, 1e-8);
  auto half = BorelSet::from_predicate(g, [](std::span<const double> x) { return x[0] > 0.0; });
  const double lambda = first_eigenvalue(half, *g, 2.0, 2.0).lambda;
  o.require(std::abs(lambda - 1.0) <= 0.01, fmt("lambda = %.5f", lambda));
  if (o.pass) o.detail = fmt("lambda = %.5f", lambda);
  return o;
}

Outcome torsion_closed_forms() {
  Outcome o;
  auto line = make_grid(DomainSpec::full_space(1), Potential::zero(), 2048, 1e-6, Box::cube(1, 0.0, 1.0));
  const double t1 = torsional_rigidity(BorelSet::all(line), *line, 2.0).T;
  auto plane = make_grid(DomainSpec::full_space(2), Potential::zero(), 256, 1e-6, Box::cube(2, -1.05, 1.05));
  auto disk = BorelSet::from_predicate(plane, [](std::span<const double> x) { return std::hypot(x[0], x[1]) < 1.0; });
  const double t2 = torsional_rigidity(disk, *plane, 2.0).T;
  const double e1 = std::abs(t1 * 12.0 - 1.0), e2 = std::abs(t2 * 8.0 / std::numbers::pi - 1.0);
  o.require(e1 <= 0.01, fmt("interval T = %.6f", t1));
  o.require(e2 <= 0.02, fmt("disk T = %.6f", t2));
  if (o.pass) o.detail = fmt("interval %.3f%% off 1/12, disk %.3f%% off pi/8", 100 * e1, 100 * e2);
  return o;
}

Outcome saint_venant() {
  Outcome o;
  const std::vector<Named> profiles{{"euclidean", euclidean_ball_profile(2)},
                                    {"gaussian", gaussian_halfspace_profile({1, 0}, 2)},
                                    {"cone", cone_monomial_profile({1, 1}, 2)},
                                    {"anisotropic", anisotropic41()}};
  double worst_gap = 0.0, worst_margin = kInfinity;
  for (const auto& [name, p] : profiles) {
    auto r = verify_saint_venant(p, profile_grid(p, 128), 2.0, 20, 1, serial());
    o.require(r.count(Verdict::Pass) == 20, name + fmt(" worst margin %.4f", r.worst_margin()));
    for (const auto& c : r.cases) worst_gap = std::max(worst_gap, c.extra.at("duality_gap"));
    worst_margin = std::min(worst_margin, r.worst_margin());
  }
  o.require(worst_gap <= 0.01, fmt("duality gap %.3e", worst_gap));
  if (o.pass) o.detail = fmt("worst margin %.4f, worst |T lambda_{p,1} - 1| = %.1e", worst_margin, worst_gap);
  return o;
}

Outcome saturation() {
  Outcome o;
  const std::vector<Named> profiles{{"gaussian", gaussian_halfspace_profile({1, 0}, 2)},
                                    {"euclidean", euclidean_ball_profile(2)},
                                    {"cone", cone_monomial_profile({1, 1}, 2)}};
  double worst = 0.0;
  for (const auto& [name, p] : profiles) {
    auto r = verify_saturation(p, profile_grid(p, 256), 10, serial());
    o.require(r.verdict() == Verdict::Pass, name + fmt(" gap %.4f", -r.worst_margin()));
    worst = std::max(worst, -r.worst_margin());
  }
  auto p1 = gaussian_halfspace_profile({1}, 1);
  auto g1 = profile_grid(p1, 2048);
  auto f = GridFunction::sample(g1, [&](std::span<const double> x) { return p1.f(x); });
  const double median = p1.shape(0.0);
  const double per = weighted_perimeter(superlevel_set(f, median), *g1);
  o.require(std::abs(per - 1.0) <= 0.01, fmt("median perimeter %.5f", per));
  o.require(std::abs(p1.q(0.5 * p1.total_mass) - 1.0) <= 0.01, "q at the median differs from 1");
  if (o.pass) o.detail = fmt("worst gap %.4f, gaussian median perimeter %.5f", worst, per);
  return o;
}

Outcome isoperimetric_spot_check() {
  Outcome o;
  RunConfig pert;
  pert.profile = "perturbed";
  pert.profile_params["phi"] = "quadratic";
  const std::vector<Named> profiles{{"euclidean", euclidean_ball_profile(2)},
                                    {"radial", radial_quadratic()},
                                    {"cone", cone_monomial_profile({1, 1}, 2)},
                                    {"gaussian", gaussian_halfspace_profile({1, 0}, 2)},
                                    {"anisotropic", anisotropic41()},
                                    {"perturbed", make_profile(pert)}};
  double worst = kInfinity;
  for (const auto& [name, p] : profiles) {
    auto g = profile_grid(p, 128);
    const double ref = std::min(inscribed_mass(p, *g), g->total_mass());
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> frac(0.1, 0.9);
    for (std::uint64_t seed = 0; seed < 100; ++seed) {
      auto omega = random_borel_set(g, frac(rng) * ref, seed);
      const double ratio = weighted_perimeter(omega, *g) / p.q(measure_of(omega, *g));
      worst = std::min(worst, ratio);
      o.require(ratio >= 0.95, name + fmt(" seed %.0f ratio %.4f", double(seed), ratio));
    }
  }
  if (o.pass) o.detail = fmt("600 sets, smallest Per/q = %.4f", worst);
  return o;
}

Outcome pq_generalization() {
  Outcome o;
  const std::vector<Named> profiles{{"euclidean-1d", euclidean_ball_profile(1)},
                                    {"gaussian-1d", gaussian_halfspace_profile({1}, 1)}};
  double worst = kInfinity;
  for (const auto& [name, p] : profiles) {
    for (auto [pp, qq] : {std::pair{2.0, 1.0}, std::pair{3.0, 2.0}}) {
      auto r = verify_faber_krahn(p, profile_grid(p, 2048), pp, qq, 20, 1, serial());
      o.require(r.count(Verdict::Pass) == 20,
                name + fmt(" (p,q) = (%.0f,%.0f): worst %.4f", pp, qq, r.worst_margin()));
      worst = std::min(worst, r.worst_margin());
    }
  }
  if (o.pass) o.detail = fmt("80/80 pass, worst margin %.4f", worst);
  return o;
}

Outcome consistency_reductions() {
  Outcome o;
  auto gauss = gaussian_halfspace_profile({1, 0}, 2);
  auto ident = anisotropic_gaussian_profile({1, 0, 0, 1}, 2);
  RunConfig pert;
  pert.profile = "perturbed";
  pert.profile_params["c"] = "0.5";
  auto flat = make_profile(pert);
  double worst = 0.0;
  for (int k = 0; k < 10; ++k) {
    const double t = -2.25 + 0.5 * k;
    const double ref = gauss.M(t);
    worst = std::max({worst, std::abs(ident.M(t) - ref), std::abs(flat.M(t) - ref)});
  }
  o.require(worst <= 1e-10, fmt("M differs by %.2e", worst));
  const auto dir = anisotropic41().theta;
  o.require(std::abs(dir[0]) < 1e-12 && std::abs(std::abs(dir[1]) - 1.0) < 1e-12, "diag(4,1) direction is not +-e2");
  if (o.pass) o.detail = fmt("max |M - M_gauss| = %.1e, diag(4,1) direction (%.0f, %.0f)", worst, dir[0], dir[1]);
  return o;
}

Outcome determinism() {
  Outcome o;
  for (const char* text : {"experiment = verify-ps\nprofile = gaussian\nres = 64\np = 3\nsamples = 12\nseed = 4",
                           "experiment = verify-sv\nprofile = cone\nres = 48\nsamples = 6\nseed = 8"}) {
    RunConfig cfg = parse_config(text);
    std::string first;
    for (std::size_t threads : {1, 1, 2, 4}) {
      cfg.threads = threads;
      auto spec = make_experiment_spec(cfg);
      const std::string json = run_experiment(spec, profile_grid(spec.profile, cfg.res)).to_json(false);
      if (first.empty()) first = json;
      o.require(json == first, cfg.experiment + fmt(" differs at %.0f threads", double(threads)));
    }
  }
  if (o.pass) o.detail = "byte-identical reports at 1, 1, 2 and 4 threads";
  return o;
}

}  // namespace

int main() {
  const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
      {"norm preservation", norm_preservation},
      {"characteristic function rearrangement", chi_rearrangement},
      {"polya-szego", polya_szego},
      {"faber-krahn euclidean 2d", faber_krahn},
      {"gaussian half-line eigenvalue", gaussian_half_line},
      {"torsion closed forms", torsion_closed_forms},
      {"saint-venant and duality", saint_venant},
      {"saturation", saturation},
      {"isoperimetric spot-check", isoperimetric_spot_check},
      {"(p,q) faber-krahn", pq_generalization},
      {"consistency reductions", consistency_reductions},
      {"determinism", determinism},
  };
  int failures = 0;
  for (std::size_t k = 0; k < criteria.size(); ++k) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome out;
    try {
      out = criteria[k].second();
    } catch (const std::exception& e) {
      out.pass = false;
      out.detail = std::string("exception: ") + e.what();
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    std::printf("%s %2zu %-40s %s (%.1fs)\n", out.pass ? "PASS" : "FAIL", k + 1, criteria[k].first.c_str(),
                out.detail.c_str(), secs);
    std::fflush(stdout);
    if (!out.pass) ++failures;
  }
  return failures;
}
