#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wsym/grid.hpp"
#include "wsym/profiles.hpp"
#include "wsym/variational.hpp"

namespace wsym {

enum class ExperimentKind { NormPreservation, PolyaSzego, FaberKrahn, SaintVenant, Saturation };
enum class Verdict { Pass, Inconclusive, Fail };

std::string to_string(ExperimentKind kind);
std::string to_string(Verdict v);
/// Accepts the CLI spellings (verify-ps, ps, polya-szego, ...).
std::optional<ExperimentKind> parse_experiment(const std::string& name);

/// Default one-sided tolerance: 5% on coarse grids, 2% from 256 cells per axis.
double default_tolerance(std::size_t resolution);

struct HarnessOptions {
  /// 0 = hardware concurrency
  std::size_t threads = 0;
  /// overrides default_tolerance / the 3% saturation gap
  std::optional<double> tolerance;
  /// Feed pre-symmetrized data (u = u#, Omega = Omega#); the verdict becomes two-sided.
  bool equality_case = false;
  /// Fixed set mass as a fraction of the reference mass (otherwise uniform in [0.1, 0.9]).
  std::optional<double> mass_fraction;
  /// Fixed absolute set mass (wins over mass_fraction).
  std::optional<double> mass;
  /// Largest admissible duality gap |T lambda_{p,1} - 1| in Saint-Venant runs.
  double duality_tolerance = 0.01;
  bool check_duality = true;
  std::size_t reduced_nodes = 8192;
  /// exponent tested besides 1, 2 and infinity in norm preservation
  double p_test = 3.0;
  SolverOptions solver;
};

struct CaseRecord {
  std::size_t index = 0;
  std::uint64_t seed = 0;
  double mass = 0.0;        // mu(Omega) or the level mass
  double mass_sharp = 0.0;  // mu(Omega#) on the grid
  /// The claim is lhs <= rhs (energies, eigenvalues) or the reverse for torsion;
  /// the signed relative margin is positive when the claim holds strictly.
  double lhs = 0.0;
  double rhs = 0.0;
  double margin = 0.0;
  double tolerance = 0.0;
  Verdict verdict = Verdict::Pass;
  std::map<std::string, double> extra;
  std::string note;
};

struct GridInfo {
  std::size_t dim = 0;
  std::size_t resolution = 0;
  Box box;
  double tail_mass_bound = 0.0;
  double total_mass = 0.0;
  std::uint64_t fingerprint = 0;
};

GridInfo grid_info(const WeightedGrid& grid);

struct ResolutionRecord {
  std::size_t resolution = 0;
  double worst_violation = 0.0;
  std::size_t passes = 0;
  std::size_t cases = 0;
};

struct ExperimentReport {
  std::string experiment;
  std::string profile;
  GridInfo grid;
  double p = 2.0;
  double q = 2.0;
  std::uint64_t seed = 0;
  std::vector<CaseRecord> cases;
  std::vector<ResolutionRecord> resolutions;  // convergence studies only
  std::string convergence_verdict_detail;
  std::vector<std::string> notes;
  double wall_time = 0.0;

  std::size_t count(Verdict v) const;
  /// most negative margin over the cases (0 when empty)
  double worst_margin() const;
  Verdict verdict() const;
  /// Full report; the wall-time field is omitted when include_timing is false.
  std::string to_json(bool include_timing = true) const;
  /// One row per case.
  std::string to_csv() const;
};

ExperimentReport verify_norm_preservation(const IsoperimetricProfile& profile, const GridPtr& grid,
                                          std::size_t n_samples, std::uint64_t seed,
                                          const HarnessOptions& opt = {});
ExperimentReport verify_polya_szego(const IsoperimetricProfile& profile, const GridPtr& grid, double p,
                                    std::size_t n_samples, std::uint64_t seed,
                                    const HarnessOptions& opt = {});
ExperimentReport verify_faber_krahn(const IsoperimetricProfile& profile, const GridPtr& grid, double p,
                                    double q, std::size_t n_sets, std::uint64_t seed,
                                    const HarnessOptions& opt = {});
ExperimentReport verify_saint_venant(const IsoperimetricProfile& profile, const GridPtr& grid, double p,
                                     std::size_t n_sets, std::uint64_t seed,
                                     const HarnessOptions& opt = {});
ExperimentReport verify_saturation(const IsoperimetricProfile& profile, const GridPtr& grid,
                                   std::size_t n_levels, const HarnessOptions& opt = {});

/// One random case as the experiments draw it: Omega, a zero-trace u on it,
/// and both symmetrizations.
struct SampledFields {
  BorelSet omega;
  BorelSet omega_sharp;
  GridFunction u;
  GridFunction u_sharp;
  double mass = 0.0;
  double mass_sharp = 0.0;
};

SampledFields sample_fields(const IsoperimetricProfile& profile, const GridPtr& grid, std::uint64_t seed,
                            const HarnessOptions& opt = {});

struct ExperimentSpec {
  ExperimentKind kind = ExperimentKind::PolyaSzego;
  IsoperimetricProfile profile;
  double p = 2.0;
  double q = 2.0;
  std::size_t count = 30;
  std::uint64_t seed = 0;
  double tail_tolerance = 1e-8;
  HarnessOptions options;
};

ExperimentReport run_experiment(const ExperimentSpec& spec, const GridPtr& grid);

/// Reruns the experiment on profile grids of increasing resolution and checks
/// that the worst violation does not grow by more than a factor 2 per step.
ExperimentReport convergence_study(const ExperimentSpec& spec, const std::vector<std::size_t>& resolutions);

}  // namespace wsym
