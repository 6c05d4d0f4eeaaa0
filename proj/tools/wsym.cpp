#include <cmath>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "wsym/config.hpp"
#include "wsym/harness.hpp"
#include "wsym/io.hpp"
#include "wsym/measure.hpp"
#include "wsym/rearrangement.hpp"
#include "wsym/variational.hpp"

namespace fs = std::filesystem;
using json = nlohmann::ordered_json;

namespace {

constexpr int kExitFail = 1;
constexpr int kExitConfig = 2;

struct Flags {
  std::string config;
  std::optional<std::string> seed, res, p, q, out, threads, profile, samples, study, resolutions, tolerance,
      mass;
  std::vector<std::string> assignments;
  bool json = false;
  bool dump = false;
  bool equality = false;
};

void add_run_flags(CLI::App* cmd, Flags& f) {
  cmd->add_option("--config", f.config, "run configuration file (key = value lines)");
  cmd->add_option("--seed", f.seed, "base seed");
  cmd->add_option("--res", f.res, "cells per axis");
  cmd->add_option("--p", f.p, "energy exponent");
  cmd->add_option("--q", f.q, "norm exponent");
  cmd->add_option("--out", f.out, "output directory");
  cmd->add_option("--threads", f.threads, "worker threads (0 = all cores)");
  cmd->add_option("--profile", f.profile, "profile kind (see list-profiles)");
  cmd->add_option("--samples", f.samples, "random cases or levels");
  cmd->add_option("--tolerance", f.tolerance, "verdict tolerance override");
  cmd->add_option("--mass", f.mass, "fixed set mass");
  cmd->add_option("--set", f.assignments, "extra key=value assignment, e.g. profile.dim=3")->take_all();
  cmd->add_flag("--json", f.json, "print the JSON report on stdout");
  cmd->add_flag("--dump", f.dump, "write u, u#, Omega and Omega# of the first case as CSV");
  cmd->add_flag("--equality", f.equality, "use pre-symmetrized inputs");
}

// config file, then --set, then dedicated flags
wsym::RunConfig resolve(const Flags& f, const std::string& command) {
  wsym::RunConfig cfg;
  if (!f.config.empty()) cfg = wsym::load_config(f.config);
  cfg.experiment = command;
  for (const auto& a : f.assignments) {
    const auto eq = a.find('=');
    if (eq == std::string::npos) throw wsym::ConfigError(a, "expected key=value");
    wsym::set_option(cfg, a.substr(0, eq), a.substr(eq + 1));
  }
  const std::pair<const char*, const std::optional<std::string>*> direct[] = {
      {"seed", &f.seed},       {"res", &f.res},         {"p", &f.p},
      {"q", &f.q},             {"out", &f.out},         {"threads", &f.threads},
      {"profile", &f.profile}, {"samples", &f.samples}, {"study", &f.study},
      {"resolutions", &f.resolutions}, {"tolerance", &f.tolerance}, {"mass", &f.mass}};
  for (const auto& [key, value] : direct) {
    if (*value) wsym::set_option(cfg, key, **value);
  }
  if (f.dump) cfg.dump_fields = true;
  if (f.equality) cfg.equality = true;
  wsym::validate(cfg);
  return cfg;
}

std::string stem(const wsym::RunConfig& cfg, std::size_t res) {
  return cfg.experiment + "_" + cfg.profile + "_" + std::to_string(res) + "_" + std::to_string(cfg.seed);
}

fs::path output_dir(const wsym::RunConfig& cfg) {
  fs::path dir(cfg.out);
  fs::create_directories(dir);
  return dir;
}

template <class T>
std::string render(const T& obj) {
  std::ostringstream os;
  wsym::write_csv(os, obj);
  return os.str();
}

void dump_fields(const wsym::RunConfig& cfg, const wsym::SampledFields& s, std::size_t res) {
  const fs::path dir = output_dir(cfg);
  const std::string base = stem(cfg, res);
  wsym::write_file((dir / (base + "_omega.csv")).string(), render(s.omega));
  wsym::write_file((dir / (base + "_omega_sharp.csv")).string(), render(s.omega_sharp));
  wsym::write_file((dir / (base + "_u.csv")).string(), render(s.u));
  wsym::write_file((dir / (base + "_u_sharp.csv")).string(), render(s.u_sharp));
}

json finite_or_string(double v) {
  if (std::isfinite(v)) return v;
  return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
}

json grid_json(const wsym::WeightedGrid& g) {
  const auto info = wsym::grid_info(g);
  return {{"dim", info.dim},
          {"resolution", info.resolution},
          {"box", {{"lo", info.box.lo}, {"hi", info.box.hi}}},
          {"total_mass", info.total_mass},
          {"tail_mass_bound", finite_or_string(info.tail_mass_bound)}};
}

int emit(const wsym::RunConfig& cfg, const json& doc, std::size_t res, bool to_stdout) {
  const fs::path dir = output_dir(cfg);
  const std::string text = doc.dump(2) + "\n";
  wsym::write_file((dir / (stem(cfg, res) + ".json")).string(), text);
  if (to_stdout) std::cout << text;
  return 0;
}

int run_symmetrize(const wsym::RunConfig& cfg, bool print_json) {
  const auto profile = wsym::make_profile(cfg);
  const auto grid = wsym::profile_grid(profile, cfg.res, cfg.tail_tolerance);
  const auto s = wsym::sample_fields(profile, grid, cfg.seed, wsym::make_harness_options(cfg));
  const auto eq = wsym::equimeasurability_report(s.u, s.u_sharp, *grid, 64);
  json gaps = json::object();
  for (std::size_t k = 0; k < eq.exponents.size(); ++k) {
    const double e = eq.exponents[k];
    gaps[std::isinf(e) ? std::string("inf") : std::to_string(static_cast<int>(e))] = eq.norm_gaps[k];
  }
  json doc{{"command", "symmetrize"}, {"profile", profile.id}, {"seed", cfg.seed},
           {"grid", grid_json(*grid)}, {"mass", s.mass}, {"mass_sharp", s.mass_sharp},
           {"norm_gaps", gaps}, {"distribution_gap", eq.max_distribution_gap}};
  if (cfg.dump_fields) dump_fields(cfg, s, cfg.res);
  if (!print_json) {
    std::cout << "mass " << s.mass << " -> " << s.mass_sharp << ", worst norm gap " << eq.worst_norm_gap()
              << "\n";
  }
  return emit(cfg, doc, cfg.res, print_json);
}

int run_solve(const wsym::RunConfig& cfg, bool eigen, bool print_json) {
  const auto profile = wsym::make_profile(cfg);
  const auto grid = wsym::profile_grid(profile, cfg.res, cfg.tail_tolerance);
  const auto s = wsym::sample_fields(profile, grid, cfg.seed, wsym::make_harness_options(cfg));
  json doc{{"command", cfg.experiment}, {"profile", profile.id}, {"seed", cfg.seed},
           {"grid", grid_json(*grid)}, {"p", cfg.p}};
  if (eigen) {
    doc["q"] = cfg.q;
    const auto a = wsym::first_eigenvalue(s.omega, *grid, cfg.p, cfg.q);
    const auto b = wsym::first_eigenvalue(s.omega_sharp, *grid, cfg.p, cfg.q);
    const double reduced = wsym::reduced_eigenvalue(profile, s.mass, cfg.p, cfg.q);
    doc["omega"] = {{"mass", s.mass}, {"lambda", finite_or_string(a.lambda)},
                    {"converged", a.converged}, {"iterations", a.iterations}};
    doc["omega_sharp"] = {{"mass", s.mass_sharp}, {"lambda", finite_or_string(b.lambda)},
                          {"converged", b.converged}, {"iterations", b.iterations}};
    doc["lambda_reduced"] = finite_or_string(reduced);
    if (!print_json) {
      std::cout << "lambda(Omega) " << a.lambda << ", lambda(Omega#) " << b.lambda << " (reduced " << reduced
                << ")\n";
    }
  } else {
    const auto a = wsym::torsional_rigidity(s.omega, *grid, cfg.p);
    const auto b = wsym::torsional_rigidity(s.omega_sharp, *grid, cfg.p);
    const double reduced = wsym::reduced_torsion(profile, s.mass, cfg.p);
    doc["omega"] = {{"mass", s.mass}, {"T", finite_or_string(a.T)}, {"converged", a.converged},
                    {"iterations", a.iterations}};
    doc["omega_sharp"] = {{"mass", s.mass_sharp}, {"T", finite_or_string(b.T)}, {"converged", b.converged},
                          {"iterations", b.iterations}};
    doc["T_reduced"] = finite_or_string(reduced);
    if (!print_json) {
      std::cout << "T(Omega) " << a.T << ", T(Omega#) " << b.T << " (reduced " << reduced << ")\n";
    }
  }
  if (cfg.dump_fields) dump_fields(cfg, s, cfg.res);
  return emit(cfg, doc, cfg.res, print_json);
}

int run_verify(const wsym::RunConfig& cfg, bool print_json) {
  const auto spec = wsym::make_experiment_spec(cfg);
  wsym::ExperimentReport rep;
  std::size_t res = cfg.res;
  if (cfg.experiment == "converge") {
    if (cfg.resolutions.size() < 3) throw wsym::ConfigError("resolutions", "needs at least 3 entries");
    rep = wsym::convergence_study(spec, cfg.resolutions);
    res = cfg.resolutions.back();
  } else {
    rep = wsym::run_experiment(spec, wsym::profile_grid(spec.profile, res, spec.tail_tolerance));
  }
  const fs::path dir = output_dir(cfg);
  const std::string base = stem(cfg, res);
  const std::string text = rep.to_json();
  wsym::write_file((dir / (base + ".json")).string(), text);
  wsym::write_file((dir / (base + ".csv")).string(), rep.to_csv());
  if (cfg.dump_fields && cfg.experiment != "converge") {
    auto grid = wsym::profile_grid(spec.profile, res, spec.tail_tolerance);
    dump_fields(cfg, wsym::sample_fields(spec.profile, grid, cfg.seed, spec.options), res);
  }
  if (print_json) {
    std::cout << text;
  } else {
    std::cout << rep.experiment << " " << rep.profile << " res " << res << ": " << rep.count(wsym::Verdict::Pass)
              << "/" << rep.cases.size() << " pass, worst margin " << rep.worst_margin() << ", verdict "
              << wsym::to_string(rep.verdict()) << "\n";
  }
  return rep.verdict() == wsym::Verdict::Pass ? 0 : kExitFail;
}

int list_profiles(bool as_json) {
  const auto& catalog = wsym::profile_catalog();
  if (as_json) {
    json out = json::array();
    for (const auto& e : catalog) {
      json params = json::array();
      for (const auto& p : e.parameters) {
        params.push_back({{"name", p.name}, {"type", p.type}, {"default", p.default_value},
                          {"description", p.description}});
      }
      out.push_back({{"kind", e.kind}, {"measure", e.measure}, {"family", e.family}, {"parameters", params}});
    }
    std::cout << out.dump(2) << "\n";
    return 0;
  }
  for (const auto& e : catalog) {
    std::cout << e.kind << "  (" << e.family << ")  " << e.measure << "\n";
    for (const auto& p : e.parameters) {
      std::cout << "    profile." << p.name << " : " << p.type;
      if (!p.default_value.empty()) std::cout << " = " << p.default_value;
      std::cout << "  " << p.description << "\n";
    }
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Weighted symmetrization experiments"};
  app.require_subcommand(1);
  Flags flags;
  const std::vector<std::pair<std::string, std::string>> commands{
      {"symmetrize", "symmetrize one random (Omega, u) and report the norm gaps"},
      {"eigen", "first (p,q)-eigenvalue of a random set and of its symmetrization"},
      {"torsion", "p-torsional rigidity of a random set and of its symmetrization"},
      {"verify-ps", "Polya-Szego energy inequality"},
      {"verify-fk", "Faber-Krahn eigenvalue inequality"},
      {"verify-sv", "Saint-Venant torsion inequality"},
      {"verify-saturation", "perimeter of the f-superlevel sets against the profile"},
      {"converge", "rerun an experiment over increasing resolutions"},
  };
  for (const auto& [name, help] : commands) {
    auto* cmd = app.add_subcommand(name, help);
    add_run_flags(cmd, flags);
    if (name == "converge") {
      cmd->add_option("--study", flags.study, "experiment to rerun");
      cmd->add_option("--resolutions", flags.resolutions, "comma separated, increasing");
    }
  }
  bool list_json = false;
  auto* list = app.add_subcommand("list-profiles", "catalog of profiles and their parameters");
  list->add_flag("--json", list_json, "machine-readable listing");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitConfig;
  }

  if (list->parsed()) return list_profiles(list_json);
  const std::string command = app.get_subcommands().front()->get_name();
  try {
    const wsym::RunConfig cfg = resolve(flags, command);
    if (command == "symmetrize") return run_symmetrize(cfg, flags.json);
    if (command == "eigen") return run_solve(cfg, true, flags.json);
    if (command == "torsion") return run_solve(cfg, false, flags.json);
    return run_verify(cfg, flags.json);
  } catch (const wsym::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const wsym::InvalidArgument& e) {
    std::cerr << "invalid argument: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitFail;
  }
}
