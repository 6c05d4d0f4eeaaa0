#include <doctest.h>

#include <sys/wait.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>

#include <json.hpp>

namespace fs = std::filesystem;

namespace {

const fs::path& workdir() {
  static const fs::path dir = [] {
    fs::path d = fs::temp_directory_path() / "wsym_cli_smoke";
    fs::remove_all(d);
    fs::create_directories(d);
    return d;
  }();
  return dir;
}

int run(const std::string& args, std::string* out = nullptr, std::string* err = nullptr) {
  const fs::path o = workdir() / "stdout.txt", e = workdir() / "stderr.txt";
  const std::string cmd = std::string(WSYM_CLI) + " " + args + " >" + o.string() + " 2>" + e.string();
  const int status = std::system(cmd.c_str());
  auto slurp = [](const fs::path& p) {
    std::ifstream f(p);
    std::stringstream ss;
    ss << f.rdbuf();
    return ss.str();
  };
  if (out) *out = slurp(o);
  if (err) *err = slurp(e);
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

nlohmann::json load(const fs::path& p) {
  std::ifstream f(p);
  REQUIRE(f.good());
  return nlohmann::json::parse(f);
}

std::string out_dir(const std::string& name) { return (workdir() / name).string(); }

}  // namespace

TEST_CASE("list-profiles") {
  std::string out;
  CHECK(run("list-profiles", &out) == 0);
  CHECK(out.find("perturbed") != std::string::npos);
  CHECK(run("list-profiles --json", &out) == 0);
  auto j = nlohmann::json::parse(out);
  REQUIRE(j.size() == 6);
  CHECK(j[0]["kind"] == "euclidean");
  CHECK(j[5]["parameters"].size() > 3);
  CHECK(run("list-profiles --frobnicate") == 2);
}

TEST_CASE("configuration errors exit with 2 and name the key") {
  std::string err;
  CHECK(run("verify-ps --profile torus --out " + out_dir("bad"), nullptr, &err) == 2);
  CHECK(err.find("profile") != std::string::npos);
  CHECK(run("verify-ps --set profile.dim=9 --out " + out_dir("bad"), nullptr, &err) == 2);
  CHECK(err.find("profile.dim") != std::string::npos);
  CHECK(run("verify-ps --set colour=red", nullptr, &err) == 2);
  CHECK(err.find("colour") != std::string::npos);
  CHECK(run("verify-ps --no-such-flag") == 2);
  CHECK(run("") == 2);
}

TEST_CASE("verify-fk on the gaussian writes its report") {
  const std::string dir = out_dir("fk");
  CHECK(run("verify-fk --profile gaussian --res 128 --seed 7 --threads 1 --out " + dir) == 0);
  auto j = load(fs::path(dir) / "verify-fk_gaussian_128_7.json");
  CHECK(j["summary"]["verdict"] == "pass");
  CHECK(j["seed"] == 7);
  CHECK(fs::exists(fs::path(dir) / "verify-fk_gaussian_128_7.csv"));
}

TEST_CASE("identical runs give identical reports at any thread count") {
  const std::string args = "verify-ps --profile cone --res 64 --samples 8 --p 3 --seed 3 ";
  REQUIRE(run(args + "--threads 1 --out " + out_dir("det1")) == 0);
  REQUIRE(run(args + "--threads 3 --out " + out_dir("det3")) == 0);
  auto a = load(fs::path(out_dir("det1")) / "verify-ps_cone_64_3.json");
  auto b = load(fs::path(out_dir("det3")) / "verify-ps_cone_64_3.json");
  a.erase("wall_time_seconds");
  b.erase("wall_time_seconds");
  CHECK(a.dump() == b.dump());
}

TEST_CASE("flags win over the config file") {
  const fs::path cfg = workdir() / "run.cfg";
  std::ofstream(cfg) << "profile = euclidean\nres = 40\nsamples = 3\nseed = 5\nout = " << out_dir("cfg") << "\n";
  CHECK(run("verify-ps --config " + cfg.string() + " --res 32") == 0);
  CHECK(fs::exists(fs::path(out_dir("cfg")) / "verify-ps_euclidean_32_5.json"));
  CHECK_FALSE(fs::exists(fs::path(out_dir("cfg")) / "verify-ps_euclidean_40_5.json"));
}

TEST_CASE("failing verdicts exit with 1") {
  CHECK(run("verify-saturation --profile euclidean --res 64 --samples 3 --tolerance 1e-9 --out " +
            out_dir("sat")) == 1);
}

TEST_CASE("single-solve commands and field dumps") {
  const std::string dir = out_dir("solve");
  std::string out;
  CHECK(run("symmetrize --profile gaussian --res 48 --dump --json --out " + dir, &out) == 0);
  auto j = nlohmann::json::parse(out);
  CHECK(j["norm_gaps"]["2"].get<double>() < 0.05);
  for (const char* f : {"_omega.csv", "_omega_sharp.csv", "_u.csv", "_u_sharp.csv"}) {
    CHECK(fs::exists(fs::path(dir) / (std::string("symmetrize_gaussian_48_0") + f)));
  }
  CHECK(run("eigen --profile euclidean --res 48 --mass 1 --json --out " + dir, &out) == 0);
  j = nlohmann::json::parse(out);
  CHECK(j["omega_sharp"]["lambda"].get<double>() <= j["omega"]["lambda"].get<double>());
  CHECK(run("torsion --profile euclidean --res 48 --mass 1 --json --out " + dir, &out) == 0);
  j = nlohmann::json::parse(out);
  CHECK(j["T_reduced"].get<double>() >= j["omega"]["T"].get<double>());
}

TEST_CASE("convergence study needs three resolutions") {
  CHECK(run("converge --study verify-ps --resolutions 32,64 --out " + out_dir("conv")) == 2);
  CHECK(run("converge --study norm-preservation --resolutions 24,32,48 --samples 3 --out " + out_dir("conv")) == 0);
  CHECK(fs::exists(fs::path(out_dir("conv")) / "converge_euclidean_48_0.json"));
}
