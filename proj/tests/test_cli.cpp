#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <chrono>
#include <filesystem>
#include <fstream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "cli.hpp"

namespace fs = std::filesystem;

namespace {

struct Outcome {
  int code;
  std::string out;
  std::string err;
};

Outcome invoke(std::vector<std::string> args) {
  args.insert(args.begin(), "robust_pr");
  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  std::ostringstream out, err;
  const int code = robust_pr::cli::run(static_cast<int>(argv.size()), argv.data(), out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> key_values(const std::string& text) {
  std::map<std::string, std::string> kv;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) kv[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return kv;
}

std::string slurp(const fs::path& p) {
  std::ifstream f(p, std::ios::binary);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

fs::path scratch(const std::string& name) {
  const fs::path dir = fs::temp_directory_path() / ("robust_pr_cli_" + name);
  fs::remove_all(dir);
  return dir;
}

const std::string kConfigs = RPR_CONFIG_DIR;

}  // namespace

TEST_CASE("solve prints one seeded trial") {
  const Outcome o = invoke({"solve", "--model", "intensity", "--algo", "lad-admm", "--n", "16", "--m", "128",
                            "--noise-free", "--seed", "7"});
  REQUIRE(o.code == robust_pr::cli::kExitOk);
  const auto kv = key_values(o.out);
  for (const char* key : {"algorithm", "model", "snr_db", "initial_nmse", "nmse", "iterations", "lad_objective",
                          "termination", "instance_digest", "wall_ms"})
    CHECK(kv.count(key) == 1);
  CHECK(kv.at("algorithm") == "LAD-ADMM");
  CHECK(kv.at("snr_db") == "none");
  CHECK(std::stod(kv.at("nmse")) <= 1e-6);
  CHECK(kv.at("termination") == "converged");

  SUBCASE("the same seed gives the same instance for every algorithm") {
    const Outcome wf =
        invoke({"solve", "--model", "intensity", "--algo", "wf", "--n", "16", "--m", "128", "--noise-free", "--seed", "7"});
    CHECK(key_values(wf.out).at("instance_digest") == kv.at("instance_digest"));
    CHECK(key_values(wf.out).at("initial_nmse") == kv.at("initial_nmse"));
  }
}

TEST_CASE("solve with noise") {
  const Outcome o =
      invoke({"solve", "--model", "amplitude", "--algo", "gs", "--n", "8", "--m", "64", "--snr-db", "15", "--seed", "3"});
  REQUIRE(o.code == 0);
  CHECK(key_values(o.out).at("snr_db") == "15");
  CHECK(key_values(o.out).at("algorithm") == "GS");
}

TEST_CASE("solve usage errors exit 2") {
  CHECK(invoke({"solve", "--model", "intensity", "--algo", "wf", "--n", "32", "--m", "16", "--noise-free"}).code ==
        robust_pr::cli::kExitUsage);
  CHECK(invoke({"solve", "--model", "intensity", "--algo", "gs", "--noise-free"}).code == 2);
  CHECK(invoke({"solve", "--model", "intensity", "--algo", "wf"}).code == 2);
  CHECK(invoke({"solve", "--model", "intensity", "--algo", "wf", "--noise-free", "--snr-db", "3"}).code == 2);
  CHECK(invoke({"solve", "--model", "phase", "--algo", "wf", "--noise-free"}).code == 2);
  CHECK(invoke({"frobnicate"}).code == 2);
  CHECK(invoke({}).code == 2);
  const Outcome m = invoke({"solve", "--model", "intensity", "--algo", "wf", "--n", "32", "--m", "16", "--noise-free"});
  CHECK(m.err.find("M=16") != std::string::npos);
}

TEST_CASE("run writes CSVs and plots") {
  const fs::path dir = scratch("smoke");
  const auto t0 = std::chrono::steady_clock::now();
  const Outcome o = invoke({"run", "--config", kConfigs + "/smoke.cfg", "--out", dir.string(), "--workers", "1"});
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  REQUIRE(o.code == 0);
  CHECK(secs < 10.0);
  CHECK(fs::exists(dir / "trials.csv"));
  CHECK(fs::exists(dir / "aggregates.csv"));
  CHECK(fs::exists(dir / "nmse_vs_snr.svg"));
  CHECK_FALSE(fs::exists(dir / "nmse_vs_iteration.svg"));
  const std::string trials = slurp(dir / "trials.csv");
  CHECK(trials.rfind("algorithm,model,snr_db,trial,final_nmse,iterations,wall_ms,instance_digest\n", 0) == 0);
  CHECK(std::count(trials.begin(), trials.end(), '\n') == 1 + 2 * 2);
  fs::remove_all(dir);
}

TEST_CASE("run is byte-identical across reruns and worker counts") {
  const fs::path a = scratch("det_a"), b = scratch("det_b");
  REQUIRE(invoke({"run", "--config", kConfigs + "/smoke.cfg", "--out", a.string(), "--workers", "1"}).code == 0);
  REQUIRE(invoke({"run", "--config", kConfigs + "/smoke.cfg", "--out", b.string(), "--workers", "3"}).code == 0);
  CHECK(slurp(a / "aggregates.csv") == slurp(b / "aggregates.csv"));
  CHECK(slurp(a / "nmse_vs_snr.svg") == slurp(b / "nmse_vs_snr.svg"));
  fs::remove_all(a);
  fs::remove_all(b);
}

TEST_CASE("run config errors exit 2 and create nothing") {
  SUBCASE("missing file") {
    const fs::path dir = scratch("missing");
    const Outcome o = invoke({"run", "--config", "/nonexistent/none.cfg", "--out", dir.string()});
    CHECK(o.code == 2);
    CHECK_FALSE(fs::exists(dir));
  }
  SUBCASE("bad key reports its line") {
    const fs::path cfg = fs::temp_directory_path() / "robust_pr_cli_bad.cfg";
    {
      std::ofstream f(cfg);
      f << "model = intensity\nalgorithms = wf\nsnr_grid_db = 10\ntrails = 3\n";
    }
    const fs::path dir = scratch("bad");
    const Outcome o = invoke({"run", "--config", cfg.string(), "--out", dir.string()});
    CHECK(o.code == 2);
    CHECK(o.err.find(":4:") != std::string::npos);
    CHECK(o.err.find("trails") != std::string::npos);
    CHECK_FALSE(fs::exists(dir));
    fs::remove(cfg);
  }
  SUBCASE("invalid override") {
    const fs::path dir = scratch("override");
    CHECK(invoke({"run", "--config", kConfigs + "/smoke.cfg", "--out", dir.string(), "--trials", "0"}).code == 2);
    CHECK(invoke({"run", "--config", kConfigs + "/smoke.cfg", "--out", dir.string(), "--rho", "-1"}).code == 2);
    CHECK_FALSE(fs::exists(dir));
  }
}

TEST_CASE("run a shipped SNR sweep with a trial override") {
  const fs::path dir = scratch("fig3");
  const Outcome o =
      invoke({"run", "--config", kConfigs + "/paper_fig3.cfg", "--out", dir.string(), "--trials", "1", "--workers", "2"});
  REQUIRE(o.code == 0);
  std::istringstream rows(slurp(dir / "aggregates.csv"));
  std::string line;
  std::getline(rows, line);
  std::set<std::string> seen;
  while (std::getline(rows, line)) {
    std::vector<std::string> cells;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) cells.push_back(cell);
    REQUIRE(cells.size() == 7);
    CHECK(cells[6] == "1");
    if (cells[4] == "median") seen.insert(cells[0] + "@" + cells[3]);
  }
  for (int snr = 0; snr <= 24; snr += 3) {
    CHECK(seen.count("WF@" + std::to_string(snr)) == 1);
    CHECK(seen.count("LAD-ADMM@" + std::to_string(snr)) == 1);
  }
  fs::remove_all(dir);
}

TEST_CASE("help exits 0") {
  const Outcome o = invoke({"--help"});
  CHECK(o.code == 0);
  CHECK(o.out.find("solve") != std::string::npos);
}
