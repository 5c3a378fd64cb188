#include "cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <ostream>
#include <thread>

#include <CLI11.hpp>

#include "robust_pr/config.hpp"
#include "robust_pr/harness.hpp"
#include "robust_pr/plot.hpp"

namespace robust_pr::cli {

namespace {

struct RunArgs {
  std::string config;
  std::string out = "results";
  std::optional<int> trials;
  std::optional<double> rho;
  std::optional<int> workers;
};

struct SolveArgs {
  std::string model;
  std::string algo;
  int n = 32;
  int m = 256;
  std::optional<double> snr_db;
  bool noise_free = false;
  std::uint64_t seed = 1;
  std::optional<double> rho;
};

int resolve_workers(const std::optional<int>& flag) {
  if (flag) return *flag;
  if (const char* env = std::getenv("ROBUST_PR_WORKERS")) {
    try {
      return std::stoi(env);
    } catch (const std::exception&) {
      throw std::invalid_argument(std::string("ROBUST_PR_WORKERS is not an integer: ") + env);
    }
  }
  return static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
}

void write_file(const std::filesystem::path& path, const std::string& contents) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("cannot write " + path.string());
  f << contents;
  if (!f) throw std::runtime_error("failed writing " + path.string());
}

int cmd_run(const RunArgs& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  int workers = 1;
  try {
    config = load_config(args.config);
    if (args.trials) config.trials = *args.trials;
    if (args.rho) config.solver_options.rho = *args.rho;
    config.validate();
    workers = resolve_workers(args.workers);
    if (workers < 1) throw std::invalid_argument("workers must be >= 1");
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  ExperimentResult result;
  try {
    result = run_experiment(config, workers);
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }

  try {
    const std::filesystem::path dir(args.out);
    std::filesystem::create_directories(dir);
    std::ostringstream trials, aggregates;
    write_trials_csv(trials, result.trials);
    write_aggregates_csv(aggregates, result.aggregates);
    write_file(dir / "trials.csv", trials.str());
    write_file(dir / "aggregates.csv", aggregates.str());
    for (const auto& plot : plots_from_aggregates(result.aggregates)) {
      write_file(dir / plot.image_path, render_svg(plot));
      out << "wrote " << (dir / plot.image_path).string() << '\n';
    }
    out << "wrote " << (dir / "trials.csv").string() << '\n' << "wrote " << (dir / "aggregates.csv").string() << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

int cmd_solve(const SolveArgs& args, std::ostream& out, std::ostream& err) {
  ExperimentConfig config;
  double snr = 0.0;
  Algorithm algorithm{};
  try {
    if (args.noise_free == args.snr_db.has_value())
      throw std::invalid_argument("give exactly one of --snr-db or --noise-free");
    if (args.n < 1) throw std::invalid_argument("--n must be >= 1");
    if (args.m < args.n) throw std::invalid_argument("--m must be >= --n (got M=" + std::to_string(args.m) +
                                                     ", N=" + std::to_string(args.n) + ")");
    config.model = parse_observation_kind(args.model);
    algorithm = parse_algorithm(args.algo);
    config.n = args.n;
    config.m_over_n = static_cast<double>(args.m) / args.n;
    config.algorithms = {algorithm};
    snr = args.snr_db.value_or(0.0);
    config.snr_grid_db = {snr};
    config.trials = 1;
    config.master_seed = args.seed;
    config.solver_options = SolverOptions::defaults_for(config.model);
    if (args.rho) config.solver_options.rho = *args.rho;
    if (args.noise_free) config.noise.reset();
    config.validate();
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  try {
    const TrialRecord rec = run_trial(config, algorithm, snr, 0);
    out << "algorithm=" << to_string(rec.algorithm) << '\n'
        << "model=" << to_string(rec.model) << '\n'
        << "snr_db=" << (args.noise_free ? std::string("none") : format_float(snr)) << '\n'
        << "initial_nmse=" << format_float(rec.initial_nmse) << '\n'
        << "nmse=" << format_float(rec.final_nmse) << '\n'
        << "iterations=" << rec.iterations << '\n'
        << "lad_objective=" << format_float(rec.lad_objective) << '\n'
        << "termination=" << to_string(rec.termination) << '\n'
        << "instance_digest=" << format_digest(rec.instance_digest) << '\n'
        << "wall_ms=" << format_float(rec.wall_ms) << '\n';
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Robust phase retrieval: LAD-ADMM, WF and GS solvers with a Monte Carlo harness"};
  app.require_subcommand(1);

  RunArgs run_args;
  auto* run_cmd = app.add_subcommand("run", "Run an experiment config and write CSVs and plots");
  run_cmd->add_option("--config", run_args.config, "Experiment config file")->required();
  run_cmd->add_option("--out", run_args.out, "Output directory")->capture_default_str();
  run_cmd->add_option("--trials", run_args.trials, "Override the number of trials");
  run_cmd->add_option("--rho", run_args.rho, "Override the ADMM penalty");
  run_cmd->add_option("--workers", run_args.workers, "Worker threads (fallback: ROBUST_PR_WORKERS)");

  SolveArgs solve_args;
  auto* solve_cmd = app.add_subcommand("solve", "Run one seeded trial and print key=value results");
  solve_cmd->add_option("--model", solve_args.model, "intensity | amplitude")->required();
  solve_cmd->add_option("--algo", solve_args.algo, "wf | gs | lad-admm")->required();
  solve_cmd->add_option("--n", solve_args.n, "Signal length")->capture_default_str();
  solve_cmd->add_option("--m", solve_args.m, "Number of measurements")->capture_default_str();
  auto* snr_opt = solve_cmd->add_option("--snr-db", solve_args.snr_db, "SNR of the GMM noise in dB");
  auto* nf_opt = solve_cmd->add_flag("--noise-free", solve_args.noise_free, "Noise-free observations");
  snr_opt->excludes(nf_opt);
  solve_cmd->add_option("--seed", solve_args.seed, "Master seed")->capture_default_str();
  solve_cmd->add_option("--rho", solve_args.rho, "ADMM penalty");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp& e) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  }

  if (*run_cmd) return cmd_run(run_args, out, err);
  return cmd_solve(solve_args, out, err);
}

}  // namespace robust_pr::cli
