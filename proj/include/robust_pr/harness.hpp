#pragma once

#include <cstdint>
#include <iosfwd>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "robust_pr/solvers.hpp"

namespace robust_pr {

enum class Algorithm { WF, GS, LadAdmm };

/// "WF", "GS", "LAD-ADMM"
std::string_view to_string(Algorithm algorithm);
/// Case-insensitive; accepts "wf", "gs", "lad-admm" (also "ladadmm", "admm").
Algorithm parse_algorithm(std::string_view text);

struct NoiseSpec {
  double c2 = 0.1;
  double variance_ratio = 100.0;
};

struct ExperimentConfig {
  int n = 32;
  double m_over_n = 8.0;
  ObservationKind model = ObservationKind::Intensity;
  std::vector<Algorithm> algorithms;
  std::vector<double> snr_grid_db;
  int trials = 100;
  std::uint64_t master_seed = 1;
  SolverOptions solver_options;
  std::optional<NoiseSpec> noise = NoiseSpec{};  // nullopt: noise-free observations
  bool record_traces = false;                     // per-iteration NMSE curves; needs a single SNR

  Index m() const;
  void validate() const;
};

struct TrialRecord {
  Algorithm algorithm = Algorithm::LadAdmm;
  ObservationKind model = ObservationKind::Intensity;
  double snr_db = 0.0;
  int trial = 0;
  double initial_nmse = 0.0;
  double final_nmse = 0.0;
  double lad_objective = 0.0;
  int iterations = 0;
  Termination termination = Termination::MaxIters;
  double wall_ms = 0.0;
  std::uint64_t instance_digest = 0;
  std::vector<double> nmse_trace;  // filled when traces are recorded
};

enum class XKind { SnrDb, Iteration };
enum class Statistic { Median, Mean };
std::string_view to_string(XKind kind);
std::string_view to_string(Statistic stat);

struct AggregateRecord {
  Algorithm algorithm = Algorithm::LadAdmm;
  ObservationKind model = ObservationKind::Intensity;
  XKind x_kind = XKind::SnrDb;
  double x_value = 0.0;
  Statistic stat = Statistic::Median;
  double nmse = 0.0;
  int trials = 0;
};

struct ExperimentResult {
  std::vector<AggregateRecord> aggregates;
  std::vector<TrialRecord> trials;
};

/// Raised when one trial fails; names the failing (algorithm, snr, trial).
class TrialError : public std::runtime_error {
 public:
  TrialError(Algorithm algorithm, double snr_db, int trial, const std::string& what);

  Algorithm algorithm;
  double snr_db;
  int trial;
};

/// Hash-mixes (master_seed, snr_db bits, trial_index) into a generator seed. Platform independent.
std::uint64_t derive_seed(std::uint64_t master_seed, double snr_db, std::uint64_t trial_index);

/// FNV-1a over the bytes of x, A, the observations and x0.
std::uint64_t instance_digest(const ProblemInstance& instance, const Signal& x_init);

/// Everything an algorithm consumes in one trial. Independent of the algorithm.
struct PreparedTrial {
  ProblemInstance instance;
  Signal x_init;
  std::uint64_t digest = 0;
};

PreparedTrial prepare_trial(const ExperimentConfig& config, double snr_db, int trial_index);
SolverResult run_solver(Algorithm algorithm, const ProblemInstance& instance, const SolverOptions& options,
                        const Signal& x_init);
TrialRecord run_prepared(const ExperimentConfig& config, const PreparedTrial& prepared, Algorithm algorithm,
                         double snr_db, int trial_index);
TrialRecord run_trial(const ExperimentConfig& config, Algorithm algorithm, double snr_db, int trial_index);

/// Runs every (snr, trial) on `workers` threads (<= 0 means 1). Output is independent of `workers`.
ExperimentResult run_experiment(const ExperimentConfig& config, int workers = 1);

/// Median and mean per (algorithm, snr), plus per (algorithm, iteration) when traces exist.
/// Traces that stopped early are held at their final value up to max_outer_iters.
std::vector<AggregateRecord> aggregate(const ExperimentConfig& config, const std::vector<TrialRecord>& trials);

double median_of(std::vector<double> values);
double mean_of(const std::vector<double>& values);

/// %.9g
std::string format_float(double value);
std::string format_digest(std::uint64_t digest);

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& trials);
void write_aggregates_csv(std::ostream& os, const std::vector<AggregateRecord>& aggregates);

}  // namespace robust_pr
