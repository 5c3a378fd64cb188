#include "robust_pr/harness.hpp"

#include <algorithm>
#include <atomic>
#include <bit>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <ostream>
#include <thread>

#include "robust_pr/metrics.hpp"

namespace robust_pr {

std::string_view to_string(Algorithm algorithm) {
  switch (algorithm) {
    case Algorithm::WF: return "WF";
    case Algorithm::GS: return "GS";
    case Algorithm::LadAdmm: return "LAD-ADMM";
  }
  return "?";
}

Algorithm parse_algorithm(std::string_view text) {
  std::string lower(text);
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char c) { return std::tolower(c); });
  if (lower == "wf") return Algorithm::WF;
  if (lower == "gs") return Algorithm::GS;
  if (lower == "lad-admm" || lower == "ladadmm" || lower == "admm") return Algorithm::LadAdmm;
  throw std::invalid_argument("unknown algorithm '" + std::string(text) + "' (expected wf, gs or lad-admm)");
}

std::string_view to_string(XKind kind) { return kind == XKind::SnrDb ? "snr_db" : "iteration"; }
std::string_view to_string(Statistic stat) { return stat == Statistic::Median ? "median" : "mean"; }

Index ExperimentConfig::m() const { return static_cast<Index>(std::llround(m_over_n * n)); }

void ExperimentConfig::validate() const {
  if (n < 1) throw std::invalid_argument("n must be >= 1");
  if (!(m_over_n >= 1.0)) throw std::invalid_argument("m_over_n must be >= 1");
  if (trials < 1) throw std::invalid_argument("trials must be >= 1");
  if (snr_grid_db.empty()) throw std::invalid_argument("snr_grid_db must not be empty");
  for (double s : snr_grid_db)
    if (!std::isfinite(s)) throw std::invalid_argument("snr_grid_db entries must be finite");
  if (algorithms.empty()) throw std::invalid_argument("algorithms must not be empty");
  for (Algorithm a : algorithms) {
    if (a == Algorithm::WF && model != ObservationKind::Intensity)
      throw std::invalid_argument("WF needs the intensity model");
    if (a == Algorithm::GS && model != ObservationKind::Amplitude)
      throw std::invalid_argument("GS needs the amplitude model");
  }
  for (std::size_t i = 0; i < algorithms.size(); ++i)
    for (std::size_t j = i + 1; j < algorithms.size(); ++j)
      if (algorithms[i] == algorithms[j]) throw std::invalid_argument("algorithms lists a solver twice");
  if (record_traces && snr_grid_db.size() != 1)
    throw std::invalid_argument("record_traces needs a single-entry snr_grid_db");
  if (noise) {
    if (!(noise->c2 > 0.0 && noise->c2 < 1.0)) throw std::invalid_argument("noise.c2 must lie in (0, 1)");
    if (!(noise->variance_ratio > 1.0)) throw std::invalid_argument("noise.variance_ratio must exceed 1");
  }
  solver_options.validate();
}

TrialError::TrialError(Algorithm algorithm_, double snr_db_, int trial_, const std::string& what)
    : std::runtime_error("trial failed (algorithm=" + std::string(to_string(algorithm_)) +
                         ", snr_db=" + format_float(snr_db_) + ", trial=" + std::to_string(trial_) + "): " + what),
      algorithm(algorithm_),
      snr_db(snr_db_),
      trial(trial_) {}

namespace {

constexpr std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

class Fnv1a {
 public:
  void add(const void* data, std::size_t bytes) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < bytes; ++i) {
      hash_ ^= p[i];
      hash_ *= 0x100000001b3ULL;
    }
  }
  template <typename Derived>
  void add(const Eigen::DenseBase<Derived>& m) {
    const auto& d = m.derived();
    add(d.data(), static_cast<std::size_t>(d.size()) * sizeof(typename Derived::Scalar));
  }
  std::uint64_t value() const { return hash_; }

 private:
  std::uint64_t hash_ = 0xcbf29ce484222325ULL;
};

}  // namespace

std::uint64_t derive_seed(std::uint64_t master_seed, double snr_db, std::uint64_t trial_index) {
  // -0.0 and 0.0 name the same grid point.
  const double snr = snr_db == 0.0 ? 0.0 : snr_db;
  std::uint64_t h = splitmix64(master_seed);
  h = splitmix64(h ^ std::bit_cast<std::uint64_t>(snr));
  h = splitmix64(h ^ trial_index);
  return h;
}

std::uint64_t instance_digest(const ProblemInstance& instance, const Signal& x_init) {
  Fnv1a h;
  h.add(instance.truth);
  h.add(instance.ensemble.matrix().dense());
  h.add(instance.observations.values);
  h.add(x_init);
  return h.value();
}

PreparedTrial prepare_trial(const ExperimentConfig& config, double snr_db, int trial_index) {
  const std::uint64_t seed = derive_seed(config.master_seed, snr_db, static_cast<std::uint64_t>(trial_index));
  Rng rng(seed);
  GeneratedProblem gen = generate_instance(config.n, config.m(), rng);
  Observations obs = observe(gen.ensemble, gen.truth, config.model);
  std::optional<GmmNoiseModel> noise;
  if (config.noise) {
    noise = calibrate_gmm(gen.truth, snr_db, config.noise->c2, config.noise->variance_ratio);
    obs = add_noise(obs, sample_gmm_noise(*noise, obs.size(), rng));
  }
  PreparedTrial out{ProblemInstance{std::move(gen.truth), std::move(gen.ensemble), std::move(obs), noise, seed},
                    Signal{}, 0};
  out.x_init = spectral_init(out.instance.ensemble, out.instance.observations);
  out.digest = instance_digest(out.instance, out.x_init);
  return out;
}

SolverResult run_solver(Algorithm algorithm, const ProblemInstance& instance, const SolverOptions& options,
                        const Signal& x_init) {
  const SolveInput input = solve_input(instance);
  switch (algorithm) {
    case Algorithm::WF: return wf_baseline(input, options, x_init);
    case Algorithm::GS: return gs_baseline(input, options, x_init);
    case Algorithm::LadAdmm:
      return instance.observations.kind == ObservationKind::Intensity ? admm_intensity(input, options, x_init)
                                                                        : admm_amplitude(input, options, x_init);
  }
  throw std::logic_error("unhandled algorithm");
}

TrialRecord run_prepared(const ExperimentConfig& config, const PreparedTrial& prepared, Algorithm algorithm,
                         double snr_db, int trial_index) {
  const auto start = std::chrono::steady_clock::now();
  SolverResult result = run_solver(algorithm, prepared.instance, config.solver_options, prepared.x_init);
  const auto stop = std::chrono::steady_clock::now();

  TrialRecord rec;
  rec.algorithm = algorithm;
  rec.model = config.model;
  rec.snr_db = snr_db;
  rec.trial = trial_index;
  rec.initial_nmse = result.trace.front().nmse.value();
  rec.final_nmse = nmse(result.estimate, prepared.instance.truth);
  rec.lad_objective = lad_objective(prepared.instance.ensemble, result.estimate, prepared.instance.observations);
  rec.iterations = result.iterations();
  rec.termination = result.termination;
  rec.wall_ms = std::chrono::duration<double, std::milli>(stop - start).count();
  rec.instance_digest = prepared.digest;
  if (config.record_traces) {
    rec.nmse_trace.reserve(result.trace.size());
    for (const auto& t : result.trace) rec.nmse_trace.push_back(t.nmse.value());
  }
  return rec;
}

TrialRecord run_trial(const ExperimentConfig& config, Algorithm algorithm, double snr_db, int trial_index) {
  try {
    return run_prepared(config, prepare_trial(config, snr_db, trial_index), algorithm, snr_db, trial_index);
  } catch (const TrialError&) {
    throw;
  } catch (const std::exception& e) {
    throw TrialError(algorithm, snr_db, trial_index, e.what());
  }
}

ExperimentResult run_experiment(const ExperimentConfig& config, int workers) {
  config.validate();
  const std::size_t n_snr = config.snr_grid_db.size();
  const std::size_t n_trials = static_cast<std::size_t>(config.trials);
  const std::size_t n_alg = config.algorithms.size();
  const std::size_t n_tasks = n_snr * n_trials;

  // Slot layout: (snr, trial, algorithm); each task owns a disjoint range.
  std::vector<TrialRecord> records(n_tasks * n_alg);
  std::vector<std::exception_ptr> failures(n_tasks);
  std::vector<int> failed_alg(n_tasks, 0);
  std::atomic<std::size_t> next{0};

  const auto work = [&] {
    for (std::size_t task = next++; task < n_tasks; task = next++) {
      const double snr = config.snr_grid_db[task / n_trials];
      const int trial = static_cast<int>(task % n_trials);
      std::size_t a = 0;
      try {
        const PreparedTrial prepared = prepare_trial(config, snr, trial);
        for (; a < n_alg; ++a)
          records[task * n_alg + a] = run_prepared(config, prepared, config.algorithms[a], snr, trial);
      } catch (...) {
        failures[task] = std::current_exception();
        failed_alg[task] = static_cast<int>(std::min(a, n_alg - 1));
      }
    }
  };

  const int threads = std::max(1, std::min<int>(workers, static_cast<int>(n_tasks)));
  if (threads == 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    pool.reserve(static_cast<std::size_t>(threads));
    for (int t = 0; t < threads; ++t) pool.emplace_back(work);
    for (auto& t : pool) t.join();
  }

  for (std::size_t task = 0; task < n_tasks; ++task) {
    if (!failures[task]) continue;
    const Algorithm alg = config.algorithms[static_cast<std::size_t>(failed_alg[task])];
    const double snr = config.snr_grid_db[task / n_trials];
    const int trial = static_cast<int>(task % n_trials);
    try {
      std::rethrow_exception(failures[task]);
    } catch (const std::exception& e) {
      throw TrialError(alg, snr, trial, e.what());
    }
  }

  // Present trials grouped by algorithm, then snr, then trial index.
  std::vector<TrialRecord> ordered;
  ordered.reserve(records.size());
  for (std::size_t a = 0; a < n_alg; ++a)
    for (std::size_t task = 0; task < n_tasks; ++task) ordered.push_back(std::move(records[task * n_alg + a]));

  ExperimentResult out;
  out.aggregates = aggregate(config, ordered);
  out.trials = std::move(ordered);
  return out;
}

double median_of(std::vector<double> values) {
  if (values.empty()) throw std::invalid_argument("median of empty set");
  const std::size_t mid = values.size() / 2;
  std::nth_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid), values.end());
  const double upper = values[mid];
  if (values.size() % 2 == 1) return upper;
  const double lower = *std::max_element(values.begin(), values.begin() + static_cast<std::ptrdiff_t>(mid));
  return 0.5 * (lower + upper);
}

double mean_of(const std::vector<double>& values) {
  if (values.empty()) throw std::invalid_argument("mean of empty set");
  double sum = 0.0;
  for (double v : values) sum += v;
  return sum / static_cast<double>(values.size());
}

std::vector<AggregateRecord> aggregate(const ExperimentConfig& config, const std::vector<TrialRecord>& trials) {
  std::vector<AggregateRecord> out;
  const auto emit = [&](Algorithm alg, XKind kind, double x, const std::vector<double>& values) {
    const int count = static_cast<int>(values.size());
    out.push_back({alg, config.model, kind, x, Statistic::Median, median_of(values), count});
    out.push_back({alg, config.model, kind, x, Statistic::Mean, mean_of(values), count});
  };

  for (Algorithm alg : config.algorithms) {
    for (double snr : config.snr_grid_db) {
      std::vector<double> finals;
      for (const auto& t : trials)
        if (t.algorithm == alg && t.snr_db == snr) finals.push_back(t.final_nmse);
      if (static_cast<int>(finals.size()) != config.trials)
        throw std::logic_error("aggregate: expected " + std::to_string(config.trials) + " trials for " +
                               std::string(to_string(alg)) + " at snr " + format_float(snr));
      emit(alg, XKind::SnrDb, snr, finals);
    }
  }

  if (!config.record_traces) return out;
  const std::size_t length = static_cast<std::size_t>(config.solver_options.max_outer_iters) + 1;
  for (Algorithm alg : config.algorithms) {
    std::vector<const TrialRecord*> group;
    for (const auto& t : trials)
      if (t.algorithm == alg) group.push_back(&t);
    for (std::size_t k = 0; k < length; ++k) {
      std::vector<double> values;
      values.reserve(group.size());
      for (const TrialRecord* t : group) {
        if (t->nmse_trace.empty()) throw std::logic_error("aggregate: trial without a recorded trace");
        values.push_back(t->nmse_trace[std::min(k, t->nmse_trace.size() - 1)]);
      }
      emit(alg, XKind::Iteration, static_cast<double>(k), values);
    }
  }
  return out;
}

std::string format_float(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.9g", value);
  return buf;
}

std::string format_digest(std::uint64_t digest) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(digest));
  return buf;
}

void write_trials_csv(std::ostream& os, const std::vector<TrialRecord>& trials) {
  os << "algorithm,model,snr_db,trial,final_nmse,iterations,wall_ms,instance_digest\n";
  for (const auto& t : trials) {
    os << to_string(t.algorithm) << ',' << to_string(t.model) << ',' << format_float(t.snr_db) << ',' << t.trial
       << ',' << format_float(t.final_nmse) << ',' << t.iterations << ',' << format_float(t.wall_ms) << ','
       << format_digest(t.instance_digest) << '\n';
  }
}

void write_aggregates_csv(std::ostream& os, const std::vector<AggregateRecord>& aggregates) {
  os << "algorithm,model,x_kind,x_value,stat,nmse,trials\n";
  for (const auto& a : aggregates) {
    os << to_string(a.algorithm) << ',' << to_string(a.model) << ',' << to_string(a.x_kind) << ','
       << format_float(a.x_value) << ',' << to_string(a.stat) << ',' << format_float(a.nmse) << ',' << a.trials
       << '\n';
  }
}

}  // namespace robust_pr
