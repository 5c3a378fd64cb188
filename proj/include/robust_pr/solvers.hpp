#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string_view>
#include <vector>

#include "robust_pr/problem.hpp"

namespace robust_pr {

/// Step schedule mu_t = min(1 - exp(-t / tau0), mu_max), applied as mu_t / ||x0||^2.
struct WfStepParams {
  double tau0 = 330.0;
  double mu_max = 0.2;
};

struct SolverOptions {
  double rho = 1.0;
  int max_outer_iters = 200;
  double outer_tol = 1e-6;
  int inner_iters = 50;
  WfStepParams wf_step_params;

  void validate() const;

  /// 50 WF steps per outer iteration for intensity data, 25 GS rounds for amplitude data.
  static SolverOptions defaults_for(ObservationKind kind);
};

enum class Termination { Converged, MaxIters };
std::string_view to_string(Termination t);

struct TraceRecord {
  std::optional<double> nmse;  // absent when no ground truth was supplied
  double objective = 0.0;
  double primal_residual = 0.0;
};

using IterateTrace = std::vector<TraceRecord>;

struct SolverResult {
  Signal estimate;
  IterateTrace trace;  // entry 0 is the starting point
  Termination termination = Termination::MaxIters;

  int iterations() const { return static_cast<int>(trace.size()) - 1; }
};

struct AdmmState {
  Signal x;
  RealVector z;
  RealVector lambda;
  int iteration = 0;
};

// ---------------------------------------------------------------------------
// l1 proximal operator

/// sgn(u) * max(|u| - a, 0)
double soft_threshold(double u, double a);

/// argmin_z 0.5 ||z - c||^2 + threshold ||z||_1, evaluated elementwise.
RealVector prox_l1(const RealVector& c, double threshold);

// ---------------------------------------------------------------------------
// Initialization

/// Leading eigenvector of (1/M) sum_i w_i a_i a_i^H, scaled to sqrt(mean(w)).
/// w = y for intensity data, b^2 for amplitude data; negative weights count as 0.
Signal spectral_init(const MeasurementEnsemble& ensemble, const Observations& observations);

// ---------------------------------------------------------------------------
// Inner least-squares solvers

struct InnerResult {
  Signal x;
  std::vector<double> objective;  // one entry per step/round
};

/// f(x) = 1/(4M) sum_i (|a_i^H x|^2 - target_i)^2
double wf_objective(const MeasurementEnsemble& ensemble, const RealVector& target, const Signal& x);

/// (1/M) A^H ((|Ax|^2 - target) .* Ax). Equals df/dRe(x) + j df/dIm(x).
ComplexVector wf_gradient(const MeasurementEnsemble& ensemble, const RealVector& target, const Signal& x);

double wf_step_size(const WfStepParams& params, std::int64_t step);

struct WfSchedule {
  WfStepParams params;
  std::int64_t first_step = 1;  // value of t for the first step of this call
  double scale_norm_sq = 0.0;   // ||x0||^2 divisor; 0 means ||x_init||^2
};

/// Plain Wirtinger flow on f. The objective is recorded after every step.
InnerResult wf_solve(const MeasurementEnsemble& ensemble, const RealVector& target, const Signal& x_init,
                     int iters, const WfSchedule& schedule = {});

/// Gerchberg-Saxton rounds alternating exact minimisation of ||Ax - target .* e^{j phi}||^2:
/// phi = arg(Ax) (0 where Ax vanishes, shifted by pi where the target is negative), then
/// x = lstsq(target .* e^{j phi}). The objective is recorded after each round and never increases.
InnerResult gs_solve(const MeasurementEnsemble& ensemble, const RealVector& target, const Signal& x_init,
                     int iters);

// ---------------------------------------------------------------------------
// Outer solvers

struct SolveInput {
  const MeasurementEnsemble& ensemble;
  const Observations& observations;
  std::optional<Signal> truth;
};

SolveInput solve_input(const ProblemInstance& instance);

/// Called after each outer iteration with the state before and after it and the primal residual.
using AdmmObserver = std::function<void(const AdmmState& before, const AdmmState& after, const RealVector& residual)>;

/// LAD-ADMM on intensity data. Each outer iteration:
///   x <- WF warm-started at x on target z + y - lambda / rho
///   c  = |Ax|^2 - y + lambda / rho
///   z <- soft(c, 1 / rho)
///   lambda <- lambda + rho (|Ax|^2 - y - z)
/// Stops when ||(|Ax|^2 - y - z)||_2 / sqrt(M) <= outer_tol. The trace objective is ||y - |Ax|^2||_1.
SolverResult admm_intensity(const SolveInput& input, const SolverOptions& options, const Signal& x_init,
                            const AdmmObserver& observer = {});

/// LAD-ADMM on amplitude data; |Ax| replaces |Ax|^2 and GS rounds solve the x-step.
SolverResult admm_amplitude(const SolveInput& input, const SolverOptions& options, const Signal& x_init,
                            const AdmmObserver& observer = {});

/// Least-squares baselines run in chunks of `inner_iters` steps, one trace entry per chunk, so their
/// traces share the outer-iteration axis with ADMM. The residual is m(Ax) - obs (an ADMM with z = 0);
/// the objective is ||obs - m(Ax)||_2^2. Converged once a chunk moves x by at most outer_tol relative.
SolverResult wf_baseline(const SolveInput& input, const SolverOptions& options, const Signal& x_init);
SolverResult gs_baseline(const SolveInput& input, const SolverOptions& options, const Signal& x_init);

}  // namespace robust_pr
