#include "robust_pr/solvers.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "robust_pr/metrics.hpp"

namespace robust_pr {

void SolverOptions::validate() const {
  if (!(rho > 0.0) || !std::isfinite(rho)) throw std::invalid_argument("rho must be positive");
  if (max_outer_iters < 1) throw std::invalid_argument("max_outer_iters must be >= 1");
  if (!(outer_tol >= 0.0)) throw std::invalid_argument("outer_tol must be >= 0");
  if (inner_iters < 1) throw std::invalid_argument("inner_iters must be >= 1");
  if (!(wf_step_params.tau0 > 0.0)) throw std::invalid_argument("wf_tau0 must be positive");
  if (!(wf_step_params.mu_max > 0.0)) throw std::invalid_argument("wf_mu_max must be positive");
}

SolverOptions SolverOptions::defaults_for(ObservationKind kind) {
  SolverOptions opts;
  opts.inner_iters = kind == ObservationKind::Intensity ? 50 : 25;
  return opts;
}

std::string_view to_string(Termination t) { return t == Termination::Converged ? "converged" : "max_iters"; }

double soft_threshold(double u, double a) {
  if (!(a >= 0.0)) throw std::invalid_argument("soft_threshold: threshold must be >= 0");
  const double mag = std::abs(u) - a;
  if (mag <= 0.0) return 0.0;
  return u > 0.0 ? mag : -mag;
}

RealVector prox_l1(const RealVector& c, double threshold) {
  if (!(threshold >= 0.0)) throw std::invalid_argument("prox_l1: threshold must be >= 0");
  return c.unaryExpr([threshold](double u) { return soft_threshold(u, threshold); });
}

Signal spectral_init(const MeasurementEnsemble& ensemble, const Observations& observations) {
  if (observations.size() != ensemble.rows())
    throw DimensionError("observation length does not match ensemble rows");
  RealVector w = observations.kind == ObservationKind::Intensity ? RealVector(observations.values)
                                                                 : RealVector(observations.values.cwiseAbs2());
  w = w.cwiseMax(0.0);
  if (!(w.sum() > 0.0)) throw std::invalid_argument("spectral_init: observations carry no energy");

  const double inv_m = 1.0 / static_cast<double>(ensemble.rows());
  const auto& a = ensemble.matrix().dense();
  LinearOperator apply = [&](const ComplexVector& v) -> ComplexVector {
    ComplexVector av = a * v;
    av.array() *= w.array().cast<Complex>();
    return inv_m * (a.adjoint() * av);
  };
  EigenPair top = power_iteration(apply, ensemble.cols());
  return std::sqrt(w.mean()) * top.vector;
}

// ---------------------------------------------------------------------------

namespace {

void check_target(const MeasurementEnsemble& ensemble, const RealVector& target, const Signal& x) {
  if (target.size() != ensemble.rows())
    throw DimensionError("target length " + std::to_string(target.size()) + " != M = " +
                         std::to_string(ensemble.rows()));
  if (x.size() != ensemble.cols())
    throw DimensionError("signal length " + std::to_string(x.size()) + " != N = " + std::to_string(ensemble.cols()));
}

// Unit phasor of each entry; zero entries get phase 0.
ComplexVector phasors(const ComplexVector& v) {
  ComplexVector out(v.size());
  for (Index i = 0; i < v.size(); ++i) {
    const double mag = std::abs(v[i]);
    out[i] = mag > 0.0 ? v[i] / mag : Complex(1.0, 0.0);
  }
  return out;
}

}  // namespace

double wf_objective(const MeasurementEnsemble& ensemble, const RealVector& target, const Signal& x) {
  check_target(ensemble, target, x);
  const RealVector r = ensemble.forward(x).cwiseAbs2() - target;
  return r.squaredNorm() / (4.0 * static_cast<double>(ensemble.rows()));
}

ComplexVector wf_gradient(const MeasurementEnsemble& ensemble, const RealVector& target, const Signal& x) {
  check_target(ensemble, target, x);
  ComplexVector ax = ensemble.forward(x);
  const RealVector r = ax.cwiseAbs2() - target;
  ax.array() *= r.array().cast<Complex>();
  return ensemble.adjoint(ax) / static_cast<double>(ensemble.rows());
}

double wf_step_size(const WfStepParams& params, std::int64_t step) {
  return std::min(1.0 - std::exp(-static_cast<double>(step) / params.tau0), params.mu_max);
}

InnerResult wf_solve(const MeasurementEnsemble& ensemble, const RealVector& target, const Signal& x_init, int iters,
                     const WfSchedule& schedule) {
  check_target(ensemble, target, x_init);
  InnerResult out{x_init, {}};
  if (iters <= 0) return out;

  const double scale = schedule.scale_norm_sq > 0.0 ? schedule.scale_norm_sq : x_init.squaredNorm();
  if (!(scale > 0.0)) throw std::invalid_argument("wf_solve: step normalisation needs a nonzero start");
  const auto& a = ensemble.matrix().dense();
  const double inv_m = 1.0 / static_cast<double>(ensemble.rows());
  const double inv_4m = 0.25 * inv_m;

  out.objective.reserve(static_cast<std::size_t>(iters));
  Signal& x = out.x;
  ComplexVector ax = a * x;
  ComplexVector weighted(ax.size());
  for (int k = 0; k < iters; ++k) {
    const RealVector r = ax.cwiseAbs2() - target;
    weighted = ax.array() * r.array().cast<Complex>();
    const double mu = wf_step_size(schedule.params, schedule.first_step + k);
    x.noalias() -= (mu / scale * inv_m) * (a.adjoint() * weighted);
    ax.noalias() = a * x;
    out.objective.push_back((ax.cwiseAbs2() - target).squaredNorm() * inv_4m);
  }
  return out;
}

InnerResult gs_solve(const MeasurementEnsemble& ensemble, const RealVector& target, const Signal& x_init,
                     int iters) {
  check_target(ensemble, target, x_init);
  InnerResult out{x_init, {}};
  if (iters <= 0) return out;

  const auto& a = ensemble.matrix().dense();
  const auto& fact = ensemble.factorization();
  out.objective.reserve(static_cast<std::size_t>(iters));
  ComplexVector ax = a * out.x;
  for (int k = 0; k < iters; ++k) {
    ComplexVector desired = phasors(ax);
    // target_i e^{j phi_i} with the phase that minimises the joint objective: arg(Ax)_i, or
    // arg(Ax)_i + pi where target_i < 0.
    desired.array() *= target.array().abs().cast<Complex>();
    out.x = fact.solve(desired);
    ax.noalias() = a * out.x;
    out.objective.push_back((ax - desired).squaredNorm());
  }
  return out;
}

// ---------------------------------------------------------------------------

SolveInput solve_input(const ProblemInstance& instance) {
  return SolveInput{instance.ensemble, instance.observations, instance.truth};
}

namespace {

void check_input(const SolveInput& input, ObservationKind expected, const Signal& x_init, const SolverOptions& opts) {
  opts.validate();
  if (input.observations.kind != expected)
    throw std::invalid_argument("solver expects " + std::string(to_string(expected)) + " observations, got " +
                                std::string(to_string(input.observations.kind)));
  if (input.observations.size() != input.ensemble.rows())
    throw DimensionError("observation length does not match ensemble rows");
  if (x_init.size() != input.ensemble.cols()) throw DimensionError("initial point has wrong length");
  if (input.truth && input.truth->size() != input.ensemble.cols()) throw DimensionError("truth has wrong length");
}

TraceRecord make_record(const SolveInput& input, const Signal& x, double objective, double residual) {
  TraceRecord rec;
  if (input.truth) rec.nmse = nmse(x, *input.truth);
  rec.objective = objective;
  rec.primal_residual = residual;
  return rec;
}

double rms(const RealVector& v) { return v.norm() / std::sqrt(static_cast<double>(v.size())); }

// Shared outer loop of both LAD-ADMM variants. `x_step` solves the x-subproblem for a target
// warm-started at the current x and reports how many inner steps it took.
template <typename XStep>
SolverResult run_admm(const SolveInput& input, const SolverOptions& opts, const Signal& x_init,
                      const AdmmObserver& observer, XStep&& x_step) {
  const auto& obs = input.observations.values;
  const ObservationKind kind = input.observations.kind;
  const Index m = input.ensemble.rows();
  const double rho = opts.rho;

  AdmmState state{x_init, RealVector::Zero(m), RealVector::Zero(m), 0};

  SolverResult result;
  result.trace.reserve(static_cast<std::size_t>(opts.max_outer_iters) + 1);
  {
    const RealVector fit = model_output(input.ensemble, x_init, kind);
    result.trace.push_back(make_record(input, x_init, (obs - fit).lpNorm<1>(), rms(fit - obs)));
  }

  for (int k = 0; k < opts.max_outer_iters; ++k) {
    AdmmState next;
    const RealVector target = state.z + obs - state.lambda / rho;
    next.x = x_step(target, state.x);
    const RealVector fit = model_output(input.ensemble, next.x, kind);
    const RealVector c = fit - obs + state.lambda / rho;
    next.z = prox_l1(c, 1.0 / rho);
    const RealVector residual = fit - obs - next.z;
    next.lambda = state.lambda + rho * residual;
    next.iteration = k + 1;

    if (observer) observer(state, next, residual);
    state = std::move(next);

    const double res_rms = rms(residual);
    result.trace.push_back(make_record(input, state.x, (obs - fit).lpNorm<1>(), res_rms));
    if (res_rms <= opts.outer_tol) {
      result.termination = Termination::Converged;
      break;
    }
  }
  result.estimate = std::move(state.x);
  return result;
}

template <typename Chunk>
SolverResult run_baseline(const SolveInput& input, const SolverOptions& opts, const Signal& x_init, Chunk&& chunk) {
  const auto& obs = input.observations.values;
  const ObservationKind kind = input.observations.kind;

  SolverResult result;
  result.trace.reserve(static_cast<std::size_t>(opts.max_outer_iters) + 1);
  const auto record = [&](const Signal& x) {
    const RealVector r = model_output(input.ensemble, x, kind) - obs;
    result.trace.push_back(make_record(input, x, r.squaredNorm(), rms(r)));
  };

  Signal x = x_init;
  record(x);
  for (int k = 0; k < opts.max_outer_iters; ++k) {
    Signal next = chunk(x, k);
    const double denom = std::max(x.norm(), 1e-300);
    const double moved = (next - x).norm() / denom;
    x = std::move(next);
    record(x);
    if (moved <= opts.outer_tol) {
      result.termination = Termination::Converged;
      break;
    }
  }
  result.estimate = std::move(x);
  return result;
}

}  // namespace

SolverResult admm_intensity(const SolveInput& input, const SolverOptions& options, const Signal& x_init,
                            const AdmmObserver& observer) {
  check_input(input, ObservationKind::Intensity, x_init, options);
  WfSchedule schedule{options.wf_step_params, 1, x_init.squaredNorm()};
  return run_admm(input, options, x_init, observer, [&](const RealVector& target, const Signal& warm) {
    InnerResult inner = wf_solve(input.ensemble, target, warm, options.inner_iters, schedule);
    schedule.first_step += options.inner_iters;
    return std::move(inner.x);
  });
}

SolverResult admm_amplitude(const SolveInput& input, const SolverOptions& options, const Signal& x_init,
                            const AdmmObserver& observer) {
  check_input(input, ObservationKind::Amplitude, x_init, options);
  return run_admm(input, options, x_init, observer, [&](const RealVector& target, const Signal& warm) {
    return gs_solve(input.ensemble, target, warm, options.inner_iters).x;
  });
}

SolverResult wf_baseline(const SolveInput& input, const SolverOptions& options, const Signal& x_init) {
  check_input(input, ObservationKind::Intensity, x_init, options);
  WfSchedule schedule{options.wf_step_params, 1, x_init.squaredNorm()};
  return run_baseline(input, options, x_init, [&](const Signal& x, int) {
    InnerResult inner = wf_solve(input.ensemble, input.observations.values, x, options.inner_iters, schedule);
    schedule.first_step += options.inner_iters;
    return std::move(inner.x);
  });
}

SolverResult gs_baseline(const SolveInput& input, const SolverOptions& options, const Signal& x_init) {
  check_input(input, ObservationKind::Amplitude, x_init, options);
  return run_baseline(input, options, x_init, [&](const Signal& x, int) {
    return gs_solve(input.ensemble, input.observations.values, x, options.inner_iters).x;
  });
}

}  // namespace robust_pr
