#pragma once

#include "robust_pr/problem.hpp"

namespace robust_pr {

struct PhaseAlignment {
  Signal aligned;
  double theta = 0.0;  // in [0, 2*pi)
};

/// Removes the global phase: theta = arg(truth^H estimate), aligned = e^{-j theta} estimate.
PhaseAlignment align_phase(const Signal& estimate, const Signal& truth);

enum class Alignment { Aligned, Raw };

/// ||estimate - truth||^2 / ||truth||^2, after phase alignment by default.
double nmse(const Signal& estimate, const Signal& truth, Alignment align = Alignment::Aligned);

/// Elementwise model output: |Ax|^2 (intensity) or |Ax| (amplitude).
RealVector model_output(const MeasurementEnsemble& ensemble, const Signal& x, ObservationKind kind);

/// ||obs - m(Ax)||_1
double lad_objective(const MeasurementEnsemble& ensemble, const Signal& x, const Observations& observations);

/// ||target - m(Ax)||_2^2
double ls_objective(const MeasurementEnsemble& ensemble, const Signal& x, const RealVector& target,
                    ObservationKind kind);

struct MetricReport {
  double nmse = 0.0;
  double aligned_phase = 0.0;
  double lad_objective = 0.0;
};

MetricReport evaluate(const MeasurementEnsemble& ensemble, const Signal& estimate, const Signal& truth,
                      const Observations& observations);

}  // namespace robust_pr
