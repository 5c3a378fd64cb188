#include "robust_pr/metrics.hpp"

#include <cmath>
#include <numbers>
#include <string>

namespace robust_pr {

namespace {

void require_truth(const Signal& estimate, const Signal& truth) {
  if (estimate.size() != truth.size())
    throw DimensionError("estimate length " + std::to_string(estimate.size()) + " != truth length " +
                         std::to_string(truth.size()));
  if (!(truth.squaredNorm() > 0.0)) throw std::invalid_argument("reference signal is zero");
}

}  // namespace

PhaseAlignment align_phase(const Signal& estimate, const Signal& truth) {
  require_truth(estimate, truth);
  const Complex inner = truth.dot(estimate);  // sum conj(truth_i) * estimate_i
  double theta = inner == Complex(0.0) ? 0.0 : std::arg(inner);
  if (theta < 0.0) theta += 2.0 * std::numbers::pi;
  if (theta >= 2.0 * std::numbers::pi) theta = 0.0;
  return PhaseAlignment{estimate * std::polar(1.0, -theta), theta};
}

double nmse(const Signal& estimate, const Signal& truth, Alignment align) {
  require_truth(estimate, truth);
  const double denom = truth.squaredNorm();
  if (align == Alignment::Raw) return (estimate - truth).squaredNorm() / denom;
  return (align_phase(estimate, truth).aligned - truth).squaredNorm() / denom;
}

RealVector model_output(const MeasurementEnsemble& ensemble, const Signal& x, ObservationKind kind) {
  const ComplexVector ax = ensemble.forward(x);
  return kind == ObservationKind::Intensity ? RealVector(ax.cwiseAbs2()) : RealVector(ax.cwiseAbs());
}

double lad_objective(const MeasurementEnsemble& ensemble, const Signal& x, const Observations& observations) {
  if (observations.size() != ensemble.rows())
    throw DimensionError("observation length does not match ensemble rows");
  return (observations.values - model_output(ensemble, x, observations.kind)).lpNorm<1>();
}

double ls_objective(const MeasurementEnsemble& ensemble, const Signal& x, const RealVector& target,
                    ObservationKind kind) {
  if (target.size() != ensemble.rows()) throw DimensionError("target length does not match ensemble rows");
  return (target - model_output(ensemble, x, kind)).squaredNorm();
}

MetricReport evaluate(const MeasurementEnsemble& ensemble, const Signal& estimate, const Signal& truth,
                      const Observations& observations) {
  MetricReport report;
  report.nmse = nmse(estimate, truth);
  report.aligned_phase = align_phase(estimate, truth).theta;
  report.lad_objective = lad_objective(ensemble, estimate, observations);
  return report;
}

}  // namespace robust_pr
