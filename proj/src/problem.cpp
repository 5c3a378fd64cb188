#include "robust_pr/problem.hpp"

#include <cmath>
#include <iomanip>
#include <ostream>
#include <string>

namespace robust_pr {

std::string_view to_string(ObservationKind kind) {
  return kind == ObservationKind::Intensity ? "intensity" : "amplitude";
}

ObservationKind parse_observation_kind(std::string_view text) {
  if (text == "intensity") return ObservationKind::Intensity;
  if (text == "amplitude") return ObservationKind::Amplitude;
  throw std::invalid_argument("unknown observation model '" + std::string(text) + "'");
}

MeasurementEnsemble::MeasurementEnsemble(ComplexMatrix matrix)
    : matrix_(std::move(matrix)), factorization_(std::make_shared<LeastSquaresFactorization>(matrix_)) {}

void GmmNoiseModel::validate() const {
  if (!(c1 >= 0.0 && c1 <= 1.0 && c2 >= 0.0 && c2 <= 1.0) || std::abs(c1 + c2 - 1.0) > 1e-12)
    throw std::invalid_argument("GMM weights must lie in [0,1] and sum to 1");
  if (!(sigma1_sq > 0.0) || !(sigma2_sq > 0.0) || !std::isfinite(sigma1_sq) || !std::isfinite(sigma2_sq))
    throw std::invalid_argument("GMM variances must be positive and finite");
}

GeneratedProblem generate_instance(Index n, Index m, Rng& rng) {
  if (n < 1) throw DimensionError("signal length must be >= 1");
  if (m < n)
    throw DimensionError("need M >= N measurements, got M=" + std::to_string(m) + " N=" + std::to_string(n));
  Signal truth = sample_complex_gaussian(rng, n);
  Eigen::MatrixXcd a(m, n);
  for (Index i = 0; i < m; ++i) a.row(i) = sample_complex_gaussian(rng, n).transpose();
  return GeneratedProblem{std::move(truth), MeasurementEnsemble(ComplexMatrix(std::move(a)))};
}

Observations observe(const MeasurementEnsemble& ensemble, const Signal& signal, ObservationKind kind) {
  const ComplexVector ax = ensemble.forward(signal);
  Observations out;
  out.kind = kind;
  out.values = kind == ObservationKind::Intensity ? RealVector(ax.cwiseAbs2()) : RealVector(ax.cwiseAbs());
  return out;
}

GmmNoiseModel calibrate_gmm(const Signal& signal, double snr_db, double c2, double variance_ratio) {
  if (!std::isfinite(snr_db)) throw std::invalid_argument("SNR must be finite");
  if (!(c2 > 0.0 && c2 < 1.0)) throw std::invalid_argument("outlier probability c2 must lie in (0, 1)");
  if (!(variance_ratio > 1.0)) throw std::invalid_argument("variance ratio must exceed 1");
  const double energy = signal.squaredNorm();
  if (!(energy > 0.0)) throw std::invalid_argument("cannot calibrate noise against a zero signal");

  GmmNoiseModel model;
  model.c2 = c2;
  model.c1 = 1.0 - c2;
  const double total = energy / std::pow(10.0, snr_db / 10.0);
  model.sigma1_sq = total / (model.c1 + model.c2 * variance_ratio);
  model.sigma2_sq = variance_ratio * model.sigma1_sq;
  return model;
}

GmmDraw sample_gmm_noise_labeled(const GmmNoiseModel& model, Index m, Rng& rng) {
  model.validate();
  std::uniform_real_distribution<double> uniform(0.0, 1.0);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double s1 = std::sqrt(model.sigma1_sq);
  const double s2 = std::sqrt(model.sigma2_sq);

  GmmDraw out{RealVector(m), std::vector<bool>(static_cast<std::size_t>(m))};
  for (Index i = 0; i < m; ++i) {
    const bool outlier = uniform(rng) < model.c2;
    out.outlier[static_cast<std::size_t>(i)] = outlier;
    out.noise[i] = (outlier ? s2 : s1) * normal(rng);
  }
  return out;
}

RealVector sample_gmm_noise(const GmmNoiseModel& model, Index m, Rng& rng) {
  return sample_gmm_noise_labeled(model, m, rng).noise;
}

Observations add_noise(const Observations& clean, const RealVector& noise) {
  if (noise.size() != clean.size())
    throw DimensionError("noise length " + std::to_string(noise.size()) + " != observation length " +
                         std::to_string(clean.size()));
  return Observations{clean.values + noise, clean.kind};
}

void write_instance_columns(std::ostream& os, const ProblemInstance& instance) {
  const auto& a = instance.ensemble.matrix();
  os << std::setprecision(17);
  os << "# seed=" << instance.seed << " kind=" << to_string(instance.observations.kind) << " n=" << a.cols()
     << " m=" << a.rows() << '\n';
  os << "# truth";
  for (Index j = 0; j < instance.truth.size(); ++j)
    os << ',' << instance.truth[j].real() << ',' << instance.truth[j].imag();
  os << '\n';
  os << "i,obs";
  for (Index j = 0; j < a.cols(); ++j) os << ",re_a" << j << ",im_a" << j;
  os << '\n';
  for (Index i = 0; i < a.rows(); ++i) {
    os << i << ',' << instance.observations.values[i];
    for (Index j = 0; j < a.cols(); ++j) os << ',' << a(i, j).real() << ',' << a(i, j).imag();
    os << '\n';
  }
}

}  // namespace robust_pr
