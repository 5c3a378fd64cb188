#pragma once

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string_view>

#include "robust_pr/numerics.hpp"

namespace robust_pr {

/// Signal of interest and every estimate of it.
using Signal = ComplexVector;

enum class ObservationKind { Intensity, Amplitude };

std::string_view to_string(ObservationKind kind);
ObservationKind parse_observation_kind(std::string_view text);

struct Observations {
  RealVector values;
  ObservationKind kind = ObservationKind::Intensity;

  Index size() const { return values.size(); }
};

/// Measurement matrix A (rows a_i^H) together with its least-squares factorization.
class MeasurementEnsemble {
 public:
  explicit MeasurementEnsemble(ComplexMatrix matrix);

  const ComplexMatrix& matrix() const { return matrix_; }
  const LeastSquaresFactorization& factorization() const { return *factorization_; }
  Index rows() const { return matrix_.rows(); }
  Index cols() const { return matrix_.cols(); }

  ComplexVector forward(const ComplexVector& x) const { return matvec(matrix_, x); }
  ComplexVector adjoint(const ComplexVector& u) const { return adjoint_matvec(matrix_, u); }

 private:
  ComplexMatrix matrix_;
  // Shared so copies of an ensemble reuse the same factorization.
  std::shared_ptr<const LeastSquaresFactorization> factorization_;
};

/// Two-term Gaussian mixture: N(0, sigma1_sq) with probability c1, N(0, sigma2_sq) with c2.
struct GmmNoiseModel {
  double c1 = 0.9;
  double c2 = 0.1;
  double sigma1_sq = 1.0;
  double sigma2_sq = 100.0;

  double total_variance() const { return c1 * sigma1_sq + c2 * sigma2_sq; }
  void validate() const;
};

struct ProblemInstance {
  Signal truth;
  MeasurementEnsemble ensemble;
  Observations observations;
  std::optional<GmmNoiseModel> noise;
  std::uint64_t seed = 0;
};

struct GeneratedProblem {
  Signal truth;
  MeasurementEnsemble ensemble;
};

/// Draws x ~ CN(0, I_n) and then A (m x n) with i.i.d. CN(0, 1) entries, in that order.
GeneratedProblem generate_instance(Index n, Index m, Rng& rng);

/// |Ax|^2 or |Ax| elementwise.
Observations observe(const MeasurementEnsemble& ensemble, const Signal& signal, ObservationKind kind);

/// Mixture with c1 = 1 - c2, sigma2^2 = variance_ratio * sigma1^2 and total variance
/// ||x||^2 / 10^(snr_db / 10).
GmmNoiseModel calibrate_gmm(const Signal& signal, double snr_db, double c2 = 0.1, double variance_ratio = 100.0);

struct GmmDraw {
  RealVector noise;
  std::vector<bool> outlier;  // true where the sample came from the second component
};

/// Per sample: a uniform draw picks the component, then a normal draw gives the value.
GmmDraw sample_gmm_noise_labeled(const GmmNoiseModel& model, Index m, Rng& rng);
RealVector sample_gmm_noise(const GmmNoiseModel& model, Index m, Rng& rng);

/// Additive noise; the result is not clipped and may go negative.
Observations add_noise(const Observations& clean, const RealVector& noise);

/// Debug dump: one row per measurement (`i,obs,re_a0,im_a0,...`) after a truth header.
void write_instance_columns(std::ostream& os, const ProblemInstance& instance);

}  // namespace robust_pr
