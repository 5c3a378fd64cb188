#pragma once

#include <random>

#include "robust_pr/numerics.hpp"
#include "robust_pr/problem.hpp"

namespace robust_pr::testing {

inline Eigen::MatrixXcd random_matrix(Rng& rng, Index rows, Index cols) {
  Eigen::MatrixXcd m(rows, cols);
  for (Index i = 0; i < rows; ++i) m.row(i) = sample_complex_gaussian(rng, cols).transpose();
  return m;
}

inline RealVector random_real(Rng& rng, Index n, double scale = 1.0) {
  std::normal_distribution<double> normal(0.0, scale);
  RealVector v(n);
  for (Index i = 0; i < n; ++i) v[i] = normal(rng);
  return v;
}

inline MeasurementEnsemble identity_ensemble(Index n) {
  return MeasurementEnsemble(ComplexMatrix(Eigen::MatrixXcd::Identity(n, n)));
}

}  // namespace robust_pr::testing
