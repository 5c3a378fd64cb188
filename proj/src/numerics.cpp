#include "robust_pr/numerics.hpp"

#include <cmath>
#include <string>

namespace robust_pr {

namespace {

void require_finite(const Eigen::MatrixXcd& m) {
  if (!m.allFinite()) throw std::invalid_argument("matrix has non-finite entries");
}

std::string shape(Index r, Index c) { return std::to_string(r) + "x" + std::to_string(c); }

}  // namespace

ComplexMatrix::ComplexMatrix(Eigen::MatrixXcd entries) : entries_(std::move(entries)) {
  if (entries_.rows() < 1 || entries_.cols() < 1)
    throw DimensionError("matrix must be at least 1x1, got " + shape(entries_.rows(), entries_.cols()));
  require_finite(entries_);
}

ComplexMatrix ComplexMatrix::from_row_major(Index rows, Index cols, std::span<const Complex> entries) {
  if (rows < 1 || cols < 1 || static_cast<Index>(entries.size()) != rows * cols)
    throw DimensionError("row-major buffer does not describe a " + shape(rows, cols) + " matrix");
  Eigen::MatrixXcd m(rows, cols);
  for (Index i = 0; i < rows; ++i)
    for (Index j = 0; j < cols; ++j) m(i, j) = entries[static_cast<std::size_t>(i * cols + j)];
  return ComplexMatrix(std::move(m));
}

ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& x) {
  if (x.size() != a.cols())
    throw DimensionError("matvec: " + shape(a.rows(), a.cols()) + " matrix with vector of length " +
                         std::to_string(x.size()));
  return a.dense() * x;
}

ComplexVector adjoint_matvec(const ComplexMatrix& a, const ComplexVector& u) {
  if (u.size() != a.rows())
    throw DimensionError("adjoint_matvec: " + shape(a.rows(), a.cols()) + " matrix with vector of length " +
                         std::to_string(u.size()));
  return a.dense().adjoint() * u;
}

LeastSquaresFactorization::LeastSquaresFactorization(const ComplexMatrix& a) {
  if (a.rows() < a.cols())
    throw DimensionError("least squares needs M >= N, got " + shape(a.rows(), a.cols()));

  Eigen::ColPivHouseholderQR<Eigen::MatrixXcd> qr(a.dense());
  if (qr.rank() < a.cols())
    throw std::invalid_argument("matrix is rank deficient (rank " + std::to_string(qr.rank()) + " < " +
                                std::to_string(a.cols()) + ")");

  const Index m = a.rows();
  const Index n = a.cols();
  q_ = qr.householderQ() * Eigen::MatrixXcd::Identity(m, n);
  r_ = qr.matrixR().topLeftCorner(n, n).triangularView<Eigen::Upper>();
  perm_ = qr.colsPermutation();
}

ComplexVector LeastSquaresFactorization::solve(const ComplexVector& rhs) const {
  if (rhs.size() != q_.rows())
    throw DimensionError("lstsq: rhs length " + std::to_string(rhs.size()) + " != " + std::to_string(q_.rows()));
  ComplexVector y = q_.adjoint() * rhs;
  r_.triangularView<Eigen::Upper>().solveInPlace(y);
  return perm_ * y;
}

ComplexVector lstsq_solve(const LeastSquaresFactorization& fact, const ComplexVector& rhs) {
  return fact.solve(rhs);
}

EigenPair power_iteration(const LinearOperator& apply, Index n, PowerIterationOptions options) {
  if (n <= 0) throw DimensionError("power_iteration: dimension must be positive");
  Rng rng(0x5eed'0f'5bec'7ea1ULL);
  return power_iteration(apply, sample_complex_gaussian(rng, n), options);
}

EigenPair power_iteration(const LinearOperator& apply, const ComplexVector& start, PowerIterationOptions options) {
  if (start.size() == 0) throw DimensionError("power_iteration: dimension must be positive");
  if (options.max_iters < 1) throw std::invalid_argument("power_iteration: max_iters must be >= 1");
  const double start_norm = start.norm();
  if (!(start_norm > 0.0)) throw std::invalid_argument("power_iteration: zero start vector");

  EigenPair out;
  ComplexVector v = start / start_norm;
  ComplexVector av = apply(v);
  if (av.size() != v.size()) throw DimensionError("power_iteration: operator changes dimension");

  for (int it = 1; it <= options.max_iters; ++it) {
    const double rayleigh = v.dot(av).real();
    out.rayleigh_history.push_back(rayleigh);
    out.iterations = it;
    out.value = rayleigh;
    out.vector = v;

    const double residual = (av - rayleigh * v).norm();
    if (residual <= options.tol * std::abs(rayleigh)) {
      out.converged = true;
      break;
    }
    const double norm = av.norm();
    // Null operator: any unit vector is an eigenvector of eigenvalue 0.
    if (!(norm > 0.0)) {
      out.converged = true;
      break;
    }
    v = av / norm;
    av = apply(v);
  }
  return out;
}

ComplexVector sample_complex_gaussian(Rng& rng, Index n) {
  std::normal_distribution<double> normal(0.0, std::sqrt(0.5));
  ComplexVector out(n);
  for (Index i = 0; i < n; ++i) {
    const double re = normal(rng);
    const double im = normal(rng);
    out[i] = Complex(re, im);
  }
  return out;
}

}  // namespace robust_pr
