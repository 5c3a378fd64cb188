#pragma once

#include <complex>
#include <cstdint>
#include <functional>
#include <random>
#include <span>
#include <stdexcept>
#include <vector>

#include <Eigen/Dense>

namespace robust_pr {

using Complex = std::complex<double>;
using ComplexVector = Eigen::VectorXcd;
using RealVector = Eigen::VectorXd;
using Index = Eigen::Index;

/// Generator used for every random draw. Callers own and seed it.
using Rng = std::mt19937_64;

class DimensionError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Dense complex M x N matrix with finite entries.
class ComplexMatrix {
 public:
  explicit ComplexMatrix(Eigen::MatrixXcd entries);

  /// Builds from `rows * cols` entries laid out row by row.
  static ComplexMatrix from_row_major(Index rows, Index cols, std::span<const Complex> entries);

  Index rows() const { return entries_.rows(); }
  Index cols() const { return entries_.cols(); }
  Complex operator()(Index i, Index j) const { return entries_(i, j); }
  const Eigen::MatrixXcd& dense() const { return entries_; }

 private:
  Eigen::MatrixXcd entries_;
};

ComplexVector matvec(const ComplexMatrix& a, const ComplexVector& x);

/// Conjugate-transpose product A^H u.
ComplexVector adjoint_matvec(const ComplexMatrix& a, const ComplexVector& u);

/// Thin QR of a full-column-rank matrix (M >= N), computed once and reused for
/// every least-squares right-hand side.
class LeastSquaresFactorization {
 public:
  explicit LeastSquaresFactorization(const ComplexMatrix& a);

  /// argmin_x ||A x - rhs||_2
  ComplexVector solve(const ComplexVector& rhs) const;

  Index rows() const { return q_.rows(); }
  Index cols() const { return r_.cols(); }

 private:
  Eigen::MatrixXcd q_;  // M x N, orthonormal columns
  Eigen::MatrixXcd r_;  // N x N upper triangular
  Eigen::PermutationMatrix<Eigen::Dynamic, Eigen::Dynamic> perm_;
};

ComplexVector lstsq_solve(const LeastSquaresFactorization& fact, const ComplexVector& rhs);

using LinearOperator = std::function<ComplexVector(const ComplexVector&)>;

struct EigenPair {
  ComplexVector vector;  // unit norm
  double value = 0.0;
  int iterations = 0;
  bool converged = false;
  std::vector<double> rayleigh_history;
};

struct PowerIterationOptions {
  int max_iters = 200;
  double tol = 1e-6;
};

/// Leading eigenpair of a Hermitian PSD operator. Stops once
/// ||apply(v) - value * v|| <= tol * value. The start vector is drawn from a
/// fixed-seed generator so results are reproducible.
EigenPair power_iteration(const LinearOperator& apply, Index n, PowerIterationOptions options = {});

/// Same, from a caller-supplied start vector.
EigenPair power_iteration(const LinearOperator& apply, const ComplexVector& start,
                          PowerIterationOptions options = {});

/// Entries with i.i.d. N(0, 1/2) real and imaginary parts, so E|entry|^2 = 1.
ComplexVector sample_complex_gaussian(Rng& rng, Index n);

}  // namespace robust_pr
