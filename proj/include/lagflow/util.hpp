#ifndef LAGFLOW_UTIL_HPP
#define LAGFLOW_UTIL_HPP

#include <Eigen/Dense>
#include <unsupported/Eigen/MatrixFunctions>
#include <cmath>
#include <random>
#include <stdexcept>

namespace lagflow {

using Matrix = Eigen::MatrixXd;
using Vector = Eigen::VectorXd;
using CMatrix = Eigen::MatrixXcd;
using CVector = Eigen::VectorXcd;
using Complex = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Wraps an angle into (-pi, pi].
inline double wrap_angle(double a) {
  a = std::fmod(a, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  if (a > kPi) a -= 2.0 * kPi;
  return a;
}

/// Orthonormalizes the columns of a full-rank matrix by Householder QR,
/// with the sign convention diag(R) > 0 so the result varies continuously
/// with the input (it agrees with Gram-Schmidt).
inline Matrix orthonormalize(const Matrix& a) {
  Eigen::HouseholderQR<Matrix> qr(a);
  Matrix q = qr.householderQ() * Matrix::Identity(a.rows(), a.cols());
  Matrix r = q.transpose() * a;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    if (r(j, j) < 0.0) q.col(j) = -q.col(j);
    if (std::abs(r(j, j)) < 1e-12 * (1.0 + a.norm()))
      throw std::invalid_argument("orthonormalize: rank-deficient frame");
  }
  return q;
}

inline CMatrix orthonormalize(const CMatrix& a) {
  Eigen::HouseholderQR<CMatrix> qr(a);
  CMatrix q = qr.householderQ() * CMatrix::Identity(a.rows(), a.cols());
  CMatrix r = q.adjoint() * a;
  for (Eigen::Index j = 0; j < a.cols(); ++j) {
    Complex d = r(j, j);
    if (std::abs(d) < 1e-12 * (1.0 + a.norm()))
      throw std::invalid_argument("orthonormalize: rank-deficient frame");
    q.col(j) *= d / std::abs(d);
  }
  return q;
}

/// Nearest unitary matrix (polar factor).
inline CMatrix polar_unitary(const CMatrix& a) {
  Eigen::JacobiSVD<CMatrix> svd(a, Eigen::ComputeFullU | Eigen::ComputeFullV);
  return svd.matrixU() * svd.matrixV().adjoint();
}

inline bool is_unitary(const CMatrix& u, double tol = 1e-10) {
  return (u.adjoint() * u - CMatrix::Identity(u.cols(), u.cols())).cwiseAbs().maxCoeff() <= tol;
}

/// Deterministic RNG helpers used by the path generators in tests and tools.
struct Rng {
  std::mt19937_64 gen;
  explicit Rng(std::uint64_t seed) : gen(seed) {}
  double uniform(double lo = 0.0, double hi = 1.0) {
    return std::uniform_real_distribution<double>(lo, hi)(gen);
  }
  double gauss() { return std::normal_distribution<double>(0.0, 1.0)(gen); }
  int integer(int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(gen); }
  Matrix gauss_matrix(int r, int c) {
    Matrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = gauss();
    return m;
  }
  CMatrix gauss_cmatrix(int r, int c) {
    CMatrix m(r, c);
    for (int i = 0; i < r; ++i)
      for (int j = 0; j < c; ++j) m(i, j) = Complex(gauss(), gauss());
    return m;
  }
  /// Haar-ish random real orthogonal matrix.
  Matrix orthogonal(int n) { return orthonormalize(gauss_matrix(n, n)); }
  /// Haar-ish random complex unitary matrix.
  CMatrix unitary(int n) { return orthonormalize(gauss_cmatrix(n, n)); }
  /// Random Hermitian matrix with entries O(scale).
  CMatrix hermitian(int n, double scale = 1.0) {
    CMatrix a = gauss_cmatrix(n, n);
    return scale * 0.5 * (a + a.adjoint());
  }
  Matrix symmetric(int n, double scale = 1.0) {
    Matrix a = gauss_matrix(n, n);
    return scale * 0.5 * (a + a.transpose());
  }
};

}  // namespace lagflow

#endif
