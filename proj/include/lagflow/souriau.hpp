#ifndef LAGFLOW_SOURIAU_HPP
#define LAGFLOW_SOURIAU_HPP

// The Souriau map S_lambda, the conjugation theta_lambda, and the
// complexification picture (graphs of unitaries between the +/- i
// eigenspaces of J) with its commutative-diagram check.

#include <lagflow/symplectic.hpp>

#include <Eigen/Eigenvalues>
#include <algorithm>
#include <vector>

namespace lagflow {

/// theta_lambda(U) = tau_lambda U* tau_lambda; in the lambda identification
/// this is the plain (conjugation-free) transpose.
inline CMatrix theta(const CMatrix& u) { return u.transpose(); }

/// Sorted eigenphases (arguments in (-pi, pi]) of a unitary matrix.
/// Uses a Schur decomposition; for unitary input the Schur form is diagonal.
inline std::vector<double> eigenphases(const CMatrix& w) {
  Eigen::ComplexSchur<CMatrix> schur(w, /*computeU=*/false);
  std::vector<double> phases(w.rows());
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    phases[i] = std::arg(schur.matrixT()(i, i));
  std::sort(phases.begin(), phases.end());
  return phases;
}

/// Orthonormal basis of the eigenspace of a unitary matrix for eigenvalues
/// within phase tolerance of the target phase.
inline CMatrix unitary_eigenspace(const CMatrix& w, double phase, double tol = 1e-8) {
  Eigen::ComplexSchur<CMatrix> schur(w, /*computeU=*/true);
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    double d = wrap_angle(std::arg(schur.matrixT()(i, i)) - phase);
    if (std::abs(d) <= tol) idx.push_back(i);
  }
  CMatrix basis(w.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) basis.col(k) = schur.matrixU().col(idx[k]);
  // Schur vectors of a cluster span its invariant subspace; orthonormal already.
  return basis;
}

/// The image W = U theta(U) of the Souriau map together with its phases.
struct SouriauImage {
  CMatrix W;
  std::vector<double> phases;  // sorted, in (-pi, pi]

  int kernel_dim(double tol = 1e-8) const {
    int k = 0;
    for (double p : phases)
      if (std::abs(wrap_angle(p - kPi)) <= tol) ++k;
    return k;
  }
};

inline SouriauImage souriau_map(const Lagrangian& la, const CMatrix& lift) {
  if (!is_unitary(lift)) throw std::invalid_argument("souriau_map: non-unitary lift");
  CMatrix w = lift * theta(lift);
  return SouriauImage{w, eigenphases(w)};
}

inline SouriauImage souriau_map(const Lagrangian& la, const Lagrangian& mu) {
  return souriau_map(la, unitary_of_lagrangian(la, mu));
}

/// Just the unitary W = U theta(U); depends only on rho(U).
inline CMatrix souriau_unitary(const Lagrangian& la, const Lagrangian& mu) {
  CMatrix u = unitary_of_lagrangian(la, mu);
  return u * theta(u);
}

// ---- complexification -----------------------------------------------------
// E_pm are the (pm i)-eigenspaces of J acting on the complexified ambient
// space; a complex Lagrangian is the graph of a unitary E_+ -> E_-.

/// Fixed orthonormal bases of E_+ and E_-, built from the standard reference
/// frame so that every map below shares one identification.
struct ComplexSplitting {
  CMatrix basis_plus;   // 2n x n, columns span E_+
  CMatrix basis_minus;  // 2n x n, columns span E_-
};

inline ComplexSplitting complex_splitting(const SymplecticSpace& s) {
  Matrix f = lambda_std(s).frame;
  CMatrix bp = (f.cast<Complex>() - Complex(0, 1) * (s.J * f).cast<Complex>()) / std::sqrt(2.0);
  CMatrix bm = (f.cast<Complex>() + Complex(0, 1) * (s.J * f).cast<Complex>()) / std::sqrt(2.0);
  return ComplexSplitting{bp, bm};
}

/// A complex Lagrangian in H (x) C stored as the graph unitary T with
/// subspace {x + T(x) : x in E_+}.
struct ComplexLagrangianGraph {
  CMatrix T;  // n x n unitary in the splitting bases
};

/// The complexification map: mu (x) C as a graph over E_+.
inline ComplexLagrangianGraph complexify(const Lagrangian& mu) {
  ComplexSplitting sp = complex_splitting(mu.space);
  CMatrix fc = mu.frame.cast<Complex>();
  CMatrix jf = (mu.space.J * mu.frame).cast<Complex>();
  CMatrix kplus = fc - Complex(0, 1) * jf;   // K(v) = v - i J v
  CMatrix kminus = fc + Complex(0, 1) * jf;  // k(v) = v + i J v
  CMatrix p = sp.basis_plus.adjoint() * kplus;
  CMatrix q = sp.basis_minus.adjoint() * kminus;
  return ComplexLagrangianGraph{polar_unitary(q * p.inverse())};
}

/// Phi(W): the graph of -k o W o tau_lambda o K^{-1} : E_+ -> E_-.
/// W acts on H_J through the lambda identification.
inline ComplexLagrangianGraph phi_map(const CMatrix& w, const Lagrangian& la) {
  if (!is_unitary(w)) throw std::invalid_argument("phi_map: non-unitary input");
  const SymplecticSpace& s = la.space;
  ComplexSplitting sp = complex_splitting(s);
  Matrix w_real = real_action(la, w);
  Matrix tau = tau_matrix(la);
  CMatrix g(s.n, s.n);
  for (int k = 0; k < s.n; ++k) {
    // K^{-1} of a vector in E_+ is its real part.
    Matrix u = sp.basis_plus.col(k).real();
    Matrix r = w_real * (tau * u);
    CMatrix kr = r.cast<Complex>() + Complex(0, 1) * (s.J * r).cast<Complex>();
    g.col(k) = -(sp.basis_minus.adjoint() * kr);
  }
  return ComplexLagrangianGraph{polar_unitary(g)};
}

}  // namespace lagflow

#endif
