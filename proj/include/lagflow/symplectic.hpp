#ifndef LAGFLOW_SYMPLECTIC_HPP
#define LAGFLOW_SYMPLECTIC_HPP

// Real symplectic linear algebra: spaces, Lagrangian frames, intersections,
// graphs, and the unitary <-> Lagrangian correspondence.

#include <lagflow/util.hpp>

namespace lagflow {

/// A real 2n-dimensional inner-product space with a compatible complex
/// structure J; the symplectic form is omega(x,y) = <Jx, y>.
struct SymplecticSpace {
  int n = 0;   // half dimension
  Matrix J;    // 2n x 2n, skew, orthogonal, J^2 = -Id

  int dim() const { return 2 * n; }

  double omega(const Vector& x, const Vector& y) const { return (J * x).dot(y); }

  bool same_as(const SymplecticSpace& o, double tol = 1e-12) const {
    return n == o.n && (J - o.J).cwiseAbs().maxCoeff() <= tol;
  }
};

/// Builds a symplectic space from a complex-structure matrix, validating the
/// compatibility relations.
inline SymplecticSpace make_space(const Matrix& J, double tol = 1e-12) {
  if (J.rows() != J.cols() || J.rows() % 2 != 0)
    throw std::invalid_argument("make_space: J must be square of even size");
  const int d = static_cast<int>(J.rows());
  if ((J.transpose() + J).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("make_space: J not skew-symmetric");
  if ((J.transpose() * J - Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("make_space: J not orthogonal");
  if ((J * J + Matrix::Identity(d, d)).cwiseAbs().maxCoeff() > tol)
    throw std::invalid_argument("make_space: J^2 != -Id");
  return SymplecticSpace{d / 2, J};
}

/// The canonical model: J e_i = e_{n+i}, J e_{n+i} = -e_i.
inline SymplecticSpace standard_space(int n) {
  if (n < 1) throw std::invalid_argument("standard_space: n must be >= 1");
  Matrix J = Matrix::Zero(2 * n, 2 * n);
  J.block(n, 0, n, n) = Matrix::Identity(n, n);
  J.block(0, n, n, n) = -Matrix::Identity(n, n);
  return SymplecticSpace{n, J};
}

/// A Lagrangian subspace stored as an orthonormal, isotropic 2n x n frame.
struct Lagrangian {
  SymplecticSpace space;
  Matrix frame;  // 2n x n, orthonormal columns, frame^T J frame = 0
};

inline bool is_lagrangian_frame(const SymplecticSpace& s, const Matrix& frame,
                                double tol = 1e-10) {
  if (frame.rows() != s.dim() || frame.cols() != s.n) return false;
  if ((frame.transpose() * frame - Matrix::Identity(s.n, s.n)).cwiseAbs().maxCoeff() > tol)
    return false;
  return (frame.transpose() * s.J * frame).cwiseAbs().maxCoeff() <= tol;
}

/// Validates and re-orthonormalizes a frame into a Lagrangian. Frames within
/// 1e-8 of orthonormal are corrected; anything worse is rejected.
inline Lagrangian make_lagrangian(const SymplecticSpace& s, const Matrix& frame_in) {
  if (frame_in.rows() != s.dim() || frame_in.cols() != s.n)
    throw std::invalid_argument("make_lagrangian: frame must be 2n x n");
  Matrix frame = frame_in;
  double dev = (frame.transpose() * frame - Matrix::Identity(s.n, s.n)).cwiseAbs().maxCoeff();
  if (dev > 1e-8)
    throw std::invalid_argument("make_lagrangian: frame too far from orthonormal");
  if (dev > 0.0) frame = orthonormalize(frame);
  if ((frame.transpose() * s.J * frame).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("make_lagrangian: frame not isotropic");
  return Lagrangian{s, frame};
}

/// Membership test for frames that need not be exactly orthonormal.
inline bool is_lagrangian(const SymplecticSpace& s, const Matrix& frame) {
  if (frame.rows() != s.dim() || frame.cols() != s.n) return false;
  double dev = (frame.transpose() * frame - Matrix::Identity(s.n, s.n)).cwiseAbs().maxCoeff();
  if (dev > 1e-8) throw std::invalid_argument("is_lagrangian: frame not near orthonormal");
  Matrix f = dev > 0.0 ? orthonormalize(frame) : frame;
  return (f.transpose() * s.J * f).cwiseAbs().maxCoeff() <= 1e-10;
}

/// The reference Lagrangian: span of the first n basis vectors of the
/// standard space.
inline Lagrangian lambda_std(const SymplecticSpace& s) {
  Matrix f = Matrix::Zero(s.dim(), s.n);
  f.block(0, 0, s.n, s.n) = Matrix::Identity(s.n, s.n);
  return make_lagrangian(s, f);
}

/// J(mu), the orthogonal complement of a Lagrangian.
inline Lagrangian perp(const Lagrangian& mu) {
  return Lagrangian{mu.space, mu.space.J * mu.frame};
}

/// dim(mu cap la) as the rank deficit of the stacked frame pair.
inline int intersection_dim(const Lagrangian& mu, const Lagrangian& la,
                            double rel_tol = 1e-8) {
  if (!mu.space.same_as(la.space))
    throw std::invalid_argument("intersection_dim: mismatched spaces");
  Matrix stacked(mu.space.dim(), 2 * mu.space.n);
  stacked << mu.frame, la.frame;
  Eigen::JacobiSVD<Matrix> svd(stacked);
  const auto& sv = svd.singularValues();
  double thresh = rel_tol * sv(0);
  int rank = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) > thresh) ++rank;
  return 2 * mu.space.n - rank;
}

/// An orthonormal basis (in ambient coordinates) of mu cap la.
inline Matrix intersection_basis(const Lagrangian& mu, const Lagrangian& la,
                                 double rel_tol = 1e-8) {
  // v = F_mu a with F_la^perp v = 0; kernel of (I - F_la F_la^T) F_mu.
  Matrix m = mu.frame - la.frame * (la.frame.transpose() * mu.frame);
  Eigen::JacobiSVD<Matrix> svd(m, Eigen::ComputeFullV);
  const auto& sv = svd.singularValues();
  double top = std::max(sv(0), 1.0);
  int k = 0;
  for (Eigen::Index i = 0; i < sv.size(); ++i)
    if (sv(i) <= rel_tol * top) ++k;
  if (k == 0) return Matrix(mu.space.dim(), 0);
  Matrix coeff = svd.matrixV().rightCols(k);
  return orthonormalize(Matrix(mu.frame * coeff));
}

/// Principal-angle distance between two subspaces of equal dimension,
/// max over principal angles of sin(theta).
inline double subspace_distance(const Lagrangian& a, const Lagrangian& b) {
  Matrix rest = b.frame - a.frame * (a.frame.transpose() * b.frame);
  Eigen::JacobiSVD<Matrix> svd(rest);
  return std::min(1.0, svd.singularValues().maxCoeff());
}

/// The graph {x + phi(x) : x in mu} of phi : mu -> mu^perp, given in the
/// frame bases of mu and J(mu). Lagrangian iff phi is symmetric.
inline Lagrangian graph_lagrangian(const Lagrangian& mu, const Matrix& phi) {
  if (phi.rows() != mu.space.n || phi.cols() != mu.space.n)
    throw std::invalid_argument("graph_lagrangian: phi must be n x n");
  if ((phi - phi.transpose()).cwiseAbs().maxCoeff() > 1e-10)
    throw std::invalid_argument("graph_lagrangian: induced form not symmetric");
  Matrix f = mu.frame + mu.space.J * mu.frame * phi;
  return make_lagrangian(mu.space, orthonormalize(f));
}

// ---- the lambda tensor C identification -----------------------------------
// H_J is identified with lambda tensor C by x + J y  <->  x + i y, where x, y
// are coordinates in the frame of lambda.

/// Complex coordinates of real vectors with respect to a base Lagrangian.
inline CMatrix complex_coords(const Lagrangian& la, const Matrix& vectors) {
  Matrix x = la.frame.transpose() * vectors;
  Matrix y = (la.space.J * la.frame).transpose() * vectors;
  return x.cast<Complex>() + Complex(0, 1) * y.cast<Complex>();
}

/// Real vectors from complex coordinates.
inline Matrix real_vectors(const Lagrangian& la, const CMatrix& coords) {
  return la.frame * coords.real() + la.space.J * la.frame * coords.imag();
}

/// The conjugation tau_lambda(x + Jy) = x - Jy, as a real 2n x 2n matrix.
inline Matrix tau_matrix(const Lagrangian& la) {
  Matrix pl = la.frame * la.frame.transpose();
  return 2.0 * pl - Matrix::Identity(la.space.dim(), la.space.dim());
}

/// The action of a complex matrix (in the lambda identification) as a
/// real-linear map on the ambient space.
inline Matrix real_action(const Lagrangian& la, const CMatrix& u) {
  CMatrix coords = complex_coords(la, Matrix::Identity(la.space.dim(), la.space.dim()));
  return real_vectors(la, u * coords);
}

/// Conversely, the complex matrix of a real-linear map commuting with J.
inline CMatrix complex_action(const Lagrangian& la, const Matrix& m) {
  return complex_coords(la, m * la.frame);
}

/// rho(U) = U(lambda^perp): the Lagrangian cut out by a unitary in the
/// lambda identification.
inline Lagrangian lagrangian_from_unitary(const Lagrangian& la, const CMatrix& u) {
  if (!is_unitary(u)) throw std::invalid_argument("lagrangian_from_unitary: non-unitary input");
  // lambda^perp has complex coordinates i R^n; columns U(i e_k).
  CMatrix cols = Complex(0, 1) * u;
  return make_lagrangian(la.space, orthonormalize(real_vectors(la, cols)));
}

/// A deterministic unitary lift of mu: with M the (complex-unitary) coordinate
/// matrix of mu's frame, U = -i M satisfies U(lambda^perp) = mu.
inline CMatrix unitary_of_lagrangian(const Lagrangian& la, const Lagrangian& mu) {
  if (!mu.space.same_as(la.space))
    throw std::invalid_argument("unitary_of_lagrangian: mismatched spaces");
  CMatrix m = complex_coords(la, mu.frame);
  return polar_unitary(Complex(0, -1) * m);
}

}  // namespace lagflow

#endif
