#ifndef LAGFLOW_PAIRS_HPP
#define LAGFLOW_PAIRS_HPP

// The double symplectic space H [+] H with form Omega = omega (-) omega, the
// diagonal, box-plus Lagrangians, the Maslov index for paths of pairs, and
// the commutative-diagram maps a, b, P, V relating the two Souriau pictures.

#include <lagflow/maslov.hpp>

namespace lagflow {

struct DoubleSpace {
  SymplecticSpace base;
  SymplecticSpace dbl;  // dimension 4n, complex structure J (+) (-J)
};

inline DoubleSpace double_space(const SymplecticSpace& base) {
  int d = base.dim();
  Matrix j = Matrix::Zero(2 * d, 2 * d);
  j.topLeftCorner(d, d) = base.J;
  j.bottomRightCorner(d, d) = -base.J;
  return DoubleSpace{base, make_space(j)};
}

/// The diagonal {x [+] x}.
inline Lagrangian diagonal(const DoubleSpace& ds) {
  int d = ds.base.dim();
  Matrix f(2 * d, d);
  f << Matrix::Identity(d, d), Matrix::Identity(d, d);
  return make_lagrangian(ds.dbl, f / std::sqrt(2.0));
}

/// mu [+] la as a Lagrangian of the double space.
inline Lagrangian box_plus(const DoubleSpace& ds, const Lagrangian& mu, const Lagrangian& la) {
  if (!mu.space.same_as(ds.base) || !la.space.same_as(ds.base))
    throw std::invalid_argument("box_plus: mismatched spaces");
  int d = ds.base.dim(), n = ds.base.n;
  Matrix f = Matrix::Zero(2 * d, d);
  f.block(0, 0, d, n) = mu.frame;
  f.block(d, n, d, n) = la.frame;
  return make_lagrangian(ds.dbl, f);
}

/// Maslov index of a path of Fredholm pairs: Mas({mu_t [+] la_t}, Delta).
/// The two evaluators are sampled jointly at identical t.
inline int maslov_pair(const DoubleSpace& ds, const LagrangianPath& mu_path,
                       const LagrangianPath& la_path, FlowOptions opts = {}) {
  Lagrangian delta = diagonal(ds);
  LagrangianPath boxed = [ds, mu_path, la_path](double t) {
    return box_plus(ds, mu_path(t), la_path(t));
  };
  return maslov_index(boxed, delta, opts);
}

/// The maps of the commutative diagram between the lambda- and
/// Delta-pictures, realized as concrete matrices.
struct DiagramMaps {
  DoubleSpace ds;
  Lagrangian la;        // base Lagrangian in H
  Lagrangian delta;     // diagonal in the double space
  Matrix a_tensor_id;   // complexification of A = J o phi : Delta -> Delta, real 4n x 4n
  Matrix v_real;        // V = (-i - A (x) Id)/sqrt(2), real 4n x 4n
  CMatrix v_complex;    // V in the Delta identification, 2n x 2n complex

  /// a_lambda(U) = (U (+) Id) o V, in the Delta identification.
  CMatrix a_map(const CMatrix& u) const {
    Matrix u_real = real_action(la, u);
    Matrix big = Matrix::Identity(v_real.rows(), v_real.cols());
    big.topLeftCorner(u_real.rows(), u_real.cols()) = u_real;
    return complex_action(delta, big * v_real);
  }

  /// b_lambda(W) = (W (+) Id) o i (A (x) Id), in the Delta identification.
  CMatrix b_map(const CMatrix& w) const {
    Matrix w_real = real_action(la, w);
    Matrix big = Matrix::Identity(v_real.rows(), v_real.cols());
    big.topLeftCorner(w_real.rows(), w_real.cols()) = w_real;
    return complex_action(delta, big * (ds.dbl.J * a_tensor_id));
  }

  /// P_lambda(mu) = mu [+] lambda.
  Lagrangian p_map(const Lagrangian& mu) const { return box_plus(ds, mu, la); }
};

inline DiagramMaps diagram_maps(const DoubleSpace& ds, const Lagrangian& la) {
  int d = ds.base.dim();
  Lagrangian delta = diagonal(ds);
  // A acts on Delta as v [+] v |-> (J R v) [+] (J R v) with R the reflection
  // through lambda^perp; in the diagonal frame coordinates it is just J R.
  Matrix pl = la.frame * la.frame.transpose();
  Matrix refl = Matrix::Identity(d, d) - 2.0 * pl;
  Matrix a_small = ds.base.J * refl;
  const Matrix& df = delta.frame;                 // 4n x 2n
  Matrix jdf = ds.dbl.J * df;
  Matrix a_cplx = df * a_small * df.transpose() + jdf * a_small * jdf.transpose();
  Matrix v = (-ds.dbl.J - a_cplx) / std::sqrt(2.0);
  CMatrix v_c = complex_action(delta, v);
  return DiagramMaps{ds, la, delta, a_cplx, v, v_c};
}

}  // namespace lagflow

#endif
