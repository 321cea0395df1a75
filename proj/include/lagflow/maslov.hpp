#ifndef LAGFLOW_MASLOV_HPP
#define LAGFLOW_MASLOV_HPP

// The index M for unitary paths, the Maslov index Mas for Lagrangian paths,
// both crossing forms, the local signature formulas, and the Hoermander
// index.

#include <lagflow/flow_engine.hpp>
#include <lagflow/souriau.hpp>

#include <functional>
#include <utility>
#include <vector>

namespace lagflow {

/// A continuous path of unitaries on [0,1]; the evaluator must be reentrant.
using UnitaryPath = std::function<CMatrix(double)>;

/// A continuous path of Lagrangians on [0,1].
using LagrangianPath = std::function<Lagrangian(double)>;

/// Eigenphases measured from -1: psi = arg(-w) for each eigenvalue w.
inline std::vector<double> phases_rel_pi(const CMatrix& w) {
  Eigen::ComplexSchur<CMatrix> schur(w, /*computeU=*/false);
  std::vector<double> psi(w.rows());
  for (Eigen::Index i = 0; i < w.rows(); ++i)
    psi[i] = std::arg(-schur.matrixT()(i, i));
  std::sort(psi.begin(), psi.end());
  return psi;
}

/// The index M of a continuous unitary path: the net signed count of
/// eigenphases passing through pi, via partitioned arc counting.
inline int index_unitary_path(const UnitaryPath& path, FlowOptions opts = {}) {
  opts.cyclic = true;
  opts.cap = std::min(opts.cap, kPi / 2);
  return signed_zero_flow([&path](double t) { return phases_rel_pi(path(t)); }, opts);
}

/// The Souriau image path of a Lagrangian path. W depends only on the
/// subspace, so frame gauge in the evaluator is harmless.
inline UnitaryPath souriau_path(const LagrangianPath& path, const Lagrangian& la) {
  return [path, la](double t) { return souriau_unitary(la, path(t)); };
}

/// Mas({mu(t)}, lambda) := M({S_lambda(mu(t))}).
inline int maslov_index(const LagrangianPath& path, const Lagrangian& la,
                        FlowOptions opts = {}) {
  return index_unitary_path(souriau_path(path, la), opts);
}

// ---- crossing forms -------------------------------------------------------

/// A symmetric (Hermitian, for the unitary crossing form) bilinear form on a
/// named carrier subspace, with its signature.
struct SymmetricForm {
  CMatrix carrier;  // orthonormal basis of the crossing kernel
  CMatrix matrix;   // Hermitian k x k
  int p = 0, q = 0;
  bool regular = false;

  int dim() const { return static_cast<int>(matrix.rows()); }
  int signature() const { return p - q; }
};

inline SymmetricForm classify_form(const CMatrix& carrier, const CMatrix& herm,
                                   double zero_tol = 1e-6) {
  SymmetricForm f;
  f.carrier = carrier;
  f.matrix = 0.5 * (herm + herm.adjoint());
  if (f.matrix.rows() == 0) { f.regular = false; return f; }
  Eigen::SelfAdjointEigenSolver<CMatrix> es(f.matrix, Eigen::EigenvaluesOnly);
  double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  for (Eigen::Index i = 0; i < es.eigenvalues().size(); ++i) {
    double e = es.eigenvalues()(i);
    if (e > zero_tol * scale) ++f.p;
    else if (e < -zero_tol * scale) ++f.q;
  }
  f.regular = (f.p + f.q == f.dim());
  return f;
}

/// Hermitian H with phases in (-pi, pi) such that V = exp(iH); refuses when
/// an eigenvalue sits on the branch cut at -1.
inline CMatrix unitary_log_hermitian(const CMatrix& v, double cut_tol = 1e-6) {
  Eigen::ComplexSchur<CMatrix> schur(v, /*computeU=*/true);
  CMatrix d = CMatrix::Zero(v.rows(), v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    double phase = std::arg(schur.matrixT()(i, i));
    if (kPi - std::abs(phase) < cut_tol)
      throw std::runtime_error("unitary_log_hermitian: eigenvalue on the branch cut");
    d(i, i) = phase;
  }
  CMatrix h = schur.matrixU() * d * schur.matrixU().adjoint();
  return 0.5 * (h + h.adjoint());
}

/// Crossing form Q~_M on Ker(W(t*) + Id), via R(t) = -i log(W(t*)^{-1} W(t))
/// differentiated by Richardson-extrapolated central differences.
inline SymmetricForm crossing_form_unitary(const UnitaryPath& path, double t_star,
                                           double step = 1e-4, double min_step = 1e-7) {
  CMatrix w0 = path(t_star);
  CMatrix kernel = unitary_eigenspace(w0, kPi);
  if (kernel.cols() == 0)
    return SymmetricForm{kernel, CMatrix::Zero(0, 0), 0, 0, false};
  CMatrix w0inv = w0.adjoint();
  auto r_of = [&](double t) { return unitary_log_hermitian(w0inv * path(t)); };
  double h = step;
  while (true) {
    double lo = std::max(0.0, t_star - 2 * h), hi = std::min(1.0, t_star + 2 * h);
    // one-sided differences at the endpoints of the parameter interval
    bool interior = (t_star - 2 * h >= 0.0) && (t_star + 2 * h <= 1.0);
    try {
      CMatrix d;
      if (interior) {
        CMatrix r1 = r_of(t_star + h), rm1 = r_of(t_star - h);
        CMatrix r2 = r_of(t_star + 2 * h), rm2 = r_of(t_star - 2 * h);
        d = (8.0 * (r1 - rm1) - (r2 - rm2)) / (12.0 * h);
      } else {
        d = (r_of(hi) - r_of(lo)) / (hi - lo);
      }
      return classify_form(kernel, kernel.adjoint() * d * kernel);
    } catch (const std::runtime_error&) {
      h *= 0.25;
      if (h < min_step)
        throw std::runtime_error("crossing_form_unitary: step shrank below minimum "
                                 "near the logarithm branch cut");
    }
  }
}

/// The graph operator phi(t): mu(t*) -> mu(t*)^perp representing mu(t),
/// in the frame bases of mu(t*) and J mu(t*).
inline Matrix graph_operator(const Lagrangian& at_star, const Lagrangian& mu_t) {
  Matrix p = at_star.frame.transpose() * mu_t.frame;
  Matrix r = (at_star.space.J * at_star.frame).transpose() * mu_t.frame;
  Eigen::FullPivLU<Matrix> lu(p);
  if (!lu.isInvertible())
    throw std::runtime_error("graph_operator: path not transversal to mu(t*)^perp");
  return r * lu.inverse();
}

/// Crossing form Q_M(x,y) = d/dt omega(x, phi(t) y) on mu(t*) cap lambda.
inline SymmetricForm crossing_form_graph(const LagrangianPath& path, const Lagrangian& la,
                                         double t_star, double step = 1e-5) {
  Lagrangian mu0 = path(t_star);
  Matrix inter = intersection_basis(mu0, la);
  if (inter.cols() == 0)
    return SymmetricForm{CMatrix(), CMatrix::Zero(0, 0), 0, 0, false};
  double lo = std::max(0.0, t_star - step), hi = std::min(1.0, t_star + step);
  Matrix dphi = (graph_operator(mu0, path(hi)) - graph_operator(mu0, path(lo))) / (hi - lo);
  // omega(F a, J F phi b) = a^T phi b in the orthonormal frame of mu(t*).
  Matrix coords = mu0.frame.transpose() * inter;
  Matrix q = coords.transpose() * dphi * coords;
  return classify_form(inter.cast<Complex>(), (0.5 * (q + q.transpose())).cast<Complex>());
}

/// Local index at a regular crossing: sign Q~ in the interior, -q at t*=0,
/// +p at t*=1. Checks that [t*-delta, t*+delta] contains no other crossing.
inline int local_index_at_regular_crossing(const UnitaryPath& path, double t_star,
                                           double delta, double tol = 1e-8) {
  SymmetricForm form = crossing_form_unitary(path, t_star);
  if (!form.regular)
    throw std::runtime_error("local_index_at_regular_crossing: crossing not regular");
  double lo = std::max(0.0, t_star - delta), hi = std::min(1.0, t_star + delta);
  const int scan = 64;
  for (int i = 0; i <= scan; ++i) {
    double t = lo + (hi - lo) * i / scan;
    if (std::abs(t - t_star) <= delta / 8) continue;
    for (double psi : phases_rel_pi(path(t)))
      if (std::abs(psi) <= tol)
        throw std::runtime_error("local_index_at_regular_crossing: second crossing in window");
  }
  if (t_star <= 0.0) return -form.q;
  if (t_star >= 1.0) return form.p;
  return form.signature();
}

// ---- Hoermander index -----------------------------------------------------

/// Hermitian log of a unitary with the branch cut placed in the largest
/// gap of its eigenphase spectrum, so exp(iH) = V holds for any input.
inline CMatrix unitary_log_gap_cut(const CMatrix& v) {
  Eigen::ComplexSchur<CMatrix> schur(v, /*computeU=*/true);
  std::vector<double> ph(v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i) ph[i] = std::arg(schur.matrixT()(i, i));
  std::vector<double> sorted = ph;
  std::sort(sorted.begin(), sorted.end());
  double cut = kPi, best_gap = -1.0;
  for (std::size_t i = 0; i < sorted.size(); ++i) {
    double a = sorted[i];
    double b = (i + 1 < sorted.size()) ? sorted[i + 1] : sorted[0] + 2 * kPi;
    if (b - a > best_gap) { best_gap = b - a; cut = 0.5 * (a + b); }
  }
  CMatrix d = CMatrix::Zero(v.rows(), v.rows());
  for (Eigen::Index i = 0; i < v.rows(); ++i) {
    double t = ph[i];
    while (t > cut) t -= 2 * kPi;
    while (t <= cut - 2 * kPi) t += 2 * kPi;
    d(i, i) = t;
  }
  CMatrix h = schur.matrixU() * d * schur.matrixU().adjoint();
  return 0.5 * (h + h.adjoint());
}

/// A path of Lagrangians from mu0 to mu1 synthesized from unitary lifts,
/// mu(t) = rho(U0 exp(i t H)) with exp(iH) = U0^{-1} U1.
inline LagrangianPath connecting_path(const Lagrangian& la, const Lagrangian& mu0,
                                      const Lagrangian& mu1) {
  CMatrix u0 = unitary_of_lagrangian(la, mu0);
  CMatrix u1 = unitary_of_lagrangian(la, mu1);
  CMatrix h = unitary_log_gap_cut(u0.adjoint() * u1);
  return [la, u0, h](double t) {
    CMatrix e = (Complex(0, 1) * t * h).exp();
    return lagrangian_from_unitary(la, polar_unitary(u0 * e));
  };
}

/// sigma(mu1, mu0; lambda, lambda') = Mas(path, lambda) - Mas(path, lambda')
/// for any path from mu0 to mu1; path-independent.
inline int hormander_index(const Lagrangian& mu0, const Lagrangian& mu1,
                           const Lagrangian& la, const Lagrangian& la_prime) {
  LagrangianPath p = connecting_path(la, mu0, mu1);
  return maslov_index(p, la) - maslov_index(p, la_prime);
}

}  // namespace lagflow

#endif
