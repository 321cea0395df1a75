#ifndef LAGFLOW_SPECFLOW_HPP
#define LAGFLOW_SPECFLOW_HPP

// Spectral flow of paths of self-adjoint matrices by partitioned half-open
// window counting, the Riesz transform, and the crossing form Q_Sf.

#include <lagflow/flow_engine.hpp>
#include <lagflow/maslov.hpp>

#include <Eigen/Eigenvalues>
#include <functional>
#include <vector>

namespace lagflow {

/// A continuous path of real symmetric d x d matrices on [0,1].
struct OperatorPath {
  int dim = 0;
  std::function<Matrix(double)> evaluator;
  std::function<Matrix(double)> derivative;  // optional

  Matrix at(double t) const {
    Matrix a = evaluator(t);
    if (a.rows() != dim || a.cols() != dim)
      throw std::invalid_argument("OperatorPath: wrong dimension");
    if ((a - a.transpose()).cwiseAbs().maxCoeff() > 1e-10)
      throw std::invalid_argument("OperatorPath: sample not symmetric");
    return 0.5 * (a + a.transpose());
  }
};

inline std::vector<double> symmetric_eigenvalues(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(a, Eigen::EigenvaluesOnly);
  std::vector<double> ev(es.eigenvalues().data(), es.eigenvalues().data() + a.rows());
  return ev;
}

/// Sf({A_t}): net signed count of eigenvalues leaving the window [0, eps_j)
/// along the path. The window is half-open at eps_j and closed at 0, so an
/// eigenvalue sitting at 0 at t=0 already counts (A_t = t has flow 0).
inline int spectral_flow(const OperatorPath& path, FlowOptions opts = {}) {
  opts.cyclic = false;
  opts.cap = std::min(opts.cap, 1.0);
  return signed_zero_flow(
      [&path](double t) { return symmetric_eigenvalues(path.at(t)); }, opts);
}

/// R(A) = A (Id + A^2)^{-1/2}; monotone spectral map mu -> mu/sqrt(1+mu^2).
inline Matrix riesz(const Matrix& a) {
  Eigen::SelfAdjointEigenSolver<Matrix> es(0.5 * (a + a.transpose()));
  Vector d = es.eigenvalues();
  for (Eigen::Index i = 0; i < d.size(); ++i) d(i) /= std::sqrt(1.0 + d(i) * d(i));
  return es.eigenvectors() * d.asDiagonal() * es.eigenvectors().transpose();
}

/// Crossing form Q_Sf(x,y) = d/dt <x, A_t y> at t* on Ker A_{t*}.
inline SymmetricForm crossing_form_sf(const OperatorPath& path, double t_star,
                                      double kernel_tol = 1e-8, double step = 1e-4) {
  Matrix a0 = path.at(t_star);
  Eigen::SelfAdjointEigenSolver<Matrix> es(a0);
  double scale = std::max(1.0, es.eigenvalues().cwiseAbs().maxCoeff());
  std::vector<Eigen::Index> idx;
  for (Eigen::Index i = 0; i < a0.rows(); ++i)
    if (std::abs(es.eigenvalues()(i)) <= kernel_tol * scale) idx.push_back(i);
  if (idx.empty())
    throw std::invalid_argument("crossing_form_sf: empty kernel at t*");
  Matrix kernel(a0.rows(), static_cast<Eigen::Index>(idx.size()));
  for (std::size_t k = 0; k < idx.size(); ++k) kernel.col(k) = es.eigenvectors().col(idx[k]);

  Matrix da;
  if (path.derivative) {
    da = path.derivative(t_star);
  } else {
    double h = step;
    double lo = std::max(0.0, t_star - 2 * h), hi = std::min(1.0, t_star + 2 * h);
    if (t_star - 2 * h >= 0.0 && t_star + 2 * h <= 1.0) {
      Matrix a1 = path.at(t_star + h), am1 = path.at(t_star - h);
      Matrix a2 = path.at(t_star + 2 * h), am2 = path.at(t_star - 2 * h);
      da = (8.0 * (a1 - am1) - (a2 - am2)) / (12.0 * h);
    } else {
      da = (path.at(hi) - path.at(lo)) / (hi - lo);
    }
  }
  Matrix q = kernel.transpose() * da * kernel;
  return classify_form(kernel.cast<Complex>(), q.cast<Complex>());
}

/// Local spectral flow over a window around a regular crossing: signature in
/// the interior, -q at t*=0, +p at t*=1.
inline int local_spectral_flow(const OperatorPath& path, double t_star) {
  SymmetricForm form = crossing_form_sf(path, t_star);
  if (!form.regular)
    throw std::runtime_error("local_spectral_flow: crossing not regular");
  if (t_star <= 0.0) return -form.q;
  if (t_star >= 1.0) return form.p;
  return form.signature();
}

}  // namespace lagflow

#endif
