#ifndef GALERKIN_ORACLE_HPP
#define GALERKIN_ORACLE_HPP

// Independent spectral oracle for the circle problems: a Galerkin projection
// of sigma (d/dtau + B) + C_t onto a truncated real trigonometric basis.
// Derivative couplings are exact in this basis; the piecewise-constant
// perturbation enters through closed-form overlap integrals. Used as ground
// truth for the Evans-determinant spectra and the tracked spectral flow.

#include <lagflow/bvp.hpp>

namespace lagflow::testing {

namespace galerkin_detail {

inline double int_cos(double a, double lo, double hi) {
  if (a == 0.0) return hi - lo;
  return (std::sin(a * hi) - std::sin(a * lo)) / a;
}

inline double int_sin(double a, double lo, double hi) {
  if (a == 0.0) return 0.0;
  return (std::cos(a * lo) - std::cos(a * hi)) / a;
}

struct Mode {
  int k;     // frequency
  bool sine; // cos(k w tau) or sin(k w tau)
  double norm;
};

}  // namespace galerkin_detail

class GalerkinOracle {
 public:
  GalerkinOracle(ModelProblem pr, int modes_per_component = 401)
      : pr_(std::move(pr)), n_modes_(modes_per_component) {
    double L = pr_.length, w = 2 * kPi / L;
    modes_.push_back({0, false, 1.0 / std::sqrt(L)});
    for (int k = 1; 2 * k < n_modes_ + 1; ++k) {
      modes_.push_back({k, false, std::sqrt(2.0 / L)});
      modes_.push_back({k, true, std::sqrt(2.0 / L)});
    }
    n_modes_ = static_cast<int>(modes_.size());
    omega_ = w;
    // per-piece overlap matrices O_p(a,b) = integral of phi_a phi_b over the piece
    for (const auto& p : pr_.pieces) {
      Matrix o(n_modes_, n_modes_);
      for (int a = 0; a < n_modes_; ++a)
        for (int b = a; b < n_modes_; ++b) {
          o(a, b) = overlap(modes_[a], modes_[b], p.tau_begin, p.tau_end);
          o(b, a) = o(a, b);
        }
      overlaps_.push_back(std::move(o));
    }
  }

  int dim() const { return pr_.m * n_modes_; }

  Matrix matrix(double t) const {
    int m = pr_.m, nm = n_modes_;
    Matrix sb = pr_.sigma * pr_.B;
    Matrix out = Matrix::Zero(dim(), dim());
    // derivative block: cos_k' = -k w sin_k, sin_k' = k w cos_k (exact)
    for (int a = 0; a < nm; ++a) {
      int k = modes_[a].k;
      if (k == 0) {
        out.block(a * m, a * m, m, m) += sb;
        continue;
      }
      int c = a, s = a + 1;  // cos precedes sin for each k
      if (modes_[a].sine) continue;
      // <phi_c, sigma phi_s'> = k w sigma ; <phi_s, sigma phi_c'> = -k w sigma
      out.block(c * m, s * m, m, m) += k * omega_ * pr_.sigma;
      out.block(s * m, c * m, m, m) += -k * omega_ * pr_.sigma;
      out.block(c * m, c * m, m, m) += sb;
      out.block(s * m, s * m, m, m) += sb;
    }
    for (std::size_t pi = 0; pi < pr_.pieces.size(); ++pi) {
      Matrix c = pr_.pieces[pi].value(t);
      if (c.cwiseAbs().maxCoeff() == 0.0) continue;
      const Matrix& o = overlaps_[pi];
      for (int a = 0; a < nm; ++a)
        for (int b = 0; b < nm; ++b)
          if (o(a, b) != 0.0) out.block(a * m, b * m, m, m) += o(a, b) * c;
    }
    return 0.5 * (out + out.transpose());
  }

  std::vector<double> eigenvalues(double t) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(matrix(t), Eigen::EigenvaluesOnly);
    return std::vector<double>(es.eigenvalues().data(),
                               es.eigenvalues().data() + es.eigenvalues().size());
  }

  std::vector<double> eigenvalues_in(double t, double lo, double hi) const {
    std::vector<double> out;
    for (double e : eigenvalues(t))
      if (e >= lo && e <= hi) out.push_back(e);
    return out;
  }

  /// Tracked spectral flow of the family inside [-window, window].
  int spectral_flow(double window = 2.6, FlowOptions fo = {}) const {
    fo.cyclic = false;
    fo.cap = std::min(fo.cap, 1.0);
    fo.edge = window;
    fo.budget = std::min(fo.budget, 4096L);
    return signed_zero_flow(
        [this, window](double t) { return eigenvalues_in(t, -window, window); }, fo);
  }

 private:
  using Mode = galerkin_detail::Mode;

  double overlap(const Mode& a, const Mode& b, double lo, double hi) const {
    using galerkin_detail::int_cos;
    using galerkin_detail::int_sin;
    double p = a.k * omega_, q = b.k * omega_, n = a.norm * b.norm;
    if (!a.sine && !b.sine)
      return 0.5 * n * (int_cos(p - q, lo, hi) + int_cos(p + q, lo, hi));
    if (a.sine && b.sine)
      return 0.5 * n * (int_cos(p - q, lo, hi) - int_cos(p + q, lo, hi));
    // one sine, one cosine: sin(x)cos(y) = (sin(x+y) + sin(x-y))/2
    double x = a.sine ? p : q, y = a.sine ? q : p;
    return 0.5 * n * (int_sin(x + y, lo, hi) + int_sin(x - y, lo, hi));
  }

  ModelProblem pr_;
  int n_modes_;
  double omega_ = 1.0;
  std::vector<Mode> modes_;
  std::vector<Matrix> overlaps_;
};

}  // namespace lagflow::testing

#endif
