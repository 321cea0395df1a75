#ifndef TEST_HELPERS_HPP
#define TEST_HELPERS_HPP

#include <lagflow/maslov.hpp>
#include <lagflow/pairs.hpp>

namespace lagflow::testing {

inline Lagrangian random_lagrangian(Rng& rng, const SymplecticSpace& s) {
  return lagrangian_from_unitary(lambda_std(s), rng.unitary(s.n));
}

/// A Lagrangian pair with a prescribed intersection dimension k: mu agrees
/// with la on the first k frame directions and is rotated into J la elsewhere.
inline std::pair<Lagrangian, Lagrangian> pair_with_intersection(Rng& rng,
                                                                const SymplecticSpace& s,
                                                                int k) {
  Lagrangian la = random_lagrangian(rng, s);
  Matrix f(s.dim(), s.n);
  for (int j = 0; j < s.n; ++j) {
    if (j < k) {
      f.col(j) = la.frame.col(j);
    } else {
      double a = rng.uniform(0.3, kPi - 0.3);  // stays away from la
      f.col(j) = std::cos(a) * la.frame.col(j) + std::sin(a) * (s.J * la.frame.col(j));
    }
  }
  return {make_lagrangian(s, f), la};
}

/// Smooth seeded path mu(t) = rho(U0 exp(i t H)).
inline LagrangianPath random_path(Rng& rng, const Lagrangian& la, double scale = 2.0) {
  CMatrix u0 = rng.unitary(la.space.n);
  CMatrix h = rng.hermitian(la.space.n, scale);
  return [la, u0, h](double t) {
    CMatrix e = (Complex(0, 1) * t * h).exp();
    return lagrangian_from_unitary(la, polar_unitary(u0 * e));
  };
}

/// The line in R^2 at angle theta(t) from the first axis of lambda_std.
inline LagrangianPath rotating_line(const SymplecticSpace& s,
                                    std::function<double(double)> theta) {
  if (s.n != 1) throw std::invalid_argument("rotating_line: n must be 1");
  Lagrangian la = lambda_std(s);
  return [s, la, theta](double t) {
    double a = theta(t);
    Matrix f = std::cos(a) * la.frame + std::sin(a) * (s.J * la.frame);
    return make_lagrangian(s, f);
  };
}

}  // namespace lagflow::testing

#endif
