#include "doctest.h"
#include "galerkin_oracle.hpp"
#include "test_helpers.hpp"

#include <lagflow/bvp.hpp>

using namespace lagflow;

namespace {

Matrix rot90() {
  Matrix s(2, 2);
  s << 0, -1, 1, 0;
  return s;
}

/// B = 0, C = 0 circle of circumference 2 pi split at pi.
ModelProblem free_circle() {
  Matrix zero = Matrix::Zero(2, 2);
  auto zero_fn = [zero](double) { return zero; };
  return make_problem(2, rot90(), zero, 2 * kPi, kPi,
                      {{0.0, kPi, zero_fn}, {kPi, 2 * kPi, zero_fn}});
}

/// C(t) = (t - 1/2) Id everywhere; not of product form.
ModelProblem shifted_circle() {
  auto c = [](double t) { return Matrix((t - 0.5) * Matrix::Identity(2, 2)); };
  return make_problem(2, rot90(), Matrix::Zero(2, 2), 2 * kPi, kPi,
                      {{0.0, kPi, c}, {kPi, 2 * kPi, c}}, /*product_form=*/false);
}

/// The diagonal boundary condition u(a) = u(b) on one arc.
Lagrangian diagonal_condition(const ModelProblem& pr) {
  Matrix f(2 * pr.m, pr.m);
  f << Matrix::Identity(pr.m, pr.m), Matrix::Identity(pr.m, pr.m);
  return make_lagrangian(side_boundary_space(pr), f / std::sqrt(2.0));
}

}  // namespace

TEST_CASE("make_problem validates the product-form algebra") {
  Matrix zero = Matrix::Zero(2, 2);
  auto zero_fn = [zero](double) { return zero; };
  // B must anticommute with sigma
  Matrix bad_b = Matrix::Identity(2, 2);
  CHECK_THROWS_AS(make_problem(2, rot90(), bad_b, 2 * kPi, kPi,
                               {{0.0, kPi, zero_fn}, {kPi, 2 * kPi, zero_fn}}),
                  std::invalid_argument);
  // split must be a breakpoint
  CHECK_THROWS_AS(make_problem(2, rot90(), zero, 2 * kPi, kPi, {{0.0, 2 * kPi, zero_fn}}),
                  std::invalid_argument);
  // product-form flag requires C to vanish in the collars
  auto bump = [](double t) { return Matrix(t * Matrix::Identity(2, 2)); };
  CHECK_THROWS_AS(make_problem(2, rot90(), zero, 2 * kPi, kPi,
                               {{0.0, kPi, bump}, {kPi, 2 * kPi, zero_fn}}),
                  std::invalid_argument);
  CHECK_NOTHROW(make_problem(2, rot90(), zero, 2 * kPi, kPi,
                             {{0.0, kPi, bump}, {kPi, 2 * kPi, zero_fn}},
                             /*product_form=*/false));
}

TEST_CASE("transfer matrices: identity, rotation, and exponential cases") {
  ModelProblem free_pr = free_circle();
  CHECK((transfer_matrix(free_pr, 0.0, kPi, 0.0, 0.0) - Matrix::Identity(2, 2))
            .cwiseAbs().maxCoeff() < 1e-12);
  // lambda = 1 over length pi: generator -lambda sigma rotates by pi
  Matrix t1 = transfer_matrix(free_pr, 0.0, kPi, 0.0, 1.0);
  CHECK((t1 + Matrix::Identity(2, 2)).cwiseAbs().maxCoeff() < 1e-12);

  ModelProblem demo = make_demo_problem();
  Matrix td = transfer_matrix(demo, 0.0, kPi, 0.0, 0.0);  // C_0 = 0
  CHECK(std::abs(td(0, 0) - std::exp(-0.3 * kPi)) < 1e-12);
  CHECK(std::abs(td(1, 1) - std::exp(0.3 * kPi)) < 1e-12);
  CHECK(std::abs(td(0, 1)) + std::abs(td(1, 0)) < 1e-12);
  // composition across a breakpoint
  Matrix ta = transfer_matrix(demo, 0.0, 2.0, 0.7, 0.4);
  Matrix tb = transfer_matrix(demo, 2.0, kPi, 0.7, 0.4);
  CHECK((tb * ta - transfer_matrix(demo, 0.0, kPi, 0.7, 0.4)).cwiseAbs().maxCoeff() < 1e-10);
}

TEST_CASE("boundary spaces and Cauchy data are symplectically consistent") {
  ModelProblem demo = make_demo_problem();
  SymplecticSpace side = side_boundary_space(demo);
  SymplecticSpace full = full_boundary_space(demo);
  CHECK(side.n == 2);
  CHECK(full.n == 4);

  Lagrangian diag = diagonal_condition(free_circle());
  CHECK(is_lagrangian_frame(side, diag.frame));

  for (double t : {0.0, 0.37, 1.0})
    for (double lam : {0.0, 0.8, -1.3}) {
      CHECK(is_lagrangian_frame(side, cauchy_data_space(demo, Side::minus, t, lam).frame));
      CHECK(is_lagrangian_frame(side, cauchy_data_space(demo, Side::plus, t, lam).frame));
      CHECK(is_lagrangian_frame(full, cauchy_data_full(demo, t, lam).frame));
    }
  CHECK(is_lagrangian_frame(full, transmission_lagrangian(demo).frame));

  // continuity of t -> Lambda_t^-
  double d = subspace_distance(cauchy_data_space(demo, Side::minus, 0.5, 0.0),
                               cauchy_data_space(demo, Side::minus, 0.5 + 1e-6, 0.0));
  CHECK(d < 1e-4);
}

TEST_CASE("Green's form equals the boundary evaluation") {
  ModelProblem demo = make_demo_problem();
  // arbitrary smooth sections u, v on the minus arc; A u = sigma(u' + B u) + C u
  auto u_of = [](double tau) {
    Vector u(2);
    u << std::sin(2 * tau) + 0.3 * tau, std::cos(tau);
    return u;
  };
  auto up_of = [](double tau) {
    Vector u(2);
    u << 2 * std::cos(2 * tau) + 0.3, -std::sin(tau);
    return u;
  };
  auto v_of = [](double tau) {
    Vector v(2);
    v << std::cos(3 * tau), 0.5 * std::sin(tau) - 0.1;
    return v;
  };
  auto vp_of = [](double tau) {
    Vector v(2);
    v << -3 * std::sin(3 * tau), 0.5 * std::cos(tau);
    return v;
  };
  double t = 0.8;
  auto apply = [&](auto f, auto fp, double tau) {
    return Vector(demo.sigma * (fp(tau) + demo.B * f(tau)) + demo.coefficient(t, tau) * f(tau));
  };
  int nq = 20000;
  double h = kPi / nq, acc = 0.0;
  for (int i = 0; i <= nq; ++i) {
    double tau = i * h, w = (i == 0 || i == nq) ? 0.5 * h : h;
    acc += w * (apply(u_of, up_of, tau).dot(v_of(tau)) - u_of(tau).dot(apply(v_of, vp_of, tau)));
  }
  double boundary = (demo.sigma * u_of(kPi)).dot(v_of(kPi)) - (demo.sigma * u_of(0)).dot(v_of(0));
  CHECK(std::abs(acc - boundary) < 1e-7);
}

TEST_CASE("closed-circle spectrum: integers with multiplicity two") {
  ModelProblem pr = free_circle();
  Lagrangian delta = transmission_lagrangian(pr);
  SpectrumReport rep = spectrum(pr, Side::circle, delta, 0.0, -3.5, 3.5);
  REQUIRE(rep.eigenvalues.size() == 7);
  for (int i = 0; i < 7; ++i) {
    CHECK(std::abs(rep.eigenvalues[i] - (i - 3)) < 1e-8);
    CHECK(rep.multiplicities[i] == 2);
  }
  CHECK(rep.certification_margin > 0.0);

  SpectrumReport empty = spectrum(pr, Side::circle, delta, 0.0, 0.2, 0.8, 601);
  CHECK(empty.eigenvalues.empty());
  CHECK(empty.certification_margin > 0.0);
}

TEST_CASE("interval spectrum with the periodic boundary condition: 2Z") {
  ModelProblem pr = free_circle();
  Lagrangian diag = diagonal_condition(pr);
  SpectrumReport rep = spectrum(pr, Side::minus, diag, 0.0, -3.0, 3.0);
  REQUIRE(rep.eigenvalues.size() == 3);
  for (int i = 0; i < 3; ++i) {
    CHECK(std::abs(rep.eigenvalues[i] - (2 * i - 2)) < 1e-8);
    CHECK(rep.multiplicities[i] == 2);
  }
}

TEST_CASE("kernel identity on the circle") {
  ModelProblem demo = make_demo_problem();
  Lagrangian delta = transmission_lagrangian(demo);
  for (double t : {0.0, 0.3, 0.65, 1.0}) {
    int boundary_dim = intersection_dim(cauchy_data_full(demo, t, 0.0), delta);
    CHECK(boundary_dim == circle_kernel(demo, t, 0.0).dim());
  }
  // the free circle has a genuine 2-dim kernel at lambda = 0
  ModelProblem pr = free_circle();
  CHECK(circle_kernel(pr, 0.0, 0.0).dim() == 2);
  CHECK(intersection_dim(cauchy_data_full(pr, 0.0, 0.0), transmission_lagrangian(pr)) == 2);
}

TEST_CASE("interval family C_t = (t - 1/2) Id: flow +2 equals Maslov count") {
  ModelProblem pr = shifted_circle();
  Lagrangian diag = diagonal_condition(pr);
  TrackingOptions topt;
  topt.window = 2.4;
  CHECK(spectral_flow_bvp(pr, Side::minus, diag, topt) == 2);
  CHECK(maslov_side(pr, Side::minus, diag) == 2);
}

TEST_CASE("constant family has zero flow; reversal negates") {
  ModelProblem demo = make_demo_problem();
  Lagrangian delta = transmission_lagrangian(demo);
  ModelProblem frozen = mixed_operator(demo, 0.6, 0.6);
  TrackingOptions topt;
  CHECK(spectral_flow_bvp(frozen, Side::circle, delta, topt) == 0);

  int forward = spectral_flow_bvp(demo, Side::circle, delta, topt);
  ModelProblem reversed = two_parameter_family(
      demo, [](double u) { return 1.0 - u; }, [](double u) { return 1.0 - u; });
  CHECK(spectral_flow_bvp(reversed, Side::circle, delta, topt) == -forward);
}

TEST_CASE("split boundary conditions") {
  ModelProblem demo = make_demo_problem();
  SplitConditions sc = split_boundary_conditions(demo);
  SymplecticSpace side = side_boundary_space(demo);
  CHECK(is_lagrangian_frame(side, sc.ell_minus.frame));
  CHECK(is_lagrangian_frame(side, sc.ell_plus.frame));
  CHECK_FALSE(sc.warning);

  // symmetric free split: Lambda_0^+ is the graph of the identity, and so is
  // its swap
  ModelProblem pr = free_circle();
  SplitConditions free_sc = split_boundary_conditions(pr);
  CHECK(subspace_distance(free_sc.ell_minus, diagonal_condition(pr)) < 1e-10);

  // non-product-form, invertible at t=0: accepted with a warning
  ModelProblem shifted = shifted_circle();
  SplitConditions warned = split_boundary_conditions(shifted);
  CHECK(warned.warning);
}

TEST_CASE("two-parameter family freezes and mixes coefficients") {
  ModelProblem demo = make_demo_problem();
  ModelProblem a00 = mixed_operator(demo, 0.0, 0.0);
  for (double tau : {0.5, 2.0, 4.0, 5.5})
    CHECK((a00.coefficient(0.77, tau) - demo.coefficient(0.0, tau)).cwiseAbs().maxCoeff() ==
          0.0);
  ModelProblem ast = mixed_operator(demo, 0.3, 0.9);
  ModelProblem ass = mixed_operator(demo, 0.3, 0.3);
  for (double tau : {0.5, 2.0})  // minus arc: identical
    CHECK((ast.coefficient(0.0, tau) - ass.coefficient(0.0, tau)).cwiseAbs().maxCoeff() == 0.0);
  // plus arc: difference is C_t - C_s
  Matrix diff = ast.coefficient(0.0, 4.0) - ass.coefficient(0.0, 4.0);
  Matrix expect = demo.coefficient(0.9, 4.0) - demo.coefficient(0.3, 4.0);
  CHECK((diff - expect).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("Galerkin oracle reproduces the free-circle spectrum") {
  ModelProblem pr = free_circle();
  lagflow::testing::GalerkinOracle oracle(pr, 41);
  std::vector<double> eig = oracle.eigenvalues_in(0.0, -3.5, 3.5);
  REQUIRE(eig.size() == 14);  // integers -3..3, multiplicity 2
  for (int i = 0; i < 7; ++i) {
    CHECK(std::abs(eig[2 * i] - (i - 3)) < 1e-10);
    CHECK(std::abs(eig[2 * i + 1] - (i - 3)) < 1e-10);
  }
}

TEST_CASE("Galerkin oracle agrees with the demo spectrum at t=0") {
  ModelProblem demo = make_demo_problem();
  lagflow::testing::GalerkinOracle oracle(demo, 81);
  std::vector<double> g = oracle.eigenvalues_in(0.0, -2.5, 2.5);
  SpectrumReport rep =
      spectrum(demo, Side::circle, transmission_lagrangian(demo), 0.0, -2.5, 2.5, 1001);
  std::vector<double> e;
  for (std::size_t i = 0; i < rep.eigenvalues.size(); ++i)
    for (int k = 0; k < rep.multiplicities[i]; ++k) e.push_back(rep.eigenvalues[i]);
  REQUIRE(g.size() == e.size());
  for (std::size_t i = 0; i < g.size(); ++i) CHECK(std::abs(g[i] - e[i]) < 1e-6);
}

TEST_CASE("demo spectral flow matches a reduced Galerkin oracle") {
  ModelProblem demo = make_demo_problem();
  Lagrangian delta = transmission_lagrangian(demo);
  TrackingOptions topt;
  int tracked = spectral_flow_bvp(demo, Side::circle, delta, topt);
  lagflow::testing::GalerkinOracle oracle(demo, 61);
  CHECK(oracle.spectral_flow(topt.window) == tracked);
}
