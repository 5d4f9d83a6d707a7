#include "imexest/problems.hpp"

#include <doctest.h>
#include <unsupported/Eigen/MatrixFunctions>

#include <cmath>
#include <random>

using namespace imexest;

namespace {

Vector random_state(std::size_t n, unsigned seed, double scale = 1.0) {
  std::mt19937 rng(seed);
  std::normal_distribution<double> nd(0.0, scale);
  Vector y(static_cast<Eigen::Index>(n));
  for (Eigen::Index i = 0; i < y.size(); ++i) y(i) = nd(rng);
  return y;
}

void check_jacobians(const SplitOdeProblem& p, double t, const Vector& y) {
  const Matrix fd_f = finite_difference_jacobian(p.eval_f, t, y);
  const Matrix fd_g = finite_difference_jacobian(p.eval_g, t, y);
  const Matrix jf = Matrix(p.jac_f(t, y));
  const Matrix jg = Matrix(p.jac_g(t, y));
  const double sf = 1.0 + jf.cwiseAbs().maxCoeff();
  const double sg = 1.0 + jg.cwiseAbs().maxCoeff();
  CHECK((jf - fd_f).cwiseAbs().maxCoeff() / sf < 1e-6);
  CHECK((jg - fd_g).cwiseAbs().maxCoeff() / sg < 1e-6);
}

}  // namespace

TEST_CASE("Jacobians agree with finite differences") {
  SUBCASE("linear advection-diffusion") {
    const auto p = linear_advection_diffusion(0.1, 1.0 / 40.0);
    check_jacobians(p, 0.0, random_state(p.dim, 1));
  }
  SUBCASE("swapped roles") {
    const auto p = linear_advection_diffusion(0.075, 1.0 / 20.0, true);
    check_jacobians(p, 0.0, random_state(p.dim, 2));
  }
  SUBCASE("burgers") {
    const auto p = burgers(0.05, 1.0 / 40.0);
    check_jacobians(p, 0.0, random_state(p.dim, 3));
  }
  SUBCASE("alfven, both splits") {
    AlfvenParams prm;
    const auto vs = mhd_alfven(prm, 0.05);
    check_jacobians(vs, 0.01, random_state(vs.dim, 4));
    const auto vi = mhd_split(vs, AlfvenSplit::v_implicit);
    check_jacobians(vi, 0.01, random_state(vi.dim, 5));
  }
  SUBCASE("small systems") {
    check_jacobians(scalar_linear(1.0, -2.0), 0.0, random_state(1, 6));
    check_jacobians(logistic(), 0.0, random_state(1, 7));
    Vector y0(2);
    y0 << 1.0, 0.0;
    check_jacobians(rotation_decay(1.0, 2.0, y0), 0.0, random_state(2, 8));
  }
}

TEST_CASE("swapping roles exchanges f and g and preserves the sum") {
  const auto a = linear_advection_diffusion(0.1, 1.0 / 40.0);
  const auto b = linear_advection_diffusion(0.1, 1.0 / 40.0, true);
  const Vector y = random_state(a.dim, 11);
  CHECK((a.eval_f(0.0, y) - b.eval_g(0.0, y)).norm() < 1e-12);
  CHECK((a.eval_g(0.0, y) - b.eval_f(0.0, y)).norm() < 1e-12);
  CHECK((a.y0 - b.y0).norm() == 0.0);
}

TEST_CASE("re-splitting the Alfven problem preserves f + g") {
  const auto vs = mhd_alfven(AlfvenParams{}, 0.02);
  const auto vi = mhd_split(vs, AlfvenSplit::v_implicit);
  const Vector y = random_state(vs.dim, 12);
  for (double t : {0.0, 1e-3, 0.05}) {
    const Vector s1 = vs.eval_f(t, y) + vs.eval_g(t, y);
    const Vector s2 = vi.eval_f(t, y) + vi.eval_g(t, y);
    CHECK((s1 - s2).lpNorm<Eigen::Infinity>() < 1e-9 * (1.0 + s1.lpNorm<Eigen::Infinity>()));
  }
  // v-implicit leaves nothing explicit in the v block.
  const auto mv = static_cast<Eigen::Index>(vs.dim / 2);
  CHECK(vi.eval_f(0.01, y).head(mv).lpNorm<Eigen::Infinity>() == 0.0);
  REQUIRE(vi.fields.size() == 2);
  CHECK(vi.fields[0].name == "v");
  CHECK(vi.fields[1].name == "B");
}

TEST_CASE("Alfven closed form: rest at t = 0 and wall data") {
  AlfvenParams prm;
  for (double z : {0.0, 0.3, 1.0}) {
    const auto [v, B] = alfven_analytic(prm, z, 0.0);
    CHECK(v == 0.0);
    CHECK(B == 0.0);
  }
  for (double t : {1e-4, 0.01, 0.1}) {
    const auto [v, B] = alfven_analytic(prm, 0.0, t);
    CHECK(v == doctest::Approx(prm.U).epsilon(1e-12));
    CHECK(std::abs(B) < 1e-14);
  }
  const auto [vb, Bb] = alfven_boundary(prm, 0.0, 0.0);
  CHECK(vb == 0.0);
  CHECK(Bb == 0.0);
  CHECK(prm.alfven_speed() == doctest::Approx(10.0));
}

TEST_CASE("Alfven problem dimensions and initial state") {
  const auto p = mhd_alfven(AlfvenParams{}, 5e-3);
  CHECK(p.dim == 398);
  CHECK(p.y0.lpNorm<Eigen::Infinity>() == 0.0);
  CHECK_FALSE(p.autonomous);
  CHECK(p.has_analytic());
  CHECK_THROWS_AS(mhd_alfven(AlfvenParams{}, 0.3), Error);
  AlfvenParams bad;
  bad.rho = -1.0;
  CHECK_THROWS_AS(mhd_alfven(bad, 5e-3), Error);
}

TEST_CASE("quantity-of-interest weights") {
  const auto left = qoi_mean_left_half(40);
  REQUIRE(left.psi.size() == 40);
  CHECK(left.psi.head(21).minCoeff() == 1.0);
  CHECK(left.psi.tail(19).lpNorm<Eigen::Infinity>() == 0.0);
  const auto iv = qoi_integral_v(199, 5e-3);
  REQUIRE(iv.psi.size() == 398);
  CHECK(iv.psi.head(199).sum() == doctest::Approx(199 * 5e-3));
  CHECK(iv.psi.tail(199).lpNorm<Eigen::Infinity>() == 0.0);
  CHECK(iv.kind == QoiSpec::Kind::final_time);
}

TEST_CASE("rotation-decay closed form matches the matrix exponential") {
  Vector y0(2);
  y0 << 0.3, -1.2;
  const double a = 0.7, w = 2.5;
  const auto p = rotation_decay(a, w, y0);
  REQUIRE(p.has_analytic());
  Matrix A(2, 2);
  A << -a, w, -w, -a;
  for (double t : {0.0, 0.4, 1.7}) {
    const Matrix At = A * t;
    const Vector expected = At.exp() * y0;
    CHECK((p.analytic(t) - expected).norm() < 1e-12);
  }
}

TEST_CASE("scalar closed forms") {
  const auto s = scalar_linear(1.0, -2.0, 3.0);
  CHECK(s.analytic(1.5)(0) == doctest::Approx(3.0 * std::exp(-1.5)).epsilon(1e-14));
  const auto l = logistic(0.5);
  const double t = 2.0;
  CHECK(l.analytic(t)(0) == doctest::Approx(1.0 / (1.0 + std::exp(-t))).epsilon(1e-14));
}

TEST_CASE("grid_count rejects spacings that do not divide the span") {
  CHECK(grid_count(1.0, 0.025, "t") == 40);
  CHECK_THROWS_AS(grid_count(1.0, 0.3, "t"), Error);
  CHECK_THROWS_AS(grid_count(1.0, -0.1, "t"), Error);
}

TEST_CASE("zero right-hand side") {
  const auto z = zero_rhs(3);
  const Vector y = random_state(3, 21);
  CHECK(z.eval_f(0.0, y).norm() == 0.0);
  CHECK(z.eval_g(0.0, y).norm() == 0.0);
  CHECK(z.jac_f(0.0, y).nonZeros() == 0);
}
