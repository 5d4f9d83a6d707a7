#include "imexest/numerics.hpp"

#include <doctest.h>

#include <cmath>
#include <random>

using namespace imexest;

TEST_CASE("Lagrange basis: delta property and partition of unity") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> u(-2.0, 3.0);
  for (int trial = 0; trial < 20; ++trial) {
    const int n = 1 + trial % 5;
    std::vector<double> nodes;
    for (int i = 0; i < n; ++i) nodes.push_back(u(rng) + 10.0 * i);
    const LagrangeBasis b(nodes);
    for (std::size_t i = 0; i < b.size(); ++i) {
      for (std::size_t j = 0; j < b.size(); ++j) {
        CHECK(b.eval(i, nodes[j]) == doctest::Approx(i == j ? 1.0 : 0.0).epsilon(1e-12));
      }
    }
    for (int s = 0; s < 10; ++s) {
      const double t = u(rng) * 5.0;
      double sum = 0.0, dsum = 0.0;
      for (std::size_t i = 0; i < b.size(); ++i) {
        sum += b.eval(i, t);
        dsum += b.derivative(i, t);
      }
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-9));
      CHECK(std::abs(dsum) < 1e-9);
    }
  }
}

TEST_CASE("Lagrange basis reproduces polynomials and their derivatives") {
  const auto b = LagrangeBasis::equispaced(0.0, 1.0, 3);
  auto p = [](double t) { return 2.0 - t + 3.0 * t * t - 0.5 * t * t * t; };
  auto dp = [](double t) { return -1.0 + 6.0 * t - 1.5 * t * t; };
  for (double t : {0.0, 0.13, 0.5, 0.77, 1.0, 1.4}) {
    double v = 0.0, dv = 0.0;
    for (std::size_t i = 0; i < b.size(); ++i) {
      v += p(b.nodes()[i]) * lagrange_eval(b, i, t);
      dv += p(b.nodes()[i]) * b.derivative(i, t);
    }
    CHECK(v == doctest::Approx(p(t)).epsilon(1e-13));
    CHECK(dv == doctest::Approx(dp(t)).epsilon(1e-12));
  }
}

TEST_CASE("Lagrange basis rejects duplicate or empty nodes") {
  CHECK_THROWS_AS(LagrangeBasis({0.0, 0.5, 0.5}), Error);
  CHECK_THROWS_AS(LagrangeBasis(std::vector<double>{}), Error);
  CHECK(LagrangeBasis::equispaced(0.0, 1.0, 0).size() == 1);
}

TEST_CASE("Lebesgue bound of the quadratic equispaced basis is 1.25") {
  // the maximum of sum_i |l_i| on [0, 1] is 1.25, reached at the quarter points.
  const auto b = LagrangeBasis::equispaced(0.0, 1.0, 2);
  CHECK(lebesgue_bound(b, 20000) == doctest::Approx(1.25).epsilon(1e-6));
  CHECK(lebesgue_bound(LagrangeBasis::equispaced(0.0, 1.0, 1)) == doctest::Approx(1.0));
}

TEST_CASE("Gauss rules integrate monomials up to degree 2n-1 exactly") {
  for (int n = 1; n <= 10; ++n) {
    CAPTURE(n);
    const auto r = gauss_rule(n);
    REQUIRE(r.size() == static_cast<std::size_t>(n));
    for (int k = 0; k <= 2 * n - 1; ++k) {
      double sum = 0.0;
      for (std::size_t g = 0; g < r.size(); ++g) sum += r.weights[g] * std::pow(r.points[g], k);
      const double exact = (k % 2 == 1) ? 0.0 : 2.0 / (k + 1);
      CHECK(std::abs(sum - exact) < 1e-14);
    }
  }
  CHECK_THROWS_AS(gauss_rule(0), Error);
  CHECK_THROWS_AS(gauss_rule(11), Error);
  CHECK(interval_rule().size() == 5);
}

TEST_CASE("L2 projection of t^2 onto linears over [0,1] is t - 1/6") {
  const auto p = l2_project([](double t) { return t * t; }, 0.0, 1.0, 1);
  REQUIRE(p.coeffs.size() == 2);
  CHECK(p.coeffs[0] == doctest::Approx(-1.0 / 6.0).epsilon(1e-14));
  CHECK(p.coeffs[1] == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("L2 projection onto constants is the mean") {
  const auto p = l2_project([](double t) { return std::exp(t); }, 1.0, 3.0, 0);
  CHECK(p(2.0) == doctest::Approx((std::exp(3.0) - std::exp(1.0)) / 2.0).epsilon(1e-12));
}

TEST_CASE("L2 projection is idempotent and exact on its range") {
  auto f = [](double t) { return std::sin(3.0 * t) + t; };
  for (int deg = 0; deg <= 3; ++deg) {
    const auto p1 = l2_project(f, -0.5, 1.5, deg);
    const auto p2 = l2_project([&](double t) { return p1(t); }, -0.5, 1.5, deg);
    for (double t : {-0.5, 0.0, 0.7, 1.5}) CHECK(p2(t) == doctest::Approx(p1(t)).epsilon(1e-12));
  }
  const auto cubic = [](double t) { return 1.0 - 2.0 * t + t * t * t; };
  const auto pc = l2_project(cubic, 2.0, 4.0, 3);
  for (double t : {2.0, 2.5, 3.9}) CHECK(pc(t) == doctest::Approx(cubic(t)).epsilon(1e-12));
}

TEST_CASE("L2 projection residual is orthogonal to the target space") {
  auto f = [](double t) { return std::exp(-t) * std::cos(4.0 * t); };
  const auto p = l2_project(f, 0.0, 2.0, 2);
  const auto rule = gauss_rule(10);
  for (int k = 0; k <= 2; ++k) {
    double acc = 0.0;
    for (std::size_t g = 0; g < rule.size(); ++g) {
      const double t = 1.0 + rule.points[g];
      acc += rule.weights[g] * (f(t) - p(t)) * std::pow(t, k);
    }
    CHECK(std::abs(acc) < 1e-10);
  }
}

TEST_CASE("shifted Legendre polynomials are orthogonal on [0,1]") {
  const auto rule = gauss_rule(10);
  for (int a = 0; a <= 4; ++a) {
    for (int b = 0; b <= 4; ++b) {
      double acc = 0.0;
      for (std::size_t g = 0; g < rule.size(); ++g) {
        const double s = 0.5 * (rule.points[g] + 1.0);
        acc += 0.5 * rule.weights[g] * shifted_legendre(a, s) * shifted_legendre(b, s);
      }
      CHECK(acc == doctest::Approx(a == b ? 1.0 / (2 * a + 1) : 0.0).epsilon(1e-13));
    }
  }
  CHECK(shifted_legendre(1, 1.0) == doctest::Approx(1.0));
  CHECK(shifted_legendre(2, 0.0) == doctest::Approx(1.0));
}
