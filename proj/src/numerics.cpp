#include "imexest/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace imexest {

LagrangeBasis::LagrangeBasis(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.empty()) throw Error("LagrangeBasis: empty node set");
  denom_.assign(nodes_.size(), 1.0);
  for (std::size_t i = 0; i < nodes_.size(); ++i) {
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      if (i == j) continue;
      if (nodes_[i] == nodes_[j]) {
        throw Error("LagrangeBasis: duplicate nodes at indices " + std::to_string(i) +
                    " and " + std::to_string(j));
      }
      denom_[i] *= nodes_[i] - nodes_[j];
    }
  }
}

LagrangeBasis LagrangeBasis::equispaced(double a, double b, int degree) {
  if (degree < 0) throw Error("LagrangeBasis: negative degree");
  std::vector<double> nodes(static_cast<std::size_t>(degree) + 1);
  if (degree == 0) {
    nodes[0] = a;
  } else {
    for (int j = 0; j <= degree; ++j) nodes[j] = a + (b - a) * j / degree;
    nodes.back() = b;
  }
  return LagrangeBasis(std::move(nodes));
}

double LagrangeBasis::eval(std::size_t i, double t) const {
  double num = 1.0;
  for (std::size_t j = 0; j < nodes_.size(); ++j) {
    if (j != i) num *= t - nodes_[j];
  }
  return num / denom_[i];
}

double LagrangeBasis::derivative(std::size_t i, double t) const {
  // d/dt prod_{j != i} (t - x_j) = sum_{l != i} prod_{j != i, l} (t - x_j)
  double sum = 0.0;
  for (std::size_t l = 0; l < nodes_.size(); ++l) {
    if (l == i) continue;
    double prod = 1.0;
    for (std::size_t j = 0; j < nodes_.size(); ++j) {
      if (j != i && j != l) prod *= t - nodes_[j];
    }
    sum += prod;
  }
  return sum / denom_[i];
}

double lagrange_eval(const LagrangeBasis& basis, std::size_t i, double t) {
  if (i >= basis.size()) throw Error("lagrange_eval: basis index out of range");
  return basis.eval(i, t);
}

double lebesgue_bound(const LagrangeBasis& basis, int samples) {
  if (samples < 2) throw Error("lebesgue_bound: need at least 2 samples");
  const auto nodes = basis.nodes();
  const auto [lo, hi] = std::minmax_element(nodes.begin(), nodes.end());
  double best = 0.0;
  for (int s = 0; s < samples; ++s) {
    const double t = *lo + (*hi - *lo) * s / (samples - 1);
    double sum = 0.0;
    for (std::size_t i = 0; i < basis.size(); ++i) sum += std::abs(basis.eval(i, t));
    best = std::max(best, sum);
  }
  return best;
}

namespace {

// P_n(z) and P_n'(z) by the three-term recurrence.
std::pair<double, double> legendre_with_derivative(int n, double z) {
  double pn = z;
  double pnm1 = 1.0;
  for (int j = 2; j <= n; ++j) {
    const double pj = ((2.0 * j - 1.0) * z * pn - (j - 1.0) * pnm1) / j;
    pnm1 = pn;
    pn = pj;
  }
  return {pn, n * (z * pn - pnm1) / (z * z - 1.0)};
}

}  // namespace

GaussRule gauss_rule(int points) {
  if (points < 1 || points > 10) {
    throw Error("gauss_rule: point count " + std::to_string(points) +
                " outside the supported range 1..10");
  }
  const int n = points;
  GaussRule rule;
  rule.points.assign(n, 0.0);
  rule.weights.assign(n, 0.0);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double z = std::cos(std::numbers::pi * (i + 0.75) / (n + 0.5));
    for (int iter = 0; iter < 100; ++iter) {
      const auto [p, dp] = legendre_with_derivative(n, z);
      const double dz = p / dp;
      z -= dz;
      if (std::abs(dz) < 1e-16) break;
    }
    const double dp = legendre_with_derivative(n, z).second;
    const double w = 2.0 / ((1.0 - z * z) * dp * dp);
    rule.points[i] = -z;
    rule.points[n - 1 - i] = z;
    rule.weights[i] = w;
    rule.weights[n - 1 - i] = w;
  }
  if (n % 2 == 1) rule.points[n / 2] = 0.0;
  return rule;
}

const GaussRule& interval_rule() {
  static const GaussRule rule = gauss_rule(5);
  return rule;
}

double Polynomial::operator()(double t) const {
  double v = 0.0;
  for (auto it = coeffs.rbegin(); it != coeffs.rend(); ++it) v = v * t + *it;
  return v;
}

double shifted_legendre(int l, double s) {
  const double x = 2.0 * s - 1.0;
  if (l == 0) return 1.0;
  double pm1 = 1.0;
  double p = x;
  for (int j = 2; j <= l; ++j) {
    const double next = ((2.0 * j - 1.0) * x * p - (j - 1.0) * pm1) / j;
    pm1 = p;
    p = next;
  }
  return p;
}

Polynomial l2_project(const std::function<double(double)>& fn, double a, double b,
                      int degree, int rule_points) {
  if (degree < 0) throw Error("l2_project: negative degree");
  if (!(b > a)) throw Error("l2_project: empty interval");
  const GaussRule rule = gauss_rule(rule_points);
  const double len = b - a;

  // Legendre coefficients on the reference variable s = (t - a)/len.
  std::vector<double> legendre(static_cast<std::size_t>(degree) + 1, 0.0);
  for (std::size_t g = 0; g < rule.size(); ++g) {
    const double s = 0.5 * (rule.points[g] + 1.0);
    const double w = 0.5 * rule.weights[g];
    const double v = fn(a + len * s);
    for (int l = 0; l <= degree; ++l) legendre[l] += w * v * shifted_legendre(l, s);
  }
  for (int l = 0; l <= degree; ++l) legendre[l] *= 2.0 * l + 1.0;

  // Convert to monomials in t: sample at degree+1 points and solve the
  // (small) Vandermonde system.
  const auto n = static_cast<Eigen::Index>(degree) + 1;
  Matrix vander(n, n);
  Vector rhs(n);
  for (Eigen::Index r = 0; r < n; ++r) {
    const double s = n == 1 ? 0.5 : static_cast<double>(r) / (n - 1);
    const double t = a + len * s;
    double val = 0.0;
    for (int l = 0; l <= degree; ++l) val += legendre[l] * shifted_legendre(l, s);
    rhs(r) = val;
    double tp = 1.0;
    for (Eigen::Index c = 0; c < n; ++c) {
      vander(r, c) = tp;
      tp *= t;
    }
  }
  const Vector c = vander.fullPivLu().solve(rhs);
  return Polynomial{std::vector<double>(c.data(), c.data() + c.size())};
}

}  // namespace imexest
