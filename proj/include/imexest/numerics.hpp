#pragma once

#include "imexest/types.hpp"

#include <functional>
#include <span>
#include <vector>

namespace imexest {

/// Lagrange basis over a set of pairwise distinct nodes.
class LagrangeBasis {
 public:
  /// Throws Error on duplicate nodes or an empty node set.
  explicit LagrangeBasis(std::vector<double> nodes);

  /// Equispaced nodes a, a + (b-a)/degree, ..., b. degree 0 gives {a}.
  static LagrangeBasis equispaced(double a, double b, int degree);

  std::size_t size() const { return nodes_.size(); }
  int degree() const { return static_cast<int>(nodes_.size()) - 1; }
  std::span<const double> nodes() const { return nodes_; }

  double eval(std::size_t i, double t) const;
  double derivative(std::size_t i, double t) const;

 private:
  std::vector<double> nodes_;
  std::vector<double> denom_;
};

double lagrange_eval(const LagrangeBasis& basis, std::size_t i, double t);

/// max over a uniform sample of [min node, max node] of sum_i |l_i(t)|.
double lebesgue_bound(const LagrangeBasis& basis, int samples = 1000);

struct GaussRule {
  std::vector<double> points;   // on [-1, 1]
  std::vector<double> weights;

  std::size_t size() const { return points.size(); }
};

/// Gauss-Legendre rule with 1 <= points <= 10.
GaussRule gauss_rule(int points);

/// Rule used for every exact inner product over a time interval.
const GaussRule& interval_rule();

/// Monomial coefficients c_0 + c_1 t + ... in the global variable t.
struct Polynomial {
  std::vector<double> coeffs;

  double operator()(double t) const;
};

/// L2-orthogonal projection of fn onto polynomials of the given degree over
/// [a, b], returned in the monomial basis.
Polynomial l2_project(const std::function<double(double)>& fn, double a, double b,
                      int degree, int rule_points = 10);

/// Shifted Legendre polynomial P_l(2s - 1) on s in [0, 1].
double shifted_legendre(int l, double s);

}  // namespace imexest
