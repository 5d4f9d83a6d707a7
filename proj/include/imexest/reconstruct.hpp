#pragma once

#include "imexest/imex_solver.hpp"
#include "imexest/numerics.hpp"
#include "imexest/problems.hpp"
#include "imexest/tableau.hpp"

#include <functional>
#include <vector>

namespace imexest {

/// Continuous piecewise polynomial on a time grid. On each interval the
/// polynomial is stored by its values at degree+1 equispaced local nodes
/// s = j/degree, s = (t - t_n)/k_n, so endpoints are stored explicitly.
class PiecewisePolynomial {
 public:
  PiecewisePolynomial(TimeGrid grid, int degree, std::size_t dim);

  const TimeGrid& grid() const { return grid_; }
  int degree() const { return degree_; }
  std::size_t dim() const { return dim_; }

  /// Local nodal values on interval n (degree+1 vectors).
  std::vector<Vector>& interval(std::size_t n) { return values_[n]; }
  const std::vector<Vector>& interval(std::size_t n) const { return values_[n]; }

  Vector eval(double t) const;
  Vector eval_local(std::size_t n, double s) const;
  /// Time derivative on interval n at local coordinate s.
  Vector derivative_local(std::size_t n, double s) const;
  Vector derivative(double t) const;

  Vector left_value(std::size_t n) const { return values_[n].front(); }
  Vector right_value(std::size_t n) const { return values_[n].back(); }

  /// Largest jump |P(t_n^-) - P(t_n^+)| over the interior nodes.
  double max_continuity_jump() const;

  const LagrangeBasis& reference_basis() const { return basis_; }

  /// Restriction to the intervals first..N-1.
  PiecewisePolynomial tail(std::size_t first) const;

 private:
  TimeGrid grid_;
  int degree_;
  std::size_t dim_;
  LagrangeBasis basis_;  // on [0, 1]
  std::vector<std::vector<Vector>> values_;
};

/// The stage interpolant: on interval n, the Lagrange polynomial through
/// (t_n + k_n d_i, Y~_i).
class StageInterpolant {
 public:
  StageInterpolant(const ForwardSolution& forward, const TimeGrid& grid, const ImexPair& pair);

  /// Throws when t lies outside [t_n, t_n+1].
  Vector eval(std::size_t n, double t) const;

 private:
  const ForwardSolution& forward_;
  TimeGrid grid_;
  LagrangeBasis basis_;  // on the reference abscissae d
};

/// k_n sum_i w_i f(Y~_i) weight(t_n + k_n d_i).
Vector quad_f(const ImexPair& pair, const ForwardSolution& forward, const TimeGrid& grid,
              std::size_t n, const std::function<double(double)>& weight);
/// Same with the implicit weights and g.
Vector quad_g(const ImexPair& pair, const ForwardSolution& forward, const TimeGrid& grid,
              std::size_t n, const std::function<double(double)>& weight);

/// The nodally equivalent cG(q) solution with q = pair.cg_degree() (1 <= q <= 3).
PiecewisePolynomial build_cg(const SplitOdeProblem& problem, const ImexPair& pair,
                             const ForwardSolution& forward, const TimeGrid& grid);

/// Max over nodes of |Y(t_n) - Y_n| / (1 + |Y_n|), infinity norms.
double nodal_equivalence_error(const PiecewisePolynomial& cg, const ForwardSolution& forward);

}  // namespace imexest
