#include "imexest/reconstruct.hpp"

#include <algorithm>
#include <cmath>

namespace imexest {

PiecewisePolynomial::PiecewisePolynomial(TimeGrid grid, int degree, std::size_t dim)
    : grid_(std::move(grid)),
      degree_(degree),
      dim_(dim),
      basis_(LagrangeBasis::equispaced(0.0, 1.0, degree)) {
  if (degree < 1) throw Error("PiecewisePolynomial: degree must be at least 1");
  const Vector zero = Vector::Zero(static_cast<Eigen::Index>(dim));
  values_.assign(grid_.intervals(),
                 std::vector<Vector>(static_cast<std::size_t>(degree) + 1, zero));
}

// Both forms work with differences from the first nodal value, so constants are
// reproduced exactly and have an exactly zero derivative.
Vector PiecewisePolynomial::eval_local(std::size_t n, double s) const {
  const auto& vals = values_[n];
  Vector out = vals[0];
  for (std::size_t j = 1; j < vals.size(); ++j) out += basis_.eval(j, s) * (vals[j] - vals[0]);
  return out;
}

Vector PiecewisePolynomial::derivative_local(std::size_t n, double s) const {
  const auto& vals = values_[n];
  Vector out = Vector::Zero(static_cast<Eigen::Index>(dim_));
  for (std::size_t j = 1; j < vals.size(); ++j) {
    out += basis_.derivative(j, s) * (vals[j] - vals[0]);
  }
  return out / grid_.step(n);
}

Vector PiecewisePolynomial::eval(double t) const {
  const std::size_t n = grid_.locate(t);
  return eval_local(n, (t - grid_.node(n)) / grid_.step(n));
}

Vector PiecewisePolynomial::derivative(double t) const {
  const std::size_t n = grid_.locate(t);
  return derivative_local(n, (t - grid_.node(n)) / grid_.step(n));
}

double PiecewisePolynomial::max_continuity_jump() const {
  double jump = 0.0;
  for (std::size_t n = 1; n < values_.size(); ++n) {
    jump = std::max(jump, (values_[n - 1].back() - values_[n].front()).lpNorm<Eigen::Infinity>());
  }
  return jump;
}

PiecewisePolynomial PiecewisePolynomial::tail(std::size_t first) const {
  PiecewisePolynomial out(grid_.tail(first), degree_, dim_);
  for (std::size_t n = first; n < values_.size(); ++n) out.values_[n - first] = values_[n];
  return out;
}

StageInterpolant::StageInterpolant(const ForwardSolution& forward, const TimeGrid& grid,
                                   const ImexPair& pair)
    : forward_(forward), grid_(grid), basis_(pair.implicit_tableau.abscissae) {
  if (forward.stages.size() != grid.intervals()) {
    throw Error("StageInterpolant: forward solution does not match the grid");
  }
}

Vector StageInterpolant::eval(std::size_t n, double t) const {
  if (n >= grid_.intervals()) throw Error("StageInterpolant: interval index out of range");
  const double tn = grid_.node(n);
  const double k = grid_.step(n);
  const double slack = 1e-12 * std::max(1.0, std::abs(grid_.node(n + 1)));
  if (t < tn - slack || t > grid_.node(n + 1) + slack) {
    throw Error("StageInterpolant: t outside interval " + std::to_string(n));
  }
  const auto& stages = forward_.stages[n].values;
  const double s = (t - tn) / k;
  Vector out = Vector::Zero(stages.front().size());
  for (std::size_t i = 0; i < stages.size(); ++i) out += basis_.eval(i, s) * stages[i];
  return out;
}

namespace {

Vector weighted_stage_sum(const std::vector<double>& weights, const std::vector<Vector>& values,
                          const std::vector<double>& times, double k,
                          const std::function<double(double)>& weight) {
  Vector out = Vector::Zero(values.front().size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (weights[i] != 0.0) out += (k * weights[i] * weight(times[i])) * values[i];
  }
  return out;
}

}  // namespace

Vector quad_f(const ImexPair& pair, const ForwardSolution& forward, const TimeGrid& grid,
              std::size_t n, const std::function<double(double)>& weight) {
  const auto& rec = forward.stages.at(n);
  return weighted_stage_sum(pair.explicit_tableau.weights, rec.f_values, rec.times,
                            grid.step(n), weight);
}

Vector quad_g(const ImexPair& pair, const ForwardSolution& forward, const TimeGrid& grid,
              std::size_t n, const std::function<double(double)>& weight) {
  const auto& rec = forward.stages.at(n);
  return weighted_stage_sum(pair.implicit_tableau.weights, rec.g_values, rec.times,
                            grid.step(n), weight);
}

PiecewisePolynomial build_cg(const SplitOdeProblem& problem, const ImexPair& pair,
                             const ForwardSolution& forward, const TimeGrid& grid) {
  const int q = pair.cg_degree();
  if (q < 1 || q > 3) {
    throw Error("build_cg: unsupported reconstruction degree " + std::to_string(q) +
                " (scheme order " + std::to_string(pair.order) + ")");
  }
  if (forward.nodal.size() != grid.intervals() + 1) {
    throw Error("build_cg: forward solution does not match the grid");
  }
  PiecewisePolynomial cg(grid, q, problem.dim);

  if (q == 1) {
    for (std::size_t n = 0; n < grid.intervals(); ++n) {
      cg.interval(n)[0] = forward.nodal[n];
      cg.interval(n)[1] = forward.nodal[n + 1];
    }
    return cg;
  }

  // Local system: sum_j Y_j int_0^1 l_j'(s) s^l ds = k sum_i (w_i f_i + wt_i g_i) d_i^l,
  // l = 0..q-1, with Y_0 fixed by continuity. The l_j' sum to zero, so it is solved
  // for the increments Y_j - Y_0, which vanish exactly when the data do.
  const auto& basis = cg.reference_basis();
  const auto& rule = interval_rule();
  const auto nq = static_cast<Eigen::Index>(q);
  Matrix M = Matrix::Zero(nq, nq + 1);
  for (Eigen::Index l = 0; l < nq; ++l) {
    for (Eigen::Index j = 0; j <= nq; ++j) {
      double acc = 0.0;
      for (std::size_t g = 0; g < rule.size(); ++g) {
        const double s = 0.5 * (rule.points[g] + 1.0);
        acc += 0.5 * rule.weights[g] * basis.derivative(static_cast<std::size_t>(j), s) *
               std::pow(s, static_cast<double>(l));
      }
      M(l, j) = acc;
    }
  }
  const Eigen::PartialPivLU<Matrix> lu(M.rightCols(nq));
  const auto& d = pair.implicit_tableau.abscissae;
  const auto& w = pair.explicit_tableau.weights;
  const auto& wt = pair.implicit_tableau.weights;
  const auto m = static_cast<Eigen::Index>(problem.dim);

  Vector left = forward.nodal[0];
  for (std::size_t n = 0; n < grid.intervals(); ++n) {
    const double k = grid.step(n);
    const auto& rec = forward.stages[n];
    Matrix rhs = Matrix::Zero(nq, m);
    for (Eigen::Index l = 0; l < nq; ++l) {
      Vector acc = Vector::Zero(m);
      for (std::size_t i = 0; i < rec.values.size(); ++i) {
        const double dl = std::pow(d[i], static_cast<double>(l));
        if (w[i] != 0.0) acc += (k * w[i] * dl) * rec.f_values[i];
        if (wt[i] != 0.0) acc += (k * wt[i] * dl) * rec.g_values[i];
      }
      rhs.row(l) = acc.transpose();
    }
    const Matrix X = lu.solve(rhs);
    auto& vals = cg.interval(n);
    vals[0] = left;
    for (Eigen::Index j = 0; j < nq; ++j) {
      vals[static_cast<std::size_t>(j) + 1] = left + X.row(j).transpose();
    }
    left = vals.back();
  }
  return cg;
}

double nodal_equivalence_error(const PiecewisePolynomial& cg, const ForwardSolution& forward) {
  const auto& grid = cg.grid();
  double worst = 0.0;
  for (std::size_t n = 0; n <= grid.intervals(); ++n) {
    const Vector& yn = forward.nodal[n];
    const Vector value = n < grid.intervals() ? cg.left_value(n) : cg.right_value(n - 1);
    const double err = (value - yn).lpNorm<Eigen::Infinity>();
    worst = std::max(worst, err / (1.0 + yn.lpNorm<Eigen::Infinity>()));
    if (n > 0 && n < grid.intervals()) {
      const double err_left = (cg.right_value(n - 1) - yn).lpNorm<Eigen::Infinity>();
      worst = std::max(worst, err_left / (1.0 + yn.lpNorm<Eigen::Infinity>()));
    }
  }
  return worst;
}

}  // namespace imexest
