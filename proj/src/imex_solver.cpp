#include "imexest/imex_solver.hpp"

#include <Eigen/SparseLU>

#include <algorithm>
#include <cmath>
#include <sstream>

namespace imexest {

TimeGrid::TimeGrid(std::vector<double> nodes) : nodes_(std::move(nodes)) {
  if (nodes_.size() < 2) throw Error("TimeGrid: need at least one interval");
  for (std::size_t n = 0; n + 1 < nodes_.size(); ++n) {
    if (!(nodes_[n + 1] > nodes_[n])) {
      throw Error("TimeGrid: nodes must be strictly increasing (violated at " +
                  std::to_string(n) + ")");
    }
  }
}

TimeGrid TimeGrid::uniform(double T, std::size_t N) {
  if (N == 0) throw Error("TimeGrid: N must be at least 1");
  if (!(T > 0.0)) throw Error("TimeGrid: final time must be positive");
  std::vector<double> nodes(N + 1);
  for (std::size_t n = 0; n <= N; ++n) nodes[n] = T * static_cast<double>(n) / N;
  nodes.back() = T;
  return TimeGrid(std::move(nodes));
}

TimeGrid TimeGrid::with_step(double T, double k) {
  if (!(k > 0.0)) throw Error("TimeGrid: step must be positive");
  const double ratio = T / k;
  const double N = std::round(ratio);
  if (N < 1.0 || std::abs(ratio - N) > 1e-12 * std::max(1.0, ratio)) {
    std::ostringstream os;
    os << "TimeGrid: step " << k << " does not divide final time " << T;
    throw Error(os.str());
  }
  return uniform(T, static_cast<std::size_t>(N));
}

std::size_t TimeGrid::locate(double t) const {
  if (t < nodes_.front() || t > nodes_.back()) {
    throw Error("TimeGrid::locate: time outside the grid");
  }
  const auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
  const auto idx = static_cast<std::size_t>(it - nodes_.begin());
  return std::min(idx == 0 ? 0 : idx - 1, intervals() - 1);
}

TimeGrid TimeGrid::tail(std::size_t first) const {
  if (first >= intervals()) throw Error("TimeGrid::tail: index out of range");
  return TimeGrid(std::vector<double>(nodes_.begin() + static_cast<std::ptrdiff_t>(first),
                                      nodes_.end()));
}

void NewtonConfig::validate() const {
  if (!(abs_tol > 0.0) || !(rel_tol > 0.0)) throw Error("Newton tolerances must be positive");
  if (max_iters < 1) throw Error("Newton max_iters must be at least 1");
}

namespace {

bool all_finite(const Vector& v) { return v.allFinite(); }

/// Solves y - k b g(t, y) = known for y by Newton's method from y = known.
Vector solve_stage(const SplitOdeProblem& problem, double t, double kb, const Vector& known,
                   const NewtonConfig& cfg, std::size_t stage, int& iterations) {
  Vector y = known;
  const auto n = static_cast<Eigen::Index>(problem.dim);
  SparseMatrix identity(n, n);
  identity.setIdentity();

  Vector residual = y - kb * problem.eval_g(t, y) - known;
  double rnorm = residual.lpNorm<Eigen::Infinity>();
  for (int it = 0; it <= cfg.max_iters; ++it) {
    const double scale = std::max(y.lpNorm<Eigen::Infinity>(), known.lpNorm<Eigen::Infinity>());
    if (rnorm <= cfg.abs_tol + cfg.rel_tol * scale) return y;
    if (!std::isfinite(rnorm)) {
      throw NewtonError("stage " + std::to_string(stage) + ": non-finite residual", -1, stage,
                        rnorm);
    }
    if (it == cfg.max_iters) break;

    SparseMatrix J = identity - kb * problem.jac_g(t, y);
    J.makeCompressed();
    Eigen::SparseLU<SparseMatrix> lu;
    lu.compute(J);
    if (lu.info() != Eigen::Success) {
      throw NewtonError("stage " + std::to_string(stage) + ": singular Newton Jacobian", -1,
                        stage, rnorm);
    }
    const Vector delta = lu.solve(residual);
    y -= delta;
    ++iterations;
    residual = y - kb * problem.eval_g(t, y) - known;
    rnorm = residual.lpNorm<Eigen::Infinity>();
  }
  std::ostringstream os;
  os << "stage " << stage << ": Newton did not converge in " << cfg.max_iters
     << " iterations (residual " << rnorm << ")";
  throw NewtonError(os.str(), -1, stage, rnorm);
}

}  // namespace

StepResult step(const SplitOdeProblem& problem, const ImexPair& pair, double t_n, double k_n,
                const Vector& y_n, const NewtonConfig& newton) {
  if (!(k_n > 0.0)) throw Error("step: k_n must be positive");
  if (static_cast<std::size_t>(y_n.size()) != problem.dim) {
    throw Error("step: state has wrong dimension");
  }
  const auto& A = pair.explicit_tableau.coeffs;
  const auto& B = pair.implicit_tableau.coeffs;
  const auto& d = pair.implicit_tableau.abscissae;
  const auto& w = pair.explicit_tableau.weights;
  const auto& wt = pair.implicit_tableau.weights;
  const std::size_t nu = pair.stages();

  StepResult out;
  auto& rec = out.stages;
  rec.values.reserve(nu);
  rec.times.reserve(nu);
  rec.f_values.reserve(nu);
  rec.g_values.reserve(nu);

  for (std::size_t i = 0; i < nu; ++i) {
    const auto ii = static_cast<Eigen::Index>(i);
    const double t_i = t_n + k_n * d[i];
    Vector known = y_n;
    for (std::size_t j = 0; j < i; ++j) {
      const auto jj = static_cast<Eigen::Index>(j);
      if (A(ii, jj) != 0.0) known += k_n * A(ii, jj) * rec.f_values[j];
      if (B(ii, jj) != 0.0) known += k_n * B(ii, jj) * rec.g_values[j];
    }
    Vector stage_value;
    if (B(ii, ii) == 0.0) {
      stage_value = std::move(known);
    } else {
      stage_value = solve_stage(problem, t_i, k_n * B(ii, ii), known, newton, i,
                                out.newton_iterations);
    }
    rec.f_values.push_back(problem.eval_f(t_i, stage_value));
    rec.g_values.push_back(problem.eval_g(t_i, stage_value));
    rec.values.push_back(std::move(stage_value));
    rec.times.push_back(t_i);
  }

  out.next = y_n;
  for (std::size_t i = 0; i < nu; ++i) {
    if (w[i] != 0.0) out.next += k_n * w[i] * rec.f_values[i];
    if (wt[i] != 0.0) out.next += k_n * wt[i] * rec.g_values[i];
  }
  return out;
}

ForwardSolution solve_forward(const SplitOdeProblem& problem, const ImexPair& pair,
                              const TimeGrid& grid, const NewtonConfig& newton) {
  newton.validate();
  const auto report = validate(pair);
  if (!report.ok()) throw Error("solve_forward: invalid tableau pair: " + report.violations[0]);

  ForwardSolution sol;
  const std::size_t N = grid.intervals();
  sol.nodal.reserve(N + 1);
  sol.stages.reserve(N);
  sol.newton_iterations.reserve(N);
  sol.nodal.push_back(problem.y0);
  for (std::size_t n = 0; n < N; ++n) {
    StepResult r;
    try {
      r = step(problem, pair, grid.node(n), grid.step(n), sol.nodal.back(), newton);
    } catch (const NewtonError& e) {
      throw NewtonError("interval " + std::to_string(n) + ", " + e.what(),
                        static_cast<std::ptrdiff_t>(n), e.stage(), e.residual());
    }
    if (!all_finite(r.next)) {
      throw Error("solve_forward: solution became non-finite on interval " + std::to_string(n));
    }
    sol.nodal.push_back(std::move(r.next));
    sol.stages.push_back(std::move(r.stages));
    sol.newton_iterations.push_back(r.newton_iterations);
  }
  return sol;
}

}  // namespace imexest
