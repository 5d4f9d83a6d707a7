#pragma once

#include "imexest/problems.hpp"
#include "imexest/tableau.hpp"
#include "imexest/types.hpp"

#include <vector>

namespace imexest {

/// 0 = t_0 < t_1 < ... < t_N = T.
class TimeGrid {
 public:
  explicit TimeGrid(std::vector<double> nodes);

  static TimeGrid uniform(double T, std::size_t N);
  /// Uniform grid with step k; T/k must be an integer to within 1e-12.
  static TimeGrid with_step(double T, double k);

  std::size_t intervals() const { return nodes_.size() - 1; }
  double node(std::size_t n) const { return nodes_[n]; }
  double step(std::size_t n) const { return nodes_[n + 1] - nodes_[n]; }
  double final_time() const { return nodes_.back(); }
  const std::vector<double>& nodes() const { return nodes_; }

  /// Interval index containing t; node t_n maps to interval n (last node to N-1).
  std::size_t locate(double t) const;

  /// Grid of the trailing intervals [t_first, T].
  TimeGrid tail(std::size_t first) const;

 private:
  std::vector<double> nodes_;
};

struct StageRecord {
  std::vector<Vector> values;      // Y~_i
  std::vector<double> times;       // t_n + k_n d_i
  std::vector<Vector> f_values;    // f(t_i, Y~_i)
  std::vector<Vector> g_values;    // g(t_i, Y~_i)
};

struct ForwardSolution {
  std::vector<Vector> nodal;
  std::vector<StageRecord> stages;
  std::vector<int> newton_iterations;  // per interval, summed over stages
};

struct NewtonConfig {
  double abs_tol = 1e-12;
  double rel_tol = 1e-12;
  int max_iters = 25;

  void validate() const;
};

struct StepResult {
  Vector next;
  StageRecord stages;
  int newton_iterations = 0;
};

/// Raised when a stage solve fails; carries where and how badly.
class NewtonError : public Error {
 public:
  NewtonError(const std::string& what, std::ptrdiff_t interval, std::size_t stage,
              double residual)
      : Error(what), interval_(interval), stage_(stage), residual_(residual) {}

  std::ptrdiff_t interval() const { return interval_; }
  std::size_t stage() const { return stage_; }
  double residual() const { return residual_; }

 private:
  std::ptrdiff_t interval_;
  std::size_t stage_;
  double residual_;
};

/// One IMEX Runge-Kutta step from (t_n, Y_n) with step k_n. Forcing is sampled
/// at the implicit abscissae t_n + k_n d_i for both f and g.
StepResult step(const SplitOdeProblem& problem, const ImexPair& pair, double t_n, double k_n,
                const Vector& y_n, const NewtonConfig& newton = {});

ForwardSolution solve_forward(const SplitOdeProblem& problem, const ImexPair& pair,
                              const TimeGrid& grid, const NewtonConfig& newton = {});

}  // namespace imexest
