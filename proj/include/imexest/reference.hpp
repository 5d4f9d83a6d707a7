#pragma once

#include "imexest/imex_solver.hpp"
#include "imexest/problems.hpp"

#include <string>
#include <vector>

namespace imexest {

struct ReferenceConfig {
  enum class Mode { analytic, numeric };

  Mode mode = Mode::numeric;
  double rel_tol = 1e-12;
  double abs_tol = 1e-14;
  double max_step = 0.0;        // 0: no limit
  std::size_t max_steps = 10'000'000;

  void validate() const;
};

std::string to_string(ReferenceConfig::Mode mode);
ReferenceConfig::Mode reference_mode_from_string(const std::string& name);

struct ReferenceResult {
  double value = 0.0;
  /// |value(tol) - value(tol/2)| for numeric mode, 0 for analytic mode.
  double halving_change = 0.0;
  std::size_t steps = 0;
};

/// True QoI from the analytic solution or an adaptive Fehlberg 7(8) integration
/// of the semi-discrete system. Numeric mode repeats the solve at half the
/// tolerance and throws "reference not converged" if the two disagree by more
/// than ten times the requested tolerance.
ReferenceResult true_qoi(const SplitOdeProblem& problem, const TimeGrid& grid,
                         const QoiSpec& qoi, const ReferenceConfig& cfg = {});

/// Reference states at the requested (nondecreasing, >= 0) times.
std::vector<Vector> reference_states(const SplitOdeProblem& problem,
                                     const std::vector<double>& times,
                                     const ReferenceConfig& cfg = {});

}  // namespace imexest
