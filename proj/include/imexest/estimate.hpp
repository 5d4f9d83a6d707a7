#pragma once

#include "imexest/adjoint.hpp"
#include "imexest/imex_solver.hpp"
#include "imexest/reconstruct.hpp"

#include <map>
#include <optional>
#include <string>
#include <vector>

namespace imexest {

struct IntervalTerms {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
};

struct ErrorBreakdown {
  double e1 = 0.0;
  double e2 = 0.0;
  double e3 = 0.0;
  double estimate_total = 0.0;
  std::vector<IntervalTerms> per_interval;
  std::optional<double> true_error;
  std::optional<double> effectivity;
};

/// Named index sets that must partition 0..m-1.
struct ComponentMask {
  std::vector<IndexBlock> blocks;

  void validate(std::size_t m) const;
  static ComponentMask whole(std::size_t m);
};

/// Everything the representation needs; all pieces must come from one run.
struct EstimateInputs {
  const SplitOdeProblem& problem;
  const ImexPair& pair;
  const ForwardSolution& forward;
  const PiecewisePolynomial& reconstruction;
  const AdjointSolution& adjoint;
};

/// E1 (discretization), E2 (explicit quadrature), E3 (implicit quadrature) for a
/// final-time QoI, summed interval 0 -> N-1.
ErrorBreakdown error_breakdown(const EstimateInputs& in);

/// Same terms with the adjoint of a time-integrated QoI.
ErrorBreakdown error_breakdown_timedep(const EstimateInputs& in);

/// Per-block (E1, E2, E3), each inner product restricted to the block's indices.
std::map<std::string, IntervalTerms> component_split(const EstimateInputs& in,
                                                     const ComponentMask& mask);

/// estimate / true; empty when the true error is exactly zero.
std::optional<double> effectivity(double estimate_total, double true_error);

struct OrthogonalityReport {
  double max_residual = 0.0;     // max over intervals
  double max_adjoint = 0.0;      // max |Phi| over stored nodal values
  std::vector<double> per_interval;

  /// residual < tol * (1 + max|Phi|) on every interval.
  bool passes(double tol = 1e-10) const;
};

/// <Y', pi Phi> - Q^f(f, pi Phi) - Q^g(g, pi Phi) on each interval.
OrthogonalityReport galerkin_orthogonality_check(const EstimateInputs& in);

/// sum_n <f(Y) + g(Y) - Y', Phi>, the weighted-residual form before the
/// quadrature terms are added and subtracted.
double residual_estimate(const EstimateInputs& in);

/// QoI of the reconstruction: (Y(T), psi) or int_0^T (Y, psi_tilde) dt.
double discrete_qoi(const PiecewisePolynomial& reconstruction, const QoiSpec& qoi);

}  // namespace imexest
