#pragma once

#include "imexest/problems.hpp"
#include "imexest/reconstruct.hpp"

namespace imexest {

/// H(t) = df/dy(Y(t)) + dg/dy(Y(t)), the Jacobian linearized around the
/// reconstructed discrete solution (not the mean-value linearization, which
/// needs the unknown true solution).
class LinearizedOperator {
 public:
  LinearizedOperator(const SplitOdeProblem& problem, const PiecewisePolynomial& reconstruction)
      : problem_(problem), reconstruction_(reconstruction) {}

  SparseMatrix eval(double t) const;
  SparseMatrix eval_local(std::size_t n, double s) const;

 private:
  const SplitOdeProblem& problem_;
  const PiecewisePolynomial& reconstruction_;
};

SparseMatrix operator_eval(const LinearizedOperator& op, double t);

struct AdjointSolution {
  PiecewisePolynomial phi;
  QoiSpec::Kind kind = QoiSpec::Kind::final_time;
};

/// Backward cG(q+1) sweep for -phi' = H^T phi (+ psi_tilde), with terminal value
/// psi (final-time QoI) or 0 (time-integrated QoI). Test space P^q per interval,
/// integrals by the 5-point Gauss rule.
AdjointSolution solve_adjoint(const SplitOdeProblem& problem,
                              const PiecewisePolynomial& reconstruction, const QoiSpec& qoi);

/// Largest |<-Phi' - H^T Phi - psi_tilde, v>_{I_n}| over intervals and test
/// polynomials v (shifted Legendre up to degree q).
double adjoint_galerkin_residual(const SplitOdeProblem& problem,
                                 const PiecewisePolynomial& reconstruction,
                                 const AdjointSolution& adjoint, const QoiSpec& qoi);

}  // namespace imexest
