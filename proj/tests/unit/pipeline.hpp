#pragma once

#include "imexest/estimate.hpp"

#include <memory>

// Owns one forward/reconstruct/adjoint run so tests can build EstimateInputs.
struct Pipeline {
  imexest::SplitOdeProblem problem;
  imexest::ImexPair pair;
  imexest::TimeGrid grid;
  imexest::QoiSpec qoi;
  imexest::ForwardSolution forward;
  std::unique_ptr<imexest::PiecewisePolynomial> cg;
  std::unique_ptr<imexest::AdjointSolution> adjoint;

  Pipeline(imexest::SplitOdeProblem p, imexest::ImexPair s, imexest::TimeGrid g,
           imexest::QoiSpec q)
      : problem(std::move(p)), pair(std::move(s)), grid(std::move(g)), qoi(std::move(q)) {
    forward = imexest::solve_forward(problem, pair, grid);
    rebuild();
  }

  void rebuild() {
    cg = std::make_unique<imexest::PiecewisePolynomial>(
        imexest::build_cg(problem, pair, forward, grid));
    adjoint = std::make_unique<imexest::AdjointSolution>(
        imexest::solve_adjoint(problem, *cg, qoi));
  }

  imexest::EstimateInputs inputs() const {
    return {problem, pair, forward, *cg, *adjoint};
  }

  imexest::ErrorBreakdown breakdown() const {
    return qoi.kind == imexest::QoiSpec::Kind::final_time
               ? imexest::error_breakdown(inputs())
               : imexest::error_breakdown_timedep(inputs());
  }
};
