#pragma once

// Proximal-gradient engine shared by the ℓ1-MLE and GLASSO objectives.

#include "balnet/mle_solver.hpp"

namespace balnet::detail {

class SmoothLoss {
 public:
  virtual ~SmoothLoss() = default;

  /// Returns false when `b` is not numerically positive definite. Otherwise
  /// writes the smooth value and gradient.
  virtual bool evaluate(const SymMatrix& b, double& value, SymMatrix& grad) const = 0;
};

SolverResult proximal_solve(const SmoothLoss& loss, SymMatrix initial,
                            const SolverConfig& config);

}  // namespace balnet::detail
