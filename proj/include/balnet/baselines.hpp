#pragma once

#include "balnet/index_set.hpp"
#include "balnet/linalg.hpp"
#include "balnet/mle_solver.hpp"

namespace balnet {

struct BaselineConfig {
  double glasso_lambda = 0.0;
  double threshold_tau = 1e-2;
  double support_eps = kSupportEps;

  void validate() const;
};

/// Graphical lasso: minimizes Tr(SΘ) − log det Θ + λ‖Θ‖_{1,off} over
/// positive-definite Θ with the same proximal machinery as `solve`.
/// `lambda` overrides config.lambda.
SolverResult glasso(const SymMatrix& s, double lambda, SolverConfig config = {});

/// diag(1/S_ii) clamped to [1e-3, 1e3].
SymMatrix glasso_initial(const SymMatrix& s);

/// Support of the PD square root of Θ̂: |M_ij| > tau off the diagonal, plus
/// every diagonal pair.
IndexSet glasso_sr_support(const SymMatrix& theta_hat, double tau);

/// Two-hop refinement: off-diagonal pairs with Θ̂_ij <= −tau, plus the diagonal.
IndexSet glasso_2hr_support(const SymMatrix& theta_hat, double tau);

}  // namespace balnet
