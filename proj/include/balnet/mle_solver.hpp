#pragma once

#include <optional>
#include <vector>

#include "balnet/index_set.hpp"
#include "balnet/linalg.hpp"

namespace balnet {

/// Off-diagonal magnitudes at or below this count as zero in recovered supports.
inline constexpr double kSupportEps = 1e-8;

struct SolverConfig {
  double lambda = 0.0;
  int max_iters = 10000;
  double rel_obj_tol = 1e-9;
  double kkt_tol = 1e-6;
  double backtrack_beta = 0.5;
  double init_step = 1.0;
  bool acceleration = true;
  /// When set, entries outside this set are held at exactly zero.
  std::optional<IndexSet> restrict_support;
  /// Starting point; defaults to a diagonal matched to the marginal scales.
  std::optional<SymMatrix> initial;

  void validate() const;
};

struct SolverResult {
  SymMatrix b_hat;
  std::vector<double> objective_trace;  // one entry per accepted iterate
  int iterations = 0;
  double kkt_residual = 0.0;
  IndexSet support_hat;
  bool converged = false;
};

/// Tr(D·B·S·B·D) − 2·log det B + λ·Σ_{i≠j} |B_ij|.
double objective(const SymMatrix& b, const SymMatrix& s, const SymMatrix& d, double lambda);

/// D²BS + SBD² − 2B⁻¹, the gradient of the smooth part over symmetric B.
SymMatrix smooth_gradient(const SymMatrix& b, const SymMatrix& s, const SymMatrix& d);

/// Soft-thresholds off-diagonal entries, leaves the diagonal untouched and
/// zeroes every entry outside `restrict` when one is given.
SymMatrix prox_l1_offdiag(const SymMatrix& b, double threshold,
                          const IndexSet* restrict = nullptr);

double l1_offdiag(const SymMatrix& b);

/// Largest entry of the minimal-norm subgradient of f + λ‖·‖_{1,off} at b,
/// given the smooth gradient. Entries outside `restrict` are skipped.
double kkt_residual(const SymMatrix& grad, const SymMatrix& b, double lambda,
                    const IndexSet* restrict = nullptr);

/// Diagonal pairs plus off-diagonal pairs with |b_ij| > eps.
IndexSet support_of(const SymMatrix& b, double eps = kSupportEps);

/// diag(√(Σ_X,ii / S_ii)) clamped to [1e-3, 1e3], with Σ_X = D⁻².
SymMatrix default_initial(const SymMatrix& s, const SymMatrix& d);

/// Minimizes the ℓ1-penalized log-det objective over positive-definite B.
SolverResult solve(const SymMatrix& s, const SymMatrix& d, const SolverConfig& config);

/// scale_c · √(log p / n).
double default_lambda(int p, int n, double scale_c);

}  // namespace balnet
