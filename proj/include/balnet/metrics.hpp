#pragma once

#include "balnet/index_set.hpp"
#include "balnet/linalg.hpp"
#include "balnet/network_model.hpp"

namespace balnet {

struct TrialScore {
  bool exact_recovery = false;
  bool sign_consistent = false;
  double err_inf = 0.0;  // elementwise max of b_hat − B*
  double err_fro = 0.0;
  double err_op2 = 0.0;
  double support_precision = 0.0;
  double support_recall = 0.0;
};

/// Compares the off-diagonal part of support_hat (taken as undirected pairs)
/// with the true edge set and measures b_hat − B* in three norms.
TrialScore score(const SymMatrix& b_hat, const NetworkModel& model, const IndexSet& support_hat);

/// Smallest |B*_ij| over true edges; throws NoEdges for an edgeless model.
double bmin(const NetworkModel& model);

}  // namespace balnet
