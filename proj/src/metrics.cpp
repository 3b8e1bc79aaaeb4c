#include "balnet/metrics.hpp"

#include <cmath>
#include <limits>
#include <set>

#include "balnet/error.hpp"

namespace balnet {

namespace {

std::set<IndexPair> undirected_off_diagonal(const IndexSet& s) {
  std::set<IndexPair> out;
  for (const auto& [i, j] : s) {
    if (i != j) out.emplace(std::min(i, j), std::max(i, j));
  }
  return out;
}

}  // namespace

TrialScore score(const SymMatrix& b_hat, const NetworkModel& model, const IndexSet& support_hat) {
  const int p = model.dim();
  if (b_hat.rows() != p || b_hat.cols() != p || support_hat.dim() != p) {
    throw Error(ErrorCode::InvalidInput, "score dimension mismatch");
  }
  const auto truth = undirected_off_diagonal(model.support_e);
  const auto found = undirected_off_diagonal(support_hat);

  std::size_t hits = 0;
  for (const auto& pr : found) hits += truth.count(pr);

  TrialScore out;
  out.exact_recovery = (found == truth);
  out.support_precision = found.empty() ? (truth.empty() ? 1.0 : 0.0)
                                        : static_cast<double>(hits) / found.size();
  out.support_recall = truth.empty() ? 1.0 : static_cast<double>(hits) / truth.size();

  out.sign_consistent = out.exact_recovery;
  if (out.sign_consistent) {
    for (const auto& [i, j] : truth) {
      const double est = b_hat(i, j);
      const double ref = model.b_star(i, j);
      if ((est > 0.0) != (ref > 0.0) || est == 0.0) {
        out.sign_consistent = false;
        break;
      }
    }
  }

  const auto n = norms(SymMatrix(b_hat - model.b_star));
  out.err_inf = n.elem_max;
  out.err_fro = n.fro;
  out.err_op2 = n.op2;
  return out;
}

double bmin(const NetworkModel& model) {
  if (model.s_offdiag == 0) throw Error(ErrorCode::NoEdges, "model has no off-diagonal edges");
  double best = std::numeric_limits<double>::infinity();
  for (const auto& [i, j] : model.support_e) {
    if (i != j) best = std::min(best, std::abs(model.b_star(i, j)));
  }
  return best;
}

}  // namespace balnet
