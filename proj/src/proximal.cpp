#include "proximal.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "balnet/error.hpp"

namespace balnet::detail {

namespace {

constexpr double kMinStep = 1e-20;
constexpr double kMaxStep = 1e8;
// Consecutive steps with a sub-tolerance objective change and no new best KKT
// residual before the solver gives up.
constexpr int kStallWindow = 25;

struct Point {
  SymMatrix b;
  SymMatrix grad;
  double smooth = 0.0;
  double total = 0.0;
};

struct StepOutcome {
  bool ok = false;
  Point next;
  double step = 0.0;
};

double inner(const SymMatrix& a, const SymMatrix& b) {
  return a.cwiseProduct(b).sum();
}

// Backtracking from base point y until the candidate is positive definite and
// satisfies the quadratic upper bound with curvature 1/t.
StepOutcome backtrack(const SmoothLoss& loss, const Point& y, double t,
                      const SolverConfig& cfg, const IndexSet* restrict) {
  StepOutcome out;
  Point cand;
  while (t >= kMinStep) {
    cand.b = prox_l1_offdiag(y.b - t * y.grad, t * cfg.lambda, restrict);
    if (loss.evaluate(cand.b, cand.smooth, cand.grad)) {
      const SymMatrix diff = cand.b - y.b;
      const double bound =
          y.smooth + inner(y.grad, diff) + diff.squaredNorm() / (2.0 * t);
      const double slack = 1e-12 * std::max(1.0, std::abs(y.smooth));
      if (cand.smooth <= bound + slack) {
        cand.total = cand.smooth + cfg.lambda * l1_offdiag(cand.b);
        out.ok = true;
        out.next = std::move(cand);
        out.step = t;
        return out;
      }
    }
    t *= cfg.backtrack_beta;
  }
  return out;
}

// Barzilai–Borwein step from the last accepted move, falling back to a mild
// increase of the previous step.
double trial_step(const Point& cur, const Point* prev, double last_step,
                  const SolverConfig& cfg) {
  if (prev) {
    const SymMatrix s = cur.b - prev->b;
    const SymMatrix r = cur.grad - prev->grad;
    const double sr = inner(s, r);
    const double ss = s.squaredNorm();
    if (sr > 0.0 && ss > 0.0) return std::clamp(ss / sr, kMinStep, kMaxStep);
  }
  return std::min(last_step / cfg.backtrack_beta, kMaxStep);
}

}  // namespace

SolverResult proximal_solve(const SmoothLoss& loss, SymMatrix initial,
                            const SolverConfig& cfg) {
  cfg.validate();
  require_symmetric(initial, "solver initial point");
  const IndexSet* restrict = cfg.restrict_support ? &*cfg.restrict_support : nullptr;
  if (restrict) {
    if (restrict->dim() != initial.rows()) {
      throw Error(ErrorCode::InvalidInput, "restrict_support dimension mismatch");
    }
    initial = prox_l1_offdiag(initial, 0.0, restrict);
  }

  Point cur;
  cur.b = (initial + initial.transpose()) * 0.5;
  if (!loss.evaluate(cur.b, cur.smooth, cur.grad)) {
    throw Error(ErrorCode::NotPositiveDefinite, "solver initial point is not positive definite");
  }
  cur.total = cur.smooth + cfg.lambda * l1_offdiag(cur.b);

  SolverResult res;
  res.objective_trace.push_back(cur.total);
  double kkt = kkt_residual(cur.grad, cur.b, cfg.lambda, restrict);

  Point prev;
  bool have_prev = false;
  double momentum = 1.0;  // FISTA sequence t_k
  double step = cfg.init_step;
  int stall = 0;
  double best_kkt = kkt;
  int it = 0;

  for (; it < cfg.max_iters && kkt > cfg.kkt_tol; ++it) {
    const double t0 = it == 0 ? cfg.init_step
                              : trial_step(cur, have_prev ? &prev : nullptr, step, cfg);

    StepOutcome outcome;
    if (cfg.acceleration && have_prev && momentum > 1.0) {
      const double next_momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      const double beta = (momentum - 1.0) / next_momentum;
      Point y;
      y.b = cur.b + beta * (cur.b - prev.b);
      if (loss.evaluate(y.b, y.smooth, y.grad)) {
        outcome = backtrack(loss, y, t0, cfg, restrict);
        if (outcome.ok && outcome.next.total <= cur.total) {
          momentum = next_momentum;
        } else {
          outcome.ok = false;
        }
      }
      if (!outcome.ok) momentum = 1.0;  // restart
    }
    if (!outcome.ok) {
      outcome = backtrack(loss, cur, t0, cfg, restrict);
      if (!outcome.ok) break;  // step size underflow
      if (cfg.acceleration) {
        momentum = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * momentum * momentum));
      }
    }

    const double change = std::abs(cur.total - outcome.next.total) /
                          std::max(1.0, std::abs(cur.total));

    prev = std::move(cur);
    have_prev = true;
    cur = std::move(outcome.next);
    step = outcome.step;
    res.objective_trace.push_back(cur.total);
    kkt = kkt_residual(cur.grad, cur.b, cfg.lambda, restrict);
    stall = change < cfg.rel_obj_tol && kkt >= best_kkt ? stall + 1 : 0;
    best_kkt = std::min(best_kkt, kkt);
    if (stall >= kStallWindow) {
      ++it;
      break;
    }
  }

  res.iterations = it;
  res.kkt_residual = kkt;
  res.converged = kkt <= cfg.kkt_tol;
  res.support_hat = support_of(cur.b);
  res.b_hat = std::move(cur.b);
  return res;
}

}  // namespace balnet::detail
