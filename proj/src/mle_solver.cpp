#include "balnet/mle_solver.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "balnet/error.hpp"
#include "proximal.hpp"

namespace balnet {

namespace {

// g(B) = Tr(D²BSB) − 2 log det B.
class BalanceLoss final : public detail::SmoothLoss {
 public:
  BalanceLoss(const SymMatrix& s, const SymMatrix& d) : s_(s), d2_(d * d) {
    d2_ = (d2_ + d2_.transpose()) * 0.5;
  }

  bool evaluate(const SymMatrix& b, double& value, SymMatrix& grad) const override {
    Eigen::SelfAdjointEigenSolver<Matrix> es(b);
    if (es.info() != Eigen::Success) return false;
    const auto& ev = es.eigenvalues();
    const double top = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    if (!(ev(0) > pd_floor(top))) return false;
    const Matrix d2b = d2_ * b;
    const Matrix sb = s_ * b;
    value = d2b.cwiseProduct(sb.transpose()).sum() - 2.0 * ev.array().log().sum();
    const Matrix vs = es.eigenvectors() * ev.cwiseInverse().cwiseSqrt().asDiagonal();
    const Matrix half = d2b * s_;
    grad = half + half.transpose() - 2.0 * (vs * vs.transpose());
    return true;
  }

 private:
  const SymMatrix& s_;
  SymMatrix d2_;
};

void require_same_dims(const SymMatrix& a, const SymMatrix& b, const char* what) {
  if (a.rows() != b.rows() || a.cols() != b.cols()) {
    throw Error(ErrorCode::InvalidInput, std::string(what) + " dimension mismatch");
  }
}

}  // namespace

void SolverConfig::validate() const {
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) {
    throw Error(ErrorCode::InvalidInput, "lambda must be finite and >= 0");
  }
  if (max_iters < 0) throw Error(ErrorCode::InvalidInput, "max_iters must be >= 0");
  if (!(rel_obj_tol >= 0.0)) throw Error(ErrorCode::InvalidInput, "rel_obj_tol must be >= 0");
  if (!(kkt_tol >= 0.0)) throw Error(ErrorCode::InvalidInput, "kkt_tol must be >= 0");
  if (!(backtrack_beta > 0.0 && backtrack_beta < 1.0)) {
    throw Error(ErrorCode::InvalidInput, "backtrack_beta must lie in (0, 1)");
  }
  if (!(init_step > 0.0)) throw Error(ErrorCode::InvalidInput, "init_step must be > 0");
}

double l1_offdiag(const SymMatrix& b) {
  return b.cwiseAbs().sum() - b.diagonal().cwiseAbs().sum();
}

double objective(const SymMatrix& b, const SymMatrix& s, const SymMatrix& d, double lambda) {
  require_symmetric(b, "B");
  require_same_dims(b, s, "S");
  require_same_dims(b, d, "D");
  const double ld = log_det(sym_eigen(b));
  const SymMatrix dbd = d * b * s * b * d;
  return dbd.trace() - 2.0 * ld + lambda * l1_offdiag(b);
}

SymMatrix smooth_gradient(const SymMatrix& b, const SymMatrix& s, const SymMatrix& d) {
  require_symmetric(b, "B");
  require_same_dims(b, s, "S");
  require_same_dims(b, d, "D");
  const SymMatrix binv = sym_inv(sym_eigen(b));
  const SymMatrix d2 = d * d;
  return d2 * b * s + s * b * d2 - 2.0 * binv;
}

SymMatrix prox_l1_offdiag(const SymMatrix& b, double threshold, const IndexSet* restrict) {
  if (!(threshold >= 0.0)) {
    throw Error(ErrorCode::InvalidInput, "threshold must be >= 0");
  }
  const Eigen::Index p = b.rows();
  if (restrict && restrict->dim() != p) {
    throw Error(ErrorCode::InvalidInput, "restrict dimension mismatch");
  }
  SymMatrix out(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    out(i, i) = b(i, i);
    for (Eigen::Index j = i + 1; j < p; ++j) {
      const double x = 0.5 * (b(i, j) + b(j, i));
      const double mag = std::abs(x) - threshold;
      const double v = mag > 0.0 ? std::copysign(mag, x) : 0.0;
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  if (restrict) {
    const auto keep = restrict->mask();
    for (Eigen::Index i = 0; i < p; ++i)
      for (Eigen::Index j = 0; j < p; ++j)
        if (!keep[static_cast<std::size_t>(i * p + j)]) out(i, j) = 0.0;
  }
  return out;
}

double kkt_residual(const SymMatrix& grad, const SymMatrix& b, double lambda,
                    const IndexSet* restrict) {
  const Eigen::Index p = b.rows();
  std::vector<char> keep;
  if (restrict) keep = restrict->mask();
  double worst = 0.0;
  for (Eigen::Index i = 0; i < p; ++i) {
    for (Eigen::Index j = 0; j < p; ++j) {
      if (restrict && !keep[static_cast<std::size_t>(i * p + j)]) continue;
      const double g = grad(i, j);
      double r;
      if (i == j) {
        r = std::abs(g);
      } else if (b(i, j) != 0.0) {
        r = std::abs(g + lambda * (b(i, j) > 0.0 ? 1.0 : -1.0));
      } else {
        r = std::max(std::abs(g) - lambda, 0.0);
      }
      worst = std::max(worst, r);
    }
  }
  return worst;
}

IndexSet support_of(const SymMatrix& b, double eps) {
  const int p = static_cast<int>(b.rows());
  std::vector<IndexPair> pairs;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i == j || std::abs(b(i, j)) > eps) pairs.emplace_back(i, j);
  return IndexSet(p, std::move(pairs));
}

SymMatrix default_initial(const SymMatrix& s, const SymMatrix& d) {
  require_same_dims(s, d, "D");
  const SymMatrix sigma_x = sym_inv(sym_eigen(SymMatrix(d * d)));
  const Eigen::Index p = s.rows();
  SymMatrix b0 = SymMatrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double sii = s(i, i);
    b0(i, i) = sii > 0.0 ? std::clamp(std::sqrt(sigma_x(i, i) / sii), 1e-3, 1e3) : 1e3;
  }
  return b0;
}

SolverResult solve(const SymMatrix& s, const SymMatrix& d, const SolverConfig& config) {
  config.validate();
  require_symmetric(s, "S");
  require_symmetric(d, "D");
  require_same_dims(s, d, "D");
  const auto d_eig = sym_eigen(d);
  require_positive_definite(d_eig, "D");
  SymMatrix init = config.initial ? *config.initial : default_initial(s, d);
  require_same_dims(s, init, "initial point");
  BalanceLoss loss(s, d);
  return detail::proximal_solve(loss, std::move(init), config);
}

double default_lambda(int p, int n, double scale_c) {
  if (p < 2 || n < 1 || !(scale_c > 0.0)) {
    throw Error(ErrorCode::InvalidInput, "default_lambda needs p >= 2, n >= 1, c > 0");
  }
  return scale_c * std::sqrt(std::log(static_cast<double>(p)) / n);
}

}  // namespace balnet
