#include "balnet/baselines.hpp"

#include <algorithm>
#include <cmath>

#include "balnet/error.hpp"
#include "proximal.hpp"

namespace balnet {

namespace {

// g(Θ) = Tr(SΘ) − log det Θ.
class GlassoLoss final : public detail::SmoothLoss {
 public:
  explicit GlassoLoss(const SymMatrix& s) : s_(s) {}

  bool evaluate(const SymMatrix& theta, double& value, SymMatrix& grad) const override {
    Eigen::SelfAdjointEigenSolver<Matrix> es(theta);
    if (es.info() != Eigen::Success) return false;
    const auto& ev = es.eigenvalues();
    const double top = std::max(std::abs(ev(0)), std::abs(ev(ev.size() - 1)));
    if (!(ev(0) > pd_floor(top))) return false;
    value = s_.cwiseProduct(theta).sum() - ev.array().log().sum();
    const Matrix vs = es.eigenvectors() * ev.cwiseInverse().cwiseSqrt().asDiagonal();
    grad = s_ - vs * vs.transpose();
    return true;
  }

 private:
  const SymMatrix& s_;
};

}  // namespace

void BaselineConfig::validate() const {
  if (!(glasso_lambda >= 0.0) || !(threshold_tau >= 0.0) || !(support_eps >= 0.0)) {
    throw Error(ErrorCode::InvalidInput, "baseline parameters must be >= 0");
  }
}

SymMatrix glasso_initial(const SymMatrix& s) {
  const Eigen::Index p = s.rows();
  SymMatrix t0 = SymMatrix::Zero(p, p);
  for (Eigen::Index i = 0; i < p; ++i) {
    const double sii = s(i, i);
    t0(i, i) = sii > 0.0 ? std::clamp(1.0 / sii, 1e-3, 1e3) : 1e3;
  }
  return t0;
}

SolverResult glasso(const SymMatrix& s, double lambda, SolverConfig config) {
  require_symmetric(s, "S");
  config.lambda = lambda;
  SymMatrix init = config.initial ? *config.initial : glasso_initial(s);
  if (init.rows() != s.rows()) {
    throw Error(ErrorCode::InvalidInput, "initial point dimension mismatch");
  }
  GlassoLoss loss(s);
  return detail::proximal_solve(loss, std::move(init), config);
}

IndexSet glasso_sr_support(const SymMatrix& theta_hat, double tau) {
  const SymMatrix root = sym_sqrt(theta_hat);
  const int p = static_cast<int>(root.rows());
  std::vector<IndexPair> pairs;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i == j || std::abs(root(i, j)) > tau) pairs.emplace_back(i, j);
  return IndexSet(p, std::move(pairs));
}

IndexSet glasso_2hr_support(const SymMatrix& theta_hat, double tau) {
  require_symmetric(theta_hat, "Θ̂");
  const int p = static_cast<int>(theta_hat.rows());
  std::vector<IndexPair> pairs;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (i == j || theta_hat(i, j) <= -tau) pairs.emplace_back(i, j);
  return IndexSet(p, std::move(pairs));
}

}  // namespace balnet
