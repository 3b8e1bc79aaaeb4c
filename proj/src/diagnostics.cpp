#include "balnet/diagnostics.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "balnet/error.hpp"

namespace balnet {

namespace {

void require_diagnosable(const NetworkModel& model) {
  if (model.dim() > kDiagnosticsMaxDim) {
    throw Error(ErrorCode::UnsupportedSize,
                "diagnostics support p <= " + std::to_string(kDiagnosticsMaxDim) +
                    ", got p = " + std::to_string(model.dim()));
  }
}

}  // namespace

double check_incoherence(const NetworkModel& model) {
  require_diagnosable(model);
  const IndexSet ec = model.support_e.complement();
  return 1.0 - kron_submatrix_infnorm_product(model.b_star_inv, model.support_e, ec);
}

HessianRegularity check_hessian_regularity(const NetworkModel& model) {
  require_diagnosable(model);
  const double nu_b = row_sum_norm(model.b_star);
  const SymMatrix d2 = model.d_mat * model.d_mat;
  HessianRegularity out;
  out.lhs = nu_b * nu_b;
  out.rhs = 1.0 / (4.0 * model.degree_d * elem_max_norm(model.sigma_y) * row_sum_norm(d2));
  out.holds = out.lhs <= out.rhs;
  return out;
}

ComplexityConstants complexity_constants(const NetworkModel& model) {
  ComplexityConstants k;
  k.nu_b = row_sum_norm(model.b_star);
  k.nu_gamma_inv = k.nu_b * k.nu_b;
  k.nu_d2 = row_sum_norm(SymMatrix(model.d_mat * model.d_mat));
  k.nu_b_inv = row_sum_norm(model.b_star_inv);
  k.max_sigma_ii = model.sigma_y.diagonal().maxCoeff();
  k.degree_d = model.degree_d;
  k.p = model.dim();
  return k;
}

DiagnosticsReport theorem1_constants(const ComplexityConstants& k, double sigma,
                                     double tau_exponent) {
  if (!(tau_exponent > 2.0)) {
    throw Error(ErrorCode::InvalidInput, "tau_exponent must exceed 2");
  }
  if (!(sigma > 0.0)) throw Error(ErrorCode::InvalidInput, "sigma must be > 0");
  DiagnosticsReport r;
  r.alpha = k.alpha;
  r.a1_holds = k.alpha > 0.0;
  r.nu_gamma_inv = k.nu_gamma_inv;
  r.nu_d2 = k.nu_d2;
  r.nu_b = k.nu_b;
  r.nu_b_inv = k.nu_b_inv;
  r.max_sigma_ii = k.max_sigma_ii;
  r.a3_rownorm = k.nu_b;
  r.sigma = sigma;
  r.tau_exponent = tau_exponent;
  r.degree_d = k.degree_d;
  r.p = k.p;

  const double tail = (1.0 + 4.0 * sigma * sigma) * k.max_sigma_ii;
  const double d = static_cast<double>(k.degree_d);
  r.c2 = 64.0 * std::sqrt(2.0) * tail * k.nu_gamma_inv * k.nu_d2 * k.nu_b;
  r.c0 = r.c2 / (4.0 * k.nu_gamma_inv);
  if (r.a1_holds) {
    const double spread = std::max({k.nu_gamma_inv * k.nu_b_inv,
                                    2.0 * k.nu_gamma_inv * k.nu_gamma_inv *
                                        std::pow(k.nu_b_inv, 3),
                                    2.0 / (k.alpha * d)});
    r.c1 = 192.0 * std::sqrt(2.0) * tail * k.nu_d2 * k.nu_b * spread;
    r.n_threshold = r.c1 * r.c1 * d * d *
                    (tau_exponent * std::log(static_cast<double>(k.p)) + std::log(4.0));
  } else {
    r.c1 = std::numeric_limits<double>::infinity();
    r.n_threshold = std::numeric_limits<double>::infinity();
  }
  return r;
}

DiagnosticsReport theorem1_constants(const NetworkModel& model, double sigma,
                                     double tau_exponent) {
  require_diagnosable(model);
  ComplexityConstants k = complexity_constants(model);
  k.alpha = check_incoherence(model);
  DiagnosticsReport r = theorem1_constants(k, sigma, tau_exponent);
  const auto a2 = check_hessian_regularity(model);
  r.a2_lhs = a2.lhs;
  r.a2_rhs = a2.rhs;
  r.a2_holds = a2.holds;
  return r;
}

Lemma4Radius lemma4_radius(const ComplexityConstants& k, double w_infnorm, double lambda) {
  if (!(w_infnorm >= 0.0) || !(lambda >= 0.0)) {
    throw Error(ErrorCode::InvalidInput, "lemma4_radius inputs must be >= 0");
  }
  const double d = static_cast<double>(k.degree_d);
  Lemma4Radius out;
  out.radius = 4.0 * k.nu_gamma_inv * (k.nu_d2 * k.nu_b * w_infnorm + 0.5 * lambda);
  out.hypothesis_bound =
      std::min(1.0 / (3.0 * k.nu_b_inv * d),
               1.0 / (6.0 * k.nu_gamma_inv * std::pow(k.nu_b_inv, 3) * d));
  out.hypothesis_holds = out.radius <= out.hypothesis_bound;
  return out;
}

Lemma4Radius lemma4_radius(const NetworkModel& model, double w_infnorm, double lambda) {
  return lemma4_radius(complexity_constants(model), w_infnorm, lambda);
}

PdwDualCheck pdw_dual_check(const NetworkModel& model, const SampleSet& samples,
                            double lambda, SolverConfig config) {
  if (!(lambda > 0.0)) throw Error(ErrorCode::InvalidInput, "pdw_dual_check needs lambda > 0");
  if (samples.s_cov.rows() != model.dim()) {
    throw Error(ErrorCode::InvalidInput, "sample dimension does not match model");
  }
  config.lambda = lambda;
  config.restrict_support = model.support_e;

  PdwDualCheck out;
  out.restricted = solve(samples.s_cov, model.d_mat, config);
  const SymMatrix grad = smooth_gradient(out.restricted.b_hat, samples.s_cov, model.d_mat);
  const auto in_e = model.support_e.mask();
  const int p = model.dim();
  double worst = 0.0;
  for (int i = 0; i < p; ++i)
    for (int j = 0; j < p; ++j)
      if (!in_e[static_cast<std::size_t>(i) * p + j]) {
        worst = std::max(worst, std::abs(-grad(i, j) / lambda));
      }
  out.max_dual_ec = worst;
  out.strict = worst < 1.0;
  return out;
}

}  // namespace balnet
