#pragma once

#include <optional>

#include "balnet/linalg.hpp"
#include "balnet/mle_solver.hpp"
#include "balnet/network_model.hpp"
#include "balnet/sampling.hpp"

namespace balnet {

/// Kronecker blocks grow like p⁴; diagnostics refuse larger models.
inline constexpr int kDiagnosticsMaxDim = 64;

struct HessianRegularity {
  double lhs = 0.0;  // |||Γ*⁻¹|||_inf = |||B*|||_inf²
  double rhs = 0.0;  // 1 / (4 d ‖Θ*⁻¹‖_max |||D²|||_inf)
  bool holds = false;
};

/// Model complexity quantities the sample-size constants are built from.
struct ComplexityConstants {
  double nu_gamma_inv = 0.0;  // |||B* ⊗ B*|||_inf
  double nu_d2 = 0.0;         // |||D²|||_inf
  double nu_b = 0.0;          // |||B*|||_inf
  double nu_b_inv = 0.0;      // |||B*⁻¹|||_inf
  double max_sigma_ii = 0.0;  // max_i [Θ*⁻¹]_ii
  double alpha = 1.0;
  int degree_d = 1;
  int p = 1;
};

struct DiagnosticsReport {
  double alpha = 1.0;
  bool a1_holds = true;
  double a2_lhs = 0.0;
  double a2_rhs = 0.0;
  bool a2_holds = false;
  double a3_rownorm = 0.0;
  double nu_gamma_inv = 0.0;
  double nu_d2 = 0.0;
  double nu_b = 0.0;
  double nu_b_inv = 0.0;
  double max_sigma_ii = 0.0;
  double c0 = 0.0;
  double c1 = 0.0;  // +inf when alpha <= 0
  double c2 = 0.0;
  double n_threshold = 0.0;
  double sigma = 1.0;
  double tau_exponent = 2.5;
  int degree_d = 0;
  int p = 0;
  std::optional<double> lemma4_radius;
};

struct Lemma4Radius {
  double radius = 0.0;
  double hypothesis_bound = 0.0;  // min{1/(3ν_{B*⁻¹}d), 1/(6ν_{Γ*⁻¹}ν³_{B*⁻¹}d)}
  bool hypothesis_holds = false;
};

struct PdwDualCheck {
  double max_dual_ec = 0.0;
  bool strict = true;
  SolverResult restricted;  // the support-restricted primal solution
};

/// 1 − |||Γ*_{Ec,E}(Γ*_{E,E})⁻¹|||_inf with Γ* = B*⁻¹ ⊗ B*⁻¹.
double check_incoherence(const NetworkModel& model);

HessianRegularity check_hessian_regularity(const NetworkModel& model);

ComplexityConstants complexity_constants(const NetworkModel& model);

/// Plug-in evaluation of C₀, C₁, C₂ and the sample-size threshold
/// C₁² d² (τ log p + log 4) from precomputed constants.
DiagnosticsReport theorem1_constants(const ComplexityConstants& k, double sigma,
                                     double tau_exponent);

/// Full report for a model: incoherence, regularity, row norm and constants.
DiagnosticsReport theorem1_constants(const NetworkModel& model, double sigma = 1.0,
                                     double tau_exponent = 2.5);

/// r = 4ν_{Γ*⁻¹}[ν_{D²}ν_{B*}‖W‖_max + λ/2] and whether r satisfies its own
/// smallness hypothesis.
Lemma4Radius lemma4_radius(const ComplexityConstants& k, double w_infnorm, double lambda);
Lemma4Radius lemma4_radius(const NetworkModel& model, double w_infnorm, double lambda);

/// Solves the program restricted to the true support and builds the dual
/// Z̃ = (2B̃⁻¹ − D²B̃S − SB̃D²)/λ on the complement.
PdwDualCheck pdw_dual_check(const NetworkModel& model, const SampleSet& samples,
                            double lambda, SolverConfig config = {});

}  // namespace balnet
