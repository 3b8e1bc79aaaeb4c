#include <doctest.h>

#include <cmath>

#include "balnet/diagnostics.hpp"
#include "balnet/error.hpp"
#include "oracles.hpp"

using namespace balnet;

namespace {

ComplexityConstants unit_constants() {
  ComplexityConstants k;
  k.nu_gamma_inv = k.nu_d2 = k.nu_b = k.nu_b_inv = k.max_sigma_ii = 1.0;
  k.alpha = 1.0;
  k.degree_d = 1;
  k.p = 4;
  return k;
}

NetworkModel scaled_identity(int p, double c) {
  return make_model(c * SymMatrix::Identity(p, p), SymMatrix::Identity(p, p));
}

}  // namespace

TEST_CASE("incoherence: identity and chain fixtures") {
  CHECK(check_incoherence(scaled_identity(4, 1.0)) == 1.0);
  // Unit-margin chain p=4 violates incoherence; the value is pinned by the
  // dense Kronecker oracle.
  const auto c4 = build_chain(4);
  const double dense = 1.0 - oracle::dense_kron_infnorm(c4.b_star_inv, c4.support_e,
                                                       c4.support_e.complement());
  CHECK(check_incoherence(c4) == doctest::Approx(dense).epsilon(1e-10));
  CHECK(check_incoherence(c4) == doctest::Approx(-0.1).epsilon(1e-9));
  const double a2 = check_incoherence(build_chain(4, 1.0, 2.0));
  CHECK(a2 > 0.0);
  CHECK(a2 < 1.0);
}

TEST_CASE("incoherence: strong off-diagonals drive alpha below zero") {
  // Dense-ish pattern: a star with heavy spokes.
  const auto star = build_from_edge_list(
      edge_list_spec({{0, 1, 1.0}, {0, 2, 1.0}, {0, 3, 1.0}, {0, 4, 1.0}}), false, std::nullopt,
      0.05);
  const auto r = theorem1_constants(star);
  CHECK(r.alpha <= 0.0);
  CHECK_FALSE(r.a1_holds);
  CHECK(std::isinf(r.c1));
  CHECK(std::isinf(r.n_threshold));
}

TEST_CASE("property: alpha is invariant to rescaling B*") {
  for (const auto& m : {build_chain(5, 1.0, 2.0), build_grid(2, 3, 0.7, 1.5)}) {
    const auto scaled = make_model(3.7 * m.b_star, m.sigma_x);
    CHECK(check_incoherence(scaled) == doctest::Approx(check_incoherence(m)).epsilon(1e-10));
  }
}

TEST_CASE("property: nu_gamma_inv equals the dense Kronecker row-sum norm") {
  for (int p = 2; p <= 6; ++p) {
    const auto m = build_chain(p, 0.8, 0.6);
    const Matrix k = oracle::kron(m.b_star, m.b_star);
    const double dense = k.cwiseAbs().rowwise().sum().maxCoeff();
    CHECK(std::abs(complexity_constants(m).nu_gamma_inv - dense) <= 1e-10 * dense);
  }
}

TEST_CASE("hessian regularity") {
  auto h = check_hessian_regularity(scaled_identity(3, 1.0));
  CHECK(h.lhs == doctest::Approx(1.0));
  CHECK(h.rhs == doctest::Approx(0.25));
  CHECK_FALSE(h.holds);
  // B* = 4I: |||B* ⊗ B*||| = 16 and Θ*⁻¹ = I/16 give rhs = 4.
  h = check_hessian_regularity(scaled_identity(3, 4.0));
  CHECK(h.lhs == doctest::Approx(16.0));
  CHECK(h.rhs == doctest::Approx(4.0));
  CHECK_FALSE(h.holds);
  h = check_hessian_regularity(build_chain(8));
  CHECK(h.lhs == doctest::Approx(25.0));  // interior row 1 + 3 + 1
  CHECK(h.rhs > 0);
}

TEST_CASE("theorem constants: plug-in values") {
  const auto r = theorem1_constants(unit_constants(), 1.0, 2.5);
  CHECK(r.c2 == doctest::Approx(320.0 * std::sqrt(2.0)));
  CHECK(r.c0 == doctest::Approx(r.c2 / 4.0));
  CHECK(r.c1 == doctest::Approx(192.0 * std::sqrt(2.0) * 5.0 * 2.0));
  CHECK(r.n_threshold ==
        doctest::Approx(r.c1 * r.c1 * (2.5 * std::log(4.0) + std::log(4.0))));
  auto k = unit_constants();
  k.nu_gamma_inv = 3.0;
  CHECK(theorem1_constants(k, 1.0, 2.5).c0 ==
        doctest::Approx(theorem1_constants(k, 1.0, 2.5).c2 / 12.0));
}

TEST_CASE("theorem constants: chain p=32 threshold is far above the empirical recovery point") {
  const auto r = theorem1_constants(build_chain(32));
  CHECK(r.p == 32);
  CHECK(r.degree_d == 3);
  CHECK(r.n_threshold > 0);
  CHECK(r.a3_rownorm == doctest::Approx(5.0));
  // Either incoherence fails (threshold infinite) or the bound is huge.
  CHECK(r.n_threshold > 1e6);
}

TEST_CASE("diagnostics refuse large models") {
  try {
    theorem1_constants(build_chain(65));
    FAIL("expected UnsupportedSize");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnsupportedSize);
  }
  CHECK_NOTHROW(check_incoherence(build_grid(8, 8, 1.0, 2.0)));
}

TEST_CASE("lemma4 radius") {
  CHECK(lemma4_radius(unit_constants(), 0.0, 0.0).radius == 0.0);
  const auto r = lemma4_radius(unit_constants(), 0.1, 0.2);
  CHECK(r.radius == doctest::Approx(0.8));
  CHECK(r.hypothesis_bound == doctest::Approx(1.0 / 6.0));
  CHECK_FALSE(r.hypothesis_holds);
  CHECK(lemma4_radius(unit_constants(), 0.01, 0.01).hypothesis_holds);
  CHECK_THROWS_AS(lemma4_radius(unit_constants(), -1.0, 0.0), Error);
}

TEST_CASE("pdw dual check") {
  // Exact covariance, small λ.
  SampleSet exact;
  const auto c4 = build_chain(4);
  exact.s_cov = c4.sigma_y;
  exact.n = 1;
  const auto r = pdw_dual_check(c4, exact, 1e-3);
  CHECK(r.restricted.converged);
  CHECK(r.strict);
  CHECK(r.max_dual_ec < 1.0);

  // Fully dense support: the complement is empty.
  const auto c2 = build_chain(2);
  SampleSet s2;
  s2.s_cov = c2.sigma_y;
  s2.n = 1;
  const auto r2 = pdw_dual_check(c2, s2, 0.1);
  CHECK(r2.max_dual_ec == 0.0);
  CHECK(r2.strict);
  CHECK_THROWS_AS(pdw_dual_check(c2, s2, 0.0), Error);

  // Severely under-sampled regime.
  const auto c8 = build_chain(8);
  int failures = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const auto smp = draw_samples(c8, {5, {}, static_cast<std::uint64_t>(seed)});
    if (!pdw_dual_check(c8, smp, default_lambda(8, 5, 1.0)).strict) ++failures;
  }
  CHECK(failures >= 30);
}

TEST_CASE("noise deviation stays below the sub-Gaussian tail bound") {
  // P(|W_ij| > δ) ≤ 4 exp(−nδ²/(128(1+4σ²)² max Σ_ii²)); with δ chosen for
  // exponent τ the union bound gives P(‖W‖_max > δ) ≤ p^{2−τ}.
  const auto m = build_chain(8);
  const int n = 4000;
  const double tau = 2.5, sigma = 1.0;
  const double max_s = m.sigma_y.diagonal().maxCoeff();
  const double c = 128.0 * std::pow(1 + 4 * sigma * sigma, 2) * max_s * max_s;
  const double delta = std::sqrt(c * (tau * std::log(8.0) + std::log(4.0)) / n);
  int exceed = 0;
  for (int seed = 0; seed < 100; ++seed) {
    const auto smp = draw_samples(m, {n, {}, static_cast<std::uint64_t>(500 + seed)});
    if (elem_max_norm(noise_deviation(m, smp)) > delta) ++exceed;
  }
  CHECK(exceed <= static_cast<int>(100 * std::pow(8.0, 2 - tau)));
}
