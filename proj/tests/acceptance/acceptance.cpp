// One PASS/FAIL line per acceptance criterion; exit status is the number of
// failures. The sweeps reuse the bundled experiment configs.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <limits>
#include <optional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "balnet/baselines.hpp"
#include "balnet/diagnostics.hpp"
#include "balnet/harness.hpp"
#include "balnet/mle_solver.hpp"
#include "cli.hpp"
#include "config.hpp"
#include "../oracles.hpp"

using namespace balnet;
namespace fs = std::filesystem;
using Clock = std::chrono::steady_clock;

namespace {

int failures = 0;

void report(int id, const char* name, bool pass, const std::string& detail) {
  std::printf("[%s] criterion %2d  %-28s %s\n", pass ? "PASS" : "FAIL", id, name, detail.c_str());
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string fmt(const char* f, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, f, args...);
  return buf;
}

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

fs::path source(const std::string& rel) { return fs::path(BALNET_SOURCE_DIR) / rel; }

cli::CliConfig load_bundled(const std::string& name) {
  const auto path = source("configs/" + name);
  return cli::parse_config(cli::load_json(path), path.parent_path());
}

std::string results_csv(const ExperimentResult& r) {
  std::ostringstream out;
  write_results_csv(out, r);
  return out.str();
}

std::optional<int> n90(const ExperimentResult& r, Estimator e) {
  return first_n_reaching(r, e, 0.9);
}

std::string n_text(std::optional<int> n) { return n ? std::to_string(*n) : "none"; }

// Minimal-norm subgradient residual, computed independently of the library.
double independent_kkt(const Matrix& grad, const Matrix& b, double lambda) {
  double worst = 0.0;
  for (int i = 0; i < b.rows(); ++i)
    for (int j = 0; j < b.cols(); ++j) {
      double r;
      if (i == j) {
        r = std::abs(grad(i, j));
      } else if (b(i, j) > 0) {
        r = std::abs(grad(i, j) + lambda);
      } else if (b(i, j) < 0) {
        r = std::abs(grad(i, j) - lambda);
      } else {
        r = std::max(0.0, std::abs(grad(i, j)) - lambda);
      }
      worst = std::max(worst, r);
    }
  return worst;
}

void criterion1() {
  std::mt19937_64 rng(1001);
  std::uniform_real_distribution<double> lam(0.02, 0.4);
  double worst_entry = 0, worst_obj = 0, slowest = 0;
  bool all_converged = true;
  for (int k = 0; k < 10; ++k) {
    const Matrix s = oracle::random_spd(2, rng, 0.5, 2.0);
    const Matrix d = oracle::random_spd(2, rng, 0.7, 1.4);
    const double lambda = lam(rng);
    const Eigen::Matrix2d s2 = s, d2 = d;
    const auto best = oracle::grid_search_2x2(
        [&](double a, double b, double c) {
          return oracle::mle_objective_2x2(a, b, c, s2, d2, lambda);
        },
        3.0, 0.05, 5e-6);
    SolverConfig cfg;
    cfg.lambda = lambda;
    const auto t0 = Clock::now();
    const auto r = solve(s, d, cfg);
    slowest = std::max(slowest, seconds_since(t0));
    all_converged = all_converged && r.converged;
    worst_entry = std::max({worst_entry, std::abs(r.b_hat(0, 0) - best.a),
                            std::abs(r.b_hat(0, 1) - best.b), std::abs(r.b_hat(1, 1) - best.c)});
    const double obj = oracle::mle_objective_2x2(r.b_hat(0, 0), r.b_hat(0, 1), r.b_hat(1, 1),
                                                 s2, d2, lambda);
    worst_obj = std::max(worst_obj, std::abs(obj - best.value));
  }
  report(1, "solver vs grid oracle",
         all_converged && worst_entry <= 1e-3 && worst_obj <= 1e-6 && slowest < 1.0,
         fmt("max entry diff %.2e (<=1e-3), max objective diff %.2e (<=1e-6), slowest solve "
             "%.4f s (<1 s)",
             worst_entry, worst_obj, slowest));
}

void criterion2() {
  int solves = 0, converged = 0;
  double worst_kkt = 0;
  for (const auto& model : {build_chain(16), build_grid(4, 4), build_chain(8, 1.0, 0.5)}) {
    const int p = model.dim();
    for (int n : {100, 1000, 10000}) {
      const auto smp = draw_samples(model, {n, {}, static_cast<std::uint64_t>(n + p)});
      for (double c : {0.5, 2.0, 8.0}) {
        const double lambda = default_lambda(p, n, c);
        SolverConfig cfg;
        cfg.lambda = lambda;
        const auto mle = solve(smp.s_cov, model.d_mat, cfg);
        const auto gl = glasso(smp.s_cov, lambda, cfg);
        solves += 2;
        if (mle.converged) {
          ++converged;
          const Matrix d2 = model.d_mat * model.d_mat;
          const Matrix g = d2 * mle.b_hat * smp.s_cov + smp.s_cov * mle.b_hat * d2 -
                           2.0 * mle.b_hat.inverse();
          worst_kkt = std::max(worst_kkt, independent_kkt(g, mle.b_hat, lambda));
        }
        if (gl.converged) {
          ++converged;
          const Matrix g = smp.s_cov - gl.b_hat.inverse();
          worst_kkt = std::max(worst_kkt, independent_kkt(g, gl.b_hat, lambda));
        }
      }
    }
  }
  std::mt19937_64 rng(1002);
  double worst_fd = 0;
  for (int k = 0; k < 5; ++k) {
    const int p = 3 + k;
    const Matrix b = oracle::random_spd(p, rng), s = oracle::random_spd(p, rng),
                 d = oracle::random_spd(p, rng);
    const Matrix fd = oracle::fd_symmetric_gradient(
        [&](const Matrix& x) { return objective(x, s, d, 0.0); }, b, 1e-5);
    const Matrix g = smooth_gradient(b, s, d);
    worst_fd = std::max(worst_fd, (fd - g).norm() / g.norm());
  }
  report(2, "KKT certificate + gradient", worst_kkt <= 1e-6 && worst_fd <= 1e-6 && converged > 0,
         fmt("%d/%d solves converged, max KKT residual %.2e (<=1e-6), max FD rel. error %.2e "
             "(<=1e-6)",
             converged, solves, worst_kkt, worst_fd));
}

void criterion3() {
  const auto m = build_chain(16);
  const auto smp = draw_samples(m, {2000, {}, 1003});
  SolverConfig cfg;
  cfg.lambda = default_lambda(16, 2000, 8.0);
  const auto r1 = solve(smp.s_cov, m.d_mat, cfg);
  cfg.initial = 2.0 * default_initial(smp.s_cov, m.d_mat);
  const auto r2 = solve(smp.s_cov, m.d_mat, cfg);
  cfg.initial = SymMatrix(0.3 * SymMatrix::Identity(16, 16));
  const auto r3 = solve(smp.s_cov, m.d_mat, cfg);
  const double diff = std::max(elem_max_norm(r1.b_hat - r2.b_hat), elem_max_norm(r1.b_hat - r3.b_hat));
  report(3, "uniqueness (3 inits)", r1.converged && r2.converged && r3.converged && diff <= 1e-5,
         fmt("max ||B1 - Bk||_max = %.2e (<=1e-5)", diff));
}

void criterion4() {
  std::mt19937_64 rng(1004);
  std::uniform_real_distribution<double> u(0.05, 20.0);
  double worst_mle = 0, worst_gl = 0;
  for (int k = 0; k < 20; ++k) {
    const double s = u(rng), d = u(rng) / 4;
    SolverConfig cfg;
    cfg.lambda = u(rng);  // no off-diagonal entries, so λ is irrelevant
    const auto r = solve(SymMatrix::Constant(1, 1, s), SymMatrix::Constant(1, 1, d), cfg);
    worst_mle = std::max(worst_mle, std::abs(r.b_hat(0, 0) - 1.0 / (d * std::sqrt(s))));
    const auto g = glasso(SymMatrix::Constant(1, 1, s), cfg.lambda);
    worst_gl = std::max(worst_gl, std::abs(g.b_hat(0, 0) - 1.0 / s));
  }
  report(4, "scalar closed forms", worst_mle <= 1e-8 && worst_gl <= 1e-8,
         fmt("max |b - 1/(d sqrt s)| = %.2e, max |theta - 1/s| = %.2e (<=1e-8)", worst_mle,
             worst_gl));
}

struct NormChainTally {
  long rows = 0, violations = 0;
  void add(const ExperimentResult& r, const NetworkModel& m) {
    const double d = m.degree_d;
    const double root = std::sqrt(static_cast<double>(m.s_offdiag + m.dim()));
    const double slack = 1 + 1e-12;  // floating-point rounding only
    for (const auto& row : r.rows) {
      ++rows;
      const auto& s = row.score;
      const bool ok = s.err_op2 <= std::min(d * s.err_inf, s.err_fro) * slack &&
                      s.err_fro <= root * s.err_inf * slack;
      if (!ok) ++violations;
    }
  }
};

}  // namespace

int main() {
  const auto t_all = Clock::now();
  criterion1();
  criterion2();
  criterion3();
  criterion4();

  NormChainTally norms_tally;

  // 5 and 12: the bundled chain sweep, once through the library and once
  // through the command-line tool.
  const auto chain_cfg = load_bundled("chain_p32.json");
  auto t0 = Clock::now();
  const auto chain = run_experiment(chain_cfg.experiment);
  const double chain_secs = seconds_since(t0);
  const auto chain_model = chain_cfg.experiment.model.build();
  norms_tally.add(chain, chain_model);
  {
    std::vector<double> curve;
    for (const auto& a : chain.aggregates)
      if (a.estimator == Estimator::L1MLE) curve.push_back(a.success_prob);
    bool monotone = true;
    for (std::size_t i = 1; i < curve.size(); ++i) monotone = monotone && curve[i] >= curve[i - 1] - 0.1;
    std::string trace;
    for (double v : curve) trace += fmt("%.2f ", v);
    report(5, "chain p=32 phase transition",
           curve.back() >= 0.95 && curve.front() <= 0.05 && monotone && chain_secs <= 1800,
           fmt("c=%.4g, success by n: %s(last>=0.95, first<=0.05, monotone within 0.1), %.0f s",
               chain.lambda_constants.at(Estimator::L1MLE), trace.c_str(), chain_secs));
  }

  // 6: grid fixture, both estimators pilot-tuned.
  const auto grid_cfg = load_bundled("grid_p32.json");
  t0 = Clock::now();
  const auto grid = run_experiment(grid_cfg.experiment);
  norms_tally.add(grid, grid_cfg.experiment.model.build());
  {
    const auto a = n90(grid, Estimator::L1MLE), b = n90(grid, Estimator::GlassoSR);
    const bool pass = a && (!b || *a < *b);
    report(6, "grid: L1MLE before GLASSO+SR", pass,
           fmt("n90 L1MLE=%s (c=%.4g), GLASSO+SR=%s (c=%.4g), %.0f s", n_text(a).c_str(),
               grid.lambda_constants.at(Estimator::L1MLE), n_text(b).c_str(),
               grid.lambda_constants.at(Estimator::GlassoSR), seconds_since(t0)));
  }

  // 7: rate at the chain fixture's tuned constant.
  const double chain_c = chain.lambda_constants.at(Estimator::L1MLE);
  {
    ExperimentSpec spec = chain_cfg.experiment;
    spec.n_grid = {500, 2000, 8000};
    spec.estimators = {Estimator::L1MLE};
    const auto r = run_trials(spec, chain_model, {{Estimator::L1MLE, chain_c}});
    norms_tally.add(r, chain_model);
    const auto fit = rate_check(r, RateQuantity::ErrInf);
    std::string errs;
    for (const auto& a : r.aggregates) errs += fmt("%.4f ", a.mean_err_inf);
    report(7, "l_inf rate", fit.slope >= -0.65 && fit.slope <= -0.35,
           fmt("slope %.3f in [-0.65, -0.35] (r2 %.3f), c=%.4g, mean err_inf %s", fit.slope,
               fit.r2, chain_c, errs.c_str()));
  }

  // 9: dense Kronecker oracle.
  {
    std::mt19937_64 rng(1009);
    double worst = 0;
    int cases = 0;
    for (int p = 3; p <= 6; ++p) {
      std::vector<NetworkModel> models{build_chain(p), build_chain(p, 0.6, 2.0)};
      if (p == 4 || p == 6) models.push_back(build_grid(2, p / 2));
      for (const auto& m : models) {
        const double got = kron_submatrix_infnorm_product(m.b_star_inv, m.support_e,
                                                          m.support_e.complement());
        worst = std::max(worst, std::abs(got - oracle::dense_kron_infnorm(
                                                   m.b_star_inv, m.support_e,
                                                   m.support_e.complement())));
        ++cases;
      }
      for (int k = 0; k < 3; ++k) {
        const Matrix binv = oracle::random_spd(p, rng);
        std::vector<IndexPair> pairs;
        for (int i = 0; i < p; ++i) {
          pairs.emplace_back(i, i);
          for (int j = i + 1; j < p; ++j)
            if ((i + j + k) % 3 == 0) {
              pairs.emplace_back(i, j);
              pairs.emplace_back(j, i);
            }
        }
        const IndexSet e(p, pairs);
        worst = std::max(worst, std::abs(kron_submatrix_infnorm_product(binv, e, e.complement()) -
                                          oracle::dense_kron_infnorm(binv, e, e.complement())));
        ++cases;
      }
    }
    report(9, "incoherence vs dense oracle", worst <= 1e-10,
           fmt("%d cases, p in {3..6}, max abs diff %.2e (<=1e-10)", cases, worst));
  }

  // 10: primal-dual witness implication and the restricted-error radius.
  {
    const auto m = build_chain(8);
    const double lambda = default_lambda(8, 5000, chain_c);
    int strict = 0, implication_ok = 0, qualifying = 0, radius_ok = 0;
    double min_hyp_ratio = std::numeric_limits<double>::infinity();
    for (int t = 0; t < 100; ++t) {
      const auto smp = draw_samples(m, {5000, {}, trial_seed(1010, 5000, t)});
      const auto pdw = pdw_dual_check(m, smp, lambda);
      SolverConfig cfg;
      cfg.lambda = lambda;
      const auto full = solve(smp.s_cov, m.d_mat, cfg);
      if (pdw.strict) {
        ++strict;
        if (full.support_hat.is_subset_of(m.support_e)) ++implication_ok;
      }
      const auto lr = lemma4_radius(m, elem_max_norm(noise_deviation(m, smp)), lambda);
      min_hyp_ratio = std::min(min_hyp_ratio, lr.radius / lr.hypothesis_bound);
      if (lr.hypothesis_holds) {
        ++qualifying;
        if (elem_max_norm(pdw.restricted.b_hat - m.b_star) <= lr.radius) ++radius_ok;
      }
    }
    report(10, "PDW implication + radius", implication_ok == strict && radius_ok == qualifying,
           fmt("strict dual on %d/100 trials, support within E on %d of them; radius hypothesis "
               "met on %d trials (smallest r/bound %.3g), radius held on %d",
               strict, implication_ok, qualifying, min_hyp_ratio, radius_ok));
  }

  // 11: heavy tails with the Gaussian-tuned constant.
  {
    auto cfg = load_bundled("chain_p32_student_t.json");
    ExperimentSpec spec = cfg.experiment;
    spec.estimators = {Estimator::L1MLE};
    const auto r = run_trials(spec, spec.model.build(), {{Estimator::L1MLE, chain_c}});
    norms_tally.add(r, chain_model);
    const auto t_n = n90(r, Estimator::L1MLE), g_n = n90(chain, Estimator::L1MLE);
    std::string trace;
    for (const auto& a : r.aggregates) trace += fmt("%.2f ", a.success_prob);
    report(11, "Student-t dof=9", t_n && g_n && *t_n >= *g_n,
           fmt("n90 Student-t=%s vs Gaussian=%s, success by n: %s", n_text(t_n).c_str(),
               n_text(g_n).c_str(), trace.c_str()));
  }

  // 8 is checked on every scored trial above.
  report(8, "norm chain on every trial", norms_tally.violations == 0,
         fmt("%ld violations over %ld trials", norms_tally.violations, norms_tally.rows));

  // 12: the command-line run of the chain config must reproduce the library
  // run byte for byte.
  {
    const auto out = fs::temp_directory_path() / "balnet_acceptance_rerun";
    fs::remove_all(out);
    const std::string cfg_path = source("configs/chain_p32.json").string();
    const std::string out_s = out.string();
    const char* argv[] = {"balnet", "--config", cfg_path.c_str(), "--out", out_s.c_str(), "experiment"};
    std::ostringstream log, err;
    const int code = cli::run(6, argv, log, err);
    std::ifstream in(out / "results.csv");
    const std::string rerun{std::istreambuf_iterator<char>(in), {}};
    const bool same = code == 0 && rerun == results_csv(chain);
    report(12, "bit-identical rerun", same,
           fmt("chain_p32.json rerun: exit %d, %zu bytes, identical=%s", code, rerun.size(),
               same ? "yes" : "no"));
  }

  std::printf("acceptance: %d failure(s), %.0f s total\n", failures, seconds_since(t_all));
  return failures == 0 ? 0 : 1;
}
