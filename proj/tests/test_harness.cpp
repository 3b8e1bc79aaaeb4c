#include <doctest.h>

#include <cmath>
#include <set>
#include <sstream>

#include "balnet/error.hpp"
#include "balnet/harness.hpp"

using namespace balnet;

namespace {

ExperimentSpec chain_spec(int p, std::vector<int> grid, int trials) {
  ExperimentSpec s;
  s.model.kind = GraphKind::Chain;
  s.model.p = p;
  s.n_grid = std::move(grid);
  s.trials = trials;
  s.base_seed = 77;
  return s;
}

std::string csv(const ExperimentResult& r) {
  std::ostringstream out;
  write_results_csv(out, r);
  return out.str();
}

ResultRow synthetic_row(int n, double err) {
  ResultRow r;
  r.n = n;
  r.converged = true;
  r.score.err_inf = err;
  r.score.err_fro = err;
  return r;
}

}  // namespace

TEST_CASE("estimator names") {
  CHECK(parse_estimator("l1mle") == Estimator::L1MLE);
  CHECK(parse_estimator("GLASSO_SR") == Estimator::GlassoSR);
  CHECK(parse_estimator("glasso_2hr") == Estimator::Glasso2HR);
  CHECK(std::string(to_string(Estimator::Glasso2HR)) == "GLASSO_2HR");
  CHECK_THROWS_AS(parse_estimator("clime"), Error);
}

TEST_CASE("trial seeds are stable and distinct") {
  CHECK(trial_seed(1, 100, 3) == trial_seed(1, 100, 3));
  std::set<std::uint64_t> seen;
  for (int n : {10, 20, 30})
    for (int t = 0; t < 50; ++t)
      for (int stream : {0, 1}) seen.insert(trial_seed(5, n, t, stream));
  CHECK(seen.size() == 300);
  CHECK(trial_seed(6, 10, 0) - trial_seed(5, 10, 0) == 1);
}

TEST_CASE("geometric grid") {
  const auto g = geometric_grid(50, 20000, 8);
  CHECK(g.size() == 8);
  CHECK(g.front() == 50);
  CHECK(g.back() == 20000);
  for (std::size_t i = 1; i < g.size(); ++i) CHECK(g[i] > g[i - 1]);
  CHECK(geometric_grid(3, 5, 10) == std::vector<int>{3, 4, 5});
  CHECK_THROWS_AS(geometric_grid(10, 5, 3), Error);
}

TEST_CASE("spec validation") {
  auto s = chain_spec(8, {100, 50}, 1);
  CHECK_THROWS_AS(s.validate(), Error);
  s = chain_spec(8, {100}, 0);
  CHECK_THROWS_AS(s.validate(), Error);
  s = chain_spec(8, {100}, 1);
  s.estimators.clear();
  CHECK_THROWS_AS(s.validate(), Error);
}

TEST_CASE("large-n sanity run recovers the chain") {
  auto s = chain_spec(8, {1000000}, 1);
  s.lambda_constants[Estimator::L1MLE] = {false, 8.0};
  const auto r = run_experiment(s);
  REQUIRE(r.aggregates.size() == 1);
  CHECK(r.aggregates[0].success_prob == 1.0);
  CHECK(r.rows[0].converged);
}

TEST_CASE("under-sampled regime fails") {
  auto s = chain_spec(32, {5}, 20);
  s.estimators = {Estimator::L1MLE, Estimator::GlassoSR};
  s.lambda_constants[Estimator::L1MLE] = {false, 8.0};
  s.lambda_constants[Estimator::GlassoSR] = {false, 1.0};
  const auto r = run_experiment(s);
  for (const auto& a : r.aggregates) CHECK(a.success_prob <= 0.05);
}

TEST_CASE("rows are bit-identical across runs and worker counts") {
  auto s = chain_spec(10, {60, 200}, 6);
  s.estimators = {Estimator::L1MLE, Estimator::GlassoSR, Estimator::Glasso2HR};
  for (auto e : s.estimators) s.lambda_constants[e] = {false, 2.0};
  const auto a = run_experiment(s);
  const auto b = run_experiment(s);
  s.threads = 3;
  const auto c = run_experiment(s);
  CHECK(csv(a) == csv(b));
  CHECK(csv(a) == csv(c));
  REQUIRE(a.rows.size() == 3 * 2 * 6);
  // Ordered by (estimator, n, trial).
  CHECK(a.rows[0].estimator == Estimator::L1MLE);
  CHECK(a.rows[6].n == 200);
  CHECK(a.rows[12].estimator == Estimator::GlassoSR);
  CHECK(a.rows[35].trial == 5);
  for (const auto& row : a.rows) CHECK(row.wall_ms == 0.0);
}

TEST_CASE("aggregates are means of the rows") {
  auto s = chain_spec(8, {300, 3000}, 8);
  s.lambda_constants[Estimator::L1MLE] = {false, 8.0};
  const auto r = run_experiment(s);
  REQUIRE(r.aggregates.size() == 2);
  for (const auto& a : r.aggregates) {
    double hits = 0, err = 0;
    int count = 0;
    for (const auto& row : r.rows)
      if (row.n == a.n) {
        hits += row.score.exact_recovery;
        err += row.score.err_inf;
        ++count;
      }
    CHECK(a.trials == count);
    CHECK(a.success_prob == doctest::Approx(hits / count));
    CHECK(a.mean_err_inf == doctest::Approx(err / count));
    CHECK(a.success_prob >= 0.0);
    CHECK(a.success_prob <= 1.0);
    CHECK(a.lambda == doctest::Approx(default_lambda(8, a.n, 8.0)));
  }
}

TEST_CASE("huge lambda kills every edge") {
  auto s = chain_spec(8, {2000}, 5);
  s.lambda_constants[Estimator::L1MLE] = {false, 8.0};
  const auto base = run_experiment(s);
  s.lambda_constants[Estimator::L1MLE] = {false, 8.0e6};
  const auto killed = run_experiment(s);
  CHECK(killed.aggregates[0].success_prob == 0.0);
  CHECK(killed.aggregates[0].success_prob <= base.aggregates[0].success_prob);
}

TEST_CASE("pilot tuning") {
  auto s = chain_spec(8, {500, 2000, 8000}, 5);
  s.pilot_trials = 5;
  const std::vector<double> one{3.0};
  CHECK(pilot_tune_lambda(s, Estimator::L1MLE, one) == 3.0);
  const std::vector<double> two{0.1, 1e6};
  std::map<double, double> scores;
  CHECK(pilot_tune_lambda(s, Estimator::L1MLE, two, &scores) == 0.1);
  CHECK(scores.at(1e6) == 0.0);
  // Unspecified constants are tuned and recorded.
  s.pilot_candidates = {2.0, 8.0};
  const auto r = run_experiment(s);
  CHECK(r.lambda_constants.count(Estimator::L1MLE) == 1);
  CHECK(r.pilot_scores.at(Estimator::L1MLE).size() == 2);
}

TEST_CASE("rate check") {
  ExperimentResult r;
  for (int n : {100, 400, 1600, 6400}) r.rows.push_back(synthetic_row(n, 1.0 / std::sqrt(n)));
  auto fit = rate_check(r, RateQuantity::ErrInf);
  CHECK(fit.slope == doctest::Approx(-0.5));
  CHECK(fit.r2 == doctest::Approx(1.0));
  ExperimentResult flat;
  for (int n : {100, 400, 1600}) flat.rows.push_back(synthetic_row(n, 0.3));
  fit = rate_check(flat, RateQuantity::ErrFro);
  CHECK(fit.slope == doctest::Approx(0.0));
  ExperimentResult few;
  for (int n : {100, 400}) few.rows.push_back(synthetic_row(n, 0.3));
  try {
    rate_check(few, RateQuantity::ErrInf);
    FAIL("expected InsufficientData");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientData);
  }
  // Non-converged rows do not count.
  ExperimentResult partial = flat;
  partial.rows[2].converged = false;
  CHECK_THROWS_AS(rate_check(partial, RateQuantity::ErrInf), Error);
}

TEST_CASE("first_n_reaching") {
  ExperimentResult r;
  Aggregate a;
  a.n = 100;
  a.success_prob = 0.5;
  r.aggregates.push_back(a);
  a.n = 200;
  a.success_prob = 0.95;
  r.aggregates.push_back(a);
  CHECK(first_n_reaching(r, Estimator::L1MLE, 0.9) == 200);
  CHECK_FALSE(first_n_reaching(r, Estimator::L1MLE, 0.99).has_value());
  CHECK_FALSE(first_n_reaching(r, Estimator::GlassoSR, 0.1).has_value());
}

TEST_CASE("results CSV layout") {
  ExperimentResult r;
  ResultRow row = synthetic_row(10, 0.1);
  row.seed = 18446744073709551615ull;
  row.score.exact_recovery = true;
  r.rows.push_back(row);
  const auto text = csv(r);
  std::istringstream in(text);
  std::string header, line;
  std::getline(in, header);
  std::getline(in, line);
  CHECK(header == kResultsCsvHeader);
  CHECK(line ==
        "L1MLE,10,0,18446744073709551615,1,0,0.10000000000000001,0.10000000000000001,0,0,0,0,1,0");
}
