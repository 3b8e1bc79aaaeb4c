#include "balnet/harness.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <mutex>
#include <ostream>
#include <thread>

#include "balnet/baselines.hpp"
#include "balnet/error.hpp"

namespace balnet {

namespace {

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9E3779B97F4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

std::string upper(std::string s) {
  for (auto& ch : s) ch = static_cast<char>(std::toupper(static_cast<unsigned char>(ch)));
  return s;
}

// Runs jobs [0, count) on `threads` workers; the first exception wins.
template <typename Job>
void parallel_for(std::size_t count, int threads, Job&& job) {
  const std::size_t workers =
      std::max<std::size_t>(1, std::min<std::size_t>(static_cast<std::size_t>(threads), count));
  if (workers == 1) {
    for (std::size_t i = 0; i < count; ++i) job(i);
    return;
  }
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  std::vector<std::thread> pool;
  pool.reserve(workers);
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&] {
      for (;;) {
        const std::size_t i = next.fetch_add(1);
        if (i >= count) return;
        try {
          job(i);
        } catch (...) {
          std::lock_guard lock(failure_mutex);
          if (!failure) failure = std::current_exception();
          next.store(count);
          return;
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  if (failure) std::rethrow_exception(failure);
}

std::vector<int> pilot_grid(const ExperimentSpec& spec) {
  const auto& g = spec.n_grid;
  if (spec.pilot_range == PilotRange::Full) return g;
  const std::size_t m = g.size();
  const std::size_t lo = m / 3;
  const std::size_t hi = std::max(lo + 1, (2 * m + 2) / 3);
  return {g.begin() + static_cast<std::ptrdiff_t>(lo),
          g.begin() + static_cast<std::ptrdiff_t>(std::min(hi, m))};
}

}  // namespace

const char* to_string(Estimator e) noexcept {
  switch (e) {
    case Estimator::L1MLE: return "L1MLE";
    case Estimator::GlassoSR: return "GLASSO_SR";
    case Estimator::Glasso2HR: return "GLASSO_2HR";
  }
  return "UNKNOWN";
}

Estimator parse_estimator(const std::string& name) {
  const auto u = upper(name);
  if (u == "L1MLE" || u == "L1_MLE") return Estimator::L1MLE;
  if (u == "GLASSO_SR" || u == "GLASSO+SR") return Estimator::GlassoSR;
  if (u == "GLASSO_2HR" || u == "GLASSO+2HR") return Estimator::Glasso2HR;
  throw Error(ErrorCode::InvalidInput, "unknown estimator '" + name + "'");
}

NetworkModel ModelSpec::build() const {
  NetworkModel model;
  switch (kind) {
    case GraphKind::Chain:
      model = build_chain(p, edge_weight, diag_margin);
      break;
    case GraphKind::Grid:
      model = build_grid(rows, cols, edge_weight, diag_margin);
      break;
    case GraphKind::EdgeList: {
      if (edge_files.empty()) {
        throw Error(ErrorCode::InvalidInput, "edge_list model needs at least one edge file");
      }
      std::vector<WeightedEdge> edges;
      for (const auto& f : edge_files) {
        auto part = read_edge_list(f);
        edges.insert(edges.end(), part.begin(), part.end());
      }
      model = build_from_edge_list(edge_list_spec(std::move(edges), p), laplacian,
                                   reduce_node, diag_margin);
      break;
    }
  }
  if (covariance == CovarianceMode::DiagonalRandom) {
    model = set_injection_covariance(std::move(model),
                                     random_diagonal_covariance(model.dim(), covariance_seed));
  }
  return model;
}

void ExperimentSpec::validate() const {
  if (n_grid.empty()) throw Error(ErrorCode::InvalidInput, "n_grid is empty");
  for (std::size_t i = 0; i < n_grid.size(); ++i) {
    if (n_grid[i] < 1) throw Error(ErrorCode::InvalidInput, "n_grid entries must be >= 1");
    if (i > 0 && n_grid[i] <= n_grid[i - 1]) {
      throw Error(ErrorCode::InvalidInput, "n_grid must be strictly ascending");
    }
  }
  if (trials < 1) throw Error(ErrorCode::InvalidInput, "trials must be >= 1");
  if (pilot_trials < 1) throw Error(ErrorCode::InvalidInput, "pilot_trials must be >= 1");
  if (estimators.empty()) throw Error(ErrorCode::InvalidInput, "no estimators selected");
  if (!(tau >= 0.0)) throw Error(ErrorCode::InvalidInput, "tau must be >= 0");
  if (threads < 1) throw Error(ErrorCode::InvalidInput, "threads must be >= 1");
  for (const auto& [e, choice] : lambda_constants) {
    if (!choice.pilot && !(choice.scale_c > 0.0)) {
      throw Error(ErrorCode::InvalidInput, "lambda constants must be > 0");
    }
  }
  SamplingSpec{1, distribution, 0}.validate();
  solver.validate();
}

std::uint64_t trial_seed(std::uint64_t base_seed, int n, int trial, int stream) {
  std::uint64_t h = splitmix64(static_cast<std::uint64_t>(n));
  h = splitmix64(h ^ static_cast<std::uint64_t>(trial));
  h = splitmix64(h ^ static_cast<std::uint64_t>(stream));
  return base_seed + h;
}

std::vector<int> geometric_grid(int lo, int hi, int points) {
  if (lo < 1 || hi < lo || points < 1) {
    throw Error(ErrorCode::InvalidInput, "geometric_grid needs 1 <= lo <= hi, points >= 1");
  }
  std::vector<int> out;
  if (points == 1) return {lo};
  const double ratio = std::log(static_cast<double>(hi) / lo) / (points - 1);
  for (int k = 0; k < points; ++k) {
    const int v = k == points - 1 ? hi
                                  : static_cast<int>(std::lround(lo * std::exp(ratio * k)));
    if (out.empty() || v > out.back()) out.push_back(v);
  }
  return out;
}

ExperimentResult run_trials(const ExperimentSpec& spec, const NetworkModel& model,
                            const std::map<Estimator, double>& constants, int stream) {
  spec.validate();
  const int p = model.dim();
  const std::size_t n_count = spec.n_grid.size();
  const std::size_t jobs = n_count * static_cast<std::size_t>(spec.trials);
  const std::size_t n_est = spec.estimators.size();
  const SymMatrix identity = SymMatrix::Identity(p, p);

  SolverConfig base = spec.solver;
  base.restrict_support.reset();
  base.initial.reset();

  // rows_by_job[job][estimator index]
  std::vector<std::vector<ResultRow>> rows_by_job(jobs);

  parallel_for(jobs, spec.threads, [&](std::size_t job) {
    const int n = spec.n_grid[job / static_cast<std::size_t>(spec.trials)];
    const int trial = static_cast<int>(job % static_cast<std::size_t>(spec.trials));
    const std::uint64_t seed = trial_seed(spec.base_seed, n, trial, stream);
    const SampleSet samples = draw_samples(model, {n, spec.distribution, seed});

    std::map<double, SolverResult> glasso_cache;
    auto& out = rows_by_job[job];
    out.reserve(n_est);
    for (const Estimator e : spec.estimators) {
      ResultRow row;
      row.estimator = e;
      row.n = n;
      row.trial = trial;
      row.seed = seed;
      const double lambda = default_lambda(p, n, constants.at(e));
      const auto start = std::chrono::steady_clock::now();
      SolverConfig cfg = base;
      cfg.lambda = lambda;
      if (e == Estimator::L1MLE) {
        const SymMatrix& d = spec.known_covariance ? model.d_mat : identity;
        const SolverResult r = solve(samples.s_cov, d, cfg);
        row.score = score(r.b_hat, model, r.support_hat);
        row.iterations = r.iterations;
        row.converged = r.converged;
      } else {
        auto it = glasso_cache.find(lambda);
        if (it == glasso_cache.end()) {
          it = glasso_cache.emplace(lambda, glasso(samples.s_cov, lambda, cfg)).first;
        }
        const SolverResult& g = it->second;
        const IndexSet support = e == Estimator::GlassoSR
                                     ? glasso_sr_support(g.b_hat, spec.tau)
                                     : glasso_2hr_support(g.b_hat, spec.tau);
        row.score = score(sym_sqrt(g.b_hat), model, support);
        row.iterations = g.iterations;
        row.converged = g.converged;
      }
      if (spec.record_timing) {
        row.wall_ms = std::chrono::duration<double, std::milli>(
                          std::chrono::steady_clock::now() - start)
                          .count();
      }
      out.push_back(row);
    }
  });

  ExperimentResult result;
  result.lambda_constants = constants;
  result.rows.reserve(jobs * n_est);
  for (std::size_t ei = 0; ei < n_est; ++ei)
    for (std::size_t job = 0; job < jobs; ++job) result.rows.push_back(rows_by_job[job][ei]);
  result.aggregates = aggregate(result.rows, constants, p);
  return result;
}

std::vector<Aggregate> aggregate(const std::vector<ResultRow>& rows,
                                 const std::map<Estimator, double>& constants, int p) {
  std::vector<Aggregate> out;
  for (const auto& row : rows) {
    if (out.empty() || out.back().estimator != row.estimator || out.back().n != row.n) {
      Aggregate a;
      a.estimator = row.estimator;
      a.n = row.n;
      if (auto it = constants.find(row.estimator); it != constants.end() && p >= 2) {
        a.lambda = default_lambda(p, row.n, it->second);
      }
      out.push_back(a);
    }
    auto& a = out.back();
    ++a.trials;
    a.converged += row.converged ? 1 : 0;
    a.success_prob += row.score.exact_recovery ? 1.0 : 0.0;
    a.sign_consistency_prob += row.score.sign_consistent ? 1.0 : 0.0;
    a.mean_err_inf += row.score.err_inf;
    a.mean_err_fro += row.score.err_fro;
    a.mean_err_op2 += row.score.err_op2;
  }
  for (auto& a : out) {
    const double t = a.trials;
    a.success_prob /= t;
    a.sign_consistency_prob /= t;
    a.mean_err_inf /= t;
    a.mean_err_fro /= t;
    a.mean_err_op2 /= t;
  }
  return out;
}

double pilot_tune_lambda(const ExperimentSpec& spec, Estimator estimator,
                         std::span<const double> candidates,
                         std::map<double, double>* scores) {
  if (candidates.empty()) throw Error(ErrorCode::InvalidInput, "no pilot candidates");
  if (candidates.size() == 1) {
    if (scores) scores->clear();
    return candidates.front();
  }
  ExperimentSpec reduced = spec;
  reduced.trials = spec.pilot_trials;
  reduced.n_grid = pilot_grid(spec);
  reduced.estimators = {estimator};
  reduced.record_timing = false;
  const NetworkModel model = spec.model.build();

  std::vector<double> sorted(candidates.begin(), candidates.end());
  std::sort(sorted.begin(), sorted.end());
  double best_c = sorted.front();
  double best_rate = -1.0;
  for (const double c : sorted) {
    if (!(c > 0.0)) throw Error(ErrorCode::InvalidInput, "pilot candidates must be > 0");
    const auto r = run_trials(reduced, model, {{estimator, c}}, /*stream=*/1);
    double hits = 0.0;
    for (const auto& row : r.rows) hits += row.score.exact_recovery ? 1.0 : 0.0;
    const double rate = hits / static_cast<double>(r.rows.size());
    if (scores) (*scores)[c] = rate;
    if (rate > best_rate) {
      best_rate = rate;
      best_c = c;
    }
  }
  return best_c;
}

ExperimentResult run_experiment(const ExperimentSpec& spec) {
  spec.validate();
  const NetworkModel model = spec.model.build();
  std::map<Estimator, double> constants;
  std::map<Estimator, std::map<double, double>> pilot_scores;
  for (const Estimator e : spec.estimators) {
    if (constants.count(e)) continue;
    const auto it = spec.lambda_constants.find(e);
    if (it != spec.lambda_constants.end() && !it->second.pilot) {
      constants[e] = it->second.scale_c;
    } else {
      constants[e] = pilot_tune_lambda(spec, e, spec.pilot_candidates, &pilot_scores[e]);
    }
  }
  ExperimentResult result = run_trials(spec, model, constants, 0);
  result.pilot_scores = std::move(pilot_scores);
  return result;
}

RateFit rate_check(const ExperimentResult& results, RateQuantity quantity, Estimator estimator) {
  std::map<int, std::pair<double, int>> by_n;
  for (const auto& row : results.rows) {
    if (row.estimator != estimator || !row.converged) continue;
    auto& [sum, count] = by_n[row.n];
    sum += quantity == RateQuantity::ErrInf ? row.score.err_inf : row.score.err_fro;
    ++count;
  }
  std::vector<double> xs, ys;
  for (const auto& [n, acc] : by_n) {
    const double mean = acc.first / acc.second;
    if (!(mean > 0.0)) {
      throw Error(ErrorCode::InsufficientData, "mean error must be positive for a log fit");
    }
    xs.push_back(std::log(static_cast<double>(n)));
    ys.push_back(std::log(mean));
  }
  if (xs.size() < 3) {
    throw Error(ErrorCode::InsufficientData, "rate_check needs >= 3 sample sizes with converged trials");
  }
  const double k = static_cast<double>(xs.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    mx += xs[i];
    my += ys[i];
  }
  mx /= k;
  my /= k;
  double sxx = 0.0, sxy = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    sxx += (xs[i] - mx) * (xs[i] - mx);
    sxy += (xs[i] - mx) * (ys[i] - my);
    syy += (ys[i] - my) * (ys[i] - my);
  }
  RateFit fit;
  fit.slope = sxy / sxx;
  // A perfectly flat response is fit exactly.
  fit.r2 = syy <= 0.0 ? 1.0 : (sxy * sxy) / (sxx * syy);
  return fit;
}

std::optional<int> first_n_reaching(const ExperimentResult& results, Estimator estimator,
                                    double level) {
  for (const auto& a : results.aggregates) {
    if (a.estimator == estimator && a.success_prob >= level) return a.n;
  }
  return std::nullopt;
}

void write_results_csv(std::ostream& out, const ExperimentResult& result) {
  out << kResultsCsvHeader << '\n';
  char buf[512];
  for (const auto& r : result.rows) {
    std::snprintf(buf, sizeof buf,
                  "%s,%d,%d,%llu,%d,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%d,%d,%.17g\n",
                  to_string(r.estimator), r.n, r.trial,
                  static_cast<unsigned long long>(r.seed), r.score.exact_recovery ? 1 : 0,
                  r.score.sign_consistent ? 1 : 0, r.score.err_inf, r.score.err_fro,
                  r.score.err_op2, r.score.support_precision, r.score.support_recall,
                  r.iterations, r.converged ? 1 : 0, r.wall_ms);
    out << buf;
  }
}

}  // namespace balnet
