#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "balnet/metrics.hpp"
#include "balnet/mle_solver.hpp"
#include "balnet/network_model.hpp"
#include "balnet/sampling.hpp"

namespace balnet {

enum class Estimator { L1MLE, GlassoSR, Glasso2HR };

const char* to_string(Estimator e) noexcept;
/// Accepts the CSV names (L1MLE, GLASSO_SR, GLASSO_2HR) case-insensitively.
Estimator parse_estimator(const std::string& name);

enum class CovarianceMode { Identity, DiagonalRandom };

/// Recipe for a ground-truth model, including edge-list files and Σ_X.
struct ModelSpec {
  GraphKind kind = GraphKind::Chain;
  int p = 0;
  int rows = 0;
  int cols = 0;
  double edge_weight = 1.0;
  double diag_margin = 1.0;
  std::vector<std::string> edge_files;  // EdgeList: concatenated in order
  bool laplacian = false;
  std::optional<int> reduce_node;
  CovarianceMode covariance = CovarianceMode::Identity;
  std::uint64_t covariance_seed = 0;

  NetworkModel build() const;
};

/// Fixed λ constant, or "tune by pilot sweep".
struct LambdaChoice {
  bool pilot = false;
  double scale_c = 1.0;
};

enum class PilotRange { Full, MiddleThird };

struct ExperimentSpec {
  ModelSpec model;
  std::vector<int> n_grid;
  int trials = 100;
  std::vector<Estimator> estimators{Estimator::L1MLE};
  std::map<Estimator, LambdaChoice> lambda_constants;  // missing → pilot
  // √2-spaced from 0.25 to 16
  std::vector<double> pilot_candidates{0.25, 0.3536, 0.5, 0.7071, 1.0, 1.414, 2.0,
                                       2.828, 4.0, 5.657, 8.0, 11.31, 16.0};
  int pilot_trials = 20;
  PilotRange pilot_range = PilotRange::Full;
  Distribution distribution;
  std::uint64_t base_seed = 0;
  double tau = 1e-2;              // GLASSO+SR / GLASSO+2HR threshold
  bool known_covariance = true;   // false: ℓ1-MLE runs with D = I
  SolverConfig solver;            // lambda and restrict_support are ignored
  int threads = 1;
  bool record_timing = false;     // wall_ms is written as 0 unless set

  void validate() const;
};

struct ResultRow {
  Estimator estimator = Estimator::L1MLE;
  int n = 0;
  int trial = 0;
  std::uint64_t seed = 0;
  TrialScore score;
  int iterations = 0;
  bool converged = false;
  double wall_ms = 0.0;
};

struct Aggregate {
  Estimator estimator = Estimator::L1MLE;
  int n = 0;
  int trials = 0;
  int converged = 0;
  double lambda = 0.0;
  double success_prob = 0.0;
  double sign_consistency_prob = 0.0;
  double mean_err_inf = 0.0;
  double mean_err_fro = 0.0;
  double mean_err_op2 = 0.0;
};

struct ExperimentResult {
  std::vector<ResultRow> rows;        // ordered by (estimator, n, trial)
  std::vector<Aggregate> aggregates;  // ordered by (estimator, n)
  std::map<Estimator, double> lambda_constants;
  std::map<Estimator, std::map<double, double>> pilot_scores;  // c → mean recovery
};

enum class RateQuantity { ErrInf, ErrFro };

struct RateFit {
  double slope = 0.0;
  double r2 = 0.0;
};

/// base_seed + stable 64-bit mix of (n, trial, stream).
std::uint64_t trial_seed(std::uint64_t base_seed, int n, int trial, int stream = 0);

/// Integer sizes spaced geometrically from lo to hi inclusive, deduplicated.
std::vector<int> geometric_grid(int lo, int hi, int points);

/// Runs every (n, trial) job on a worker pool of spec.threads. Rows and
/// aggregates are independent of completion order.
ExperimentResult run_experiment(const ExperimentSpec& spec);

/// Same as run_experiment with λ constants fixed; no pilot tuning happens.
ExperimentResult run_trials(const ExperimentSpec& spec, const NetworkModel& model,
                            const std::map<Estimator, double>& constants, int stream = 0);

/// Reduced sweep (pilot_trials trials over the pilot range of n_grid) per
/// candidate; returns the candidate with the highest mean exact recovery,
/// ties going to the smaller c.
double pilot_tune_lambda(const ExperimentSpec& spec, Estimator estimator,
                         std::span<const double> candidates,
                         std::map<double, double>* scores = nullptr);

/// Least-squares slope of log(mean error) against log(n) over converged rows.
RateFit rate_check(const ExperimentResult& results, RateQuantity quantity,
                   Estimator estimator = Estimator::L1MLE);

std::vector<Aggregate> aggregate(const std::vector<ResultRow>& rows,
                                 const std::map<Estimator, double>& constants, int p);

/// Smallest n whose success probability reaches `level`, if any.
std::optional<int> first_n_reaching(const ExperimentResult& results, Estimator estimator,
                                    double level);

inline constexpr const char* kResultsCsvHeader =
    "estimator,n,trial,seed,exact_recovery,sign_consistent,err_inf,err_fro,err_op2,"
    "precision,recall,iterations,converged,wall_ms";

void write_results_csv(std::ostream& out, const ExperimentResult& result);

}  // namespace balnet
