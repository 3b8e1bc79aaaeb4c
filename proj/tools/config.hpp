#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include <json.hpp>

#include "balnet/diagnostics.hpp"
#include "balnet/harness.hpp"
#include "balnet/mle_solver.hpp"
#include "balnet/sampling.hpp"

namespace balnet::cli {

using json = nlohmann::json;

struct SamplingSection {
  int n = 1000;
  Distribution distribution;
};

struct EstimateSection {
  Estimator estimator = Estimator::L1MLE;
  std::optional<std::filesystem::path> samples;  // n × p CSV of potentials
  std::optional<std::filesystem::path> sigma_x;  // overrides the model's Σ_X
  double tau = 1e-2;
  bool known_covariance = true;
};

struct DiagnosticsSection {
  double sigma = 1.0;
  double tau_exponent = 2.5;
};

/// Validated view of a config document. Relative paths inside the document
/// resolve against the directory of the file they came from.
struct CliConfig {
  json raw;  // effective document after flag overrides
  bool has_model = false;
  ModelSpec model;
  SamplingSection sampling;
  SolverConfig solver;
  std::optional<double> lambda;  // absolute λ; wins over lambda_c
  double lambda_c = 8.0;
  EstimateSection estimate;
  DiagnosticsSection diagnostics;
  ExperimentSpec experiment;
  std::uint64_t seed = 0;
  int threads = 1;
};

/// Reads a JSON document; Io when unreadable, InvalidInput when malformed.
json load_json(const std::filesystem::path& path);

/// Schema check plus conversion; unknown keys are InvalidInput.
CliConfig parse_config(const json& doc, const std::filesystem::path& base_dir);

json to_json(const DiagnosticsReport& report);
json to_json(const TrialScore& score);
json aggregates_json(const ExperimentResult& result, const json& spec_echo);

}  // namespace balnet::cli
