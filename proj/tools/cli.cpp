#include "cli.hpp"

#include <filesystem>
#include <fstream>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "balnet/baselines.hpp"
#include "balnet/error.hpp"
#include "balnet/matrix_io.hpp"
#include "config.hpp"

namespace balnet::cli {

namespace fs = std::filesystem;

namespace {

struct GlobalFlags {
  std::optional<std::string> config;
  std::string out = ".";
  std::optional<std::uint64_t> seed;
  std::optional<int> threads;
};

struct ModelFlags {
  std::optional<std::string> kind;
  std::optional<int> p, rows, cols, reduce;
  std::optional<double> edge_weight, diag_margin;
  std::vector<std::string> edge_list;
  bool laplacian = false;
  std::optional<std::string> covariance;
};

struct SamplingFlags {
  std::optional<int> n;
  std::optional<std::string> distribution;
  std::optional<double> dof;
};

struct EstimateFlags {
  std::optional<std::string> samples, sigma_x, estimator;
  std::optional<double> lambda, lambda_c, tau;
  bool unknown_covariance = false;
};

struct DiagnoseFlags {
  std::optional<double> sigma, tau_exponent;
};

struct ExperimentFlags {
  std::optional<int> trials;
};

void add_model_flags(CLI::App* cmd, ModelFlags& f) {
  cmd->add_option("--kind", f.kind, "Graph kind: chain, grid or edge_list");
  cmd->add_option("--p", f.p, "Number of nodes (chain, or edge_list override)");
  cmd->add_option("--rows", f.rows, "Grid rows");
  cmd->add_option("--cols", f.cols, "Grid columns");
  cmd->add_option("--edge-list", f.edge_list, "Edge-list file(s), concatenated");
  cmd->add_flag("--laplacian", f.laplacian, "Build a weighted Laplacian from the edge list");
  cmd->add_option("--reduce", f.reduce, "Node deleted from the Laplacian");
  cmd->add_option("--edge-weight", f.edge_weight, "Edge weight for chain and grid");
  cmd->add_option("--diag-margin", f.diag_margin, "Diagonal dominance margin");
  cmd->add_option("--covariance", f.covariance, "Injection covariance: identity or diagonal_random");
}

void add_sampling_flags(CLI::App* cmd, SamplingFlags& f) {
  cmd->add_option("--n", f.n, "Number of samples");
  cmd->add_option("--distribution", f.distribution, "gaussian or student_t");
  cmd->add_option("--dof", f.dof, "Student-t degrees of freedom");
}

std::string absolute(const std::string& p) { return fs::absolute(p).string(); }

// Flags override single leaves of the config document.
void override_leaves(json& doc, const ModelFlags& f) {
  const bool any = f.kind || f.p || f.rows || f.cols || f.reduce || f.edge_weight ||
                   f.diag_margin || !f.edge_list.empty() || f.laplacian || f.covariance;
  if (!any) return;
  json& m = doc["model"];
  if (m.is_null()) m = json::object();
  if (!f.edge_list.empty()) {
    json files = json::array();
    for (const auto& e : f.edge_list) files.push_back(absolute(e));
    m["edge_list"] = files;
    if (!f.kind) m["kind"] = "edge_list";
  }
  if (f.kind) m["kind"] = *f.kind;
  if (f.p) m["p"] = *f.p;
  if (f.rows) m["rows"] = *f.rows;
  if (f.cols) m["cols"] = *f.cols;
  if (f.reduce) m["reduce_node"] = *f.reduce;
  if (f.edge_weight) m["edge_weight"] = *f.edge_weight;
  if (f.diag_margin) m["diag_margin"] = *f.diag_margin;
  if (f.laplacian) m["laplacian"] = true;
  if (f.covariance) m["covariance"] = *f.covariance;
}

void override_leaves(json& doc, const SamplingFlags& f) {
  if (f.n) doc["sampling"]["n"] = *f.n;
  if (f.distribution) doc["sampling"]["distribution"] = *f.distribution;
  if (f.dof) doc["sampling"]["dof"] = *f.dof;
}

void override_leaves(json& doc, const EstimateFlags& f) {
  if (f.samples) doc["estimate"]["samples"] = absolute(*f.samples);
  if (f.sigma_x) doc["estimate"]["sigma_x"] = absolute(*f.sigma_x);
  if (f.estimator) doc["estimate"]["estimator"] = *f.estimator;
  if (f.tau) doc["estimate"]["tau"] = *f.tau;
  if (f.unknown_covariance) doc["estimate"]["known_covariance"] = false;
  if (f.lambda) doc["solver"]["lambda"] = *f.lambda;
  if (f.lambda_c) doc["solver"]["lambda_c"] = *f.lambda_c;
}

void override_leaves(json& doc, const DiagnoseFlags& f) {
  if (f.sigma) doc["diagnostics"]["sigma"] = *f.sigma;
  if (f.tau_exponent) doc["diagnostics"]["tau_exponent"] = *f.tau_exponent;
}

void override_leaves(json& doc, const ExperimentFlags& f) {
  if (f.trials) {
    if (!doc.contains("experiment")) {
      throw Error(ErrorCode::InvalidInput, "--trials needs an experiment section in the config");
    }
    doc["experiment"]["trials"] = *f.trials;
  }
}

const NetworkModel& require_model(const CliConfig& cfg, std::optional<NetworkModel>& cache) {
  if (!cfg.has_model) {
    throw Error(ErrorCode::InvalidInput, "no model: give a model section or --kind/--edge-list");
  }
  if (!cache) cache = cfg.model.build();
  return *cache;
}

fs::path prepare_out(const std::string& dir) {
  const fs::path out(dir);
  std::error_code ec;
  fs::create_directories(out, ec);
  if (ec) throw Error(ErrorCode::Io, "cannot create output directory '" + dir + "'");
  return out;
}

std::ofstream open_out(const fs::path& path) {
  std::ofstream f(path);
  if (!f) throw Error(ErrorCode::Io, "cannot open '" + path.string() + "' for writing");
  return f;
}

void write_json(const fs::path& path, const json& j) {
  auto f = open_out(path);
  f << j.dump(2) << '\n';
  if (!f) throw Error(ErrorCode::Io, "failed writing '" + path.string() + "'");
}

int cmd_generate(const CliConfig& cfg, const fs::path& out, std::ostream& log) {
  std::optional<NetworkModel> cache;
  const auto& model = require_model(cfg, cache);
  write_matrix_csv(out / "b_star.csv", model.b_star);
  write_matrix_csv(out / "sigma_x.csv", model.sigma_x);
  {
    auto f = open_out(out / "support.edges");
    write_edge_list(f, model.support_e, &model.b_star);
  }
  log << "generated p=" << model.dim() << " with " << model.s_offdiag / 2 << " edges in "
      << out.string() << '\n';
  return kOk;
}

int cmd_sample(const CliConfig& cfg, const fs::path& out, std::ostream& log) {
  std::optional<NetworkModel> cache;
  const auto& model = require_model(cfg, cache);
  const auto samples =
      draw_samples(model, {cfg.sampling.n, cfg.sampling.distribution, cfg.seed});
  write_matrix_csv(out / "samples.csv", samples.y);
  log << "wrote " << samples.n << " samples of dimension " << model.dim() << " to "
      << (out / "samples.csv").string() << '\n';
  return kOk;
}

int cmd_estimate(const CliConfig& cfg, const fs::path& out, std::ostream& log) {
  std::optional<NetworkModel> cache;
  const NetworkModel* model = nullptr;
  SampleSet samples;
  if (cfg.estimate.samples) {
    samples = make_sample_set(read_matrix_csv(*cfg.estimate.samples));
    if (cfg.has_model) model = &require_model(cfg, cache);
  } else {
    model = &require_model(cfg, cache);
    samples = draw_samples(*model, {cfg.sampling.n, cfg.sampling.distribution, cfg.seed});
  }
  const int p = static_cast<int>(samples.s_cov.rows());
  if (model && model->dim() != p) {
    throw Error(ErrorCode::InvalidInput, "samples have dimension " + std::to_string(p) +
                                             " but the model has " +
                                             std::to_string(model->dim()));
  }

  SymMatrix d = SymMatrix::Identity(p, p);
  if (cfg.estimate.sigma_x) {
    const SymMatrix sx = read_matrix_csv(*cfg.estimate.sigma_x);
    if (sx.rows() != p) throw Error(ErrorCode::InvalidInput, "sigma_x dimension mismatch");
    d = sym_inv(sym_sqrt(sx));
  } else if (cfg.estimate.known_covariance && model) {
    d = model->d_mat;
  }

  const double lambda = cfg.lambda ? *cfg.lambda
                        : p >= 2   ? default_lambda(p, samples.n, cfg.lambda_c)
                                   : 0.0;
  SolverConfig solver = cfg.solver;
  solver.lambda = lambda;

  SolverResult res;
  SymMatrix b_hat;
  IndexSet support;
  switch (cfg.estimate.estimator) {
    case Estimator::L1MLE:
      res = solve(samples.s_cov, d, solver);
      b_hat = res.b_hat;
      support = res.support_hat;
      break;
    case Estimator::GlassoSR:
    case Estimator::Glasso2HR:
      res = glasso(samples.s_cov, lambda, solver);
      b_hat = sym_sqrt(res.b_hat);
      support = cfg.estimate.estimator == Estimator::GlassoSR
                    ? glasso_sr_support(res.b_hat, cfg.estimate.tau)
                    : glasso_2hr_support(res.b_hat, cfg.estimate.tau);
      break;
  }

  write_matrix_csv(out / "b_hat.csv", b_hat);
  {
    auto f = open_out(out / "b_hat.edges");
    write_edge_list(f, support, &b_hat);
  }
  json summary{{"estimator", to_string(cfg.estimate.estimator)},
               {"p", p},
               {"n", samples.n},
               {"lambda", lambda},
               {"iterations", res.iterations},
               {"kkt_residual", res.kkt_residual},
               {"converged", res.converged},
               {"edges", (support.off_diagonal().size()) / 2}};
  if (!cfg.lambda) summary["lambda_c"] = cfg.lambda_c;
  if (model) summary["score"] = to_json(score(b_hat, *model, support));
  write_json(out / "summary.json", summary);
  log << to_string(cfg.estimate.estimator) << ": " << res.iterations
      << " iterations, kkt residual " << res.kkt_residual << ", "
      << summary["edges"].get<std::size_t>() << " edges\n";
  if (!res.converged) {
    log << "warning: solver did not reach the KKT tolerance; outputs are partial\n";
    return kNotConverged;
  }
  return kOk;
}

int cmd_diagnose(const CliConfig& cfg, const fs::path& out, std::ostream& log) {
  std::optional<NetworkModel> cache;
  const auto& model = require_model(cfg, cache);
  const auto report =
      theorem1_constants(model, cfg.diagnostics.sigma, cfg.diagnostics.tau_exponent);
  const json j = to_json(report);
  write_json(out / "diagnostics.json", j);
  log << j.dump(2) << '\n';
  return kOk;
}

int cmd_experiment(const CliConfig& cfg, const fs::path& out, std::ostream& log) {
  if (!cfg.raw.contains("experiment")) {
    throw Error(ErrorCode::InvalidInput, "experiment command needs an experiment section");
  }
  if (!cfg.has_model) throw Error(ErrorCode::InvalidInput, "experiment needs a model section");
  const auto result = run_experiment(cfg.experiment);
  {
    auto f = open_out(out / "results.csv");
    write_results_csv(f, result);
    if (!f) throw Error(ErrorCode::Io, "failed writing results.csv");
  }
  write_json(out / "aggregates.json", aggregates_json(result, cfg.raw));
  for (const auto& [e, c] : result.lambda_constants) {
    log << to_string(e) << ": c = " << c << '\n';
  }
  log << "wrote " << result.rows.size() << " rows to " << (out / "results.csv").string()
      << '\n';
  return kOk;
}

}  // namespace

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Sparse balance-matrix estimation from node potentials", "balnet"};
  app.require_subcommand(1);
  GlobalFlags g;
  app.add_option("--config", g.config, "JSON config file");
  app.add_option("--out", g.out, "Output directory")->capture_default_str();
  app.add_option("--seed", g.seed, "Random seed");
  app.add_option("--threads", g.threads, "Worker threads for experiments")
      ->check(CLI::PositiveNumber);

  ModelFlags mf;
  SamplingFlags sf;
  EstimateFlags ef;
  DiagnoseFlags df;
  ExperimentFlags xf;

  auto* generate = app.add_subcommand("generate", "Write B*, Σ_X and the true edge list");
  auto* sample = app.add_subcommand("sample", "Draw node-potential samples");
  auto* estimate = app.add_subcommand("estimate", "Estimate B from samples");
  auto* diagnose = app.add_subcommand("diagnose", "Incoherence, regularity and constants");
  auto* experiment = app.add_subcommand("experiment", "Run a sample-size sweep");
  for (auto* cmd : {generate, sample, estimate, diagnose, experiment}) {
    add_model_flags(cmd, mf);
    cmd->fallthrough();
  }
  add_sampling_flags(sample, sf);
  add_sampling_flags(estimate, sf);
  estimate->add_option("--samples", ef.samples, "CSV of samples, one per row");
  estimate->add_option("--sigma-x", ef.sigma_x, "CSV of the injection covariance");
  estimate->add_option("--estimator", ef.estimator, "L1MLE, GLASSO_SR or GLASSO_2HR");
  estimate->add_option("--lambda", ef.lambda, "Absolute regularization weight");
  estimate->add_option("--lambda-c", ef.lambda_c, "λ = c·sqrt(log p / n)");
  estimate->add_option("--tau", ef.tau, "Baseline support threshold");
  estimate->add_flag("--unknown-covariance", ef.unknown_covariance, "Run with D = I");
  diagnose->add_option("--sigma", df.sigma, "Sub-Gaussian parameter");
  diagnose->add_option("--tau-exponent", df.tau_exponent, "Exponent in the probability bound");
  experiment->add_option("--trials", xf.trials, "Trials per sample size");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kOk : kUsage;
  }

  try {
    json doc = json::object();
    fs::path base;
    if (g.config) {
      doc = load_json(*g.config);
      base = fs::absolute(*g.config).parent_path();
    }
    if (!doc.is_object()) throw Error(ErrorCode::InvalidInput, "config must be a JSON object");
    override_leaves(doc, mf);
    override_leaves(doc, sf);
    override_leaves(doc, ef);
    override_leaves(doc, df);
    override_leaves(doc, xf);
    if (g.seed) doc["seed"] = *g.seed;
    if (g.threads) doc["threads"] = *g.threads;
    const CliConfig cfg = parse_config(doc, base);
    const fs::path dir = prepare_out(g.out);

    if (*generate) return cmd_generate(cfg, dir, out);
    if (*sample) return cmd_sample(cfg, dir, out);
    if (*estimate) return cmd_estimate(cfg, dir, out);
    if (*diagnose) return cmd_diagnose(cfg, dir, out);
    return cmd_experiment(cfg, dir, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return e.code() == ErrorCode::UnsupportedSize ? kUnsupportedSize : kUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kUsage;
  }
}

}  // namespace balnet::cli
