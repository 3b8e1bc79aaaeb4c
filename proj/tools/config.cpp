#include "config.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <set>

#include "balnet/error.hpp"

namespace balnet::cli {

namespace {

[[noreturn]] void fail(const std::string& msg) { throw Error(ErrorCode::InvalidInput, msg); }

// Typed, key-checked view of one JSON object.
class Section {
 public:
  Section(const json& j, std::string path) : j_(j), path_(std::move(path)) {
    if (!j_.is_object()) fail(path_ + " must be an object");
  }

  void allow(std::initializer_list<const char*> keys) const {
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& [k, v] : j_.items()) {
      if (!ok.count(k)) fail("unknown key '" + where(k) + "'");
    }
  }

  bool has(const char* key) const { return j_.contains(key) && !j_.at(key).is_null(); }
  const json& at(const char* key) const { return j_.at(key); }
  std::string where(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }

  void read(const char* key, double& out) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number()) fail(where(key) + " must be a number");
    out = v.get<double>();
  }
  void read(const char* key, int& out) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_integer()) fail(where(key) + " must be an integer");
    const auto x = v.get<long long>();
    if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max()) {
      fail(where(key) + " is out of range");
    }
    out = static_cast<int>(x);
  }
  void read(const char* key, std::uint64_t& out) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_number_unsigned()) fail(where(key) + " must be a non-negative integer");
    out = v.get<std::uint64_t>();
  }
  void read(const char* key, bool& out) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) fail(where(key) + " must be a boolean");
    out = v.get<bool>();
  }
  void read(const char* key, std::string& out) const {
    if (!has(key)) return;
    const auto& v = j_.at(key);
    if (!v.is_string()) fail(where(key) + " must be a string");
    out = v.get<std::string>();
  }

 private:
  const json& j_;
  std::string path_;
};

std::filesystem::path resolve(const std::filesystem::path& base, const std::string& p) {
  const std::filesystem::path path(p);
  return path.is_absolute() || base.empty() ? path : base / path;
}

ModelSpec parse_model(const Section& s, const std::filesystem::path& base) {
  s.allow({"kind", "p", "rows", "cols", "edge_weight", "diag_margin", "edge_list", "laplacian",
           "reduce_node", "covariance", "covariance_seed"});
  ModelSpec m;
  std::string kind = "chain";
  s.read("kind", kind);
  if (kind == "chain") {
    m.kind = GraphKind::Chain;
  } else if (kind == "grid") {
    m.kind = GraphKind::Grid;
  } else if (kind == "edge_list") {
    m.kind = GraphKind::EdgeList;
  } else {
    fail("model.kind must be chain, grid or edge_list");
  }
  s.read("p", m.p);
  s.read("rows", m.rows);
  s.read("cols", m.cols);
  s.read("edge_weight", m.edge_weight);
  s.read("diag_margin", m.diag_margin);
  s.read("laplacian", m.laplacian);
  if (s.has("edge_list")) {
    const auto& v = s.at("edge_list");
    if (v.is_string()) {
      m.edge_files.push_back(resolve(base, v.get<std::string>()).string());
    } else if (v.is_array()) {
      for (const auto& e : v) {
        if (!e.is_string()) fail("model.edge_list entries must be strings");
        m.edge_files.push_back(resolve(base, e.get<std::string>()).string());
      }
    } else {
      fail("model.edge_list must be a string or an array of strings");
    }
  }
  if (s.has("reduce_node")) {
    int r = 0;
    s.read("reduce_node", r);
    m.reduce_node = r;
  }
  std::string cov = "identity";
  s.read("covariance", cov);
  if (cov == "identity") {
    m.covariance = CovarianceMode::Identity;
  } else if (cov == "diagonal_random") {
    m.covariance = CovarianceMode::DiagonalRandom;
  } else {
    fail("model.covariance must be identity or diagonal_random");
  }
  s.read("covariance_seed", m.covariance_seed);

  switch (m.kind) {
    case GraphKind::Chain:
      if (m.p < 1) fail("chain model needs model.p >= 1");
      break;
    case GraphKind::Grid:
      if (m.rows < 1 || m.cols < 1) fail("grid model needs model.rows and model.cols >= 1");
      break;
    case GraphKind::EdgeList:
      if (m.edge_files.empty()) fail("edge_list model needs model.edge_list");
      break;
  }
  return m;
}

Distribution parse_distribution(const Section& s) {
  Distribution d;
  std::string name = "gaussian";
  s.read("distribution", name);
  if (name == "gaussian") {
    d.kind = DistributionKind::Gaussian;
  } else if (name == "student_t") {
    d.kind = DistributionKind::StudentT;
  } else {
    fail("sampling.distribution must be gaussian or student_t");
  }
  s.read("dof", d.dof);
  return d;
}

std::vector<Estimator> parse_estimators(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where + " must be a non-empty array");
  std::vector<Estimator> out;
  for (const auto& e : v) {
    if (!e.is_string()) fail(where + " entries must be strings");
    const Estimator est = parse_estimator(e.get<std::string>());
    for (const auto seen : out)
      if (seen == est) fail(where + " lists " + std::string(to_string(est)) + " twice");
    out.push_back(est);
  }
  return out;
}

void parse_experiment(const Section& s, CliConfig& cfg) {
  s.allow({"n_grid", "geometric", "trials", "estimators", "lambda_constants",
           "pilot_candidates", "pilot_trials", "pilot_range", "tau", "record_timing"});
  auto& e = cfg.experiment;
  if (s.has("n_grid") == s.has("geometric")) {
    fail("experiment needs exactly one of n_grid and geometric");
  }
  if (s.has("n_grid")) {
    const auto& v = s.at("n_grid");
    if (!v.is_array()) fail("experiment.n_grid must be an array");
    e.n_grid.clear();
    for (const auto& x : v) {
      if (!x.is_number_integer()) fail("experiment.n_grid entries must be integers");
      e.n_grid.push_back(x.get<int>());
    }
  } else {
    const Section g(s.at("geometric"), "experiment.geometric");
    g.allow({"min", "max", "points"});
    int lo = 0, hi = 0, points = 0;
    g.read("min", lo);
    g.read("max", hi);
    g.read("points", points);
    e.n_grid = geometric_grid(lo, hi, points);
  }
  s.read("trials", e.trials);
  if (s.has("estimators")) e.estimators = parse_estimators(s.at("estimators"), "experiment.estimators");
  if (s.has("lambda_constants")) {
    const auto& lc = s.at("lambda_constants");
    if (!lc.is_object()) fail("experiment.lambda_constants must be an object");
    for (const auto& [name, v] : lc.items()) {
      LambdaChoice choice;
      if (v.is_string() && v.get<std::string>() == "pilot") {
        choice.pilot = true;
      } else if (v.is_number()) {
        choice.scale_c = v.get<double>();
      } else {
        fail("experiment.lambda_constants." + name + " must be a number or \"pilot\"");
      }
      e.lambda_constants[parse_estimator(name)] = choice;
    }
  }
  if (s.has("pilot_candidates")) {
    const auto& v = s.at("pilot_candidates");
    if (!v.is_array() || v.empty()) fail("experiment.pilot_candidates must be a non-empty array");
    e.pilot_candidates.clear();
    for (const auto& x : v) {
      if (!x.is_number()) fail("experiment.pilot_candidates entries must be numbers");
      e.pilot_candidates.push_back(x.get<double>());
    }
  }
  s.read("pilot_trials", e.pilot_trials);
  std::string range = "full";
  s.read("pilot_range", range);
  if (range == "full") {
    e.pilot_range = PilotRange::Full;
  } else if (range == "middle_third") {
    e.pilot_range = PilotRange::MiddleThird;
  } else {
    fail("experiment.pilot_range must be full or middle_third");
  }
  s.read("tau", e.tau);
  s.read("record_timing", e.record_timing);
}

json finite_or_null(double v) { return std::isfinite(v) ? json(v) : json(nullptr); }

}  // namespace

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open config '" + path.string() + "'");
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    fail("config '" + path.string() + "' is not valid JSON: " + e.what());
  }
}

CliConfig parse_config(const json& doc, const std::filesystem::path& base_dir) {
  CliConfig cfg;
  cfg.raw = doc;
  const Section top(doc, "");
  top.allow({"model", "sampling", "solver", "estimate", "diagnostics", "experiment", "seed",
             "threads"});
  top.read("seed", cfg.seed);
  top.read("threads", cfg.threads);
  if (cfg.threads < 1) fail("threads must be >= 1");

  if (top.has("model")) {
    cfg.has_model = true;
    cfg.model = parse_model(Section(doc.at("model"), "model"), base_dir);
  }

  if (top.has("sampling")) {
    const Section s(doc.at("sampling"), "sampling");
    s.allow({"n", "distribution", "dof"});
    s.read("n", cfg.sampling.n);
    cfg.sampling.distribution = parse_distribution(s);
  }
  SamplingSpec{cfg.sampling.n, cfg.sampling.distribution, cfg.seed}.validate();

  if (top.has("solver")) {
    const Section s(doc.at("solver"), "solver");
    s.allow({"lambda", "lambda_c", "max_iters", "kkt_tol", "rel_obj_tol", "backtrack_beta",
             "init_step", "acceleration"});
    if (s.has("lambda")) {
      double l = 0.0;
      s.read("lambda", l);
      cfg.lambda = l;
    }
    s.read("lambda_c", cfg.lambda_c);
    s.read("max_iters", cfg.solver.max_iters);
    s.read("kkt_tol", cfg.solver.kkt_tol);
    s.read("rel_obj_tol", cfg.solver.rel_obj_tol);
    s.read("backtrack_beta", cfg.solver.backtrack_beta);
    s.read("init_step", cfg.solver.init_step);
    s.read("acceleration", cfg.solver.acceleration);
  }
  if (cfg.lambda && !(*cfg.lambda >= 0.0)) fail("solver.lambda must be >= 0");
  if (!(cfg.lambda_c > 0.0)) fail("solver.lambda_c must be > 0");
  cfg.solver.validate();

  if (top.has("estimate")) {
    const Section s(doc.at("estimate"), "estimate");
    s.allow({"estimator", "samples", "sigma_x", "tau", "known_covariance"});
    std::string name = "L1MLE";
    s.read("estimator", name);
    cfg.estimate.estimator = parse_estimator(name);
    std::string path;
    if (s.has("samples")) {
      s.read("samples", path);
      cfg.estimate.samples = resolve(base_dir, path);
    }
    if (s.has("sigma_x")) {
      s.read("sigma_x", path);
      cfg.estimate.sigma_x = resolve(base_dir, path);
    }
    s.read("tau", cfg.estimate.tau);
    s.read("known_covariance", cfg.estimate.known_covariance);
    if (!(cfg.estimate.tau >= 0.0)) fail("estimate.tau must be >= 0");
  }

  if (top.has("diagnostics")) {
    const Section s(doc.at("diagnostics"), "diagnostics");
    s.allow({"sigma", "tau_exponent"});
    s.read("sigma", cfg.diagnostics.sigma);
    s.read("tau_exponent", cfg.diagnostics.tau_exponent);
    if (!(cfg.diagnostics.sigma > 0.0)) fail("diagnostics.sigma must be > 0");
    if (!(cfg.diagnostics.tau_exponent > 0.0)) fail("diagnostics.tau_exponent must be > 0");
  }

  auto& e = cfg.experiment;
  e.model = cfg.model;
  e.distribution = cfg.sampling.distribution;
  e.base_seed = cfg.seed;
  e.solver = cfg.solver;
  e.threads = cfg.threads;
  e.known_covariance = cfg.estimate.known_covariance;
  if (top.has("experiment")) {
    parse_experiment(Section(doc.at("experiment"), "experiment"), cfg);
    e.validate();
  }
  return cfg;
}

json to_json(const DiagnosticsReport& r) {
  json j;
  j["p"] = r.p;
  j["degree_d"] = r.degree_d;
  j["alpha"] = r.alpha;
  j["a1_holds"] = r.a1_holds;
  j["a2_lhs"] = r.a2_lhs;
  j["a2_rhs"] = r.a2_rhs;
  j["a2_holds"] = r.a2_holds;
  j["a3_rownorm"] = r.a3_rownorm;
  j["nu_gamma_inv"] = r.nu_gamma_inv;
  j["nu_d2"] = r.nu_d2;
  j["nu_b"] = r.nu_b;
  j["nu_b_inv"] = r.nu_b_inv;
  j["max_sigma_ii"] = r.max_sigma_ii;
  j["sigma"] = r.sigma;
  j["tau_exponent"] = r.tau_exponent;
  j["c0"] = finite_or_null(r.c0);
  j["c1"] = finite_or_null(r.c1);
  j["c2"] = finite_or_null(r.c2);
  j["n_threshold"] = finite_or_null(r.n_threshold);
  j["lemma4_radius"] = r.lemma4_radius ? finite_or_null(*r.lemma4_radius) : json(nullptr);
  return j;
}

json to_json(const TrialScore& s) {
  return {{"exact_recovery", s.exact_recovery}, {"sign_consistent", s.sign_consistent},
          {"err_inf", s.err_inf},               {"err_fro", s.err_fro},
          {"err_op2", s.err_op2},               {"precision", s.support_precision},
          {"recall", s.support_recall}};
}

json aggregates_json(const ExperimentResult& result, const json& spec_echo) {
  json out;
  out["spec"] = spec_echo;
  json constants = json::object();
  for (const auto& [e, c] : result.lambda_constants) constants[to_string(e)] = c;
  out["lambda_constants"] = constants;
  json pilot = json::object();
  for (const auto& [e, scores] : result.pilot_scores) {
    json arr = json::array();
    for (const auto& [c, rate] : scores) arr.push_back({{"c", c}, {"success_prob", rate}});
    pilot[to_string(e)] = arr;
  }
  out["pilot_scores"] = pilot;
  json aggs = json::array();
  for (const auto& a : result.aggregates) {
    aggs.push_back({{"estimator", to_string(a.estimator)},
                    {"n", a.n},
                    {"trials", a.trials},
                    {"converged", a.converged},
                    {"lambda", a.lambda},
                    {"success_prob", a.success_prob},
                    {"sign_consistency_prob", a.sign_consistency_prob},
                    {"mean_err_inf", a.mean_err_inf},
                    {"mean_err_fro", a.mean_err_fro},
                    {"mean_err_op2", a.mean_err_op2}});
  }
  out["aggregates"] = aggs;
  return out;
}

}  // namespace balnet::cli
