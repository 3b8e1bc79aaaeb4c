#include "balnet/network_model.hpp"

#include <fstream>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>
#include <string>

#include "balnet/error.hpp"

namespace balnet {

namespace {

void check_edges(int p, const std::vector<WeightedEdge>& edges) {
  for (const auto& e : edges) {
    if (e.i < 0 || e.j < 0 || e.i >= p || e.j >= p) {
      throw Error(ErrorCode::InvalidInput,
                  "edge (" + std::to_string(e.i) + ", " + std::to_string(e.j) +
                      ") outside [0, " + std::to_string(p) + ")");
    }
    if (e.i == e.j) {
      throw Error(ErrorCode::InvalidInput,
                  "self-loop at node " + std::to_string(e.i));
    }
    if (!std::isfinite(e.weight)) {
      throw Error(ErrorCode::InvalidInput, "non-finite edge weight");
    }
  }
}

SymMatrix signed_weight_matrix(int p, const std::vector<WeightedEdge>& edges,
                               double diag_margin) {
  SymMatrix b = SymMatrix::Zero(p, p);
  for (const auto& e : edges) {
    b(e.i, e.j) += e.weight;
    b(e.j, e.i) += e.weight;
  }
  for (int i = 0; i < p; ++i) b(i, i) = b.row(i).cwiseAbs().sum() + diag_margin;
  return b;
}

}  // namespace

void GraphSpec::validate() const {
  if (p < 1) throw Error(ErrorCode::InvalidInput, "graph needs p >= 1");
  if (kind == GraphKind::Grid && grid_rows * grid_cols != p) {
    throw Error(ErrorCode::InvalidInput, "grid rows*cols must equal p");
  }
  check_edges(p, edges);
}

NetworkModel make_model(const SymMatrix& b_star, const SymMatrix& sigma_x) {
  require_symmetric(b_star, "B*");
  require_symmetric(sigma_x, "Σ_X");
  if (b_star.rows() != sigma_x.rows()) {
    throw Error(ErrorCode::InvalidInput, "B* and Σ_X dimensions differ");
  }
  const int p = static_cast<int>(b_star.rows());

  const auto b_eig = sym_eigen(b_star);
  require_positive_definite(b_eig, "B*");
  const auto s_eig = sym_eigen(sigma_x);
  require_positive_definite(s_eig, "Σ_X");

  NetworkModel m;
  m.b_star = (b_star + b_star.transpose()) * 0.5;
  m.sigma_x = (sigma_x + sigma_x.transpose()) * 0.5;
  m.b_star_inv = sym_inv(b_eig);
  m.d_mat = apply_spectral(s_eig, [](double v) { return 1.0 / std::sqrt(v); });
  const SymMatrix sigma_x_inv = sym_inv(s_eig);
  SymMatrix theta = m.b_star * sigma_x_inv * m.b_star;
  m.theta_star = (theta + theta.transpose()) * 0.5;
  SymMatrix sigma_y = m.b_star_inv * m.sigma_x * m.b_star_inv;
  m.sigma_y = (sigma_y + sigma_y.transpose()) * 0.5;

  std::vector<IndexPair> support;
  int degree = 0;
  int s = 0;
  for (int i = 0; i < p; ++i) {
    int row_nnz = 0;
    for (int j = 0; j < p; ++j) {
      if (i == j) {
        support.emplace_back(i, i);
        if (m.b_star(i, i) != 0.0) ++row_nnz;
      } else if (m.b_star(i, j) != 0.0) {
        support.emplace_back(i, j);
        ++row_nnz;
        ++s;
      }
    }
    degree = std::max(degree, row_nnz);
  }
  m.support_e = IndexSet(p, std::move(support));
  m.degree_d = degree;
  m.s_offdiag = s;
  return m;
}

std::vector<WeightedEdge> chain_edges(int p, double weight) {
  std::vector<WeightedEdge> edges;
  for (int i = 0; i + 1 < p; ++i) edges.push_back({i, i + 1, weight});
  return edges;
}

std::vector<WeightedEdge> grid_edges(int rows, int cols, double weight) {
  std::vector<WeightedEdge> edges;
  for (int r = 0; r < rows; ++r) {
    for (int c = 0; c < cols; ++c) {
      const int node = r * cols + c;
      if (c + 1 < cols) edges.push_back({node, node + 1, weight});
      if (r + 1 < rows) edges.push_back({node, node + cols, weight});
    }
  }
  return edges;
}

NetworkModel build_chain(int p, double edge_weight, double diag_margin) {
  if (p < 2) throw Error(ErrorCode::InvalidInput, "chain needs p >= 2");
  if (!(edge_weight > 0) || !(diag_margin > 0)) {
    throw Error(ErrorCode::InvalidInput, "edge_weight and diag_margin must be > 0");
  }
  const SymMatrix b = signed_weight_matrix(p, chain_edges(p, edge_weight), diag_margin);
  return make_model(b, SymMatrix::Identity(p, p));
}

NetworkModel build_grid(int rows, int cols, double edge_weight, double diag_margin) {
  if (rows < 1 || cols < 1 || rows * cols < 2) {
    throw Error(ErrorCode::InvalidInput, "grid needs at least two nodes");
  }
  if (!(edge_weight > 0) || !(diag_margin > 0)) {
    throw Error(ErrorCode::InvalidInput, "edge_weight and diag_margin must be > 0");
  }
  const int p = rows * cols;
  const SymMatrix b =
      signed_weight_matrix(p, grid_edges(rows, cols, edge_weight), diag_margin);
  return make_model(b, SymMatrix::Identity(p, p));
}

NetworkModel build_from_edge_list(const GraphSpec& spec, bool laplacian,
                                  std::optional<int> reduce_node,
                                  double diag_margin) {
  spec.validate();
  const int p = spec.p;
  SymMatrix b;
  if (laplacian) {
    b = SymMatrix::Zero(p, p);
    for (const auto& e : spec.edges) {
      b(e.i, e.j) -= e.weight;
      b(e.j, e.i) -= e.weight;
      b(e.i, e.i) += e.weight;
      b(e.j, e.j) += e.weight;
    }
  } else {
    if (!(diag_margin > 0)) {
      throw Error(ErrorCode::InvalidInput, "diag_margin must be > 0");
    }
    b = signed_weight_matrix(p, spec.edges, diag_margin);
  }
  if (reduce_node) {
    const int k = *reduce_node;
    if (k < 0 || k >= p || p < 2) {
      throw Error(ErrorCode::InvalidInput, "reduce_node out of range");
    }
    SymMatrix reduced(p - 1, p - 1);
    for (int i = 0, ri = 0; i < p; ++i) {
      if (i == k) continue;
      for (int j = 0, rj = 0; j < p; ++j) {
        if (j == k) continue;
        reduced(ri, rj++) = b(i, j);
      }
      ++ri;
    }
    b = std::move(reduced);
  }
  const int q = static_cast<int>(b.rows());
  return make_model(b, SymMatrix::Identity(q, q));
}

NetworkModel build_model(const GraphSpec& spec, double edge_weight, double diag_margin) {
  switch (spec.kind) {
    case GraphKind::Chain:
      return build_chain(spec.p, edge_weight, diag_margin);
    case GraphKind::Grid:
      spec.validate();
      return build_grid(spec.grid_rows, spec.grid_cols, edge_weight, diag_margin);
    case GraphKind::EdgeList:
      return build_from_edge_list(spec, false, std::nullopt, diag_margin);
  }
  throw Error(ErrorCode::InvalidInput, "unknown graph kind");
}

NetworkModel set_injection_covariance(NetworkModel model, const SymMatrix& sigma_x) {
  if (sigma_x.rows() != model.b_star.rows() || sigma_x.cols() != model.b_star.cols()) {
    throw Error(ErrorCode::InvalidInput, "Σ_X dimension does not match B*");
  }
  return make_model(model.b_star, sigma_x);
}

SymMatrix random_diagonal_covariance(int p, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  SymMatrix s = SymMatrix::Zero(p, p);
  for (int i = 0; i < p; ++i) {
    // 53-bit uniform in [0, 1), spelled out so the draw is portable.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;
    s(i, i) = 0.5 + u;
  }
  return s;
}

std::vector<WeightedEdge> parse_edge_list(std::istream& in) {
  std::vector<WeightedEdge> edges;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream ls(line);
    WeightedEdge e;
    if (!(ls >> e.i)) {
      ls.clear();
      std::string rest;
      if (ls >> rest) {
        throw Error(ErrorCode::InvalidInput,
                    "edge list line " + std::to_string(lineno) + ": expected `i j [weight]`");
      }
      continue;  // blank or comment-only
    }
    if (!(ls >> e.j)) {
      throw Error(ErrorCode::InvalidInput,
                  "edge list line " + std::to_string(lineno) + ": missing second index");
    }
    if (!(ls >> e.weight)) {
      e.weight = 1.0;
      ls.clear();
    }
    std::string extra;
    if (ls >> extra) {
      throw Error(ErrorCode::InvalidInput,
                  "edge list line " + std::to_string(lineno) + ": trailing token '" + extra + "'");
    }
    edges.push_back(e);
  }
  return edges;
}

std::vector<WeightedEdge> read_edge_list(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Io, "cannot open edge list " + path.string());
  return parse_edge_list(in);
}

void write_edge_list(std::ostream& out, const IndexSet& support, const SymMatrix* weights) {
  out << std::setprecision(17);
  for (const auto& [i, j] : support) {
    if (i >= j) continue;
    out << i << ' ' << j;
    if (weights) out << ' ' << (*weights)(i, j);
    out << '\n';
  }
}

GraphSpec edge_list_spec(std::vector<WeightedEdge> edges, int p) {
  GraphSpec spec;
  spec.kind = GraphKind::EdgeList;
  int max_index = -1;
  for (const auto& e : edges) max_index = std::max({max_index, e.i, e.j});
  spec.p = p > 0 ? p : max_index + 1;
  spec.edges = std::move(edges);
  return spec;
}

}  // namespace balnet
