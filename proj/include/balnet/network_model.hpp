#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <optional>
#include <vector>

#include "balnet/index_set.hpp"
#include "balnet/linalg.hpp"

namespace balnet {

enum class GraphKind { Chain, Grid, EdgeList };

struct WeightedEdge {
  int i = 0;
  int j = 0;
  double weight = 1.0;
};

struct GraphSpec {
  GraphKind kind = GraphKind::Chain;
  int p = 0;
  std::vector<WeightedEdge> edges;  // EdgeList only
  int grid_rows = 0;                // Grid only
  int grid_cols = 0;

  /// Throws InvalidInput on self-loops, out-of-range indices or a grid
  /// shape that does not match p.
  void validate() const;
};

/// Ground-truth bundle for X = B*·Y with injection covariance Σ_X.
struct NetworkModel {
  SymMatrix b_star;      // B*, positive definite
  SymMatrix sigma_x;     // Σ_X
  SymMatrix d_mat;       // D = Σ_X^{-1/2}
  SymMatrix theta_star;  // Θ* = B* Σ_X⁻¹ B*
  SymMatrix sigma_y;     // Θ*⁻¹ = B*⁻¹ Σ_X B*⁻¹, covariance of Y
  SymMatrix b_star_inv;
  IndexSet support_e;    // off-diagonal support of B* plus every (i, i)
  int degree_d = 0;      // max nonzeros in a row of B*, diagonal included
  int s_offdiag = 0;     // |E(B*)|, both orientations counted

  int dim() const noexcept { return static_cast<int>(b_star.rows()); }
};

/// Assembles a model from B* and Σ_X; both must be symmetric positive definite.
NetworkModel make_model(const SymMatrix& b_star, const SymMatrix& sigma_x);

NetworkModel build_chain(int p, double edge_weight = 1.0, double diag_margin = 1.0);

NetworkModel build_grid(int rows, int cols, double edge_weight = 1.0,
                        double diag_margin = 1.0);

/// laplacian=true builds the weighted Laplacian (off-diagonal −w) and deletes
/// row/column `reduce_node` when given. laplacian=false places the signed
/// weights off the diagonal and sets each diagonal to its absolute row sum
/// plus `diag_margin`.
NetworkModel build_from_edge_list(const GraphSpec& spec, bool laplacian,
                                  std::optional<int> reduce_node,
                                  double diag_margin = 1.0);

/// Dispatches on spec.kind (EdgeList uses the signed-weight construction).
NetworkModel build_model(const GraphSpec& spec, double edge_weight = 1.0,
                         double diag_margin = 1.0);

NetworkModel set_injection_covariance(NetworkModel model, const SymMatrix& sigma_x);

/// Diagonal Σ_X with entries uniform in [0.5, 1.5].
SymMatrix random_diagonal_covariance(int p, std::uint64_t seed);

std::vector<WeightedEdge> chain_edges(int p, double weight = 1.0);
std::vector<WeightedEdge> grid_edges(int rows, int cols, double weight = 1.0);

/// Edge-list text: one `i j [weight]` per line, 0-based, `#` comments.
std::vector<WeightedEdge> parse_edge_list(std::istream& in);
std::vector<WeightedEdge> read_edge_list(const std::filesystem::path& path);
void write_edge_list(std::ostream& out, const IndexSet& support,
                     const SymMatrix* weights = nullptr);

/// GraphSpec for an edge list; p defaults to one past the largest index.
GraphSpec edge_list_spec(std::vector<WeightedEdge> edges, int p = 0);

}  // namespace balnet
