#pragma once

#include <cstddef>
#include <utility>
#include <vector>

namespace balnet {

using IndexPair = std::pair<int, int>;

/// Sorted, duplicate-free set of (row, col) positions in a p×p grid.
class IndexSet {
 public:
  IndexSet() = default;

  /// Sorts and deduplicates; throws InvalidInput on out-of-range indices.
  IndexSet(int dim, std::vector<IndexPair> pairs);

  static IndexSet diagonal(int dim);
  static IndexSet full(int dim);

  int dim() const noexcept { return dim_; }
  std::size_t size() const noexcept { return pairs_.size(); }
  bool empty() const noexcept { return pairs_.empty(); }
  const std::vector<IndexPair>& pairs() const noexcept { return pairs_; }
  auto begin() const noexcept { return pairs_.begin(); }
  auto end() const noexcept { return pairs_.end(); }

  bool contains(int row, int col) const noexcept;

  /// Pairs with row != col.
  std::vector<IndexPair> off_diagonal() const;

  /// Complement within [0, dim) × [0, dim).
  IndexSet complement() const;

  /// Membership bitmap laid out row-major, dim*dim entries.
  std::vector<char> mask() const;

  bool is_subset_of(const IndexSet& other) const;

  friend bool operator==(const IndexSet& a, const IndexSet& b) {
    return a.dim_ == b.dim_ && a.pairs_ == b.pairs_;
  }

 private:
  int dim_ = 0;
  std::vector<IndexPair> pairs_;
};

}  // namespace balnet
