#include "balnet/index_set.hpp"

#include <algorithm>
#include <string>

#include "balnet/error.hpp"

namespace balnet {

IndexSet::IndexSet(int dim, std::vector<IndexPair> pairs)
    : dim_(dim), pairs_(std::move(pairs)) {
  if (dim < 0) {
    throw Error(ErrorCode::InvalidInput, "negative index set dimension");
  }
  for (const auto& [r, c] : pairs_) {
    if (r < 0 || r >= dim || c < 0 || c >= dim) {
      throw Error(ErrorCode::InvalidInput,
                  "index pair (" + std::to_string(r) + ", " +
                      std::to_string(c) + ") outside dimension " +
                      std::to_string(dim));
    }
  }
  std::sort(pairs_.begin(), pairs_.end());
  pairs_.erase(std::unique(pairs_.begin(), pairs_.end()), pairs_.end());
}

IndexSet IndexSet::diagonal(int dim) {
  std::vector<IndexPair> pairs;
  pairs.reserve(dim);
  for (int i = 0; i < dim; ++i) pairs.emplace_back(i, i);
  return IndexSet(dim, std::move(pairs));
}

IndexSet IndexSet::full(int dim) {
  std::vector<IndexPair> pairs;
  pairs.reserve(static_cast<std::size_t>(dim) * dim);
  for (int i = 0; i < dim; ++i)
    for (int j = 0; j < dim; ++j) pairs.emplace_back(i, j);
  return IndexSet(dim, std::move(pairs));
}

bool IndexSet::contains(int row, int col) const noexcept {
  return std::binary_search(pairs_.begin(), pairs_.end(), IndexPair{row, col});
}

std::vector<IndexPair> IndexSet::off_diagonal() const {
  std::vector<IndexPair> out;
  for (const auto& pr : pairs_)
    if (pr.first != pr.second) out.push_back(pr);
  return out;
}

IndexSet IndexSet::complement() const {
  const auto in = mask();
  std::vector<IndexPair> out;
  for (int i = 0; i < dim_; ++i)
    for (int j = 0; j < dim_; ++j)
      if (!in[static_cast<std::size_t>(i) * dim_ + j]) out.emplace_back(i, j);
  return IndexSet(dim_, std::move(out));
}

std::vector<char> IndexSet::mask() const {
  std::vector<char> m(static_cast<std::size_t>(dim_) * dim_, 0);
  for (const auto& [r, c] : pairs_) m[static_cast<std::size_t>(r) * dim_ + c] = 1;
  return m;
}

bool IndexSet::is_subset_of(const IndexSet& other) const {
  return dim_ == other.dim_ &&
         std::includes(other.pairs_.begin(), other.pairs_.end(),
                       pairs_.begin(), pairs_.end());
}

}  // namespace balnet
