#include "scpatcher/index.hpp"

#include <algorithm>
#include <numeric>
#include <tuple>

namespace scpatcher::embed {

VectorIndex::VectorIndex(std::vector<IndexEntry> entries) : entries_(std::move(entries)) {
  if (!entries_.empty()) dimension_ = entries_.front().vector.dimension();
  for (const auto& e : entries_) {
    if (e.vector.dimension() != dimension_) {
      throw DimensionMismatch("DimensionMismatch: index entry " + e.function_id + " has dimension " +
                              std::to_string(e.vector.dimension()) + ", expected " + std::to_string(dimension_));
    }
  }
}

std::vector<Candidate> VectorIndex::knn(const EmbeddingVector& query, std::size_t n) const {
  if (entries_.empty()) throw IndexError(IndexErrorKind::EmptyIndex, "EmptyIndex: knn on an empty index");
  if (n == 0) throw IndexError(IndexErrorKind::InvalidArgument, "knn: n must be >= 1");
  if (query.dimension() != dimension_) {
    throw DimensionMismatch("DimensionMismatch: query has dimension " + std::to_string(query.dimension()) +
                            ", index has " + std::to_string(dimension_));
  }
  std::vector<double> dist(entries_.size());
  for (std::size_t i = 0; i < entries_.size(); ++i) dist[i] = semantic_distance(query, entries_[i].vector);

  std::vector<std::size_t> order(entries_.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  const std::size_t take = std::min(n, entries_.size());
  auto less = [&](std::size_t a, std::size_t b) {
    return std::tie(dist[a], entries_[a].function_id) < std::tie(dist[b], entries_[b].function_id);
  };
  std::partial_sort(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(take), order.end(), less);

  std::vector<Candidate> out;
  out.reserve(take);
  for (std::size_t r = 0; r < take; ++r) {
    const IndexEntry& e = entries_[order[r]];
    out.push_back(Candidate{e.function_id, dist[order[r]], e.guf, e.clone_id, e.signature, std::nullopt});
  }
  return out;
}

}  // namespace scpatcher::embed
