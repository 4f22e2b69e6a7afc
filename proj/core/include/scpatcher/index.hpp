#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scpatcher/embed.hpp"
#include "scpatcher/error.hpp"
#include "scpatcher/model.hpp"

namespace scpatcher::embed {

enum class IndexErrorKind { EmptyIndex, InvalidArgument };
using IndexError = KindedError<IndexErrorKind>;

inline constexpr std::size_t kDefaultTopN = 50;

/// A retrieved reference. `s_sem` is the Euclidean distance to the query;
/// `s_final` is filled in by the reranker.
struct Candidate {
  std::string function_id;
  double s_sem = 0.0;
  std::uint64_t guf = 1;
  std::optional<std::string> clone_id;
  SignatureFeatures signature;
  std::optional<double> s_final;

  friend bool operator==(const Candidate&, const Candidate&) = default;
};

struct IndexEntry {
  std::string function_id;
  EmbeddingVector vector;
  std::uint64_t guf = 1;
  std::optional<std::string> clone_id;
  SignatureFeatures signature;
};

/// Exact linear-scan k-NN. Immutable once built; knn() is safe to call
/// concurrently.
class VectorIndex {
 public:
  VectorIndex() = default;
  explicit VectorIndex(std::vector<IndexEntry> entries);

  std::size_t size() const noexcept { return entries_.size(); }
  std::size_t dimension() const noexcept { return dimension_; }
  const std::vector<IndexEntry>& entries() const noexcept { return entries_; }

  /// min(n, size()) candidates, ascending by (s_sem, function_id).
  std::vector<Candidate> knn(const EmbeddingVector& query, std::size_t n = kDefaultTopN) const;

 private:
  std::vector<IndexEntry> entries_;
  std::size_t dimension_ = 0;
};

}  // namespace scpatcher::embed
