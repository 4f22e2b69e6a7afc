#pragma once

// Multi-stage structure-aware reranking of k-NN candidates:
//   1. syntactic compatibility (keep d iff sig_req is a subset of d's
//      signature), falling back to the whole pool when nothing survives;
//   2. trust rescoring s_final = s_sem / ln(guf + epsilon), sorted ascending;
//   3. greedy clone-group deduplication down to k references.

#include <cstddef>
#include <numbers>
#include <vector>

#include "scpatcher/embed.hpp"
#include "scpatcher/error.hpp"
#include "scpatcher/index.hpp"
#include "scpatcher/model.hpp"

namespace scpatcher::rerank {

using embed::Candidate;

enum class ScoreErrorKind { NonPositiveDenominator };
using ScoreError = KindedError<ScoreErrorKind>;

/// e - 1 makes guf = 1 score-neutral: ln(1 + e - 1) = 1.
inline constexpr double kDefaultEpsilon = std::numbers::e - 1.0;
inline constexpr std::size_t kDefaultK = 3;

struct RerankConfig {
  double epsilon = kDefaultEpsilon;
  std::size_t k = kDefaultK;
  std::size_t top_n = embed::kDefaultTopN;

  /// Throws std::invalid_argument when epsilon <= 0, k == 0 or top_n == 0.
  void validate() const;
};

struct QueryContext {
  embed::EmbeddingVector query_vector;
  SignatureFeatures sig_req;  // may be empty
  VulnClass vuln_class = VulnClass::Reentrancy;
};

struct FilterResult {
  std::vector<Candidate> kept;
  bool fallback_used = false;
};

FilterResult filter_syntactic(const std::vector<Candidate>& c_init, const SignatureFeatures& sig_req);

/// s_sem / ln(guf + epsilon); throws ScoreError when the logarithm is <= 0.
double score_trust(double s_sem, std::uint64_t guf, double epsilon);

/// Full three-stage pipeline. Output has at most cfg.k candidates with
/// s_final populated, ordered by (s_final, s_sem, function_id).
std::vector<Candidate> rerank(const std::vector<Candidate>& c_init, const QueryContext& q, const RerankConfig& cfg);

/// Same as rerank() but also reports whether the stage-1 fallback fired.
struct RerankResult {
  std::vector<Candidate> selected;
  bool fallback_used = false;
};
RerankResult rerank_detailed(const std::vector<Candidate>& c_init, const QueryContext& q, const RerankConfig& cfg);

}  // namespace scpatcher::rerank
