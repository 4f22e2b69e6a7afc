#pragma once

// Two-stage repair: knowledge-guided generation, then Chain-of-Thought
// generation fed with the verifier's feedback when the first stage fails.

#include <cstddef>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

#include "scpatcher/embed.hpp"
#include "scpatcher/ingest.hpp"
#include "scpatcher/kb.hpp"
#include "scpatcher/llm.hpp"
#include "scpatcher/model.hpp"
#include "scpatcher/prompt.hpp"
#include "scpatcher/rerank.hpp"
#include "scpatcher/verify.hpp"

namespace scpatcher::repair {

struct RepairConfig {
  std::size_t k = rerank::kDefaultK;
  std::size_t top_n = embed::kDefaultTopN;
  double epsilon = rerank::kDefaultEpsilon;
  std::uint32_t stage1_attempts = 1;
  std::uint32_t stage2_attempts = 1;
  GenerateOptions llm;
  verify::CompileConfig compile;

  /// Throws std::invalid_argument on zero attempts or an invalid rerank setup.
  void validate() const;
  rerank::RerankConfig rerank_config() const { return {epsilon, k, top_n}; }
};

struct BackendSpec {
  enum class Kind { Remote, Mock } kind = Kind::Mock;
  std::filesystem::path mock_script;
  std::uint64_t seed = 0;
};

/// Remote backends read their endpoint from the environment.
std::unique_ptr<ChatBackend> make_backend(const BackendSpec& spec);

struct Retrieval {
  std::vector<embed::Candidate> pool;      // k-NN result, before reranking
  std::vector<embed::Candidate> selected;  // reranked references
  bool fallback_used = false;
};

class Repairer {
 public:
  /// Keeps references to every argument; they must outlive the Repairer.
  /// A null detector selects the built-in heuristics.
  Repairer(const kg::KnowledgeBase& kb, const embed::EmbeddingProvider& provider, const ChatBackend& backend,
           RepairConfig cfg, const verify::Detector* detector = nullptr);
  Repairer(const Repairer&) = delete;
  Repairer& operator=(const Repairer&) = delete;

  const RepairConfig& config() const noexcept { return cfg_; }

  Retrieval retrieve(const FunctionUnit& fn, VulnClass vuln_class) const;

  /// report.function_id must name a function of `contract`; otherwise throws
  /// std::invalid_argument. Backend and verifier failures land in diagnostics.
  RepairOutcome repair(const ingest::SourceUnit& contract, const VulnerabilityReport& report) const;

 private:
  const kg::KnowledgeBase& kb_;
  const embed::EmbeddingProvider& provider_;
  const ChatBackend& backend_;
  RepairConfig cfg_;
  verify::HeuristicDetector builtin_;
  const verify::Detector& detector_;
  embed::VectorIndex index_;
};

}  // namespace scpatcher::repair
