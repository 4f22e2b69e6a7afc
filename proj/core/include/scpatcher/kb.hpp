#pragma once

// The knowledge base: property graph + clone table + per-function embeddings
// + canonical hashes of the ingested source files. On-disk layout is
// documented in docs/kb-format.md.

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "scpatcher/embed.hpp"
#include "scpatcher/error.hpp"
#include "scpatcher/graph.hpp"
#include "scpatcher/index.hpp"

namespace scpatcher::kg {

enum class FormatErrorKind { BadMagic, VersionMismatch, Truncated, Corrupt };
using FormatError = KindedError<FormatErrorKind>;

inline constexpr std::uint16_t kKbFormatVersion = 1;

struct EmbedderInfo {
  std::string name = std::string(embed::kHashingEmbedderName);
  std::uint32_t dimension = static_cast<std::uint32_t>(embed::kDefaultDimension);

  friend bool operator==(const EmbedderInfo&, const EmbedderInfo&) = default;
};

struct SourceRecord {
  std::string path;            // relative to the corpus root
  std::string canonical_hash;  // sha256 of the comment/whitespace-free token form

  friend bool operator==(const SourceRecord&, const SourceRecord&) = default;
};

struct KnowledgeBase {
  PropertyGraph graph;
  CloneGroupTable clones;
  EmbedderInfo embedder;
  std::map<std::string, embed::EmbeddingVector> vectors;  // function id -> embedding
  std::vector<SourceRecord> sources;                      // sorted by path

  /// Exact index over every embedded function, carrying guf/clone/signature.
  embed::VectorIndex make_index() const;

  friend bool operator==(const KnowledgeBase&, const KnowledgeBase&) = default;
};

/// sha256 hex of ingest::canonical_source_form(text).
std::string canonical_source_hash(std::string_view text);

struct BuildReport {
  std::size_t files = 0;
  std::size_t functions = 0;
  std::vector<std::string> diagnostics;
};

/// Ingests every *.sol below `corpus_dir` (sorted path order), builds the
/// graph, clone groups, GUF and embeddings. Files that fail to parse are
/// reported and skipped.
KnowledgeBase build_knowledge_base(const std::filesystem::path& corpus_dir, const embed::EmbeddingProvider& provider,
                                   std::uint32_t clone_min_tokens = kDefaultCloneMinTokens,
                                   BuildReport* report = nullptr);

std::string serialize_kb(const KnowledgeBase& kb);
KnowledgeBase deserialize_kb(std::string_view bytes);

void save_kb(const KnowledgeBase& kb, const std::filesystem::path& path);
KnowledgeBase load_kb(const std::filesystem::path& path);

std::string read_file(const std::filesystem::path& path);

}  // namespace scpatcher::kg
