#pragma once

// Evaluation manifests, test/corpus deduplication and batch runs. Formats
// are documented in docs/manifest.md and docs/report.md.

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "scpatcher/error.hpp"
#include "scpatcher/kb.hpp"
#include "scpatcher/llm.hpp"
#include "scpatcher/metrics.hpp"
#include "scpatcher/model.hpp"
#include "scpatcher/repair.hpp"

namespace scpatcher::eval {

enum class DatasetErrorKind { Invalid, MissingFile };
using DatasetError = KindedError<DatasetErrorKind>;

struct ManifestEntry {
  std::string id;        // defaults to the contract path
  std::string contract;  // path relative to the manifest directory
  VulnClass vuln_class = VulnClass::Reentrancy;
  std::string function;
  std::string contract_name;  // optional qualifier when several contracts define `function`
  std::optional<std::uint32_t> line_hint;

  friend bool operator==(const ManifestEntry&, const ManifestEntry&) = default;
};

struct DatasetManifest {
  std::filesystem::path base_dir;
  std::string notes;
  std::vector<ManifestEntry> entries;

  std::filesystem::path resolve(const ManifestEntry& e) const { return base_dir / e.contract; }

  /// Validates classes, required fields and that every contract file exists.
  static DatasetManifest parse(std::string_view json_text, const std::filesystem::path& base_dir);
  static DatasetManifest load(const std::filesystem::path& path);
};

struct Exclusion {
  ManifestEntry entry;
  std::string kb_source;  // path of the matching corpus file
};

struct DedupResult {
  std::vector<ManifestEntry> kept;
  std::vector<Exclusion> excluded;
};

/// Drops entries whose canonical source hash equals that of a KB source file.
/// Throws IoError when a contract cannot be read.
DedupResult dedup_against_kb(const DatasetManifest& manifest, const kg::KnowledgeBase& kb);

struct OutcomeRow {
  ManifestEntry entry;
  RepairOutcome outcome;
};

struct KRun {
  std::size_t k = 0;
  MetricsReport metrics;
  std::vector<OutcomeRow> rows;  // manifest order
};

struct EvaluationReport {
  repair::RepairConfig config;
  std::string backend;
  std::string embedder;
  std::vector<Exclusion> excluded;
  std::vector<KRun> runs;
};

struct RunOptions {
  std::vector<std::size_t> k_values{repair::RepairConfig{}.k};
  std::size_t jobs = 1;
  bool dedup = true;
};

/// Repairs one manifest entry; every failure ends up in the outcome's
/// diagnostics instead of propagating.
RepairOutcome run_entry(const repair::Repairer& repairer, const DatasetManifest& manifest, const ManifestEntry& entry);

EvaluationReport run_dataset(const DatasetManifest& manifest, const kg::KnowledgeBase& kb,
                             const embed::EmbeddingProvider& provider, const repair::ChatBackend& backend,
                             const repair::RepairConfig& cfg, const RunOptions& opts = {});

/// Deterministic JSON rendering (fixed key order, two-space indent, trailing newline).
std::string render_report(const EvaluationReport& report);
void write_report(const EvaluationReport& report, const std::filesystem::path& path);

}  // namespace scpatcher::eval
