#include "scpatcher/dataset.hpp"

#include <nlohmann/json.hpp>

#include <atomic>
#include <fstream>
#include <set>
#include <thread>
#include <unordered_map>

#include "scpatcher/digest.hpp"
#include "scpatcher/ingest.hpp"

namespace scpatcher::eval {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

DatasetManifest DatasetManifest::parse(std::string_view json_text, const fs::path& base_dir) {
  DatasetManifest m;
  m.base_dir = base_dir;
  json doc;
  try {
    doc = json::parse(json_text);
  } catch (const json::exception& e) {
    throw DatasetError(DatasetErrorKind::Invalid, std::string("manifest is not valid JSON: ") + e.what());
  }
  if (!doc.is_object() || !doc.contains("entries") || !doc.at("entries").is_array()) {
    throw DatasetError(DatasetErrorKind::Invalid, "manifest needs an \"entries\" array");
  }
  m.notes = doc.value("notes", std::string{});
  std::size_t i = 0;
  std::set<std::string> ids;
  for (const json& e : doc.at("entries")) {
    const std::string where = "entry " + std::to_string(i++);
    try {
      ManifestEntry entry;
      entry.contract = e.at("contract").get<std::string>();
      entry.function = e.at("function").get<std::string>();
      const std::string cls = e.at("class").get<std::string>();
      const auto vc = parse_vuln_class(cls);
      if (!vc) throw DatasetError(DatasetErrorKind::Invalid, where + ": unknown class '" + cls + "'");
      entry.vuln_class = *vc;
      entry.contract_name = e.value("contract_name", std::string{});
      if (e.contains("line")) entry.line_hint = e.at("line").get<std::uint32_t>();
      entry.id = e.value("id", entry.contract);
      if (!ids.insert(entry.id).second) throw DatasetError(DatasetErrorKind::Invalid, where + ": duplicate id " + entry.id);
      if (!fs::is_regular_file(m.resolve(entry))) {
        throw DatasetError(DatasetErrorKind::MissingFile, where + ": no such file " + m.resolve(entry).string());
      }
      m.entries.push_back(std::move(entry));
    } catch (const json::exception& ex) {
      throw DatasetError(DatasetErrorKind::Invalid, where + ": " + ex.what());
    }
  }
  return m;
}

DatasetManifest DatasetManifest::load(const fs::path& path) {
  return parse(kg::read_file(path), path.parent_path());
}

DedupResult dedup_against_kb(const DatasetManifest& manifest, const kg::KnowledgeBase& kb) {
  std::unordered_map<std::string, std::string> by_hash;
  for (const auto& s : kb.sources) by_hash.emplace(s.canonical_hash, s.path);
  DedupResult out;
  for (const auto& e : manifest.entries) {
    const std::string h = kg::canonical_source_hash(kg::read_file(manifest.resolve(e)));
    if (const auto it = by_hash.find(h); it != by_hash.end()) {
      out.excluded.push_back(Exclusion{e, it->second});
    } else {
      out.kept.push_back(e);
    }
  }
  return out;
}

RepairOutcome run_entry(const repair::Repairer& repairer, const DatasetManifest& manifest,
                        const ManifestEntry& entry) {
  RepairOutcome out;
  out.report.contract_path = entry.contract;
  out.report.vuln_class = entry.vuln_class;
  if (entry.line_hint) out.report.evidence = "line " + std::to_string(*entry.line_hint);
  try {
    const ingest::SourceUnit unit = ingest::parse_source(kg::read_file(manifest.resolve(entry)), entry.contract);
    const auto [c, f] = unit.find_function_by_name(entry.function, entry.contract_name);
    if (!f) {
      out.diagnostics.push_back("function " + entry.function + " not found in " + entry.contract);
      return out;
    }
    out.report.function_id = f->unit.id;
    return repairer.repair(unit, out.report);
  } catch (const std::exception& e) {
    out.diagnostics.push_back(std::string("error: ") + e.what());
  }
  return out;
}

EvaluationReport run_dataset(const DatasetManifest& manifest, const kg::KnowledgeBase& kb,
                             const embed::EmbeddingProvider& provider, const repair::ChatBackend& backend,
                             const repair::RepairConfig& cfg, const RunOptions& opts) {
  EvaluationReport report;
  report.config = cfg;
  report.backend = backend.name();
  report.embedder = provider.name();

  std::vector<ManifestEntry> entries = manifest.entries;
  if (opts.dedup) {
    DedupResult d = dedup_against_kb(manifest, kb);
    entries = std::move(d.kept);
    report.excluded = std::move(d.excluded);
  }

  for (const std::size_t k : opts.k_values) {
    repair::RepairConfig run_cfg = cfg;
    run_cfg.k = k;
    const repair::Repairer repairer(kb, provider, backend, run_cfg);

    KRun run;
    run.k = k;
    std::vector<RepairOutcome> outcomes(entries.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < entries.size(); i = next++) {
        outcomes[i] = run_entry(repairer, manifest, entries[i]);
      }
    };
    const std::size_t jobs = std::max<std::size_t>(1, std::min(opts.jobs, entries.size()));
    std::vector<std::thread> pool;
    for (std::size_t j = 1; j < jobs; ++j) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();

    run.metrics = compute_metrics(outcomes);
    for (std::size_t i = 0; i < entries.size(); ++i) run.rows.push_back(OutcomeRow{entries[i], std::move(outcomes[i])});
    report.runs.push_back(std::move(run));
  }
  return report;
}

namespace {

ordered_json metrics_json(const MetricsReport& m) {
  ordered_json j;
  j["n_total"] = m.n_total;
  j["n_comp"] = m.n_comp;
  j["n_fail_comp"] = m.n_fail_comp;
  j["n_fixed"] = m.n_fixed;
  j["n_fail_fixed"] = m.n_fail_fixed;
  j["cpr"] = m.has_rates() ? ordered_json(m.cpr_text()) : ordered_json(nullptr);
  j["err"] = m.has_err() ? ordered_json(m.err_text()) : ordered_json(nullptr);
  j["orr"] = m.has_rates() ? ordered_json(m.orr_text()) : ordered_json(nullptr);
  return j;
}

ordered_json row_json(const OutcomeRow& r) {
  ordered_json j;
  j["id"] = r.entry.id;
  j["contract"] = r.entry.contract;
  j["class"] = std::string(to_string(r.entry.vuln_class));
  j["function"] = r.entry.function;
  j["function_id"] = r.outcome.report.function_id;
  j["compiled"] = r.outcome.compiled;
  j["fixed"] = r.outcome.fixed;
  j["stage_used"] = r.outcome.stage_used ? ordered_json(std::string(to_string(*r.outcome.stage_used)))
                                          : ordered_json(nullptr);
  if (r.outcome.patch) {
    j["prompt_digest"] = r.outcome.patch->prompt_digest;
    j["patch_sha256"] = sha256_hex(r.outcome.patch->patched_source);
  } else {
    j["prompt_digest"] = nullptr;
    j["patch_sha256"] = nullptr;
  }
  j["diagnostics"] = r.outcome.diagnostics;
  return j;
}

}  // namespace

std::string render_report(const EvaluationReport& report) {
  ordered_json doc;
  doc["format"] = "scpatcher-eval/1";
  ordered_json cfg;
  cfg["backend"] = report.backend;
  cfg["embedder"] = report.embedder;
  cfg["top_n"] = report.config.top_n;
  cfg["epsilon"] = report.config.epsilon;
  cfg["stage1_attempts"] = report.config.stage1_attempts;
  cfg["stage2_attempts"] = report.config.stage2_attempts;
  cfg["temperature"] = report.config.llm.temperature;
  doc["config"] = cfg;
  ordered_json excluded = ordered_json::array();
  for (const auto& e : report.excluded) {
    ordered_json x;
    x["id"] = e.entry.id;
    x["contract"] = e.entry.contract;
    x["matches"] = e.kb_source;
    excluded.push_back(x);
  }
  doc["excluded"] = excluded;
  ordered_json runs = ordered_json::array();
  for (const auto& run : report.runs) {
    ordered_json r;
    r["k"] = run.k;
    r["metrics"] = metrics_json(run.metrics);
    ordered_json rows = ordered_json::array();
    for (const auto& row : run.rows) rows.push_back(row_json(row));
    r["rows"] = rows;
    runs.push_back(r);
  }
  doc["runs"] = runs;
  return doc.dump(2) + "\n";
}

void write_report(const EvaluationReport& report, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw IoError("cannot write " + path.string());
  out << render_report(report);
  if (!out) throw IoError("cannot write " + path.string());
}

}  // namespace scpatcher::eval
