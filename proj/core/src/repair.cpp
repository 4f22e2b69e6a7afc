#include "scpatcher/repair.hpp"

#include <stdexcept>

namespace scpatcher::repair {

void RepairConfig::validate() const {
  if (stage1_attempts == 0 || stage2_attempts == 0) throw std::invalid_argument("attempt budgets must be >= 1");
  rerank_config().validate();
}

std::unique_ptr<ChatBackend> make_backend(const BackendSpec& spec) {
  if (spec.kind == BackendSpec::Kind::Remote) return std::make_unique<RemoteChatBackend>(RemoteChatConfig::from_env());
  return std::make_unique<MockChatBackend>(MockChatBackend::load(spec.mock_script, spec.seed));
}

Repairer::Repairer(const kg::KnowledgeBase& kb, const embed::EmbeddingProvider& provider, const ChatBackend& backend,
                   RepairConfig cfg, const verify::Detector* detector)
    : kb_(kb),
      provider_(provider),
      backend_(backend),
      cfg_(std::move(cfg)),
      detector_(detector ? *detector : builtin_),
      index_(kb.make_index()) {
  cfg_.validate();
}

Retrieval Repairer::retrieve(const FunctionUnit& fn, VulnClass vuln_class) const {
  Retrieval r;
  const embed::EmbeddingVector q = provider_.embed(fn.source_text);
  r.pool = index_.knn(q, cfg_.top_n);
  auto res = rerank::rerank_detailed(r.pool, rerank::QueryContext{q, fn.signature, vuln_class}, cfg_.rerank_config());
  r.selected = std::move(res.selected);
  r.fallback_used = res.fallback_used;
  return r;
}

namespace {

std::string join(const std::vector<std::string>& lines) {
  std::string out;
  for (const auto& l : lines) {
    if (!out.empty()) out += "; ";
    out += l;
  }
  return out;
}

}  // namespace

RepairOutcome Repairer::repair(const ingest::SourceUnit& contract, const VulnerabilityReport& report) const {
  const auto [decl_contract, decl] = contract.find_function(report.function_id);
  if (!decl) throw std::invalid_argument("function " + report.function_id + " not found in " + contract.path);
  const FunctionUnit& fn = decl->unit;

  RepairOutcome out;
  out.report = report;

  std::vector<Reference> refs;
  try {
    const Retrieval r = retrieve(fn, report.vuln_class);
    refs = make_references(r.selected, kb_.graph);
    if (r.fallback_used) out.diagnostics.push_back("retrieval: no signature-compatible reference, using full pool");
  } catch (const Error& e) {
    out.diagnostics.push_back(std::string("retrieval: ") + e.what());
  }

  std::vector<std::string> feedback;
  auto attempt = [&](const Prompt& prompt, const std::string& label) -> bool {
    PatchCandidate patch;
    try {
      patch = generate(prompt, backend_, cfg_.llm);
    } catch (const LlmError& e) {
      out.diagnostics.push_back(label + ": llm error: " + e.what());
      feedback = {std::string("the model returned no usable patch: ") + e.what()};
      return false;
    }
    verify::VerificationResult v;
    try {
      v = verify::verify_patch(contract.text, patch, report, cfg_.compile, detector_);
    } catch (const Error& e) {
      out.diagnostics.push_back(label + ": verifier error: " + e.what());
      feedback = {std::string("verification could not run: ") + e.what()};
      out.compiled = false;
      out.stage_used = patch.stage;
      out.patch = std::move(patch);
      return false;
    }
    out.compiled = v.compiled;
    out.stage_used = patch.stage;
    out.patch = std::move(patch);
    if (v.passed()) {
      out.fixed = true;
      out.diagnostics.push_back(label + ": passed");
      return true;
    }
    feedback = v.failure_feedback();
    out.diagnostics.push_back(label + ": rejected: " + join(feedback));
    return false;
  };

  const Prompt p1 = build_stage1_prompt(fn, report.vuln_class, refs, contract.text);
  for (std::uint32_t i = 1; i <= cfg_.stage1_attempts; ++i) {
    if (attempt(p1, "stage1#" + std::to_string(i))) return out;
  }
  for (std::uint32_t i = 1; i <= cfg_.stage2_attempts; ++i) {
    const Prompt p2 = build_cot_prompt(fn, report.vuln_class, refs, feedback, contract.text);
    if (attempt(p2, "stage2#" + std::to_string(i))) return out;
  }
  return out;
}

}  // namespace scpatcher::repair
