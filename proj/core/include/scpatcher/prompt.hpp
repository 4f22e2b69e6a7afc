#pragma once

// Repair prompts. The user text is a pure render of the slots, so prompts can
// be compared byte-for-byte against committed golden files. Bump
// kPromptTemplateVersion whenever the wording changes.

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scpatcher/graph.hpp"
#include "scpatcher/index.hpp"
#include "scpatcher/model.hpp"

namespace scpatcher::repair {

inline constexpr std::string_view kPromptTemplateVersion = "scpatcher-prompt/1";

struct Reference {
  std::string function_id;
  std::string code;
  double s_final = 0.0;
  std::uint64_t guf = 1;
  SignatureFeatures signature;

  friend bool operator==(const Reference&, const Reference&) = default;
};

struct PromptSlots {
  std::string contract_source;  // full file the patch must replace
  std::string vulnerable_code;
  VulnClass vuln_class = VulnClass::Reentrancy;
  std::vector<Reference> references;
  SignatureFeatures signature_constraints;
  RepairStage stage = RepairStage::KnowledgeGuided;
  std::optional<std::vector<std::string>> failure_feedback;  // Stage 2 only

  friend bool operator==(const PromptSlots&, const PromptSlots&) = default;
};

struct Prompt {
  std::string system_text;
  std::string user_text;
  PromptSlots slots;

  /// sha256 hex of system_text + "\n\n" + user_text.
  std::string digest() const;
};

std::string prompt_digest(std::string_view system_text, std::string_view user_text);

/// One-line description of the class used in prompts.
std::string_view class_definition(VulnClass c) noexcept;

std::string render_user_text(const PromptSlots& slots);

Prompt build_stage1_prompt(const FunctionUnit& vuln_fn, VulnClass vuln_class, std::vector<Reference> refs,
                           std::string contract_source = {});

/// Throws std::invalid_argument when `feedback` is empty.
Prompt build_cot_prompt(const FunctionUnit& vuln_fn, VulnClass vuln_class, std::vector<Reference> refs,
                        std::vector<std::string> feedback, std::string contract_source = {});

/// Attaches source text from the graph to reranked candidates. Candidates
/// whose function is missing from the graph are dropped.
std::vector<Reference> make_references(const std::vector<embed::Candidate>& selected, const kg::PropertyGraph& graph);

}  // namespace scpatcher::repair
