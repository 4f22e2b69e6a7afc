#include "scpatcher/prompt.hpp"

#include <fmt/format.h>

#include <stdexcept>

#include "scpatcher/digest.hpp"

namespace scpatcher::repair {

namespace {

constexpr std::string_view kSystemText =
    "You are a smart contract security engineer. You repair vulnerable Solidity code with the smallest change "
    "that removes the vulnerability, and you keep the contract's interface and intended behavior intact.";

void fenced(std::string& out, std::string_view code) {
  out += "```solidity\n";
  out += code;
  if (!code.empty() && code.back() != '\n') out += '\n';
  out += "```\n";
}

}  // namespace

std::string prompt_digest(std::string_view system_text, std::string_view user_text) {
  std::string joined(system_text);
  joined += "\n\n";
  joined += user_text;
  return sha256_hex(joined);
}

std::string Prompt::digest() const { return prompt_digest(system_text, user_text); }

std::string_view class_definition(VulnClass c) noexcept {
  switch (c) {
    case VulnClass::IntegerOverflow:
      return "unsigned arithmetic wraps around past the bounds of its type and silently corrupts balances or "
             "counters.";
    case VulnClass::Reentrancy:
      return "an external call hands over control before the contract has finished updating its own state, so the "
             "callee can re-enter and act on stale values.";
    case VulnClass::AccessControl:
      return "a privileged operation is callable by accounts that should not be allowed to invoke it, for example "
             "a missing owner check or authorization through tx.origin.";
    case VulnClass::TimestampManipulation:
      return "contract logic depends on block.timestamp, which block producers can shift within a small window.";
    case VulnClass::UncheckedCallReturn:
      return "the boolean result of a low-level call or send is ignored, so a failed transfer goes unnoticed.";
  }
  return "";
}

std::string render_user_text(const PromptSlots& s) {
  std::string out;
  out += fmt::format("Template: {}\n\n", kPromptTemplateVersion);
  out += "## Task\n";
  out += "Repair the vulnerability described below in the given Solidity contract. Change only what the fix "
         "requires.\n\n";
  out += "## Vulnerability class\n";
  out += fmt::format("{}: {}\n\n", to_string(s.vuln_class), class_definition(s.vuln_class));
  out += "## Vulnerable function\n";
  fenced(out, s.vulnerable_code);
  out += "\n## Signature constraints\n";
  out += fmt::format("The repaired function must keep these signature features: {}\n\n",
                     s.signature_constraints.render());
  out += "## Reference code\n";
  if (s.references.empty()) {
    out += "none retrieved\n";
  } else {
    out += "Related functions from the knowledge base, most trusted first (lower s_final ranks higher).\n";
    for (std::size_t i = 0; i < s.references.size(); ++i) {
      const Reference& r = s.references[i];
      out += fmt::format("\n### Reference {}\n", i + 1);
      out += fmt::format("s_final: {:.4f}\nguf: {}\nsignature: {}\n", r.s_final, r.guf, r.signature.render());
      fenced(out, r.code);
    }
  }
  if (!s.contract_source.empty()) {
    out += "\n## Contract source\n";
    fenced(out, s.contract_source);
  }
  if (s.failure_feedback) {
    out += "\n## Previous attempt failed\n";
    out += "Verification rejected the previous patch:\n";
    for (const auto& line : *s.failure_feedback) out += "- " + line + "\n";
    out += "\n## Reasoning steps\n";
    out += "Think step by step before writing code:\n";
    out += "1. locate the flaw\n";
    out += "2. explain the exploit path\n";
    out += "3. plan the minimal fix\n";
    out += "4. emit full patched source\n";
  }
  out += "\n## Output\n";
  out += "Return the complete patched Solidity source file in a single ```solidity fenced block.";
  if (s.failure_feedback) out += " Put your reasoning before the block.";
  out += "\n";
  return out;
}

Prompt build_stage1_prompt(const FunctionUnit& vuln_fn, VulnClass vuln_class, std::vector<Reference> refs,
                           std::string contract_source) {
  Prompt p;
  p.slots.contract_source = std::move(contract_source);
  p.slots.vulnerable_code = vuln_fn.source_text;
  p.slots.vuln_class = vuln_class;
  p.slots.references = std::move(refs);
  p.slots.signature_constraints = vuln_fn.signature;
  p.slots.stage = RepairStage::KnowledgeGuided;
  p.system_text = std::string(kSystemText);
  p.user_text = render_user_text(p.slots);
  return p;
}

Prompt build_cot_prompt(const FunctionUnit& vuln_fn, VulnClass vuln_class, std::vector<Reference> refs,
                        std::vector<std::string> feedback, std::string contract_source) {
  if (feedback.empty()) throw std::invalid_argument("build_cot_prompt: feedback must not be empty");
  Prompt p = build_stage1_prompt(vuln_fn, vuln_class, std::move(refs), std::move(contract_source));
  p.slots.stage = RepairStage::ChainOfThought;
  p.slots.failure_feedback = std::move(feedback);
  p.user_text = render_user_text(p.slots);
  return p;
}

std::vector<Reference> make_references(const std::vector<embed::Candidate>& selected,
                                       const kg::PropertyGraph& graph) {
  std::vector<Reference> refs;
  for (const auto& c : selected) {
    const FunctionUnit* fn = graph.function(c.function_id);
    if (!fn) continue;
    refs.push_back(Reference{c.function_id, fn->source_text, c.s_final.value_or(0.0), c.guf, c.signature});
  }
  return refs;
}

}  // namespace scpatcher::repair
