#include "scpatcher/model.hpp"

#include <algorithm>
#include <cctype>

#include "scpatcher/digest.hpp"

namespace scpatcher {

namespace {

std::string fold(std::string_view text) {
  std::string out;
  for (char c : text) {
    if (c == '-' || c == '_' || c == ' ') continue;
    out.push_back(static_cast<char>(std::tolower(static_cast<unsigned char>(c))));
  }
  return out;
}

}  // namespace

std::string_view to_string(VulnClass c) noexcept {
  switch (c) {
    case VulnClass::IntegerOverflow: return "IntegerOverflow";
    case VulnClass::Reentrancy: return "Reentrancy";
    case VulnClass::AccessControl: return "AccessControl";
    case VulnClass::TimestampManipulation: return "TimestampManipulation";
    case VulnClass::UncheckedCallReturn: return "UncheckedCallReturn";
  }
  return "?";
}

std::optional<VulnClass> parse_vuln_class(std::string_view text) {
  const std::string key = fold(text);
  for (VulnClass c : kAllVulnClasses) {
    if (fold(to_string(c)) == key) return c;
  }
  return std::nullopt;
}

std::string_view to_string(RepairStage s) noexcept {
  return s == RepairStage::KnowledgeGuided ? "KnowledgeGuided" : "ChainOfThought";
}

bool SignatureFeatures::contains_all(const SignatureFeatures& required) const {
  return std::includes(features.begin(), features.end(), required.features.begin(),
                       required.features.end());
}

std::string SignatureFeatures::render() const {
  std::string out = "{";
  bool first = true;
  for (const auto& f : features) {
    if (!first) out += ", ";
    out += f;
    first = false;
  }
  out += "}";
  return out;
}

std::string make_function_id(std::string_view contract_name, std::string_view name,
                             const std::vector<std::string>& normalized_tokens) {
  std::string key;
  key.append(contract_name).append("::").append(name).append("::");
  for (std::size_t i = 0; i < normalized_tokens.size(); ++i) {
    if (i) key.push_back(' ');
    key += normalized_tokens[i];
  }
  return short_digest(key);
}

std::vector<std::string> validate_outcome(const RepairOutcome& outcome) {
  std::vector<std::string> violations;
  if (outcome.fixed && !outcome.compiled) violations.emplace_back("fixed without compiled");
  if (outcome.fixed && !outcome.patch) violations.emplace_back("fixed without patch");
  if (outcome.patch && outcome.patch->patched_source.empty())
    violations.emplace_back("empty patched_source");
  if (outcome.patch && outcome.stage_used && outcome.patch->stage != *outcome.stage_used)
    violations.emplace_back("stage_used disagrees with patch stage");
  return violations;
}

}  // namespace scpatcher
