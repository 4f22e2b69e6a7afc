#pragma once

// Shared domain types for the repair pipeline. These are plain value objects;
// the only logic here is parsing/formatting of enums and invariant checks.

#include <array>
#include <cstdint>
#include <optional>
#include <set>
#include <string>
#include <string_view>
#include <vector>

namespace scpatcher {

enum class VulnClass : std::uint8_t {
  IntegerOverflow,
  Reentrancy,
  AccessControl,
  TimestampManipulation,
  UncheckedCallReturn,
};

inline constexpr std::array<VulnClass, 5> kAllVulnClasses = {
    VulnClass::IntegerOverflow,       VulnClass::Reentrancy,          VulnClass::AccessControl,
    VulnClass::TimestampManipulation, VulnClass::UncheckedCallReturn,
};

std::string_view to_string(VulnClass c) noexcept;

/// Accepts the canonical CamelCase name, case-insensitively, plus the
/// kebab/snake spellings used on the command line ("integer-overflow",
/// "unchecked_call_return", ...).
std::optional<VulnClass> parse_vuln_class(std::string_view text);

/// Normalized signature feature set: visibility, mutability, "param:<type>",
/// "ret:<type>", "mod:<modifier>". Every element is lowercase and has no
/// whitespace.
struct SignatureFeatures {
  std::set<std::string> features;

  bool contains_all(const SignatureFeatures& required) const;
  std::string render() const;  // "{a, b, c}"

  friend bool operator==(const SignatureFeatures&, const SignatureFeatures&) = default;
};

struct FunctionUnit {
  std::string id;             // content-addressed, see make_function_id()
  std::string contract_name;
  std::string name;
  std::string source_text;    // verbatim slice of the defining file
  SignatureFeatures signature;
  std::uint32_t token_count = 0;  // length of the normalized token stream
  std::optional<std::string> clone_id;
  std::uint64_t guf = 0;      // Global Usage Frequency
  std::uint32_t start_line = 0;

  friend bool operator==(const FunctionUnit&, const FunctionUnit&) = default;
};

/// id = short_digest(contract + "::" + name + "::" + normalized tokens joined by ' ').
std::string make_function_id(std::string_view contract_name, std::string_view name,
                             const std::vector<std::string>& normalized_tokens);

struct VulnerabilityReport {
  std::string contract_path;
  std::string function_id;
  VulnClass vuln_class = VulnClass::Reentrancy;
  std::string evidence;  // free-text locator, e.g. "lines 12-18"

  friend bool operator==(const VulnerabilityReport&, const VulnerabilityReport&) = default;
};

enum class RepairStage : std::uint8_t { KnowledgeGuided, ChainOfThought };

std::string_view to_string(RepairStage s) noexcept;

struct PatchCandidate {
  std::string patched_source;
  RepairStage stage = RepairStage::KnowledgeGuided;
  std::string prompt_digest;

  friend bool operator==(const PatchCandidate&, const PatchCandidate&) = default;
};

/// Result of repairing one contract. "fixed" means: the patch compiles, the
/// reported class is no longer detected in the reported function, and no new
/// detections among the five classes appeared. Static re-detection does not
/// guarantee full behavioral or functional correctness of the patch.
struct RepairOutcome {
  VulnerabilityReport report;
  bool compiled = false;
  bool fixed = false;
  std::optional<RepairStage> stage_used;
  std::optional<PatchCandidate> patch;
  std::vector<std::string> diagnostics;

  friend bool operator==(const RepairOutcome&, const RepairOutcome&) = default;
};

/// Returns the violated RepairOutcome invariants; empty means valid.
std::vector<std::string> validate_outcome(const RepairOutcome& outcome);

}  // namespace scpatcher
