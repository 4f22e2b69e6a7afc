#pragma once

// Patch verification: a compile check and per-class vulnerability
// re-detection. The built-in detectors are token-pattern heuristics; an
// external analyzer can replace them through the Detector interface.

#include <chrono>
#include <cstdint>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scpatcher/error.hpp"
#include "scpatcher/model.hpp"

namespace scpatcher::verify {

enum class VerifierErrorKind { CompilerNotFound, AnalyzerNotFound, Timeout };
using VerifierError = KindedError<VerifierErrorKind>;

struct Detection {
  VulnClass vuln_class = VulnClass::Reentrancy;
  std::string contract;  // empty when the analyzer does not report it
  std::string function;
  std::uint32_t line = 0;
  std::string rule_id;

  friend bool operator==(const Detection&, const Detection&) = default;
};

/// Line-independent identity used when diffing detections of two versions
/// of a file: (class, contract, function, rule).
std::string detection_key(const Detection& d);
std::string render(const Detection& d);

using ClassSet = std::set<VulnClass>;
ClassSet all_classes();

class Detector {
 public:
  virtual ~Detector() = default;
  virtual std::vector<Detection> detect(std::string_view source, const ClassSet& classes) const = 0;
};

/// Built-in rules, one per class. Deterministic; unparseable input yields no
/// detections (the reason is appended to `diagnostics` when provided).
class HeuristicDetector final : public Detector {
 public:
  std::vector<Detection> detect(std::string_view source, const ClassSet& classes) const override;
  std::vector<Detection> detect(std::string_view source, const ClassSet& classes,
                                std::vector<std::string>* diagnostics) const;
};

/// Convenience wrapper over HeuristicDetector.
std::vector<Detection> detect(std::string_view source, const ClassSet& classes = all_classes());

/// Spawns an external analyzer on a temp copy of the source and parses its
/// stdout. Findings format, one per line:  <Class> <function> <line> [rule]
/// Blank lines and lines starting with '#' are ignored; unknown classes are
/// skipped.
class ExternalAnalyzer final : public Detector {
 public:
  ExternalAnalyzer(std::string executable, std::string args_template,
                   std::chrono::milliseconds timeout = std::chrono::seconds(120));
  std::vector<Detection> detect(std::string_view source, const ClassSet& classes) const override;

 private:
  std::string executable_;
  std::string args_;
  std::chrono::milliseconds timeout_;
};

std::vector<Detection> parse_findings(std::string_view text, const ClassSet& classes);

enum class CompileMode : std::uint8_t { BuiltinParse, ExternalCompiler };

struct CompileConfig {
  CompileMode mode = CompileMode::BuiltinParse;
  std::string compiler;       // executable, for ExternalCompiler
  std::string args_template;  // e.g. "--bin {file}"; {file} appended when absent
  std::chrono::milliseconds timeout{std::chrono::seconds(120)};
};

struct CompileResult {
  bool ok = false;
  std::vector<std::string> diagnostics;
};

/// BuiltinParse is a syntactic proxy: the source must be UTF-8, have balanced
/// braces, declare at least one contract or library and contain no member
/// the extractor had to skip. ExternalCompiler succeeds iff the process exits 0.
CompileResult check_compiles(std::string_view source, const CompileConfig& cfg = {});

struct VerificationResult {
  bool compiled = false;
  std::vector<std::string> compile_diagnostics;
  std::vector<Detection> detections;  // on the patched source
  bool target_vuln_cleared = false;
  std::vector<Detection> new_issues;  // detections absent from the original

  bool passed() const noexcept { return compiled && target_vuln_cleared && new_issues.empty(); }
  /// Human-readable reasons the patch was rejected; empty when passed().
  std::vector<std::string> failure_feedback() const;
};

/// `report.function_id` is resolved against the original source to find the
/// (contract, function) whose target class must be cleared in the patch.
VerificationResult verify_patch(std::string_view original, const PatchCandidate& patch,
                                const VulnerabilityReport& report, const CompileConfig& compile = {},
                                const Detector& detector = HeuristicDetector{});

}  // namespace scpatcher::verify
