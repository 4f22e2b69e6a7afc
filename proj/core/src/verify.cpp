#include "scpatcher/verify.hpp"

#include <stdlib.h>
#include <unistd.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "scpatcher/ingest.hpp"
#include "scpatcher/subprocess.hpp"

namespace scpatcher::verify {

namespace fs = std::filesystem;

namespace {

// Temp .sol copy removed on scope exit.
class TempSource {
 public:
  explicit TempSource(std::string_view source) {
    std::string templ = (fs::temp_directory_path() / "scpatcher-XXXXXX.sol").string();
    const int fd = ::mkstemps(templ.data(), 4);
    if (fd < 0) throw IoError("cannot create temp file");
    ::close(fd);
    path_ = templ;
    std::ofstream out(path_, std::ios::binary);
    out.write(source.data(), static_cast<std::streamsize>(source.size()));
    if (!out) throw IoError("cannot write temp file " + path_.string());
  }
  ~TempSource() {
    std::error_code ec;
    fs::remove(path_, ec);
  }
  TempSource(const TempSource&) = delete;
  TempSource& operator=(const TempSource&) = delete;

  std::string path() const { return path_.string(); }

 private:
  fs::path path_;
};

std::vector<std::string> split_lines(std::string_view text) {
  std::vector<std::string> lines;
  std::istringstream in{std::string(text)};
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) lines.push_back(line);
  }
  return lines;
}

}  // namespace

std::vector<Detection> parse_findings(std::string_view text, const ClassSet& classes) {
  std::vector<Detection> out;
  for (const std::string& line : split_lines(text)) {
    std::istringstream in(line);
    std::string cls, fn, line_no, rule;
    if (!(in >> cls) || cls.starts_with("#")) continue;
    if (!(in >> fn >> line_no)) continue;
    in >> rule;
    const auto vc = parse_vuln_class(cls);
    if (!vc || !classes.contains(*vc)) continue;
    Detection d;
    d.vuln_class = *vc;
    if (const auto dot = fn.find('.'); dot != std::string::npos) {
      d.contract = fn.substr(0, dot);
      fn = fn.substr(dot + 1);
    }
    d.function = fn;
    try {
      d.line = static_cast<std::uint32_t>(std::stoul(line_no));
    } catch (const std::exception&) {
      continue;
    }
    d.rule_id = rule.empty() ? "external" : rule;
    out.push_back(std::move(d));
  }
  return out;
}

ExternalAnalyzer::ExternalAnalyzer(std::string executable, std::string args_template,
                                   std::chrono::milliseconds timeout)
    : executable_(std::move(executable)), args_(std::move(args_template)), timeout_(timeout) {}

std::vector<Detection> ExternalAnalyzer::detect(std::string_view source, const ClassSet& classes) const {
  const auto exe = proc::find_executable(executable_);
  if (!exe) throw VerifierError(VerifierErrorKind::AnalyzerNotFound, "analyzer not found: " + executable_);
  TempSource tmp(source);
  const auto r = proc::run(proc::expand_template(exe->string(), args_, tmp.path()), timeout_);
  if (r.timed_out) throw VerifierError(VerifierErrorKind::Timeout, "analyzer timed out: " + executable_);
  return parse_findings(r.output, classes);
}

CompileResult check_compiles(std::string_view source, const CompileConfig& cfg) {
  CompileResult res;
  if (cfg.mode == CompileMode::ExternalCompiler) {
    const auto exe = proc::find_executable(cfg.compiler);
    if (!exe) throw VerifierError(VerifierErrorKind::CompilerNotFound, "compiler not found: " + cfg.compiler);
    TempSource tmp(source);
    const auto r = proc::run(proc::expand_template(exe->string(), cfg.args_template, tmp.path()), cfg.timeout);
    if (r.timed_out) throw VerifierError(VerifierErrorKind::Timeout, "compiler timed out: " + cfg.compiler);
    res.ok = r.exit_code == 0;
    res.diagnostics = split_lines(r.output);
    return res;
  }
  ingest::SourceUnit unit;
  try {
    unit = ingest::parse_source(std::string(source), "<patch>");
  } catch (const ingest::IngestError& e) {
    res.diagnostics.emplace_back(e.what());
    return res;
  }
  res.diagnostics = unit.diagnostics;
  if (unit.contracts.empty()) res.diagnostics.emplace_back("no contract or library declared");
  res.ok = !unit.contracts.empty() && unit.diagnostics.empty() && unit.skipped_regions == 0;
  return res;
}

std::vector<std::string> VerificationResult::failure_feedback() const {
  std::vector<std::string> out;
  if (!compiled) {
    out.emplace_back("The patched contract does not compile.");
    for (const auto& d : compile_diagnostics) out.push_back("compiler: " + d);
    return out;
  }
  if (!target_vuln_cleared) {
    for (const auto& d : detections) {
      if (std::find(new_issues.begin(), new_issues.end(), d) == new_issues.end()) {
        out.push_back("still vulnerable: " + render(d));
      }
    }
    if (out.empty()) out.emplace_back("still vulnerable: target finding not cleared");
  }
  for (const auto& d : new_issues) out.push_back("new issue introduced: " + render(d));
  return out;
}

VerificationResult verify_patch(std::string_view original, const PatchCandidate& patch,
                                const VulnerabilityReport& report, const CompileConfig& compile,
                                const Detector& detector) {
  VerificationResult res;
  const CompileResult cr = check_compiles(patch.patched_source, compile);
  res.compiled = cr.ok;
  res.compile_diagnostics = cr.diagnostics;
  if (!res.compiled) return res;

  std::string contract, function;
  try {
    const auto unit = ingest::parse_source(std::string(original), report.contract_path);
    if (const auto [c, f] = unit.find_function(report.function_id); c && f) {
      contract = c->name;
      function = f->unit.name;
    }
  } catch (const ingest::IngestError&) {
  }

  const ClassSet classes = all_classes();
  res.detections = detector.detect(patch.patched_source, classes);
  const auto before = detector.detect(original, classes);
  std::set<std::string> known;
  for (const auto& d : before) known.insert(detection_key(d));

  res.target_vuln_cleared = true;
  for (const auto& d : res.detections) {
    if (d.vuln_class != report.vuln_class) continue;
    // unresolved targets fall back to the whole file
    const bool same_fn = function.empty() ||
                         (d.function == function && (d.contract.empty() || d.contract == contract));
    if (same_fn) res.target_vuln_cleared = false;
  }
  for (const auto& d : res.detections) {
    if (!known.contains(detection_key(d))) res.new_issues.push_back(d);
  }
  return res;
}

}  // namespace scpatcher::verify
