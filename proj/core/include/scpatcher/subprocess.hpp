#pragma once

#include <chrono>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

namespace scpatcher::proc {

struct ProcessResult {
  int exit_code = -1;
  bool timed_out = false;
  std::string output;  // stdout and stderr interleaved
};

/// Runs argv[0] (searched in PATH when it has no '/') with the remaining
/// arguments, capturing combined output. The child is killed after `timeout`.
ProcessResult run(const std::vector<std::string>& argv, std::chrono::milliseconds timeout);

/// Resolves an executable like execvp would; nullopt when not found.
std::optional<std::filesystem::path> find_executable(const std::string& name);

/// Splits an argument template on whitespace and substitutes "{file}".
std::vector<std::string> expand_template(const std::string& executable, const std::string& args_template,
                                         const std::string& file);

}  // namespace scpatcher::proc
