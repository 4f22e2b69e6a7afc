#pragma once

#include <filesystem>
#include <random>
#include <string>
#include <string_view>

#include "scpatcher/kb.hpp"

namespace scpatcher::testing {

std::filesystem::path fixture(std::string_view relative);
std::string slurp(const std::filesystem::path& path);

/// Compares against tests/golden/<name>; with SCPATCHER_UPDATE_GOLDEN=1 the
/// file is rewritten instead. Returns an empty string on match, otherwise a
/// description of the first difference.
std::string golden_mismatch(const std::string& actual, std::string_view name);

/// KB built from fixtures/corpus with the hashing embedder (built once).
const kg::KnowledgeBase& corpus_kb();

/// Fresh empty directory under the system temp dir, removed by the destructor.
class TempDir {
 public:
  TempDir();
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;
  const std::filesystem::path& path() const noexcept { return path_; }

 private:
  std::filesystem::path path_;
};

using Rng = std::mt19937_64;

}  // namespace scpatcher::testing
