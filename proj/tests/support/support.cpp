#include "support.hpp"

#include <algorithm>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include "scpatcher/embed.hpp"

namespace scpatcher::testing {

namespace fs = std::filesystem;

fs::path fixture(std::string_view relative) { return fs::path(SCPATCHER_TEST_DIR) / "fixtures" / relative; }

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string golden_mismatch(const std::string& actual, std::string_view name) {
  const fs::path path = fs::path(SCPATCHER_TEST_DIR) / "golden" / name;
  const char* update = std::getenv("SCPATCHER_UPDATE_GOLDEN");
  if (update && std::string_view(update) == "1") {
    std::ofstream(path, std::ios::binary) << actual;
    return {};
  }
  if (!fs::exists(path)) return "missing golden file " + path.string();
  const std::string expected = slurp(path);
  if (expected == actual) return {};
  std::size_t i = 0;
  while (i < expected.size() && i < actual.size() && expected[i] == actual[i]) ++i;
  const auto line = 1 + std::count(expected.begin(), expected.begin() + static_cast<std::ptrdiff_t>(i), '\n');
  return path.filename().string() + " differs at byte " + std::to_string(i) + " (line " + std::to_string(line) + ")";
}

const kg::KnowledgeBase& corpus_kb() {
  static const kg::KnowledgeBase kb = [] {
    embed::HashingEmbedder h;
    return kg::build_knowledge_base(fixture("corpus"), h);
  }();
  return kb;
}

TempDir::TempDir() {
  static std::random_device rd;
  std::mt19937_64 gen(rd());
  path_ = fs::temp_directory_path() / ("scpatcher-test-" + std::to_string(gen()));
  fs::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  fs::remove_all(path_, ec);
}

}  // namespace scpatcher::testing
