#include <gtest/gtest.h>

#include <fstream>

#include "scpatcher/kb.hpp"
#include "support.hpp"

using namespace scpatcher;
using namespace scpatcher::kg;
namespace st = scpatcher::testing;

namespace {

FormatErrorKind format_error_of(std::string_view bytes) {
  try {
    deserialize_kb(bytes);
  } catch (const FormatError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no FormatError";
  return FormatErrorKind::Corrupt;
}

}  // namespace

TEST(KbFormat, EmptyRoundTrip) {
  const KnowledgeBase empty;
  const std::string bytes = serialize_kb(empty);
  EXPECT_EQ(bytes.substr(0, 4), "SCPK");
  EXPECT_EQ(deserialize_kb(bytes), empty);
}

TEST(KbFormat, CorpusRoundTripThroughFile) {
  const auto& kb = st::corpus_kb();
  st::TempDir dir;
  const auto path = dir.path() / "corpus.kb";
  save_kb(kb, path);
  const KnowledgeBase back = load_kb(path);
  EXPECT_EQ(back, kb);
  EXPECT_EQ(back.graph.nodes(), kb.graph.nodes());
  EXPECT_EQ(back.graph.edges(), kb.graph.edges());
  EXPECT_EQ(back.clones, kb.clones);
  EXPECT_TRUE(back.graph.indexes_consistent());

  const auto again = dir.path() / "again.kb";
  save_kb(back, again);
  EXPECT_EQ(st::slurp(path), st::slurp(again));
}

TEST(KbFormat, SerializationIsCanonical) {
  embed::HashingEmbedder h;
  const auto a = build_knowledge_base(st::fixture("corpus"), h);
  const auto b = build_knowledge_base(st::fixture("corpus"), h);
  EXPECT_EQ(serialize_kb(a), serialize_kb(b));
}

TEST(KbFormat, VersionFieldIsLittleEndianU16) {
  const std::string bytes = serialize_kb(KnowledgeBase{});
  ASSERT_GE(bytes.size(), 6u);
  EXPECT_EQ(static_cast<unsigned char>(bytes[4]), kKbFormatVersion & 0xff);
  EXPECT_EQ(static_cast<unsigned char>(bytes[5]), kKbFormatVersion >> 8);
}

TEST(KbFormat, BadMagic) {
  std::string bytes = serialize_kb(st::corpus_kb());
  bytes[0] = 'X';
  EXPECT_EQ(format_error_of(bytes), FormatErrorKind::BadMagic);
  EXPECT_EQ(format_error_of(""), FormatErrorKind::BadMagic);
  EXPECT_EQ(format_error_of("SCP"), FormatErrorKind::BadMagic);
}

TEST(KbFormat, VersionMismatch) {
  std::string bytes = serialize_kb(st::corpus_kb());
  bytes[4] = static_cast<char>(kKbFormatVersion + 1);
  EXPECT_EQ(format_error_of(bytes), FormatErrorKind::VersionMismatch);
}

TEST(KbFormat, EveryTruncationIsRejected) {
  const std::string bytes = serialize_kb(st::corpus_kb());
  // every proper prefix must fail, never yield a partial graph
  for (std::size_t n = 0; n < bytes.size(); n += (n < 64 ? 1 : 97)) {
    EXPECT_THROW(deserialize_kb(std::string_view(bytes).substr(0, n)), FormatError) << "prefix " << n;
  }
  EXPECT_THROW(deserialize_kb(std::string_view(bytes).substr(0, bytes.size() - 1)), FormatError);
}

TEST(KbFormat, TrailingBytesRejected) {
  const std::string bytes = serialize_kb(st::corpus_kb()) + "x";
  EXPECT_EQ(format_error_of(bytes), FormatErrorKind::Corrupt);
}

TEST(KbFormat, MissingFileIsIoError) {
  st::TempDir dir;
  EXPECT_THROW(load_kb(dir.path() / "nope.kb"), IoError);
  EXPECT_THROW(save_kb(KnowledgeBase{}, dir.path() / "no" / "such" / "dir.kb"), IoError);
}

TEST(KnowledgeBaseBuild, MissingCorpusDir) {
  embed::HashingEmbedder h;
  EXPECT_THROW(build_knowledge_base(st::fixture("does-not-exist"), h), IoError);
}

TEST(KnowledgeBaseBuild, RecordsSourcesAndMetadata) {
  const auto& kb = st::corpus_kb();
  EXPECT_EQ(kb.embedder.name, "hash-v1");
  EXPECT_EQ(kb.embedder.dimension, 256u);
  EXPECT_EQ(kb.sources.size(), 10u);
  EXPECT_TRUE(std::is_sorted(kb.sources.begin(), kb.sources.end(),
                             [](const auto& a, const auto& b) { return a.path < b.path; }));
  EXPECT_EQ(kb.vectors.size(), kb.graph.function_ids().size());
  for (const auto& [id, v] : kb.vectors) EXPECT_EQ(v.dimension(), 256u) << id;
}

TEST(KnowledgeBaseBuild, UnparseableFilesAreSkippedAndReported) {
  st::TempDir dir;
  std::ofstream(dir.path() / "good.sol") << "contract A { function f() public { } }\n";
  std::ofstream(dir.path() / "bad.sol") << "contract B { function g() public { \n";
  embed::HashingEmbedder h;
  BuildReport report;
  const auto kb = build_knowledge_base(dir.path(), h, kDefaultCloneMinTokens, &report);
  EXPECT_EQ(kb.graph.function_ids().size(), 1u);
  EXPECT_FALSE(report.diagnostics.empty());
}

TEST(KnowledgeBaseBuild, IndexCarriesMetadata) {
  const auto& kb = st::corpus_kb();
  const auto index = kb.make_index();
  EXPECT_EQ(index.size(), kb.vectors.size());
  for (const auto& e : index.entries()) {
    const auto* f = kb.graph.function(e.function_id);
    ASSERT_NE(f, nullptr);
    EXPECT_EQ(e.guf, f->guf);
    EXPECT_EQ(e.clone_id, f->clone_id);
  }
}
