#include <gtest/gtest.h>

#include "scpatcher/digest.hpp"
#include "scpatcher/lexer.hpp"
#include "scpatcher/model.hpp"

using namespace scpatcher;

TEST(VulnClass, RoundTripsAndLenientParse) {
  for (VulnClass c : kAllVulnClasses) EXPECT_EQ(parse_vuln_class(to_string(c)), c);
  EXPECT_EQ(parse_vuln_class("integer-overflow"), VulnClass::IntegerOverflow);
  EXPECT_EQ(parse_vuln_class("unchecked_call_return"), VulnClass::UncheckedCallReturn);
  EXPECT_EQ(parse_vuln_class("Timestamp Manipulation"), VulnClass::TimestampManipulation);
  EXPECT_FALSE(parse_vuln_class("front-running"));
}

TEST(SignatureFeatures, SubsetAndRender) {
  const SignatureFeatures full{{"public", "payable", "param:uint256"}};
  EXPECT_TRUE(full.contains_all(SignatureFeatures{}));
  EXPECT_TRUE(full.contains_all(SignatureFeatures{{"payable"}}));
  EXPECT_FALSE(full.contains_all(SignatureFeatures{{"view"}}));
  EXPECT_EQ(full.render(), "{param:uint256, payable, public}");
  EXPECT_EQ(SignatureFeatures{}.render(), "{}");
}

TEST(ValidateOutcome, Examples) {
  RepairOutcome o;
  o.compiled = false;
  o.fixed = true;
  const auto v = validate_outcome(o);
  ASSERT_FALSE(v.empty());
  EXPECT_NE(std::find(v.begin(), v.end(), "fixed without compiled"), v.end());

  RepairOutcome ok;
  ok.compiled = true;
  ok.fixed = true;
  ok.stage_used = RepairStage::KnowledgeGuided;
  ok.patch = PatchCandidate{"contract A {}", RepairStage::KnowledgeGuided, "d"};
  EXPECT_TRUE(validate_outcome(ok).empty());

  RepairOutcome compiled_only;
  compiled_only.compiled = true;
  EXPECT_TRUE(validate_outcome(compiled_only).empty());

  ok.stage_used = RepairStage::ChainOfThought;
  EXPECT_FALSE(validate_outcome(ok).empty());
}

TEST(Digest, KnownVectors) {
  EXPECT_EQ(sha256_hex(""), "e3b0c44298fc1c149afbf4c8996fb92427ae41e4649b934ca495991b7852b855");
  EXPECT_EQ(sha256_hex("abc"), "ba7816bf8f01cfea414140de5dae2223b00361a396177a9cb410ff61f20015ad");
  EXPECT_EQ(short_digest("abc"), "ba7816bf8f01cfea");
  EXPECT_EQ(fnv1a64(""), 0xcbf29ce484222325ULL);
  EXPECT_EQ(fnv1a64("a"), 0xaf63dc4c8601ec8cULL);
}

TEST(FunctionId, ContentAddressed) {
  const std::vector<std::string> toks{"function", "ID", "(", ")", "{", "}"};
  EXPECT_EQ(make_function_id("A", "f", toks), make_function_id("A", "f", toks));
  EXPECT_NE(make_function_id("A", "f", toks), make_function_id("B", "f", toks));
  EXPECT_EQ(make_function_id("A", "f", toks).size(), 16u);
}

namespace {

std::vector<std::string> texts(const ingest::LexResult& r) {
  std::vector<std::string> out;
  for (const auto& t : r.tokens) out.push_back(t.text);
  return out;
}

}  // namespace

TEST(Lexer, OperatorsCommentsAndLines) {
  const auto r = ingest::lex("a += b >>= 2; // tail\n/* x\ny */ c != d");
  EXPECT_EQ(texts(r), (std::vector<std::string>{"a", "+=", "b", ">>=", "2", ";", "c", "!=", "d"}));
  EXPECT_EQ(r.tokens.back().line, 3u);
  EXPECT_TRUE(r.diagnostics.empty());
}

TEST(Lexer, StringsAndHexLiterals) {
  const auto r = ingest::lex(R"(x = "a\"b"; y = hex"00ff"; z = 'q';)");
  ASSERT_EQ(r.tokens.size(), 12u);
  EXPECT_EQ(r.tokens[2].kind, ingest::TokenKind::String);
  EXPECT_EQ(r.tokens[6].kind, ingest::TokenKind::String);
  EXPECT_EQ(r.tokens[6].text, "hex\"00ff\"");
  EXPECT_EQ(r.tokens[10].kind, ingest::TokenKind::String);
}

TEST(Lexer, UnterminatedConstructsAreDiagnosed) {
  EXPECT_FALSE(ingest::lex("x = \"open").diagnostics.empty());
  EXPECT_FALSE(ingest::lex("/* never closed").diagnostics.empty());
}

TEST(Lexer, TypeWords) {
  EXPECT_EQ(ingest::canonical_type_word("uint"), "uint256");
  EXPECT_EQ(ingest::canonical_type_word("int"), "int256");
  EXPECT_EQ(ingest::canonical_type_word("byte"), "bytes1");
  EXPECT_EQ(ingest::canonical_type_word("bytes32"), "bytes32");
  EXPECT_TRUE(ingest::is_elementary_type("uint8"));
  EXPECT_FALSE(ingest::is_elementary_type("uint7"));
  EXPECT_TRUE(ingest::is_assignment_op("<<="));
  EXPECT_FALSE(ingest::is_assignment_op("=="));
}

TEST(Lexer, Utf8Validation) {
  EXPECT_TRUE(ingest::is_valid_utf8("plain"));
  EXPECT_TRUE(ingest::is_valid_utf8("\xc3\xa9"));
  EXPECT_FALSE(ingest::is_valid_utf8("\xc3"));
  EXPECT_FALSE(ingest::is_valid_utf8("\xff"));
}
