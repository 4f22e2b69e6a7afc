#include <gtest/gtest.h>

#include <numbers>

#include "generators.hpp"
#include "scpatcher/rerank.hpp"

using scpatcher::SignatureFeatures;
using namespace scpatcher::rerank;
namespace st = scpatcher::testing;

namespace {

Candidate cand(std::string id, double s_sem, std::uint64_t guf, std::optional<std::string> clone = std::nullopt,
               std::set<std::string> sig = {}) {
  return Candidate{std::move(id), s_sem, guf, std::move(clone), SignatureFeatures{std::move(sig)}, std::nullopt};
}

QueryContext query(std::set<std::string> sig = {}) { return QueryContext{{}, SignatureFeatures{std::move(sig)}, {}}; }

}  // namespace

TEST(ScoreTrust, NeutralAtGufOne) {
  for (double s : {0.0, 0.1, 1.0, 3.75, 1e6}) EXPECT_EQ(score_trust(s, 1, kDefaultEpsilon), s);
}

TEST(ScoreTrust, ZeroNumerator) {
  for (std::uint64_t g : {1u, 2u, 50u, 1000u}) EXPECT_EQ(score_trust(0.0, g, kDefaultEpsilon), 0.0);
}

// Reference values evaluated at 40 significant digits.
TEST(ScoreTrust, HighPrecisionOracle) {
  EXPECT_NEAR(score_trust(2.0, 5, kDefaultEpsilon), 1.049961118032980377901602, 1e-15);
  EXPECT_NEAR(score_trust(0.5, 100, kDefaultEpsilon), 0.1081734320153212525720901, 1e-15);
  EXPECT_NEAR(score_trust(3.0, 2, kDefaultEpsilon), 2.284388578843979993914431, 1e-15);
}

TEST(ScoreTrust, NonPositiveDenominator) {
  try {
    score_trust(1.0, 1, 1e-9);  // ln(1 + 1e-9) > 0, allowed
    score_trust(1.0, 0, 0.5);   // ln(0.5) < 0
    FAIL();
  } catch (const ScoreError& e) {
    EXPECT_EQ(e.kind(), ScoreErrorKind::NonPositiveDenominator);
  }
}

TEST(FilterSyntactic, EmptyRequirementKeepsAll) {
  const std::vector<Candidate> c{cand("a", 1, 1), cand("b", 2, 1, std::nullopt, {"view"})};
  const auto r = filter_syntactic(c, {});
  EXPECT_EQ(r.kept, c);
  EXPECT_FALSE(r.fallback_used);
}

TEST(FilterSyntactic, FallbackWhenNothingMatches) {
  const std::vector<Candidate> c{cand("a", 1, 1, std::nullopt, {"public"}), cand("b", 2, 1, std::nullopt, {"view"})};
  const auto r = filter_syntactic(c, SignatureFeatures{{"payable"}});
  EXPECT_EQ(r.kept, c);
  EXPECT_TRUE(r.fallback_used);
}

TEST(FilterSyntactic, TenCandidateSubsetOracle) {
  st::Rng rng(17);
  std::vector<Candidate> c;
  for (int i = 0; i < 10; ++i) c.push_back(cand("c" + std::to_string(i), i, 1, std::nullopt, st::random_signature(rng).features));
  const SignatureFeatures req{{"public"}};
  std::vector<Candidate> expected;
  for (const auto& x : c) {
    if (x.signature.features.count("public")) expected.push_back(x);
  }
  const auto r = filter_syntactic(c, req);
  if (expected.empty()) {
    EXPECT_TRUE(r.fallback_used);
  } else {
    EXPECT_EQ(r.kept, expected);
  }
}

TEST(Rerank, SingleCandidate) {
  const auto out = rerank({cand("a", 0.4, 3)}, query(), {});
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].function_id, "a");
  ASSERT_TRUE(out[0].s_final);
  EXPECT_DOUBLE_EQ(*out[0].s_final, 0.4 / std::log(3 + kDefaultEpsilon));
}

TEST(Rerank, CloneDedupKeepsBetterScore) {
  RerankConfig cfg;
  cfg.k = 2;
  const auto out = rerank({cand("a", 0.9, 1, "g"), cand("b", 0.3, 1, "g")}, query(), cfg);
  ASSERT_EQ(out.size(), 1u);
  EXPECT_EQ(out[0].function_id, "b");
}

TEST(Rerank, TrustOutranksRawSimilarity) {
  // a is semantically closer but b is widely used
  const auto out = rerank({cand("a", 0.50, 1), cand("b", 0.60, 40)}, query(), {});
  ASSERT_EQ(out.size(), 2u);
  EXPECT_EQ(out[0].function_id, "b");
}

TEST(Rerank, InvalidConfig) {
  RerankConfig cfg;
  cfg.k = 0;
  EXPECT_THROW(rerank({cand("a", 1, 1)}, query(), cfg), std::invalid_argument);
  cfg = {};
  cfg.epsilon = 0.0;
  EXPECT_THROW(rerank({cand("a", 1, 1)}, query(), cfg), std::invalid_argument);
}

TEST(Rerank, EmptyInputGivesEmptyOutput) { EXPECT_TRUE(rerank({}, query(), {}).empty()); }

TEST(Rerank, PropertyMatchesBruteForce) {
  st::Rng rng(2024);
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = st::random_candidates(rng);
    const auto req = st::random_signature(rng, 0.25);
    RerankConfig cfg;
    const std::size_t ks[] = {1, 3, 5};
    cfg.k = ks[rng() % 3];
    const auto got = rerank(c, query(req.features), cfg);
    const auto want = st::brute_force_rerank(c, req, cfg.epsilon, cfg.k);
    ASSERT_EQ(got, want) << "trial " << trial;
  }
}

TEST(Rerank, PropertyOutputInvariants) {
  st::Rng rng(99);
  for (int trial = 0; trial < 300; ++trial) {
    const auto c = st::random_candidates(rng);
    RerankConfig cfg;
    cfg.k = 1 + rng() % 6;
    const auto out = rerank(c, query(st::random_signature(rng, 0.2).features), cfg);
    ASSERT_LE(out.size(), cfg.k);
    std::set<std::string> clones;
    for (std::size_t i = 0; i < out.size(); ++i) {
      if (out[i].clone_id) {
        ASSERT_TRUE(clones.insert(*out[i].clone_id).second);
      }
      if (i > 0) {
        ASSERT_LE(*out[i - 1].s_final, *out[i].s_final);
      }
    }
  }
}
