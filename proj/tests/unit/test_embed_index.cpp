#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "scpatcher/embed.hpp"
#include "scpatcher/index.hpp"
#include "support.hpp"

using namespace scpatcher;
using namespace scpatcher::embed;
namespace st = scpatcher::testing;

namespace {

EmbeddingVector random_vector(st::Rng& rng, std::size_t dim) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  EmbeddingVector v;
  for (std::size_t i = 0; i < dim; ++i) v.values.push_back(u(rng));
  return v;
}

// Independent bag-of-buckets computation for whitespace-separated identifiers.
std::vector<double> oracle_embedding(const std::vector<std::string>& words, std::size_t dim) {
  std::vector<double> v(dim, 0.0);
  for (const auto& w : words) {
    std::uint64_t h = 14695981039346656037ULL;
    for (unsigned char c : w) {
      h ^= c;
      h *= 1099511628211ULL;
    }
    v[h % dim] += 1.0;
  }
  double n = 0.0;
  for (double& x : v) {
    x = std::log(1.0 + x);
    n += x * x;
  }
  for (double& x : v) x /= std::sqrt(n);
  return v;
}

}  // namespace

TEST(SemanticDistance, Examples) {
  const EmbeddingVector v{{1.0, 2.0, 3.0}};
  EXPECT_EQ(semantic_distance(v, v), 0.0);
  EXPECT_DOUBLE_EQ(semantic_distance({{0.0, 0.0}}, {{3.0, 4.0}}), 5.0);
  EXPECT_THROW(semantic_distance({{1.0}}, {{1.0, 2.0}}), DimensionMismatch);
}

TEST(SemanticDistance, MatchesElementwiseOracle) {
  st::Rng rng(3);
  for (int i = 0; i < 100; ++i) {
    const auto a = random_vector(rng, 64), b = random_vector(rng, 64);
    long double acc = 0;
    for (std::size_t k = 0; k < 64; ++k) {
      const long double d = static_cast<long double>(a.values[k]) - b.values[k];
      acc += d * d;
    }
    EXPECT_NEAR(semantic_distance(a, b), static_cast<double>(std::sqrt(acc)), 1e-12);
  }
}

TEST(HashingEmbedder, BucketOracleAndNorm) {
  const HashingEmbedder h(32);
  const auto v = h.embed("alpha beta alpha // gamma");
  const auto expected = oracle_embedding({"alpha", "beta", "alpha"}, 32);
  ASSERT_EQ(v.dimension(), 32u);
  for (std::size_t i = 0; i < 32; ++i) EXPECT_NEAR(v.values[i], expected[i], 1e-12) << i;
  EXPECT_NEAR(v.norm(), 1.0, 1e-9);
}

TEST(HashingEmbedder, LiteralsCollapse) {
  const HashingEmbedder h;
  EXPECT_EQ(h.embed("x = 1;"), h.embed("x = 99;"));
  EXPECT_EQ(h.embed("x = \"a\";"), h.embed("x = 7;"));
}

TEST(HashingEmbedder, EmptyInputIsFirstBasisVector) {
  const HashingEmbedder h(8);
  const auto v = h.embed("  // only a comment\n");
  EXPECT_EQ(v.values, (std::vector<double>{1, 0, 0, 0, 0, 0, 0, 0}));
}

TEST(HashingEmbedder, DeterministicAndUnitNorm) {
  const HashingEmbedder h;
  st::Rng rng(5);
  const std::vector<std::string> words{"balance", "msg", "sender", "require", "transfer", "x", "+", "(", ")"};
  for (int i = 0; i < 100; ++i) {
    std::string s;
    const int n = 1 + static_cast<int>(rng() % 20);
    for (int k = 0; k < n; ++k) s += words[rng() % words.size()] + " ";
    const auto a = h.embed(s);
    EXPECT_EQ(a, h.embed(s));
    EXPECT_NEAR(a.norm(), 1.0, 1e-9);
  }
}

TEST(HashingEmbedder, ClonesAreCloserThanUnrelatedFunctions) {
  const auto& kb = st::corpus_kb();
  std::map<std::string, const FunctionUnit*> by_label;
  for (const auto& id : kb.graph.function_ids()) {
    const auto* f = kb.graph.function(id);
    by_label[f->contract_name + "." + f->name] = f;
  }
  const std::vector<std::pair<std::string, std::string>> pairs{
      {"SafeBank.withdraw", "Vault.pull"}, {"Coin.transfer", "Points.give"},
      {"Owned.transferOwnership", "Administered.changeAdmin"}};
  for (const auto& [a, b] : pairs) {
    const auto& va = kb.vectors.at(by_label.at(a)->id);
    const double clone_d = semantic_distance(va, kb.vectors.at(by_label.at(b)->id));
    for (const auto& [label, f] : by_label) {
      // same-named functions (Token.transfer) are related, not unrelated
      if (label == a || label == b || f->clone_id == by_label.at(a)->clone_id) continue;
      if (f->name == by_label.at(a)->name || f->name == by_label.at(b)->name) continue;
      EXPECT_LT(clone_d, semantic_distance(va, kb.vectors.at(f->id))) << a << " vs " << label;
    }
  }
}

TEST(RemoteEmbedder, UnconfiguredIsUnavailable) {
  RemoteEmbedderConfig cfg;
  cfg.dimension = 4;
  const RemoteEmbedder r(cfg);
  try {
    r.embed("x");
    FAIL();
  } catch (const ProviderError& e) {
    EXPECT_EQ(e.kind(), ProviderErrorKind::RemoteUnavailable);
  }
}

TEST(VectorIndex, SingleEntryAndIdentity) {
  st::Rng rng(1);
  const auto v = random_vector(rng, 8);
  const VectorIndex one({IndexEntry{"a", v, 1, std::nullopt, {}}});
  EXPECT_EQ(one.knn(random_vector(rng, 8), 50).size(), 1u);

  std::vector<IndexEntry> entries;
  for (int i = 0; i < 20; ++i) entries.push_back({"id" + std::to_string(i), random_vector(rng, 8), 1, std::nullopt, {}});
  const VectorIndex idx(entries);
  const auto got = idx.knn(entries[7].vector, 5);
  ASSERT_EQ(got.size(), 5u);
  EXPECT_EQ(got[0].function_id, "id7");
  EXPECT_EQ(got[0].s_sem, 0.0);
}

TEST(VectorIndex, Errors) {
  const VectorIndex empty;
  try {
    empty.knn({{1.0}}, 3);
    FAIL();
  } catch (const IndexError& e) {
    EXPECT_EQ(e.kind(), IndexErrorKind::EmptyIndex);
  }
  const VectorIndex idx({IndexEntry{"a", {{1.0, 0.0}}, 1, std::nullopt, {}}});
  EXPECT_THROW(idx.knn({{1.0}}, 1), DimensionMismatch);
  EXPECT_THROW(idx.knn({{1.0, 0.0}}, 0), IndexError);
  EXPECT_THROW(VectorIndex({IndexEntry{"a", {{1.0}}, 1, std::nullopt, {}}, IndexEntry{"b", {{1.0, 2.0}}, 1, std::nullopt, {}}}),
               DimensionMismatch);
}

TEST(VectorIndex, TiesBreakById) {
  std::vector<IndexEntry> entries;
  for (const char* id : {"c", "a", "b"}) entries.push_back({id, {{1.0, 0.0}}, 1, std::nullopt, {}});
  const auto got = VectorIndex(entries).knn({{0.0, 0.0}}, 3);
  ASSERT_EQ(got.size(), 3u);
  EXPECT_EQ(got[0].function_id, "a");
  EXPECT_EQ(got[1].function_id, "b");
  EXPECT_EQ(got[2].function_id, "c");
}
