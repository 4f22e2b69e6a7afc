#include <gtest/gtest.h>

#include "scpatcher/repair.hpp"
#include "support.hpp"

using namespace scpatcher;
using namespace scpatcher::repair;
namespace st = scpatcher::testing;

namespace {

struct Target {
  ingest::SourceUnit unit;
  VulnerabilityReport report;
};

Target target(const std::string& file, const std::string& fn, VulnClass cls) {
  Target t;
  t.unit = ingest::parse_source(st::slurp(st::fixture("e2e/cases/" + file)), file);
  t.report = VulnerabilityReport{file, t.unit.find_function_by_name(fn).second->unit.id, cls, {}};
  return t;
}

MockRule reply(std::vector<std::string> contains, const std::string& patch_file) {
  return MockRule{std::nullopt, std::move(contains), std::nullopt, st::slurp(st::fixture("e2e/" + patch_file))};
}

RepairOutcome run(const Target& t, const ChatBackend& backend, RepairConfig cfg = {}) {
  const embed::HashingEmbedder h;
  const Repairer r(st::corpus_kb(), h, backend, cfg);
  return r.repair(t.unit, t.report);
}

// Counts prompts and records their stages.
class CountingBackend final : public ChatBackend {
 public:
  explicit CountingBackend(const ChatBackend& inner) : inner_(inner) {}
  std::string name() const override { return "counting"; }
  LlmResponse complete(const LlmRequest& req) const override {
    const bool cot = req.messages.back().content.find("## Previous attempt failed") != std::string::npos;
    (cot ? stage2 : stage1)++;
    return inner_.complete(req);
  }
  mutable int stage1 = 0;
  mutable int stage2 = 0;

 private:
  const ChatBackend& inner_;
};

}  // namespace

TEST(Repair, Stage1Success) {
  const auto t = target("c1_bank.sol", "withdraw", VulnClass::Reentrancy);
  const MockChatBackend mock({reply({"contract Bank"}, "patches/c1_good.sol")});
  const CountingBackend counting(mock);
  const auto o = run(t, counting);
  EXPECT_TRUE(o.compiled);
  EXPECT_TRUE(o.fixed);
  EXPECT_EQ(o.stage_used, RepairStage::KnowledgeGuided);
  EXPECT_EQ(counting.stage1, 1);
  EXPECT_EQ(counting.stage2, 0);
  ASSERT_TRUE(o.patch);
  EXPECT_EQ(o.patch->patched_source, st::slurp(st::fixture("e2e/patches/c1_good.sol")));
  EXPECT_EQ(o.diagnostics.back(), "stage1#1: passed");
  EXPECT_TRUE(validate_outcome(o).empty());
}

TEST(Repair, Stage1FailsStage2Succeeds) {
  const auto t = target("c3_raffle.sol", "draw", VulnClass::TimestampManipulation);
  const MockChatBackend mock({reply({"## Previous attempt failed"}, "patches/c3_good.sol"),
                              reply({"contract Raffle"}, "patches/broken.sol")});
  const CountingBackend counting(mock);
  const auto o = run(t, counting);
  EXPECT_TRUE(o.compiled);
  EXPECT_TRUE(o.fixed);
  EXPECT_EQ(o.stage_used, RepairStage::ChainOfThought);
  EXPECT_EQ(counting.stage1, 1);
  EXPECT_EQ(counting.stage2, 1);
  ASSERT_GE(o.diagnostics.size(), 2u);
  EXPECT_TRUE(o.diagnostics[o.diagnostics.size() - 2].starts_with("stage1#1: rejected: The patched contract does not compile."));
  EXPECT_EQ(o.diagnostics.back(), "stage2#1: passed");
  EXPECT_TRUE(validate_outcome(o).empty());
}

TEST(Repair, BothStagesFail) {
  const auto t = target("c6_fund.sol", "claim", VulnClass::Reentrancy);
  // compiled but still vulnerable, then uncompilable: compiled follows the last patch
  const MockChatBackend mock({reply({"## Previous attempt failed"}, "patches/broken.sol"),
                              reply({"contract Fund"}, "cases/c6_fund.sol")});
  const auto o = run(t, mock);
  EXPECT_FALSE(o.compiled);
  EXPECT_FALSE(o.fixed);
  EXPECT_EQ(o.stage_used, RepairStage::ChainOfThought);
  EXPECT_TRUE(validate_outcome(o).empty());

  const MockChatBackend same({reply({"contract Fund"}, "cases/c6_fund.sol")});
  const auto o2 = run(t, same);
  EXPECT_TRUE(o2.compiled);
  EXPECT_FALSE(o2.fixed);
  EXPECT_TRUE(validate_outcome(o2).empty());
}

TEST(Repair, Stage2FeedbackCarriesVerifierOutput) {
  const auto t = target("c6_fund.sol", "claim", VulnClass::Reentrancy);
  const MockChatBackend mock({MockRule{std::nullopt,
                                       {"- still vulnerable: Reentrancy in Fund.claim (line 8, rule reentrancy-eth)"},
                                       std::nullopt, st::slurp(st::fixture("e2e/patches/c6_good.sol"))},
                              reply({"contract Fund"}, "cases/c6_fund.sol")});
  const auto o = run(t, mock);
  EXPECT_TRUE(o.fixed);
  EXPECT_EQ(o.stage_used, RepairStage::ChainOfThought);
}

TEST(Repair, LlmErrorsBecomeDiagnostics) {
  const auto t = target("c1_bank.sol", "withdraw", VulnClass::Reentrancy);
  const MockChatBackend empty({});
  const auto o = run(t, empty);
  EXPECT_FALSE(o.compiled);
  EXPECT_FALSE(o.fixed);
  EXPECT_FALSE(o.stage_used);
  EXPECT_FALSE(o.patch);
  ASSERT_EQ(o.diagnostics.size(), 2u);
  EXPECT_TRUE(o.diagnostics[0].starts_with("stage1#1: llm error: ")) << o.diagnostics[0];
  EXPECT_TRUE(o.diagnostics[1].starts_with("stage2#1: llm error: "));
  EXPECT_TRUE(validate_outcome(o).empty());
}

TEST(Repair, AttemptBudgets) {
  const auto t = target("c1_bank.sol", "withdraw", VulnClass::Reentrancy);
  const MockChatBackend mock({reply({"contract Bank"}, "patches/broken.sol")});
  const CountingBackend counting(mock);
  RepairConfig cfg;
  cfg.stage1_attempts = 3;
  cfg.stage2_attempts = 2;
  const auto o = run(t, counting, cfg);
  EXPECT_EQ(counting.stage1, 3);
  EXPECT_EQ(counting.stage2, 2);
  EXPECT_FALSE(o.fixed);
  cfg.stage1_attempts = 0;
  EXPECT_THROW(cfg.validate(), std::invalid_argument);
}

TEST(Repair, UnknownFunctionRejected) {
  auto t = target("c1_bank.sol", "withdraw", VulnClass::Reentrancy);
  t.report.function_id = "0000000000000000";
  const MockChatBackend mock({});
  EXPECT_THROW(run(t, mock), std::invalid_argument);
}

TEST(Repair, DeterministicWithMock) {
  const auto mock = MockChatBackend::load(st::fixture("e2e/mock_two_stage.json"));
  for (const auto& [file, fn, cls] : {std::tuple{"c3_raffle.sol", "draw", VulnClass::TimestampManipulation},
                                      std::tuple{"c5_ledger.sol", "credit", VulnClass::IntegerOverflow}}) {
    const auto t = target(file, fn, cls);
    EXPECT_EQ(run(t, mock), run(t, mock)) << file;
  }
}

// Stage 2 runs iff stage 1 failed, over random mixes of good and bad replies.
TEST(Repair, PropertyStage2IffStage1Failed) {
  st::Rng rng(5);
  const auto t = target("c2_refunder.sol", "refund", VulnClass::UncheckedCallReturn);
  const std::vector<std::string> replies{"patches/c2_good.sol", "patches/broken.sol", "cases/c2_refunder.sol"};
  for (int trial = 0; trial < 12; ++trial) {
    const auto& s1 = replies[rng() % replies.size()];
    const auto& s2 = replies[rng() % replies.size()];
    const MockChatBackend mock({reply({"## Previous attempt failed"}, s2), reply({"contract Refunder"}, s1)});
    const CountingBackend counting(mock);
    const auto o = run(t, counting);
    const bool s1_ok = s1 == "patches/c2_good.sol";
    EXPECT_EQ(counting.stage2, s1_ok ? 0 : 1) << s1 << " " << s2;
    EXPECT_EQ(o.fixed, s1_ok || s2 == "patches/c2_good.sol");
    EXPECT_TRUE(validate_outcome(o).empty());
  }
}

TEST(Repair, RetrievalUsesConfiguredK) {
  const auto t = target("c6_fund.sol", "claim", VulnClass::Reentrancy);
  const embed::HashingEmbedder h;
  const MockChatBackend mock({});
  RepairConfig cfg;
  cfg.k = 1;
  const Repairer r(st::corpus_kb(), h, mock, cfg);
  const auto fn = t.unit.find_function(t.report.function_id).second->unit;
  const auto got = r.retrieve(fn, VulnClass::Reentrancy);
  EXPECT_EQ(got.selected.size(), 1u);
  EXPECT_EQ(got.pool.size(), st::corpus_kb().vectors.size());
}
