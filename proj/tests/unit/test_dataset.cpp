#include <gtest/gtest.h>

#include <fstream>
#include <nlohmann/json.hpp>

#include "scpatcher/dataset.hpp"
#include "support.hpp"

using namespace scpatcher;
using namespace scpatcher::eval;
namespace st = scpatcher::testing;
namespace fs = std::filesystem;

namespace {

const char* kScenarioText =
    "N            6\nN_comp       5\nN_fail_comp  1\nN_fixed      4\nN_fail_fixed 1\n"
    "CPR          83.3%\nERR          80.0%\nORR          66.7%\n";

EvaluationReport run_scenario(const std::string& script, RunOptions opts = {}) {
  const auto manifest = DatasetManifest::load(st::fixture("e2e/manifest.json"));
  const auto mock = repair::MockChatBackend::load(st::fixture("e2e/" + script));
  const embed::HashingEmbedder h;
  return run_dataset(manifest, st::corpus_kb(), h, mock, repair::RepairConfig{}, opts);
}

DatasetErrorKind dataset_error_of(std::string_view json, const fs::path& base) {
  try {
    DatasetManifest::parse(json, base);
  } catch (const DatasetError& e) {
    return e.kind();
  }
  ADD_FAILURE() << "no DatasetError for " << json;
  return DatasetErrorKind::Invalid;
}

}  // namespace

TEST(Manifest, ParsesCommittedFixture) {
  const auto m = DatasetManifest::load(st::fixture("e2e/manifest.json"));
  ASSERT_EQ(m.entries.size(), 6u);
  EXPECT_EQ(m.entries[0].id, "c1");
  EXPECT_EQ(m.entries[0].line_hint, 10u);
  EXPECT_EQ(m.entries[3].contract_name, "AdminRegistry");
  EXPECT_EQ(m.entries[4].vuln_class, VulnClass::IntegerOverflow);
  EXPECT_TRUE(fs::exists(m.resolve(m.entries[5])));
}

TEST(Manifest, Errors) {
  const auto base = st::fixture("e2e");
  EXPECT_EQ(dataset_error_of("[]", base), DatasetErrorKind::Invalid);
  EXPECT_EQ(dataset_error_of("{", base), DatasetErrorKind::Invalid);
  EXPECT_EQ(dataset_error_of(R"({"entries":[{"contract":"cases/c1_bank.sol","class":"Nope","function":"f"}]})", base),
            DatasetErrorKind::Invalid);
  EXPECT_EQ(dataset_error_of(R"({"entries":[{"contract":"cases/c1_bank.sol","class":"Reentrancy"}]})", base),
            DatasetErrorKind::Invalid);
  EXPECT_EQ(dataset_error_of(R"({"entries":[{"contract":"cases/none.sol","class":"Reentrancy","function":"f"}]})", base),
            DatasetErrorKind::MissingFile);
  EXPECT_EQ(dataset_error_of(R"({"entries":[
      {"id":"a","contract":"cases/c1_bank.sol","class":"Reentrancy","function":"withdraw"},
      {"id":"a","contract":"cases/c6_fund.sol","class":"Reentrancy","function":"claim"}]})", base),
            DatasetErrorKind::Invalid);
}

TEST(Manifest, IdDefaultsToContractPath) {
  const auto m = DatasetManifest::parse(
      R"({"entries":[{"contract":"cases/c1_bank.sol","class":"Reentrancy","function":"withdraw"}]})", st::fixture("e2e"));
  EXPECT_EQ(m.entries[0].id, "cases/c1_bank.sol");
}

TEST(Dedup, IdenticalCommentOnlyAndDisjoint) {
  st::TempDir dir;
  const std::string safe = st::slurp(st::fixture("corpus/bank_safe.sol"));
  std::ofstream(dir.path() / "same.sol") << safe;
  std::ofstream(dir.path() / "commented.sol") << "// a new header comment\n/* and a block */\n" << safe << "\n\n";
  std::ofstream(dir.path() / "other.sol") << st::slurp(st::fixture("e2e/cases/c1_bank.sol"));
  const auto m = DatasetManifest::parse(R"({"entries":[
      {"id":"same","contract":"same.sol","class":"Reentrancy","function":"withdraw"},
      {"id":"commented","contract":"commented.sol","class":"Reentrancy","function":"withdraw"},
      {"id":"other","contract":"other.sol","class":"Reentrancy","function":"withdraw"}]})",
                                        dir.path());
  const auto r = dedup_against_kb(m, st::corpus_kb());
  ASSERT_EQ(r.excluded.size(), 2u);
  EXPECT_EQ(r.excluded[0].entry.id, "same");
  EXPECT_EQ(r.excluded[0].kb_source, "bank_safe.sol");
  EXPECT_EQ(r.excluded[1].entry.id, "commented");
  ASSERT_EQ(r.kept.size(), 1u);
  EXPECT_EQ(r.kept[0].id, "other");
}

TEST(Dedup, FixtureCasesAreDisjointFromCorpus) {
  const auto m = DatasetManifest::load(st::fixture("e2e/manifest.json"));
  const auto r = dedup_against_kb(m, st::corpus_kb());
  EXPECT_TRUE(r.excluded.empty());
  EXPECT_EQ(r.kept, m.entries);
}

TEST(Dedup, RenamedIdentifierIsNotADuplicate) {
  st::TempDir dir;
  std::string src = st::slurp(st::fixture("corpus/bank_safe.sol"));
  src.replace(src.find("SafeBank"), 8, "OtherBank");
  std::ofstream(dir.path() / "renamed.sol") << src;
  const auto m = DatasetManifest::parse(
      R"({"entries":[{"contract":"renamed.sol","class":"Reentrancy","function":"withdraw"}]})", dir.path());
  EXPECT_TRUE(dedup_against_kb(m, st::corpus_kb()).excluded.empty());
}

TEST(Evaluate, TwoStageScenario) {
  const auto rep = run_scenario("mock_two_stage.json");
  ASSERT_EQ(rep.runs.size(), 1u);
  const auto& run = rep.runs[0];
  EXPECT_EQ(render_text(run.metrics), kScenarioText);
  using S = RepairStage;
  const std::vector<std::tuple<std::string, bool, bool, S>> want{
      {"c1", true, true, S::KnowledgeGuided},  {"c2", true, true, S::KnowledgeGuided},
      {"c3", true, true, S::ChainOfThought},   {"c4", true, true, S::ChainOfThought},
      {"c5", true, false, S::ChainOfThought},  {"c6", false, false, S::ChainOfThought}};
  ASSERT_EQ(run.rows.size(), want.size());
  for (std::size_t i = 0; i < want.size(); ++i) {
    const auto& [id, compiled, fixed, stage] = want[i];
    const auto& row = run.rows[i];
    EXPECT_EQ(row.entry.id, id);
    EXPECT_EQ(row.outcome.compiled, compiled) << id;
    EXPECT_EQ(row.outcome.fixed, fixed) << id;
    EXPECT_EQ(row.outcome.stage_used, stage) << id;
    EXPECT_TRUE(validate_outcome(row.outcome).empty()) << id;
  }
}

TEST(Evaluate, Stage1OnlyScenario) {
  const auto rep = run_scenario("mock_stage1.json");
  EXPECT_EQ(render_text(rep.runs[0].metrics),
            "N            6\nN_comp       5\nN_fail_comp  1\nN_fixed      5\nN_fail_fixed 0\n"
            "CPR          83.3%\nERR          100.0%\nORR          83.3%\n");
}

TEST(Evaluate, KSweepChangesRetrievedReferences) {
  RunOptions opts;
  opts.k_values = {1, 3};
  const auto rep = run_scenario("mock_k_sensitive.json", opts);
  ASSERT_EQ(rep.runs.size(), 2u);
  EXPECT_EQ(rep.runs[0].k, 1u);
  EXPECT_EQ(rep.runs[1].k, 3u);
  EXPECT_EQ(rep.runs[0].metrics.n_fixed, 0u);
  EXPECT_EQ(rep.runs[1].metrics, MetricsReport::from_counts(6, 3, 3));
}

TEST(Evaluate, EmptyManifest) {
  const auto m = DatasetManifest::parse(R"({"entries": []})", st::fixture("e2e"));
  const repair::MockChatBackend mock({});
  const embed::HashingEmbedder h;
  const auto rep = run_dataset(m, st::corpus_kb(), h, mock, repair::RepairConfig{});
  ASSERT_EQ(rep.runs.size(), 1u);
  EXPECT_EQ(rep.runs[0].metrics.n_total, 0u);
  const auto json = nlohmann::json::parse(render_report(rep));
  EXPECT_TRUE(json["runs"][0]["metrics"]["cpr"].is_null());
}

TEST(Evaluate, ReportGolden) {
  const auto text = render_report(run_scenario("mock_two_stage.json"));
  EXPECT_EQ(st::golden_mismatch(text, "report_two_stage.json"), "");
  EXPECT_TRUE(text.ends_with("}\n"));
}

TEST(Evaluate, ParallelJobsGiveIdenticalReport) {
  RunOptions serial;
  RunOptions parallel;
  parallel.jobs = 4;
  serial.k_values = parallel.k_values = {1, 3, 5};
  EXPECT_EQ(render_report(run_scenario("mock_two_stage.json", serial)),
            render_report(run_scenario("mock_two_stage.json", parallel)));
}

TEST(Evaluate, WriteReportRoundTrip) {
  st::TempDir dir;
  const auto rep = run_scenario("mock_stage1.json");
  write_report(rep, dir.path() / "r.json");
  EXPECT_EQ(st::slurp(dir.path() / "r.json"), render_report(rep));
  EXPECT_THROW(write_report(rep, dir.path() / "missing" / "r.json"), IoError);
}
