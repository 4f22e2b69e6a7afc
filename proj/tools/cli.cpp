#include "cli.hpp"

#include <CLI11.hpp>
#include <fmt/format.h>

#include <fstream>
#include <iostream>
#include <sstream>

#include "scpatcher/dataset.hpp"
#include "scpatcher/ingest.hpp"
#include "scpatcher/kb.hpp"
#include "scpatcher/repair.hpp"

namespace scpatcher::cli {

namespace fs = std::filesystem;

namespace {

struct BuildKbArgs {
  std::string corpus, out, embedder = "hash";
  std::size_t dim = embed::kDefaultDimension;
  std::uint32_t clone_min_tokens = kg::kDefaultCloneMinTokens;
  bool verbose = false;
};

struct RetrieveArgs {
  std::string kb, function;
  std::size_t k = rerank::kDefaultK, top_n = embed::kDefaultTopN;
  double epsilon = rerank::kDefaultEpsilon;
};

struct LlmArgs {
  std::string llm = "mock", mock_script, model;
  std::uint64_t seed = 0;
  std::uint32_t stage1 = 1, stage2 = 1;
  double temperature = 0.0;
  std::string compiler, compiler_args;
};

struct RepairArgs {
  std::string kb, contract, vuln, function, contract_name, out;
  std::size_t k = rerank::kDefaultK, top_n = embed::kDefaultTopN;
  double epsilon = rerank::kDefaultEpsilon;
};

struct EvaluateArgs {
  std::string kb, manifest, report, k_sweep;
  std::size_t top_n = embed::kDefaultTopN, jobs = 1;
  double epsilon = rerank::kDefaultEpsilon;
  bool no_dedup = false;
};

void add_llm_options(CLI::App* cmd, LlmArgs& a) {
  cmd->add_option("--llm", a.llm, "Chat backend")->check(CLI::IsMember({"mock", "remote"}));
  cmd->add_option("--mock-script", a.mock_script, "Scripted responses for --llm mock");
  cmd->add_option("--seed", a.seed, "Seed matched against mock rules");
  cmd->add_option("--model", a.model, "Model id sent to the remote backend");
  cmd->add_option("--temperature", a.temperature, "Sampling temperature");
  cmd->add_option("--stage1-attempts", a.stage1, "Knowledge-guided attempts")->check(CLI::PositiveNumber);
  cmd->add_option("--stage2-attempts", a.stage2, "Chain-of-Thought attempts")->check(CLI::PositiveNumber);
  cmd->add_option("--compiler", a.compiler, "External compiler; default is the built-in parse check");
  cmd->add_option("--compiler-args", a.compiler_args, "Argument template, {file} is the source path");
}

repair::RepairConfig make_config(const LlmArgs& a, std::size_t k, std::size_t top_n, double epsilon) {
  repair::RepairConfig cfg;
  cfg.k = k;
  cfg.top_n = top_n;
  cfg.epsilon = epsilon;
  cfg.stage1_attempts = a.stage1;
  cfg.stage2_attempts = a.stage2;
  cfg.llm.model = a.model;
  cfg.llm.temperature = a.temperature;
  if (!a.compiler.empty()) {
    cfg.compile.mode = verify::CompileMode::ExternalCompiler;
    cfg.compile.compiler = a.compiler;
    cfg.compile.args_template = a.compiler_args;
  }
  return cfg;
}

std::unique_ptr<repair::ChatBackend> make_backend(const LlmArgs& a) {
  repair::BackendSpec spec;
  spec.seed = a.seed;
  if (a.llm == "remote") {
    spec.kind = repair::BackendSpec::Kind::Remote;
  } else {
    if (a.mock_script.empty()) throw CLI::RequiredError("--mock-script (required with --llm mock)");
    spec.mock_script = a.mock_script;
  }
  return repair::make_backend(spec);
}

int cmd_build_kb(const BuildKbArgs& a, std::ostream& out, std::ostream& err) {
  std::unique_ptr<embed::EmbeddingProvider> provider;
  if (a.embedder == "hash") {
    provider = std::make_unique<embed::HashingEmbedder>(a.dim);
  } else {
    auto cfg = embed::RemoteEmbedderConfig::from_env(a.dim);
    provider = std::make_unique<embed::RemoteEmbedder>(cfg);
  }
  kg::BuildReport rep;
  const kg::KnowledgeBase kb = kg::build_knowledge_base(a.corpus, *provider, a.clone_min_tokens, &rep);
  kg::save_kb(kb, a.out);
  out << fmt::format("files {}  functions {}  nodes {}  edges {}  clone groups {}  diagnostics {}\n", rep.files,
                     rep.functions, kb.graph.nodes().size(), kb.graph.edges().size(), kb.clones.groups.size(),
                     rep.diagnostics.size());
  if (a.verbose) {
    for (const auto& d : rep.diagnostics) err << d << "\n";
  }
  return kExitOk;
}

// PATH#Contract.func or PATH#func
std::pair<ingest::SourceUnit, std::string> resolve_function(const std::string& spec) {
  const auto hash = spec.rfind('#');
  if (hash == std::string::npos) throw CLI::ValidationError("--function", "expected PATH#Contract.func");
  const std::string path = spec.substr(0, hash);
  std::string name = spec.substr(hash + 1), contract;
  if (const auto dot = name.find('.'); dot != std::string::npos) {
    contract = name.substr(0, dot);
    name = name.substr(dot + 1);
  }
  ingest::SourceUnit unit = ingest::parse_source(kg::read_file(path), path);
  const auto [c, f] = unit.find_function_by_name(name, contract);
  if (!f) throw Error("function " + spec.substr(hash + 1) + " not found in " + path);
  std::string id = f->unit.id;
  return {std::move(unit), std::move(id)};
}

int cmd_retrieve(const RetrieveArgs& a, std::ostream& out) {
  const kg::KnowledgeBase kb = kg::load_kb(a.kb);
  const auto provider = embed::make_provider(kb.embedder.name, kb.embedder.dimension);
  const auto [unit, id] = resolve_function(a.function);
  const auto [c, fn] = unit.find_function(id);

  const repair::MockChatBackend unused({});
  repair::RepairConfig cfg;
  cfg.k = a.k;
  cfg.top_n = a.top_n;
  cfg.epsilon = a.epsilon;
  const repair::Repairer r(kb, *provider, unused, cfg);
  const repair::Retrieval got = r.retrieve(fn->unit, VulnClass::Reentrancy);

  out << fmt::format("query {}.{} [{}]\n", c->name, fn->unit.name, fn->unit.id);
  out << fmt::format("signature {}\n", fn->unit.signature.render());
  out << fmt::format("pool {}  fallback {}\n", got.pool.size(), got.fallback_used ? "yes" : "no");
  out << fmt::format("{:<4} {:<16} {:<28} {:>10} {:>5} {:>10}  {}\n", "rank", "function_id", "function", "s_sem",
                     "guf", "s_final", "clone");
  for (std::size_t i = 0; i < got.selected.size(); ++i) {
    const auto& cand = got.selected[i];
    const FunctionUnit* f = kb.graph.function(cand.function_id);
    const std::string label = f ? f->contract_name + "." + f->name : "?";
    out << fmt::format("{:<4} {:<16} {:<28} {:>10.6f} {:>5} {:>10.6f}  {}\n", i + 1, cand.function_id, label,
                       cand.s_sem, cand.guf, cand.s_final.value_or(0.0), cand.clone_id.value_or("-"));
  }
  return kExitOk;
}

int cmd_repair(const RepairArgs& a, const LlmArgs& l, std::ostream& out) {
  const kg::KnowledgeBase kb = kg::load_kb(a.kb);
  const auto provider = embed::make_provider(kb.embedder.name, kb.embedder.dimension);
  const auto vc = parse_vuln_class(a.vuln);
  if (!vc) throw CLI::ValidationError("--vuln", "unknown vulnerability class '" + a.vuln + "'");
  const auto backend = make_backend(l);
  const repair::Repairer r(kb, *provider, *backend, make_config(l, a.k, a.top_n, a.epsilon));

  const ingest::SourceUnit unit = ingest::parse_source(kg::read_file(a.contract), a.contract);
  const auto [c, f] = unit.find_function_by_name(a.function, a.contract_name);
  if (!f) throw Error("function " + a.function + " not found in " + a.contract);
  const VulnerabilityReport report{a.contract, f->unit.id, *vc, {}};
  const RepairOutcome o = r.repair(unit, report);

  out << fmt::format("function  {}.{} [{}]\n", c->name, f->unit.name, f->unit.id);
  out << fmt::format("compiled  {}\nfixed     {}\nstage     {}\n", o.compiled ? "yes" : "no", o.fixed ? "yes" : "no",
                     o.stage_used ? std::string(to_string(*o.stage_used)) : "-");
  for (const auto& d : o.diagnostics) out << "  " << d << "\n";
  if (!a.out.empty() && o.patch) {
    std::ofstream f_out(a.out, std::ios::binary);
    f_out << o.patch->patched_source;
    if (!f_out) throw IoError("cannot write " + a.out);
    out << "patch written to " << a.out << "\n";
  }
  return kExitOk;
}

std::vector<std::size_t> parse_k_sweep(const std::string& text) {
  std::vector<std::size_t> ks;
  std::stringstream in(text);
  for (std::string item; std::getline(in, item, ',');) {
    try {
      std::size_t used = 0;
      const long v = std::stol(item, &used);
      if (used != item.size() || v <= 0) throw std::invalid_argument(item);
      ks.push_back(static_cast<std::size_t>(v));
    } catch (const std::exception&) {
      throw CLI::ValidationError("--k-sweep", "expected comma-separated positive integers");
    }
  }
  if (ks.empty()) throw CLI::ValidationError("--k-sweep", "empty list");
  return ks;
}

int cmd_evaluate(const EvaluateArgs& a, const LlmArgs& l, std::ostream& out) {
  eval::RunOptions opts;
  if (!a.k_sweep.empty()) opts.k_values = parse_k_sweep(a.k_sweep);
  opts.jobs = a.jobs;
  opts.dedup = !a.no_dedup;
  const kg::KnowledgeBase kb = kg::load_kb(a.kb);
  const auto provider = embed::make_provider(kb.embedder.name, kb.embedder.dimension);
  const auto backend = make_backend(l);
  const eval::DatasetManifest manifest = eval::DatasetManifest::load(a.manifest);
  const auto cfg = make_config(l, opts.k_values.front(), a.top_n, a.epsilon);
  const eval::EvaluationReport rep = eval::run_dataset(manifest, kb, *provider, *backend, cfg, opts);
  eval::write_report(rep, a.report);
  for (const auto& x : rep.excluded) out << "excluded " << x.entry.id << " (matches " << x.kb_source << ")\n";
  for (const auto& run : rep.runs) {
    out << "k = " << run.k << "\n" << eval::render_text(run.metrics);
  }
  return kExitOk;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Retrieval-augmented repair of vulnerable Solidity contracts", "scpatcher"};
  app.require_subcommand(1);

  BuildKbArgs bk;
  auto* build = app.add_subcommand("build-kb", "Ingest a corpus into a knowledge base file");
  build->add_option("--corpus", bk.corpus, "Directory of .sol files")->required()->check(CLI::ExistingDirectory);
  build->add_option("--out", bk.out, "Output KB file")->required();
  build->add_option("--embedder", bk.embedder, "Embedding provider")->check(CLI::IsMember({"hash", "remote"}));
  build->add_option("--dim", bk.dim, "Embedding dimension")->check(CLI::PositiveNumber);
  build->add_option("--clone-min-tokens", bk.clone_min_tokens, "Shortest function eligible for clone grouping");
  build->add_flag("--verbose", bk.verbose, "Print ingest diagnostics");

  RetrieveArgs rt;
  auto* retrieve = app.add_subcommand("retrieve", "Show the reranked references for a function");
  retrieve->add_option("--kb", rt.kb, "KB file")->required()->check(CLI::ExistingFile);
  retrieve->add_option("--function", rt.function, "PATH#Contract.func")->required();
  retrieve->add_option("--k", rt.k, "References to keep")->check(CLI::PositiveNumber);
  retrieve->add_option("--top-n", rt.top_n, "k-NN pool size")->check(CLI::PositiveNumber);
  retrieve->add_option("--epsilon", rt.epsilon, "Trust smoothing constant")->check(CLI::PositiveNumber);

  RepairArgs rp;
  LlmArgs rp_llm;
  auto* rep = app.add_subcommand("repair", "Repair one vulnerable function");
  rep->add_option("--kb", rp.kb, "KB file")->required()->check(CLI::ExistingFile);
  rep->add_option("--contract", rp.contract, "Solidity file")->required()->check(CLI::ExistingFile);
  rep->add_option("--vuln", rp.vuln, "Vulnerability class")->required();
  rep->add_option("--function", rp.function, "Function name")->required();
  rep->add_option("--contract-name", rp.contract_name, "Contract declaring the function");
  rep->add_option("--out", rp.out, "Where to write the patched source");
  rep->add_option("--k", rp.k, "References to keep")->check(CLI::PositiveNumber);
  rep->add_option("--top-n", rp.top_n, "k-NN pool size")->check(CLI::PositiveNumber);
  rep->add_option("--epsilon", rp.epsilon, "Trust smoothing constant")->check(CLI::PositiveNumber);
  add_llm_options(rep, rp_llm);

  EvaluateArgs ev;
  LlmArgs ev_llm;
  auto* evaluate = app.add_subcommand("evaluate", "Run a manifest and write a metrics report");
  evaluate->add_option("--kb", ev.kb, "KB file")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--manifest", ev.manifest, "Dataset manifest")->required()->check(CLI::ExistingFile);
  evaluate->add_option("--report", ev.report, "Report output file")->required();
  evaluate->add_option("--k-sweep", ev.k_sweep, "Comma-separated k values, e.g. 1,3,5");
  evaluate->add_option("--top-n", ev.top_n, "k-NN pool size")->check(CLI::PositiveNumber);
  evaluate->add_option("--epsilon", ev.epsilon, "Trust smoothing constant")->check(CLI::PositiveNumber);
  evaluate->add_option("--jobs", ev.jobs, "Entries repaired in parallel")->check(CLI::PositiveNumber);
  evaluate->add_flag("--no-dedup", ev.no_dedup, "Keep entries that duplicate corpus files");
  add_llm_options(evaluate, ev_llm);

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (*build) return cmd_build_kb(bk, out, err);
    if (*retrieve) return cmd_retrieve(rt, out);
    if (*rep) return cmd_repair(rp, rp_llm, out);
    return cmd_evaluate(ev, ev_llm, out);
  } catch (const CLI::Error& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitRuntime;
  }
}

}  // namespace scpatcher::cli
