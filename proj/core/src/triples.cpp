#include <algorithm>
#include <cctype>
#include <set>
#include <tuple>
#include <unordered_set>

#include "scpatcher/analysis.hpp"
#include "scpatcher/ingest.hpp"

namespace scpatcher::ingest {

namespace {

// Free functions and globals that are never corpus call targets.
const std::unordered_set<std::string_view> kBuiltinCalls = {
    "require", "assert",    "revert",    "keccak256", "sha256",    "sha3",     "ripemd160",
    "ecrecover", "addmod",  "mulmod",    "selfdestruct", "suicide", "blockhash", "gasleft",
};

const std::unordered_set<std::string_view> kBuiltinReceivers = {"abi", "msg", "block", "tx", "bytes",
                                                                 "string", "address", "type"};

// Members of address, array and bytes values.
const std::unordered_set<std::string_view> kBuiltinMembers = {"transfer", "send",  "call", "delegatecall",
                                                               "staticcall", "push", "pop",  "concat"};

std::string lowercase(std::string_view s) {
  std::string out(s);
  for (char& ch : out) ch = static_cast<char>(std::tolower(static_cast<unsigned char>(ch)));
  return out;
}

}  // namespace

std::string_view to_string(Relation r) noexcept {
  switch (r) {
    case Relation::Owns: return "OWNS";
    case Relation::Calls: return "CALLS";
    case Relation::Returns: return "RETURNS";
    case Relation::UsesModifier: return "USES_MODIFIER";
    case Relation::Reads: return "READS";
    case Relation::Writes: return "WRITES";
  }
  return "?";
}

std::optional<Relation> parse_relation(std::string_view text) {
  for (Relation r : {Relation::Owns, Relation::Calls, Relation::Returns, Relation::UsesModifier, Relation::Reads,
                     Relation::Writes}) {
    if (to_string(r) == text) return r;
  }
  return std::nullopt;
}

std::string_view to_string(NodeKind k) noexcept {
  switch (k) {
    case NodeKind::Contract: return "Contract";
    case NodeKind::Function: return "Function";
    case NodeKind::Variable: return "Variable";
    case NodeKind::Modifier: return "Modifier";
    case NodeKind::TypeName: return "TypeName";
  }
  return "?";
}

bool operator<(const Triple& a, const Triple& b) {
  return std::tie(a.subject.id, a.relation, a.object.id) < std::tie(b.subject.id, b.relation, b.object.id);
}

bool well_typed(const Triple& t) {
  const NodeKind s = t.subject.kind;
  const NodeKind o = t.object.kind;
  switch (t.relation) {
    case Relation::Owns:
      return s == NodeKind::Contract &&
             (o == NodeKind::Function || o == NodeKind::Variable || o == NodeKind::Modifier);
    case Relation::Calls: return s == NodeKind::Function && o == NodeKind::Function;
    case Relation::Returns: return s == NodeKind::Function && o == NodeKind::TypeName;
    case Relation::UsesModifier: return s == NodeKind::Function && o == NodeKind::Modifier;
    case Relation::Reads:
    case Relation::Writes: return s == NodeKind::Function && o == NodeKind::Variable;
  }
  return false;
}

std::string contract_node_id(std::string_view contract) { return "contract:" + std::string(contract); }
std::string variable_node_id(std::string_view contract, std::string_view var) {
  return "var:" + std::string(contract) + "." + std::string(var);
}
std::string modifier_node_id(std::string_view contract, std::string_view modifier) {
  return "modifier:" + std::string(contract) + "." + std::string(modifier);
}
std::string type_node_id(std::string_view type) { return "type:" + std::string(type); }

TripleExtraction extract_triples(const SourceUnit& unit) {
  TripleExtraction out;
  std::set<Triple> triples;
  const auto& t = unit.tokens;
  auto fn_ref = [](const FunctionDecl& f) { return NodeRef{NodeKind::Function, f.unit.id}; };
  auto note = [&](std::uint32_t line, const std::string& msg) {
    out.diagnostics.push_back(unit.path + ":" + std::to_string(line) + ": " + msg);
  };

  // Functions named `name` declared in `c` or, failing that, its bases.
  auto lookup_in = [&](const ContractDecl& c, std::string_view name) {
    std::vector<const FunctionDecl*> hits;
    for (const auto& f : c.functions) {
      if (f.unit.name == name) hits.push_back(&f);
    }
    if (hits.empty()) {
      for (const ContractDecl* b : base_contracts(unit, c)) {
        for (const auto& f : b->functions) {
          if (f.unit.name == name) hits.push_back(&f);
        }
        if (!hits.empty()) break;
      }
    }
    return hits;
  };
  auto is_type_name = [&](std::string_view name) {
    return std::find(unit.type_names.begin(), unit.type_names.end(), name) != unit.type_names.end();
  };

  for (const ContractDecl& c : unit.contracts) {
    const NodeRef cref{NodeKind::Contract, contract_node_id(c.name)};
    for (const auto& v : c.state_vars) {
      triples.insert({cref, Relation::Owns, {NodeKind::Variable, variable_node_id(c.name, v.name)}});
    }
    for (const auto& m : c.modifiers) {
      triples.insert({cref, Relation::Owns, {NodeKind::Modifier, modifier_node_id(c.name, m.name)}});
    }
    const auto vars = visible_state_vars(unit, c);

    for (const FunctionDecl& f : c.functions) {
      const NodeRef fref = fn_ref(f);
      triples.insert({cref, Relation::Owns, fref});
      for (const auto& r : f.returns) {
        triples.insert({fref, Relation::Returns, {NodeKind::TypeName, type_node_id(r.type)}});
      }
      for (const auto& m : f.modifiers) {
        std::string owner;
        if (std::any_of(c.modifiers.begin(), c.modifiers.end(), [&](const auto& d) { return d.name == m; })) {
          owner = c.name;
        } else {
          for (const ContractDecl* b : base_contracts(unit, c)) {
            if (std::any_of(b->modifiers.begin(), b->modifiers.end(), [&](const auto& d) { return d.name == m; })) {
              owner = b->name;
              break;
            }
          }
        }
        if (owner.empty()) {
          // base-constructor invocations on constructors look like modifiers
          if (!unit.find_contract(m)) note(f.unit.start_line, "unresolved modifier '" + m + "'");
          continue;
        }
        triples.insert({fref, Relation::UsesModifier, {NodeKind::Modifier, modifier_node_id(owner, m)}});
      }
      if (!f.has_body) continue;

      const auto locals = local_names(unit, f);
      // identifier -> contract type, for member-call resolution
      std::map<std::string, std::string> typed;
      for (const auto& v : c.state_vars) {
        if (unit.find_contract(v.type)) typed[v.name] = v.type;
      }
      for (std::size_t i = f.body_begin; i + 1 < f.body_end; ++i) {
        if (t[i].kind == TokenKind::Identifier && unit.find_contract(t[i].text) &&
            t[i + 1].kind == TokenKind::Identifier) {
          typed[t[i + 1].text] = t[i].text;
        }
      }
      for (const auto& p : f.params) {
        for (const auto& other : unit.contracts) {
          if (!p.name.empty() && p.type == lowercase(other.name)) typed[p.name] = other.name;
        }
      }

      for (std::size_t i = f.body_begin; i < f.body_end; ++i) {
        const Token& tk = t[i];
        if (tk.kind != TokenKind::Identifier) continue;
        const bool member = i > f.body_begin && t[i - 1].is(".");

        // call sites
        if (i + 1 < f.body_end && t[i + 1].is("(")) {
          std::vector<const FunctionDecl*> targets;
          bool silent = false;
          if (member) {
            const Token& recv = t[i - 2];
            const ContractDecl* scope = nullptr;
            if (recv.is("this")) {
              scope = &c;
            } else if (recv.is("super")) {
              for (const ContractDecl* b : base_contracts(unit, c)) {
                for (const auto& bf : b->functions) {
                  if (bf.unit.name == tk.text) targets.push_back(&bf);
                }
                if (!targets.empty()) break;
              }
            } else if (recv.kind == TokenKind::Identifier && unit.find_contract(recv.text)) {
              scope = unit.find_contract(recv.text);
            } else if (recv.kind == TokenKind::Identifier && typed.contains(recv.text)) {
              scope = unit.find_contract(typed.at(recv.text));
            } else if (kBuiltinReceivers.contains(recv.text)) {
              silent = true;
            }
            if (scope) targets = lookup_in(*scope, tk.text);
            if (targets.empty() && !scope && !silent) {
              // `using Lib for T` style member call
              for (const auto& other : unit.contracts) {
                if (other.kind != ContractKind::Library) continue;
                for (const auto& of : other.functions) {
                  if (of.unit.name == tk.text) targets.push_back(&of);
                }
              }
            }
          } else if (i > f.body_begin && (t[i - 1].is("emit") || t[i - 1].is("new"))) {
            if (t[i - 1].is("new")) {
              if (const ContractDecl* made = unit.find_contract(tk.text)) targets = lookup_in(*made, "constructor");
            }
            silent = true;
          } else if (kBuiltinCalls.contains(tk.text) || is_type_name(tk.text)) {
            silent = true;
          } else {
            targets = lookup_in(c, tk.text);
          }
          if (member && targets.empty() && kBuiltinMembers.contains(tk.text)) silent = true;
          for (const FunctionDecl* target : targets) triples.insert({fref, Relation::Calls, fn_ref(*target)});
          if (targets.empty() && !silent) {
            note(tk.line, "unresolved call '" + (member ? t[i - 2].text + "." : std::string()) + tk.text +
                              "' in " + c.name + "." + f.unit.name);
          }
          continue;
        }

        // state-variable accesses
        if (member || locals.contains(tk.text)) continue;
        const auto it = vars.find(tk.text);
        if (it == vars.end()) continue;
        const NodeRef vref{NodeKind::Variable, variable_node_id(it->second.owner, tk.text)};
        triples.insert({fref, is_write_site(unit, i, f.body_end) ? Relation::Writes : Relation::Reads, vref});
      }
    }
  }
  out.triples.assign(triples.begin(), triples.end());
  std::sort(out.triples.begin(), out.triples.end());
  return out;
}

}  // namespace scpatcher::ingest
