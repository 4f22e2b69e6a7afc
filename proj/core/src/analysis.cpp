#include "scpatcher/analysis.hpp"

#include <functional>

namespace scpatcher::ingest {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

bool is_storage_location(std::string_view w) {
  return w == "memory" || w == "storage" || w == "calldata";
}

// `{ ident :` opens a call-option or named-argument block rather than a statement block.
bool is_option_block(const SourceUnit& u, std::size_t open) {
  const auto& t = u.tokens;
  return open + 2 < t.size() && t[open + 1].kind == TokenKind::Identifier && t[open + 2].is(":");
}

}  // namespace

std::vector<const ContractDecl*> base_contracts(const SourceUnit& unit, const ContractDecl& contract) {
  std::vector<const ContractDecl*> out;
  std::set<std::string> visited{contract.name};
  std::function<void(const ContractDecl&)> walk = [&](const ContractDecl& c) {
    for (const auto& b : c.bases) {
      if (!visited.insert(b).second) continue;
      if (const ContractDecl* base = unit.find_contract(b)) {
        out.push_back(base);
        walk(*base);
      }
    }
  };
  walk(contract);
  return out;
}

std::map<std::string, VisibleVar> visible_state_vars(const SourceUnit& unit, const ContractDecl& contract) {
  std::map<std::string, VisibleVar> out;
  for (const auto& v : contract.state_vars) out.emplace(v.name, VisibleVar{contract.name, &v});
  for (const ContractDecl* base : base_contracts(unit, contract)) {
    for (const auto& v : base->state_vars) out.emplace(v.name, VisibleVar{base->name, &v});
  }
  return out;
}

std::set<std::string> local_names(const SourceUnit& unit, const FunctionDecl& fn) {
  std::set<std::string> names;
  for (const auto& p : fn.params) {
    if (!p.name.empty()) names.insert(p.name);
  }
  for (const auto& r : fn.returns) {
    if (!r.name.empty()) names.insert(r.name);
  }
  if (!fn.has_body) return names;
  const auto& t = unit.tokens;
  for (std::size_t i = fn.body_begin + 1; i + 1 < fn.body_end; ++i) {
    if (t[i].kind != TokenKind::Identifier) continue;
    const Token& prev = t[i - 1];
    const bool typed_prev = (prev.kind == TokenKind::Keyword && (is_elementary_type(prev.text) ||
                                                                 is_storage_location(prev.text) ||
                                                                 prev.is("payable") || prev.is("var"))) ||
                            prev.kind == TokenKind::Identifier || prev.is("]");
    const Token& next = t[i + 1];
    if (typed_prev && (next.is("=") || next.is(";") || next.is(",") || next.is(")"))) {
      names.insert(t[i].text);
    }
  }
  return names;
}

std::size_t skip_postfix_chain(const SourceUnit& unit, std::size_t i, std::size_t end) {
  const auto& t = unit.tokens;
  std::size_t j = i + 1;
  while (j < end) {
    if (t[j].is("[") && unit.partner[j] != npos && unit.partner[j] < end) {
      j = unit.partner[j] + 1;
    } else if (t[j].is(".") && j + 1 < end && t[j + 1].is_word()) {
      j += 2;
    } else {
      break;
    }
  }
  return j;
}

bool is_write_site(const SourceUnit& unit, std::size_t i, std::size_t end) {
  const auto& t = unit.tokens;
  if (i > 0 && (t[i - 1].is("++") || t[i - 1].is("--") || t[i - 1].is("delete"))) return true;
  const std::size_t j = skip_postfix_chain(unit, i, end);
  return j < end && (is_assignment_op(t[j].text) || t[j].is("++") || t[j].is("--"));
}

std::size_t statement_begin(const SourceUnit& unit, std::size_t i, std::size_t body_begin) {
  const auto& t = unit.tokens;
  std::size_t k = i;
  while (k > body_begin) {
    const std::size_t p = k - 1;
    const Token& tk = t[p];
    if (tk.is(")") || tk.is("]")) {
      if (unit.partner[p] != npos && unit.partner[p] >= body_begin) {
        k = unit.partner[p];
        continue;
      }
    } else if (tk.is("}")) {
      const std::size_t open = unit.partner[p];
      if (open != npos && open >= body_begin && is_option_block(unit, open)) {
        k = open;
        continue;
      }
      return k;
    } else if (tk.is(";") || tk.is("{")) {
      return k;
    }
    k = p;
  }
  return body_begin;
}

std::size_t statement_end(const SourceUnit& unit, std::size_t i, std::size_t body_end) {
  const auto& t = unit.tokens;
  std::size_t k = i;
  while (k < body_end) {
    const Token& tk = t[k];
    if ((tk.is("(") || tk.is("[")) && unit.partner[k] != npos && unit.partner[k] < body_end) {
      k = unit.partner[k] + 1;
      continue;
    }
    if (tk.is("{")) {
      if (is_option_block(unit, k) && unit.partner[k] < body_end) {
        k = unit.partner[k] + 1;
        continue;
      }
      return k;
    }
    if (tk.is(";") || tk.is("}")) return k;
    ++k;
  }
  return body_end;
}

std::vector<std::string> enclosing_call_heads(const SourceUnit& unit, std::size_t i, std::size_t stmt_begin) {
  const auto& t = unit.tokens;
  std::vector<std::string> heads;
  std::size_t k = i;
  while (k > stmt_begin) {
    const std::size_t p = k - 1;
    const Token& tk = t[p];
    if ((tk.is(")") || tk.is("]") || tk.is("}")) && unit.partner[p] != npos && unit.partner[p] >= stmt_begin &&
        unit.partner[p] < p) {
      k = unit.partner[p];
      continue;
    }
    if (tk.is("(")) heads.push_back(p > stmt_begin ? t[p - 1].text : std::string());
    k = p;
  }
  return heads;
}

bool assigned_before(const SourceUnit& unit, std::size_t stmt_begin, std::size_t i) {
  const auto& t = unit.tokens;
  for (std::size_t k = stmt_begin; k < i; ++k) {
    if ((t[k].is("(") || t[k].is("[")) && unit.partner[k] != npos && unit.partner[k] < i) {
      k = unit.partner[k];
      continue;
    }
    if (is_assignment_op(t[k].text)) return true;
  }
  return false;
}

}  // namespace scpatcher::ingest
