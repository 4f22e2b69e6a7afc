#include "scpatcher/ingest.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <unordered_set>

namespace scpatcher::ingest {

namespace {

constexpr std::size_t npos = static_cast<std::size_t>(-1);

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool is_visibility(std::string_view w) {
  return w == "public" || w == "private" || w == "internal" || w == "external";
}

bool is_storage_location(std::string_view w) {
  return w == "memory" || w == "storage" || w == "calldata";
}

bool is_var_attribute(std::string_view w) {
  return is_visibility(w) || w == "constant" || w == "immutable" || w == "override";
}

// Joins type tokens. `canonical` lowercases, applies uint/int aliases and
// drops all whitespace; otherwise words are separated by a single space.
std::string join_type(const std::vector<Token>& toks, std::size_t b, std::size_t e, bool canonical) {
  std::string out;
  for (std::size_t k = b; k < e; ++k) {
    const Token& tk = toks[k];
    if (canonical) {
      out += lower(tk.is_word() ? canonical_type_word(tk.text) : tk.text);
    } else {
      if (!out.empty() && tk.is_word() && toks[k - 1].is_word()) out.push_back(' ');
      out += tk.text;
    }
  }
  return out;
}

std::vector<std::size_t> match_brackets(const std::vector<Token>& toks) {
  std::vector<std::size_t> partner(toks.size(), npos);
  std::vector<std::size_t> paren, bracket, brace;
  for (std::size_t i = 0; i < toks.size(); ++i) {
    if (toks[i].kind != TokenKind::Punct || toks[i].text.size() != 1) continue;
    auto close = [&](std::vector<std::size_t>& stack) {
      if (!stack.empty()) {
        partner[i] = stack.back();
        partner[stack.back()] = i;
        stack.pop_back();
      }
    };
    switch (toks[i].text[0]) {
      case '(': paren.push_back(i); break;
      case '[': bracket.push_back(i); break;
      case '{': brace.push_back(i); break;
      case ')': close(paren); break;
      case ']': close(bracket); break;
      case '}':
        if (brace.empty()) {
          throw IngestError(IngestErrorKind::UnbalancedBraces,
                            "UnbalancedBraces: unmatched '}' at line " + std::to_string(toks[i].line));
        }
        close(brace);
        break;
      default: break;
    }
  }
  if (!brace.empty()) {
    throw IngestError(IngestErrorKind::UnbalancedBraces,
                      "UnbalancedBraces: unclosed '{' at line " + std::to_string(toks[brace.back()].line));
  }
  return partner;
}

class Parser {
 public:
  explicit Parser(SourceUnit& unit) : u_(unit), t_(unit.tokens), p_(unit.partner) {}

  void run() {
    std::size_t i = 0;
    const std::size_t n = t_.size();
    while (i < n) {
      const Token& tk = t_[i];
      if (tk.is("pragma")) {
        const std::size_t j = find_punct(i, n, ";");
        if (i + 1 < n && t_[i + 1].is("solidity") && j < n && !u_.pragma_version) {
          const std::size_t b = t_[i + 1].end();
          u_.pragma_version = trim(std::string_view(u_.text).substr(b, t_[j].offset - b));
        }
        i = j + 1;
        continue;
      }
      if (tk.is("import") || tk.is("using")) {
        i = find_punct(i, n, ";") + 1;
        continue;
      }
      std::size_t k = i;
      if (tk.is("abstract")) ++k;
      if (k < n && (t_[k].is("contract") || t_[k].is("library") || t_[k].is("interface"))) {
        i = parse_contract(k, n);
        continue;
      }
      if ((tk.is("struct") || tk.is("enum") || tk.is("event") || tk.is("error")) && i + 1 < n) {
        u_.type_names.push_back(t_[i + 1].text);
      }
      i = skip_member(i, n);
    }
  }

 private:
  static std::string trim(std::string_view s) {
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
    while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
    return std::string(s);
  }

  std::size_t find_punct(std::size_t i, std::size_t end, std::string_view what) const {
    while (i < end && !t_[i].is(what)) ++i;
    return i;
  }

  // Skips a member or top-level item: up to and including the first ';', or
  // a whole balanced '{...}' block if that comes first.
  std::size_t skip_member(std::size_t i, std::size_t end) const {
    while (i < end) {
      if (t_[i].is(";")) return i + 1;
      if (t_[i].is("{")) return p_[i] + 1;
      if ((t_[i].is("(") || t_[i].is("[")) && p_[i] != npos && p_[i] < end) {
        i = p_[i] + 1;
        continue;
      }
      ++i;
    }
    return end;
  }

  void diag(std::uint32_t line, const std::string& msg) {
    u_.diagnostics.push_back("line " + std::to_string(line) + ": " + msg);
  }

  std::size_t parse_contract(std::size_t k, std::size_t n) {
    const std::size_t open = find_punct(k, n, "{");
    if (open >= n || k + 1 >= open || t_[k + 1].kind != TokenKind::Identifier) {
      diag(t_[k].line, "malformed " + t_[k].text + " header skipped");
      ++u_.skipped_regions;
      return open >= n ? n : p_[open] + 1;
    }
    const std::size_t close = p_[open];
    const std::string name = t_[k + 1].text;
    u_.type_names.push_back(name);
    if (t_[k].is("interface")) return close + 1;

    ContractDecl c;
    c.name = name;
    c.kind = t_[k].is("library") ? ContractKind::Library : ContractKind::Contract;
    for (std::size_t b = k + 2; b < open; ++b) {
      if (t_[b].is("(") && p_[b] != npos && p_[b] < open) {
        b = p_[b];
        continue;
      }
      if (t_[b].kind == TokenKind::Identifier && (t_[b - 1].is("is") || t_[b - 1].is(","))) {
        c.bases.push_back(t_[b].text);
      }
    }
    std::size_t j = open + 1;
    while (j < close) j = parse_member(c, j, close);
    u_.contracts.push_back(std::move(c));
    return close + 1;
  }

  std::size_t parse_member(ContractDecl& c, std::size_t j, std::size_t close) {
    const Token& tk = t_[j];
    if (tk.is(";")) return j + 1;
    if (tk.is("function")) return parse_function(c, j, close);
    if ((tk.is("constructor") || tk.is("fallback") || tk.is("receive")) && j + 1 < close && t_[j + 1].is("(")) {
      return parse_function(c, j, close);
    }
    if (tk.is("modifier")) return parse_modifier(c, j, close);
    if (tk.is("event") || tk.is("struct") || tk.is("enum") ||
        (tk.is("error") && j + 1 < close && t_[j + 1].kind == TokenKind::Identifier)) {
      if (j + 1 < close) u_.type_names.push_back(t_[j + 1].text);
      return skip_member(j, close);
    }
    if (tk.is("using")) return skip_member(j, close);
    return parse_state_var(c, j, close);
  }

  std::size_t fail_member(std::size_t j, std::size_t close, const std::string& why) {
    diag(t_[j].line, why);
    ++u_.skipped_regions;
    return std::max(skip_member(j, close), j + 1);
  }

  std::vector<Param> parse_params(std::size_t b, std::size_t e) const {
    std::vector<Param> out;
    std::size_t start = b;
    auto flush = [&](std::size_t end) {
      std::vector<Token> piece;
      for (std::size_t k = start; k < end; ++k) {
        if (is_storage_location(t_[k].text) || t_[k].is("indexed")) continue;
        piece.push_back(t_[k]);
      }
      if (piece.empty()) return;
      Param p;
      std::size_t type_end = piece.size();
      if (piece.size() >= 2 && piece.back().kind == TokenKind::Identifier) {
        p.name = piece.back().text;
        --type_end;
      }
      p.type = join_type(piece, 0, type_end, true);
      out.push_back(std::move(p));
    };
    for (std::size_t k = b; k < e; ++k) {
      if ((t_[k].is("(") || t_[k].is("[")) && p_[k] != npos && p_[k] < e) {
        k = p_[k];
        continue;
      }
      if (t_[k].is(",")) {
        flush(k);
        start = k + 1;
      }
    }
    flush(e);
    return out;
  }

  std::size_t parse_function(ContractDecl& c, std::size_t s, std::size_t close) {
    std::size_t j = s;
    FunctionDecl fd;
    std::string name;
    if (t_[j].is("function")) {
      ++j;
      if (j < close && (t_[j].kind == TokenKind::Identifier || t_[j].is("fallback") || t_[j].is("receive"))) {
        name = t_[j].text;
        ++j;
      } else {
        name = "fallback";
      }
    } else {
      name = t_[j].text;
      ++j;
    }
    if (j >= close || !t_[j].is("(") || p_[j] == npos || p_[j] >= close) {
      return fail_member(s, close, "malformed parameter list for function '" + name + "'");
    }
    fd.params = parse_params(j + 1, p_[j]);
    j = p_[j] + 1;
    fd.visibility = "public";
    fd.mutability = "nonpayable";
    while (j < close && !t_[j].is("{") && !t_[j].is(";")) {
      const Token& h = t_[j];
      if (is_visibility(h.text)) {
        fd.visibility = h.text;
        ++j;
      } else if (h.is("pure") || h.is("view") || h.is("payable")) {
        fd.mutability = h.text;
        ++j;
      } else if (h.is("constant")) {
        fd.mutability = "view";
        ++j;
      } else if (h.is("returns")) {
        ++j;
        if (j >= close || !t_[j].is("(") || p_[j] == npos || p_[j] >= close) {
          return fail_member(s, close, "malformed returns list for function '" + name + "'");
        }
        fd.returns = parse_params(j + 1, p_[j]);
        j = p_[j] + 1;
      } else if (h.kind == TokenKind::Identifier) {
        // modifier invocation, possibly qualified (A.b) or with arguments
        std::string mod = h.text;
        ++j;
        while (j + 1 < close && t_[j].is(".") && t_[j + 1].kind == TokenKind::Identifier) {
          mod = t_[j + 1].text;
          j += 2;
        }
        fd.modifiers.push_back(mod);
        if (j < close && t_[j].is("(")) {
          if (p_[j] == npos || p_[j] >= close) {
            return fail_member(s, close, "malformed modifier arguments in function '" + name + "'");
          }
          j = p_[j] + 1;
        }
      } else if (h.is("(") && p_[j] != npos && p_[j] < close) {
        j = p_[j] + 1;  // override(A, B)
      } else {
        ++j;  // virtual, override, stray tokens
      }
    }
    if (j >= close) return fail_member(s, close, "function '" + name + "' has no body or terminator");
    std::size_t last = j;
    if (t_[j].is("{")) {
      fd.has_body = true;
      fd.body_begin = j + 1;
      fd.body_end = p_[j];
      last = p_[j];
    }
    FunctionUnit& fu = fd.unit;
    fu.contract_name = c.name;
    fu.name = name;
    fu.source_text = u_.text.substr(t_[s].offset, t_[last].end() - t_[s].offset);
    fu.start_line = t_[s].line;
    const auto norm = normalize_tokens(fu.source_text);
    fu.token_count = static_cast<std::uint32_t>(norm.size());
    fu.id = make_function_id(c.name, name, norm);
    fu.signature = extract_signature(fd);
    if (!seen_ids_.insert(fu.id).second) {
      diag(t_[s].line, "duplicate function '" + c.name + "." + name + "' ignored");
      return last + 1;
    }
    c.functions.push_back(std::move(fd));
    return last + 1;
  }

  std::size_t parse_modifier(ContractDecl& c, std::size_t s, std::size_t close) {
    if (s + 1 >= close || t_[s + 1].kind != TokenKind::Identifier) {
      return fail_member(s, close, "malformed modifier");
    }
    std::size_t j = s + 2;
    while (j < close && !t_[j].is("{") && !t_[j].is(";")) {
      if (t_[j].is("(") && p_[j] != npos && p_[j] < close) {
        j = p_[j] + 1;
        continue;
      }
      ++j;
    }
    if (j >= close) return fail_member(s, close, "modifier '" + t_[s + 1].text + "' has no body");
    const std::size_t last = t_[j].is("{") ? p_[j] : j;
    c.modifiers.push_back(ModifierDecl{t_[s + 1].text,
                                       u_.text.substr(t_[s].offset, t_[last].end() - t_[s].offset),
                                       t_[s].line});
    return last + 1;
  }

  std::size_t parse_state_var(ContractDecl& c, std::size_t s, std::size_t close) {
    std::size_t j = s;
    std::size_t eq = npos;
    while (j < close && !t_[j].is(";")) {
      if (t_[j].is("{")) return fail_member(s, close, "unrecognized member");
      if ((t_[j].is("(") || t_[j].is("[")) && p_[j] != npos && p_[j] < close) {
        j = p_[j] + 1;
        continue;
      }
      if (eq == npos && t_[j].is("=")) eq = j;
      ++j;
    }
    if (j >= close) return fail_member(s, close, "unterminated declaration");
    const std::size_t decl_end = eq == npos ? j : eq;
    std::size_t name_idx = npos;
    for (std::size_t k = decl_end; k > s; --k) {
      if (t_[k - 1].kind == TokenKind::Identifier) {
        name_idx = k - 1;
        break;
      }
      if (!t_[k - 1].is_word()) break;
    }
    if (name_idx == npos || name_idx == s) return fail_member(s, close, "unrecognized member");
    std::size_t type_end = name_idx;
    for (std::size_t k = s; k < name_idx; ++k) {
      if ((t_[k].is("(") || t_[k].is("[")) && p_[k] != npos && p_[k] < name_idx) {
        k = p_[k];
        continue;
      }
      if (is_var_attribute(t_[k].text)) {
        type_end = k;
        break;
      }
    }
    c.state_vars.push_back(StateVar{t_[name_idx].text, join_type(t_, s, type_end, false)});
    return j + 1;
  }

  SourceUnit& u_;
  const std::vector<Token>& t_;
  const std::vector<std::size_t>& p_;
  std::unordered_set<std::string> seen_ids_;
};

}  // namespace

const StateVar* ContractDecl::find_state_var(std::string_view n) const {
  for (const auto& v : state_vars) {
    if (v.name == n) return &v;
  }
  return nullptr;
}

const ContractDecl* SourceUnit::find_contract(std::string_view n) const {
  for (const auto& c : contracts) {
    if (c.name == n) return &c;
  }
  return nullptr;
}

std::pair<const ContractDecl*, const FunctionDecl*> SourceUnit::find_function(std::string_view id) const {
  for (const auto& c : contracts) {
    for (const auto& f : c.functions) {
      if (f.unit.id == id) return {&c, &f};
    }
  }
  return {nullptr, nullptr};
}

std::pair<const ContractDecl*, const FunctionDecl*> SourceUnit::find_function_by_name(
    std::string_view n, std::string_view contract) const {
  for (const auto& c : contracts) {
    if (!contract.empty() && c.name != contract) continue;
    for (const auto& f : c.functions) {
      if (f.unit.name == n) return {&c, &f};
    }
  }
  return {nullptr, nullptr};
}

SourceUnit parse_source(std::string text, std::string path) {
  if (!is_valid_utf8(text)) {
    throw IngestError(IngestErrorKind::NonUtf8, "NonUtf8: " + path + " is not valid UTF-8");
  }
  SourceUnit unit;
  unit.path = std::move(path);
  unit.text = std::move(text);
  LexResult lexed = lex(unit.text);
  unit.tokens = std::move(lexed.tokens);
  unit.diagnostics = std::move(lexed.diagnostics);
  unit.partner = match_brackets(unit.tokens);
  Parser(unit).run();
  return unit;
}

SignatureFeatures extract_signature(const FunctionDecl& fn) {
  SignatureFeatures s;
  s.features.insert(fn.visibility.empty() ? "public" : fn.visibility);
  s.features.insert(fn.mutability.empty() ? "nonpayable" : fn.mutability);
  for (const auto& p : fn.params) s.features.insert("param:" + p.type);
  for (const auto& r : fn.returns) s.features.insert("ret:" + r.type);
  for (const auto& m : fn.modifiers) s.features.insert("mod:" + lower(m));
  return s;
}

SignatureFeatures extract_signature(const FunctionUnit& fn) {
  std::string wrapped = "contract __Sig {\n" + fn.source_text + "\n}\n";
  try {
    const SourceUnit u = parse_source(std::move(wrapped), "<signature>");
    if (!u.contracts.empty() && !u.contracts.front().functions.empty()) {
      return extract_signature(u.contracts.front().functions.front());
    }
  } catch (const IngestError&) {
  }
  return fn.signature;
}

std::vector<std::string> normalize_tokens(std::string_view source_text) {
  const LexResult lexed = lex(source_text);
  std::vector<std::string> out;
  out.reserve(lexed.tokens.size());
  for (const Token& tk : lexed.tokens) {
    switch (tk.kind) {
      case TokenKind::Identifier: out.emplace_back("ID"); break;
      case TokenKind::Number:
      case TokenKind::String: out.emplace_back("LIT"); break;
      case TokenKind::Keyword:
        out.emplace_back(tk.is("true") || tk.is("false") ? "LIT" : tk.text);
        break;
      default: out.push_back(tk.text); break;
    }
  }
  return out;
}

std::vector<std::string> normalize_tokens(const FunctionUnit& fn) { return normalize_tokens(fn.source_text); }

std::string canonical_source_form(std::string_view source_text) {
  const LexResult lexed = lex(source_text);
  std::string out;
  for (const Token& tk : lexed.tokens) {
    if (!out.empty()) out.push_back(' ');
    out += tk.text;
  }
  return out;
}

}  // namespace scpatcher::ingest
