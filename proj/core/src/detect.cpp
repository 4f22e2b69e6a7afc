#include <algorithm>
#include <cctype>
#include <regex>
#include <set>

#include "scpatcher/analysis.hpp"
#include "scpatcher/ingest.hpp"
#include "scpatcher/verify.hpp"

namespace scpatcher::verify {

using namespace ingest;

namespace {

std::string lower(std::string_view s) {
  std::string out(s);
  for (char& c : out) c = static_cast<char>(std::tolower(static_cast<unsigned char>(c)));
  return out;
}

bool has_head(const std::vector<std::string>& heads, std::initializer_list<std::string_view> names) {
  return std::any_of(heads.begin(), heads.end(), [&](const std::string& h) {
    return std::find(names.begin(), names.end(), h) != names.end();
  });
}

bool is_unsigned_type(std::string_view type) {
  std::string_view value = type;
  if (const auto arrow = type.rfind("=>"); arrow != std::string_view::npos) value = type.substr(arrow + 2);
  while (!value.empty() && (value.front() == ' ' || value.front() == '(')) value.remove_prefix(1);
  return value.starts_with("uint");
}

/// Pre-0.8 compilers do not trap on overflow. A missing pragma counts as legacy.
bool legacy_arithmetic(const SourceUnit& u) {
  if (!u.pragma_version) return true;
  static const std::regex kVersion(R"((\d+)\.(\d+))");
  std::smatch m;
  if (!std::regex_search(*u.pragma_version, m, kVersion)) return true;
  return std::stoi(m[1]) == 0 && std::stoi(m[2]) < 8;
}

class FunctionScan {
 public:
  FunctionScan(const SourceUnit& u, const ContractDecl& c, const FunctionDecl& f)
      : u_(u), t_(u.tokens), c_(c), f_(f), vars_(visible_state_vars(u, c)), locals_(local_names(u, f)) {}

  void run(const ClassSet& classes, std::vector<Detection>& out) {
    if (!f_.has_body) return;
    if (classes.contains(VulnClass::Reentrancy)) reentrancy(out);
    if (classes.contains(VulnClass::UncheckedCallReturn)) unchecked_call(out);
    if (classes.contains(VulnClass::TimestampManipulation)) timestamp(out);
    if (classes.contains(VulnClass::AccessControl)) access_control(out);
    if (classes.contains(VulnClass::IntegerOverflow)) overflow(out);
  }

 private:
  std::size_t b() const { return f_.body_begin; }
  std::size_t e() const { return f_.body_end; }
  bool at(std::size_t i, std::string_view text) const { return i < e() && t_[i].is(text); }

  const StateVar* state_ref(std::size_t i) const {
    if (t_[i].kind != TokenKind::Identifier) return nullptr;
    if (i > b() && t_[i - 1].is(".")) return nullptr;
    if (locals_.contains(t_[i].text)) return nullptr;
    const auto it = vars_.find(t_[i].text);
    return it == vars_.end() ? nullptr : it->second.var;
  }

  bool has_modifier_like(std::initializer_list<std::string_view> needles) const {
    return std::any_of(f_.modifiers.begin(), f_.modifiers.end(), [&](const std::string& m) {
      const std::string lm = lower(m);
      return std::any_of(needles.begin(), needles.end(),
                         [&](std::string_view n) { return lm.find(n) != std::string::npos; });
    });
  }

  void emit(std::vector<Detection>& out, VulnClass cls, std::size_t tok, std::string rule) const {
    out.push_back(Detection{cls, c_.name, f_.unit.name, t_[tok].line, std::move(rule)});
  }

  // `.call{value: ..}(`, `.call.value(`, `.send(`, `.transfer(`
  bool value_transfer_at(std::size_t k) const {
    if (!t_[k].is(".") || k + 2 >= e()) return false;
    const Token& m = t_[k + 1];
    if (m.is("call")) {
      return (at(k + 2, "{") && at(k + 3, "value")) || (at(k + 2, ".") && at(k + 3, "value"));
    }
    return (m.is("send") || m.is("transfer")) && at(k + 2, "(");
  }

  void reentrancy(std::vector<Detection>& out) const {
    if (has_modifier_like({"reentran"})) return;
    for (std::size_t k = b(); k < e(); ++k) {
      if (!value_transfer_at(k)) continue;
      const std::size_t after = statement_end(u_, k, e());
      for (std::size_t j = after; j < e(); ++j) {
        if (state_ref(j) && is_write_site(u_, j, e())) {
          emit(out, VulnClass::Reentrancy, k + 1, "reentrancy-eth");
          return;
        }
      }
    }
  }

  void unchecked_call(std::vector<Detection>& out) const {
    for (std::size_t k = b(); k + 1 < e(); ++k) {
      if (!t_[k].is(".") || !(t_[k + 1].is("call") || t_[k + 1].is("send"))) continue;
      if (!(at(k + 2, "(") || at(k + 2, "{") || at(k + 2, "."))) continue;
      const std::size_t sb = statement_begin(u_, k, b());
      const auto heads = enclosing_call_heads(u_, k, sb);
      const bool checked = has_head(heads, {"require", "assert", "if", "while"}) || assigned_before(u_, sb, k) ||
                           t_[sb].is("return") || t_[sb].is("if") || t_[sb].is("while");
      if (!checked) {
        emit(out, VulnClass::UncheckedCallReturn, k + 1,
             t_[k + 1].is("send") ? "unchecked-send" : "unchecked-lowlevel");
        return;
      }
    }
  }

  void timestamp(std::vector<Detection>& out) const {
    for (std::size_t i = b(); i < e(); ++i) {
      const bool block_ts = t_[i].is("block") && at(i + 1, ".") && at(i + 2, "timestamp");
      const bool now = t_[i].is("now") && t_[i].kind == TokenKind::Identifier && !(i > b() && t_[i - 1].is(".")) &&
                       !locals_.contains("now");
      if (!block_ts && !now) continue;
      const std::size_t sb = statement_begin(u_, i, b());
      const std::size_t se = statement_end(u_, i, e());
      const auto heads = enclosing_call_heads(u_, i, sb);
      bool modulo = false;
      for (std::size_t k = sb; k < se; ++k) modulo = modulo || t_[k].is("%") || t_[k].is("%=");
      if (has_head(heads, {"if", "while", "require", "assert", "for"}) || modulo) {
        emit(out, VulnClass::TimestampManipulation, i, modulo ? "timestamp-randomness" : "timestamp-condition");
        return;
      }
    }
  }

  bool sender_guard() const {
    for (std::size_t i = b(); i + 2 < e(); ++i) {
      if (!(t_[i].is("msg") && t_[i + 1].is(".") && t_[i + 2].is("sender"))) continue;
      const bool compared = (i > b() && (t_[i - 1].is("==") || t_[i - 1].is("!="))) ||
                            at(i + 3, "==") || at(i + 3, "!=");
      if (!compared) continue;
      const auto heads = enclosing_call_heads(u_, i, statement_begin(u_, i, b()));
      if (has_head(heads, {"require", "assert", "if"})) return true;
    }
    return false;
  }

  void access_control(std::vector<Detection>& out) const {
    for (std::size_t i = b(); i + 2 < e(); ++i) {
      if (!(t_[i].is("tx") && t_[i + 1].is(".") && t_[i + 2].is("origin"))) continue;
      const bool compared = (i > b() && (t_[i - 1].is("==") || t_[i - 1].is("!="))) ||
                            at(i + 3, "==") || at(i + 3, "!=");
      const auto heads = enclosing_call_heads(u_, i, statement_begin(u_, i, b()));
      if (compared || has_head(heads, {"require", "assert", "if", "while"})) {
        emit(out, VulnClass::AccessControl, i, "tx-origin");
        return;
      }
    }
    const bool exposed = f_.visibility == "public" || f_.visibility == "external";
    const bool mutating = f_.mutability != "view" && f_.mutability != "pure";
    const bool ctor = f_.unit.name == "constructor" || f_.unit.name == c_.name;
    if (!exposed || !mutating || ctor) return;
    if (has_modifier_like({"only", "owner", "admin", "auth"}) || sender_guard()) return;
    for (std::size_t i = b(); i < e(); ++i) {
      const StateVar* v = state_ref(i);
      if (!v) continue;
      const std::string name = lower(v->name);
      if ((name.find("owner") != std::string::npos || name.find("admin") != std::string::npos) &&
          is_write_site(u_, i, e())) {
        emit(out, VulnClass::AccessControl, i, "unprotected-owner-write");
        return;
      }
    }
  }

  bool is_arith(const Token& tk) const {
    return tk.kind == TokenKind::Punct &&
           (tk.is("+") || tk.is("-") || tk.is("*") || tk.is("+=") || tk.is("-=") || tk.is("*="));
  }

  // An earlier require/assert/if condition compares the same state variable.
  bool guarded(const std::string& var, std::size_t before) const {
    for (std::size_t j = b(); j < before; ++j) {
      if (!t_[j].is(var) || !state_ref(j)) continue;
      const std::size_t sb = statement_begin(u_, j, b());
      if (!has_head(enclosing_call_heads(u_, j, sb), {"require", "assert", "if"})) continue;
      const std::size_t se = statement_end(u_, j, e());
      for (std::size_t k = sb; k < se; ++k) {
        if (t_[k].is("<") || t_[k].is(">") || t_[k].is("<=") || t_[k].is(">=")) return true;
      }
    }
    return false;
  }

  void overflow(std::vector<Detection>& out) const {
    // unchecked { ... } blocks disable the compiler's checks in any version
    for (std::size_t k = b(); k + 1 < e(); ++k) {
      if (!t_[k].is("unchecked") || !t_[k + 1].is("{")) continue;
      const std::size_t close = u_.partner[k + 1];
      for (std::size_t j = k + 2; j < close && j < e(); ++j) {
        if (is_arith(t_[j])) {
          emit(out, VulnClass::IntegerOverflow, j, "unchecked-block");
          return;
        }
      }
    }
    if (!legacy_arithmetic(u_)) return;
    std::size_t i = b();
    while (i < e()) {
      const std::size_t se = statement_end(u_, i, e());
      const bool guard_stmt = t_[i].is("require") || t_[i].is("assert") || t_[i].is("if");
      std::size_t op = e();
      std::vector<std::string> unsigned_vars;
      for (std::size_t k = i; k < se; ++k) {
        if (is_arith(t_[k]) && op == e()) op = k;
        if (const StateVar* v = state_ref(k); v && is_unsigned_type(v->type)) unsigned_vars.push_back(v->name);
      }
      if (!guard_stmt && op != e() && !unsigned_vars.empty()) {
        const bool all_guarded = std::all_of(unsigned_vars.begin(), unsigned_vars.end(),
                                             [&](const std::string& v) { return guarded(v, i); });
        if (!all_guarded) {
          emit(out, VulnClass::IntegerOverflow, op, "arithmetic-unchecked");
          return;
        }
      }
      // `if (...) {` ends at the block brace; step into the block
      i = se + 1;
    }
  }

  const SourceUnit& u_;
  const std::vector<Token>& t_;
  const ContractDecl& c_;
  const FunctionDecl& f_;
  std::map<std::string, VisibleVar> vars_;
  std::set<std::string> locals_;
};

}  // namespace

std::string detection_key(const Detection& d) {
  return std::string(to_string(d.vuln_class)) + "|" + d.contract + "|" + d.function + "|" + d.rule_id;
}

std::string render(const Detection& d) {
  std::string s(to_string(d.vuln_class));
  s += " in ";
  if (!d.contract.empty()) s += d.contract + ".";
  s += d.function + " (line " + std::to_string(d.line) + ", rule " + d.rule_id + ")";
  return s;
}

ClassSet all_classes() { return ClassSet(kAllVulnClasses.begin(), kAllVulnClasses.end()); }

std::vector<Detection> HeuristicDetector::detect(std::string_view source, const ClassSet& classes) const {
  return detect(source, classes, nullptr);
}

std::vector<Detection> HeuristicDetector::detect(std::string_view source, const ClassSet& classes,
                                                 std::vector<std::string>* diagnostics) const {
  std::vector<Detection> out;
  SourceUnit unit;
  try {
    unit = parse_source(std::string(source), "<detect>");
  } catch (const IngestError& e) {
    if (diagnostics) diagnostics->push_back(std::string("detector skipped unparseable source: ") + e.what());
    return out;
  }
  for (const ContractDecl& c : unit.contracts) {
    for (const FunctionDecl& f : c.functions) FunctionScan(unit, c, f).run(classes, out);
  }
  return out;
}

std::vector<Detection> detect(std::string_view source, const ClassSet& classes) {
  return HeuristicDetector{}.detect(source, classes);
}

}  // namespace scpatcher::verify
