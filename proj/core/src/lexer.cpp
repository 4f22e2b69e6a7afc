#include "scpatcher/lexer.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <charconv>
#include <unordered_set>

namespace scpatcher::ingest {

namespace {

const std::unordered_set<std::string_view>& keyword_table() {
  static const std::unordered_set<std::string_view> kTable = {
      "pragma",    "import",    "contract",  "library",  "interface", "abstract", "is",
      "function",  "modifier",  "constructor", "fallback", "receive",  "event",   "struct",
      "enum",      "mapping",   "using",     "for",      "if",        "else",     "while",
      "do",        "break",     "continue",  "return",   "returns",   "emit",     "new",
      "delete",    "public",    "private",   "internal", "external",  "pure",     "view",
      "payable",   "constant",  "immutable", "override", "virtual",   "memory",   "storage",
      "calldata",  "indexed",   "anonymous", "assembly", "unchecked", "try",      "catch",
      "this",      "super",     "var",       "throw",    "type",      "wei",      "gwei",
      "szabo",     "finney",    "ether",     "seconds",  "minutes",   "hours",    "days",
      "weeks",     "years",     "let",       "as",       "from",
  };
  return kTable;
}

bool all_digits(std::string_view s) {
  return !s.empty() && std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; });
}

bool bit_width_ok(std::string_view digits, int step, int max) {
  if (digits.empty()) return true;
  if (!all_digits(digits)) return false;
  int v = 0;
  auto [p, ec] = std::from_chars(digits.data(), digits.data() + digits.size(), v);
  return ec == std::errc{} && p == digits.data() + digits.size() && v >= step && v <= max && v % step == 0;
}

constexpr std::array<std::string_view, 27> kOperators = {
    ">>>=", ">>>", "<<=", ">>=", "**", "==", "!=", "<=", ">=", "&&", "||", "++", "--", "+=",
    "-=",   "*=",  "/=",  "%=",  "|=", "&=", "^=", "<<", ">>", "=>", "->", ":=", "**=",
};

bool ident_start(unsigned char c) { return std::isalpha(c) || c == '_' || c == '$'; }
bool ident_char(unsigned char c) { return std::isalnum(c) || c == '_' || c == '$'; }

}  // namespace

bool is_keyword(std::string_view word) {
  return keyword_table().contains(word) || is_elementary_type(word) || word == "true" || word == "false";
}

bool is_elementary_type(std::string_view w) {
  if (w == "address" || w == "bool" || w == "string" || w == "bytes" || w == "byte") return true;
  if (w.starts_with("uint")) return bit_width_ok(w.substr(4), 8, 256);
  if (w.starts_with("int")) return bit_width_ok(w.substr(3), 8, 256);
  if (w.starts_with("bytes")) {
    auto d = w.substr(5);
    if (!all_digits(d)) return false;
    int v = 0;
    std::from_chars(d.data(), d.data() + d.size(), v);
    return v >= 1 && v <= 32;
  }
  if (w.starts_with("ufixed")) return true;
  if (w.starts_with("fixed")) return true;
  return false;
}

std::string canonical_type_word(std::string_view word) {
  if (word == "uint") return "uint256";
  if (word == "int") return "int256";
  if (word == "byte") return "bytes1";
  return std::string(word);
}

bool is_assignment_op(std::string_view op) {
  return op == "=" || op == "+=" || op == "-=" || op == "*=" || op == "/=" || op == "%=" ||
         op == "|=" || op == "&=" || op == "^=" || op == "<<=" || op == ">>=" || op == ">>>=" ||
         op == "**=";
}

bool is_valid_utf8(std::string_view text) noexcept {
  std::size_t i = 0;
  const std::size_t n = text.size();
  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    std::size_t len = 0;
    std::uint32_t cp = 0;
    if (c < 0x80) {
      ++i;
      continue;
    } else if ((c >> 5) == 0x6) {
      len = 2;
      cp = c & 0x1f;
    } else if ((c >> 4) == 0xe) {
      len = 3;
      cp = c & 0x0f;
    } else if ((c >> 3) == 0x1e) {
      len = 4;
      cp = c & 0x07;
    } else {
      return false;
    }
    if (i + len > n) return false;
    for (std::size_t k = 1; k < len; ++k) {
      const auto cc = static_cast<unsigned char>(text[i + k]);
      if ((cc >> 6) != 0x2) return false;
      cp = (cp << 6) | (cc & 0x3f);
    }
    // overlong encodings, surrogates, out of range
    if ((len == 2 && cp < 0x80) || (len == 3 && cp < 0x800) || (len == 4 && cp < 0x10000) ||
        cp > 0x10ffff || (cp >= 0xd800 && cp <= 0xdfff)) {
      return false;
    }
    i += len;
  }
  return true;
}

LexResult lex(std::string_view text, std::uint32_t line_base) {
  LexResult out;
  std::uint32_t line = line_base;
  std::size_t i = 0;
  const std::size_t n = text.size();

  auto advance_to = [&](std::size_t j) {
    for (; i < j && i < n; ++i) {
      if (text[i] == '\n') ++line;
    }
  };
  auto push = [&](TokenKind kind, std::size_t begin, std::size_t end, std::uint32_t at_line) {
    out.tokens.push_back(Token{kind, std::string(text.substr(begin, end - begin)), begin, at_line});
  };
  auto scan_string = [&](std::size_t quote_pos) -> std::size_t {
    const char q = text[quote_pos];
    std::size_t j = quote_pos + 1;
    while (j < n && text[j] != q && text[j] != '\n') {
      if (text[j] == '\\' && j + 1 < n) ++j;
      ++j;
    }
    if (j >= n || text[j] != q) {
      out.diagnostics.push_back("line " + std::to_string(line) + ": unterminated string literal");
      return j;
    }
    return j + 1;
  };

  while (i < n) {
    const auto c = static_cast<unsigned char>(text[i]);
    if (std::isspace(c)) {
      advance_to(i + 1);
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '/') {
      std::size_t j = text.find('\n', i);
      advance_to(j == std::string_view::npos ? n : j);
      continue;
    }
    if (c == '/' && i + 1 < n && text[i + 1] == '*') {
      std::size_t j = text.find("*/", i + 2);
      if (j == std::string_view::npos) {
        out.diagnostics.push_back("line " + std::to_string(line) + ": unterminated block comment");
        advance_to(n);
      } else {
        advance_to(j + 2);
      }
      continue;
    }
    const std::uint32_t at = line;
    const std::size_t begin = i;
    if (ident_start(c)) {
      std::size_t j = i + 1;
      while (j < n && ident_char(static_cast<unsigned char>(text[j]))) ++j;
      const std::string_view word = text.substr(i, j - i);
      if ((word == "hex" || word == "unicode") && j < n && (text[j] == '"' || text[j] == '\'')) {
        const std::size_t e = scan_string(j);
        push(TokenKind::String, begin, e, at);
        advance_to(e);
        continue;
      }
      push(is_keyword(word) ? TokenKind::Keyword : TokenKind::Identifier, begin, j, at);
      advance_to(j);
      continue;
    }
    if (std::isdigit(c)) {
      std::size_t j = i + 1;
      if (c == '0' && j < n && (text[j] == 'x' || text[j] == 'X')) {
        ++j;
        while (j < n && (std::isxdigit(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
      } else {
        while (j < n && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
        if (j + 1 < n && text[j] == '.' && std::isdigit(static_cast<unsigned char>(text[j + 1]))) {
          ++j;
          while (j < n && (std::isdigit(static_cast<unsigned char>(text[j])) || text[j] == '_')) ++j;
        }
        if (j < n && (text[j] == 'e' || text[j] == 'E')) {
          std::size_t k = j + 1;
          if (k < n && text[k] == '-') ++k;
          if (k < n && std::isdigit(static_cast<unsigned char>(text[k]))) {
            j = k;
            while (j < n && std::isdigit(static_cast<unsigned char>(text[j]))) ++j;
          }
        }
      }
      push(TokenKind::Number, begin, j, at);
      advance_to(j);
      continue;
    }
    if (c == '"' || c == '\'') {
      const std::size_t e = scan_string(i);
      push(TokenKind::String, begin, e, at);
      advance_to(e);
      continue;
    }
    std::size_t op_len = 0;
    for (std::string_view op : kOperators) {
      if (op.size() > op_len && text.substr(i, op.size()) == op) op_len = op.size();
    }
    if (op_len == 0 && std::ispunct(c)) op_len = 1;
    if (op_len > 0) {
      push(TokenKind::Punct, begin, i + op_len, at);
      advance_to(i + op_len);
      continue;
    }
    // Non-ASCII bytes outside strings/comments: swallow the whole UTF-8 sequence.
    std::size_t j = i + 1;
    while (j < n && (static_cast<unsigned char>(text[j]) & 0xc0) == 0x80) ++j;
    out.diagnostics.push_back("line " + std::to_string(at) + ": unexpected character");
    push(TokenKind::Unknown, begin, j, at);
    advance_to(j);
  }
  return out;
}

}  // namespace scpatcher::ingest
