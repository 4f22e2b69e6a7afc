#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scpatcher::ingest {

enum class TokenKind : std::uint8_t { Identifier, Keyword, Number, String, Punct, Unknown };

struct Token {
  TokenKind kind = TokenKind::Unknown;
  std::string text;
  std::size_t offset = 0;  // byte offset into the lexed buffer
  std::uint32_t line = 1;  // 1-based

  std::size_t end() const noexcept { return offset + text.size(); }
  bool is(std::string_view t) const noexcept { return text == t; }
  bool is_word() const noexcept { return kind == TokenKind::Identifier || kind == TokenKind::Keyword; }

  friend bool operator==(const Token&, const Token&) = default;
};

struct LexResult {
  std::vector<Token> tokens;
  std::vector<std::string> diagnostics;
};

/// Splits Solidity source into tokens. Comments and whitespace are dropped;
/// unterminated comments/strings run to end of input and produce a diagnostic.
/// `line_base` is the line number assigned to the first byte.
LexResult lex(std::string_view text, std::uint32_t line_base = 1);

bool is_keyword(std::string_view word);

/// uint, uint8..uint256, int*, bytes1..32, address, bool, string, bytes, byte,
/// fixed*, ufixed*.
bool is_elementary_type(std::string_view word);

/// Canonical alias: uint -> uint256, int -> int256, byte -> bytes1.
std::string canonical_type_word(std::string_view word);

bool is_assignment_op(std::string_view op);

bool is_valid_utf8(std::string_view text) noexcept;

}  // namespace scpatcher::ingest
