#pragma once

// Lightweight Solidity extractor. This is not a full grammar: it recognizes
// contract/library blocks, functions, modifiers, state variables and call /
// read / write sites well enough to build the knowledge graph and to drive
// the heuristic detectors. Interfaces are skipped (they have no bodies).

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "scpatcher/error.hpp"
#include "scpatcher/lexer.hpp"
#include "scpatcher/model.hpp"

namespace scpatcher::ingest {

enum class IngestErrorKind { UnbalancedBraces, NonUtf8 };
using IngestError = KindedError<IngestErrorKind>;

struct Param {
  std::string type;  // normalized: lowercase, no whitespace, uint -> uint256
  std::string name;  // may be empty

  friend bool operator==(const Param&, const Param&) = default;
};

struct FunctionDecl {
  FunctionUnit unit;
  std::string visibility;  // "public" when not declared
  std::string mutability;  // "nonpayable" when not declared; legacy "constant" -> "view"
  std::vector<Param> params;
  std::vector<Param> returns;
  std::vector<std::string> modifiers;  // invoked modifier names, as written
  bool has_body = false;
  std::size_t body_begin = 0;  // token index of the first body token (after '{')
  std::size_t body_end = 0;    // token index of the closing '}'
};

struct ModifierDecl {
  std::string name;
  std::string source_text;
  std::uint32_t start_line = 0;
};

struct StateVar {
  std::string name;
  std::string type;  // declared type as written, tokens joined (e.g. "uint", "mapping(address=>uint256)")

  friend bool operator==(const StateVar&, const StateVar&) = default;
};

enum class ContractKind : std::uint8_t { Contract, Library };

struct ContractDecl {
  std::string name;
  ContractKind kind = ContractKind::Contract;
  std::vector<std::string> bases;
  std::vector<FunctionDecl> functions;
  std::vector<ModifierDecl> modifiers;
  std::vector<StateVar> state_vars;

  const StateVar* find_state_var(std::string_view name) const;
};

struct SourceUnit {
  std::string path;
  std::string text;
  std::vector<Token> tokens;
  std::vector<std::size_t> partner;  // matching bracket index per token, npos otherwise
  std::optional<std::string> pragma_version;
  std::vector<ContractDecl> contracts;
  std::vector<std::string> type_names;  // every contract/interface/struct/enum/event/error name
  std::vector<std::string> diagnostics;
  std::size_t skipped_regions = 0;  // members that could not be parsed

  const ContractDecl* find_contract(std::string_view name) const;
  /// Looks up a function by content id.
  std::pair<const ContractDecl*, const FunctionDecl*> find_function(std::string_view id) const;
  /// First function with the given name, optionally restricted to a contract.
  std::pair<const ContractDecl*, const FunctionDecl*> find_function_by_name(
      std::string_view name, std::string_view contract = {}) const;
};

/// Throws IngestError when the text is not UTF-8 or its braces do not balance.
/// Anything else that cannot be understood is skipped with a diagnostic.
SourceUnit parse_source(std::string text, std::string path);

enum class Relation : std::uint8_t { Owns, Calls, Returns, UsesModifier, Reads, Writes };

std::string_view to_string(Relation r) noexcept;
std::optional<Relation> parse_relation(std::string_view text);

enum class NodeKind : std::uint8_t { Contract, Function, Variable, Modifier, TypeName };

std::string_view to_string(NodeKind k) noexcept;

struct NodeRef {
  NodeKind kind = NodeKind::Contract;
  std::string id;

  friend auto operator<=>(const NodeRef&, const NodeRef&) = default;
};

struct Triple {
  NodeRef subject;
  Relation relation = Relation::Owns;
  NodeRef object;

  friend bool operator==(const Triple&, const Triple&) = default;
};

/// Lexicographic order on (subject id, relation, object id).
bool operator<(const Triple& a, const Triple& b);

/// True when the relation's domain/range matches the endpoint kinds.
bool well_typed(const Triple& t);

// Node-id conventions shared with the knowledge graph.
std::string contract_node_id(std::string_view contract);
std::string variable_node_id(std::string_view contract, std::string_view var);
std::string modifier_node_id(std::string_view contract, std::string_view modifier);
std::string type_node_id(std::string_view type);

struct TripleExtraction {
  std::vector<Triple> triples;
  std::vector<std::string> diagnostics;  // unresolved call targets, unknown modifiers
};

/// Deterministic (sorted, duplicate-free) triples of one unit.
TripleExtraction extract_triples(const SourceUnit& unit);

SignatureFeatures extract_signature(const FunctionDecl& fn);
/// Re-parses a function's source_text standalone and extracts its features.
SignatureFeatures extract_signature(const FunctionUnit& fn);

/// Comments and whitespace removed, identifiers -> "ID", literals -> "LIT";
/// keywords, operators and punctuation kept verbatim.
std::vector<std::string> normalize_tokens(std::string_view source_text);
std::vector<std::string> normalize_tokens(const FunctionUnit& fn);

/// Token texts with comments and whitespace removed, identifiers kept.
std::string canonical_source_form(std::string_view source_text);

}  // namespace scpatcher::ingest
