#pragma once

// Token-level helpers over parsed function bodies, shared by triple
// extraction and the heuristic detectors.

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "scpatcher/ingest.hpp"

namespace scpatcher::ingest {

struct VisibleVar {
  std::string owner;  // declaring contract
  const StateVar* var = nullptr;
};

/// State variables visible from `contract`: its own first, then those of its
/// base contracts declared in the same unit (depth-first, in `is` order).
std::map<std::string, VisibleVar> visible_state_vars(const SourceUnit& unit, const ContractDecl& contract);

/// Contracts of the unit reachable through `is` lists, excluding `contract` itself.
std::vector<const ContractDecl*> base_contracts(const SourceUnit& unit, const ContractDecl& contract);

/// Parameter, return-variable and local-variable names declared in a function.
std::set<std::string> local_names(const SourceUnit& unit, const FunctionDecl& fn);

/// Index just past an lvalue chain starting at `i` (identifier followed by any
/// number of `[...]` and `.member` suffixes), bounded by `end`.
std::size_t skip_postfix_chain(const SourceUnit& unit, std::size_t i, std::size_t end);

/// Whether the identifier at token `i` is assigned, incremented, decremented or
/// deleted.
bool is_write_site(const SourceUnit& unit, std::size_t i, std::size_t end);

/// Token index of the start of the statement containing `i` within a body
/// that begins at `body_begin`.
std::size_t statement_begin(const SourceUnit& unit, std::size_t i, std::size_t body_begin);
/// Token index of the terminating `;` (or block brace) of the statement containing `i`.
std::size_t statement_end(const SourceUnit& unit, std::size_t i, std::size_t body_end);

/// Keywords preceding each unmatched '(' that encloses token `i`, innermost
/// first, scanning back no further than `stmt_begin`. An unnamed paren yields "".
std::vector<std::string> enclosing_call_heads(const SourceUnit& unit, std::size_t i, std::size_t stmt_begin);

/// Whether the token range contains a depth-0 assignment operator before `i`.
bool assigned_before(const SourceUnit& unit, std::size_t stmt_begin, std::size_t i);

}  // namespace scpatcher::ingest
