#pragma once

#include <cstddef>
#include <string>
#include <string_view>
#include <vector>

#include "gsmat/dictionary.hpp"
#include "gsmat/ids.hpp"

namespace gsmat {

struct Term {
  enum class Kind { variable, iri, literal, blank };

  Kind kind = Kind::variable;
  // variable: name with its leading '?'; iri: expanded IRI without brackets;
  // literal: full token; blank: `_:label`.
  std::string value;

  // Blank nodes in a query act as variables that cannot be projected.
  bool is_variable() const { return kind == Kind::variable || kind == Kind::blank; }
  // Dictionary key for a constant node term.
  const std::string& node_key() const { return value; }

  friend bool operator==(const Term&, const Term&) = default;
};

Term make_variable(std::string_view name);
Term make_iri(std::string_view iri);

// SPARQL syntax for one term (`?x`, `<iri>`, literal, `_:b`).
std::string to_string(const Term& t);

struct TriplePattern {
  Term s;
  Term p;
  Term o;
  std::size_t ordinal = 0;  // 1-based position in the query text

  friend bool operator==(const TriplePattern&, const TriplePattern&) = default;
};

std::string to_string(const TriplePattern& tp);

struct QueryGraph {
  std::vector<TriplePattern> patterns;
  std::vector<std::string> projection;  // resolved, also for SELECT *
  bool select_all = false;
  bool distinct = false;
  std::vector<std::string> variables;  // first-appearance order, blanks included

  friend bool operator==(const QueryGraph&, const QueryGraph&) = default;
};

// Grammar: PREFIX* SELECT DISTINCT? (var+ | *) WHERE? { (triple .)+ }
// Throws UnsupportedFeature for variable predicates and unsupported clauses,
// ParseError for everything else.
QueryGraph parse_query(std::string_view text);

// Serializes a parsed query back to text that parses to an equal QueryGraph.
std::string to_sparql(const QueryGraph& q);

// Endpoint of an encoded pattern.
struct NodeSlot {
  enum class Kind { variable, constant, missing };

  Kind kind = Kind::variable;
  std::string var;       // variable
  NodeId id = kNoNode;   // constant

  bool is_variable() const { return kind == Kind::variable; }
};

struct BoundPattern {
  TriplePattern source;
  PredId pred = kNoPred;  // kNoPred when the predicate is not in the dictionary
  NodeSlot s;
  NodeSlot o;

  // A pattern whose constants are absent from the dictionary has no matches.
  bool matches_nothing() const {
    return pred == kNoPred || s.kind == NodeSlot::Kind::missing || o.kind == NodeSlot::Kind::missing;
  }
  // Distinct variables in (s, o) order.
  std::vector<std::string> variables() const;
};

struct BoundQuery {
  std::vector<BoundPattern> patterns;
  std::vector<std::string> projection;
  bool distinct = false;

  bool matches_nothing() const;
};

BoundQuery bind_constants(const QueryGraph& graph, const TermDictionary& dict);

}  // namespace gsmat
