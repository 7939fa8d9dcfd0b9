#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "gsmat/ids.hpp"

namespace gsmat {

namespace detail {

struct StringHash {
  using is_transparent = void;
  std::size_t operator()(std::string_view s) const noexcept { return std::hash<std::string_view>{}(s); }
};

// One bijection term <-> dense 1-based id, ids handed out in first-seen order.
class TermTable {
 public:
  std::uint64_t intern(std::string_view term);
  std::optional<std::uint64_t> find(std::string_view term) const;
  const std::string& term(std::uint64_t id, const char* ns) const;
  std::size_t size() const { return terms_.size(); }
  const std::vector<std::string>& terms() const { return terms_; }
  void reserve(std::size_t n);

 private:
  std::vector<std::string> terms_;
  std::unordered_map<std::string, std::uint64_t, StringHash, std::equal_to<>> index_;
};

}  // namespace detail

// Maps RDF terms to dense integer ids. Nodes (subjects and objects) and
// predicates live in disjoint id spaces. Terms are opaque strings: an IRI is
// stored without its angle brackets, a blank node as `_:label`, and a literal
// as its full N-Triples token (quotes, escapes, language tag or datatype).
class TermDictionary {
 public:
  NodeId encode_node(std::string_view term) { return nodes_.intern(term); }
  PredId encode_predicate(std::string_view term) { return preds_.intern(term); }

  std::optional<NodeId> find_node(std::string_view term) const { return nodes_.find(term); }
  std::optional<PredId> find_predicate(std::string_view term) const { return preds_.find(term); }

  // Throws LookupError for ids outside 1..size.
  const std::string& decode_node(NodeId id) const { return nodes_.term(id, "node"); }
  const std::string& decode_predicate(PredId id) const { return preds_.term(id, "predicate"); }

  std::size_t node_count() const { return nodes_.size(); }
  std::size_t predicate_count() const { return preds_.size(); }

  const std::vector<std::string>& node_terms() const { return nodes_.terms(); }
  const std::vector<std::string>& predicate_terms() const { return preds_.terms(); }

  // `nodes.dict` / `preds.dict`: one escaped term per line, line number = id.
  void save(const std::filesystem::path& dir) const;
  static TermDictionary load(const std::filesystem::path& dir);

 private:
  detail::TermTable nodes_;
  detail::TermTable preds_;
};

}  // namespace gsmat
