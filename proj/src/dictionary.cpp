#include "gsmat/dictionary.hpp"

#include <fstream>

#include "gsmat/error.hpp"
#include "gsmat/ntriples.hpp"

namespace gsmat {

namespace detail {

std::uint64_t TermTable::intern(std::string_view term) {
  if (auto it = index_.find(term); it != index_.end()) return it->second;
  const std::uint64_t id = terms_.size() + 1;
  terms_.emplace_back(term);
  index_.emplace(terms_.back(), id);
  return id;
}

std::optional<std::uint64_t> TermTable::find(std::string_view term) const {
  if (auto it = index_.find(term); it != index_.end()) return it->second;
  return std::nullopt;
}

const std::string& TermTable::term(std::uint64_t id, const char* ns) const {
  if (id == 0 || id > terms_.size()) {
    throw LookupError(std::string(ns) + " id " + std::to_string(id) + " out of range (have " +
                      std::to_string(terms_.size()) + ")");
  }
  return terms_[id - 1];
}

void TermTable::reserve(std::size_t n) {
  terms_.reserve(n);
  index_.reserve(n);
}

}  // namespace detail

namespace {

void write_terms(const std::filesystem::path& file, const std::vector<std::string>& terms) {
  std::ofstream out(file, std::ios::binary | std::ios::trunc);
  if (!out) throw StoreError(StoreErrorKind::io, "cannot write " + file.string());
  for (const auto& t : terms) {
    out << escape_line(t) << '\n';
  }
  if (!out) throw StoreError(StoreErrorKind::io, "write failed: " + file.string());
}

template <typename Encode>
void read_terms(const std::filesystem::path& file, Encode&& encode) {
  std::ifstream in(file, std::ios::binary);
  if (!in) throw StoreError(StoreErrorKind::io, "cannot read " + file.string());
  std::string line;
  std::size_t expected = 1;
  while (std::getline(in, line)) {
    if (encode(unescape_line(line)) != expected) {
      throw StoreError(StoreErrorKind::corrupt, file.string() + ": duplicate term on line " +
                                                    std::to_string(expected));
    }
    ++expected;
  }
}

}  // namespace

void TermDictionary::save(const std::filesystem::path& dir) const {
  write_terms(dir / "nodes.dict", nodes_.terms());
  write_terms(dir / "preds.dict", preds_.terms());
}

TermDictionary TermDictionary::load(const std::filesystem::path& dir) {
  TermDictionary dict;
  read_terms(dir / "nodes.dict", [&](const std::string& t) { return dict.encode_node(t); });
  read_terms(dir / "preds.dict", [&](const std::string& t) { return dict.encode_predicate(t); });
  return dict;
}

}  // namespace gsmat
