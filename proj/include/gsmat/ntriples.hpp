#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <string_view>

namespace gsmat {

// One statement as dictionary-ready term strings (see TermDictionary for the
// representation of each term kind).
struct RawTriple {
  std::string s;
  std::string p;
  std::string o;

  friend bool operator==(const RawTriple&, const RawTriple&) = default;
};

// Parses a single N-Triples line. Blank and comment-only lines yield nullopt.
// Throws ParseError carrying `line_no` on malformed input.
std::optional<RawTriple> parse_ntriples(std::string_view line, std::size_t line_no = 0);

// Formats a stored term back into N-Triples syntax (`<iri>`, `_:b`, literal).
std::string to_ntriples_term(std::string_view term);

// Reversible single-line encoding used by the dictionary files and TSV output:
// backslash, newline, carriage return and tab become two-character escapes.
std::string escape_line(std::string_view s);
std::string unescape_line(std::string_view s);

namespace lex {

// Term scanners shared by the N-Triples and query parsers. Each takes the text
// and a position at the opening character and returns the position one past
// the token, or nullopt when the token is malformed.
std::optional<std::size_t> scan_iri(std::string_view text, std::size_t pos);
std::optional<std::size_t> scan_literal(std::string_view text, std::size_t pos);
std::optional<std::size_t> scan_blank(std::string_view text, std::size_t pos);

std::size_t skip_space(std::string_view text, std::size_t pos);
bool is_name_char(char c);

}  // namespace lex

}  // namespace gsmat
