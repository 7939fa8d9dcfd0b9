#include "gsmat/ntriples.hpp"

#include "gsmat/error.hpp"

namespace gsmat {

namespace lex {

std::size_t skip_space(std::string_view text, std::size_t pos) {
  while (pos < text.size() && (text[pos] == ' ' || text[pos] == '\t' || text[pos] == '\r' || text[pos] == '\n')) {
    ++pos;
  }
  return pos;
}

bool is_name_char(char c) {
  return (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || (c >= '0' && c <= '9') || c == '_' ||
         c == '-' || c == '.' || static_cast<unsigned char>(c) >= 0x80;
}

std::optional<std::size_t> scan_iri(std::string_view text, std::size_t pos) {
  if (pos >= text.size() || text[pos] != '<') return std::nullopt;
  for (std::size_t i = pos + 1; i < text.size(); ++i) {
    const char c = text[i];
    if (c == '>') return i + 1;
    if (c == ' ' || c == '<' || c == '"' || c == '\n' || c == '\t') return std::nullopt;
  }
  return std::nullopt;
}

std::optional<std::size_t> scan_literal(std::string_view text, std::size_t pos) {
  if (pos >= text.size() || text[pos] != '"') return std::nullopt;
  std::size_t i = pos + 1;
  for (;; ++i) {
    if (i >= text.size() || text[i] == '\n') return std::nullopt;
    if (text[i] == '\\') {
      ++i;
      if (i >= text.size()) return std::nullopt;
      continue;
    }
    if (text[i] == '"') break;
  }
  ++i;
  if (i < text.size() && text[i] == '@') {
    std::size_t j = i + 1;
    while (j < text.size() && ((text[j] >= 'a' && text[j] <= 'z') || (text[j] >= 'A' && text[j] <= 'Z') ||
                               (text[j] >= '0' && text[j] <= '9') || text[j] == '-')) {
      ++j;
    }
    if (j == i + 1) return std::nullopt;
    return j;
  }
  if (i + 1 < text.size() && text[i] == '^' && text[i + 1] == '^') {
    return scan_iri(text, i + 2);
  }
  return i;
}

std::optional<std::size_t> scan_blank(std::string_view text, std::size_t pos) {
  if (text.substr(pos, 2) != "_:") return std::nullopt;
  std::size_t i = pos + 2;
  while (i < text.size() && is_name_char(text[i])) ++i;
  // A label may not end with '.', which would swallow the statement terminator.
  while (i > pos + 2 && text[i - 1] == '.') --i;
  if (i == pos + 2) return std::nullopt;
  return i;
}

}  // namespace lex

namespace {

enum class Slot { subject, predicate, object };

std::string read_term(std::string_view line, std::size_t& pos, Slot slot, std::size_t line_no) {
  pos = lex::skip_space(line, pos);
  if (pos >= line.size()) throw ParseError("expected 3 terms, statement ends early", line_no);
  const char c = line[pos];
  std::optional<std::size_t> end;
  std::string term;
  if (c == '<') {
    end = lex::scan_iri(line, pos);
    if (end) term = std::string(line.substr(pos + 1, *end - pos - 2));
  } else if (c == '_' && slot != Slot::predicate) {
    end = lex::scan_blank(line, pos);
    if (end) term = std::string(line.substr(pos, *end - pos));
  } else if (c == '"' && slot == Slot::object) {
    end = lex::scan_literal(line, pos);
    if (end) term = std::string(line.substr(pos, *end - pos));
  } else {
    throw ParseError(std::string("unexpected character '") + c + "' at column " + std::to_string(pos + 1),
                     line_no);
  }
  if (!end) throw ParseError("malformed term at column " + std::to_string(pos + 1), line_no);
  pos = *end;
  return term;
}

}  // namespace

std::optional<RawTriple> parse_ntriples(std::string_view line, std::size_t line_no) {
  std::size_t pos = lex::skip_space(line, 0);
  if (pos >= line.size() || line[pos] == '#') return std::nullopt;

  RawTriple t;
  t.s = read_term(line, pos, Slot::subject, line_no);
  t.p = read_term(line, pos, Slot::predicate, line_no);
  t.o = read_term(line, pos, Slot::object, line_no);
  pos = lex::skip_space(line, pos);
  if (pos >= line.size() || line[pos] != '.') throw ParseError("missing terminating '.'", line_no);
  pos = lex::skip_space(line, pos + 1);
  if (pos < line.size() && line[pos] != '#') throw ParseError("trailing content after '.'", line_no);
  return t;
}

std::string to_ntriples_term(std::string_view term) {
  if (!term.empty() && (term.front() == '"' || term.starts_with("_:"))) return std::string(term);
  std::string out;
  out.reserve(term.size() + 2);
  out += '<';
  out += term;
  out += '>';
  return out;
}

std::string escape_line(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (char c : s) {
    switch (c) {
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      case '\r': out += "\\r"; break;
      case '\t': out += "\\t"; break;
      default: out += c;
    }
  }
  return out;
}

std::string unescape_line(std::string_view s) {
  std::string out;
  out.reserve(s.size());
  for (std::size_t i = 0; i < s.size(); ++i) {
    if (s[i] != '\\' || i + 1 == s.size()) {
      out += s[i];
      continue;
    }
    switch (s[++i]) {
      case 'n': out += '\n'; break;
      case 'r': out += '\r'; break;
      case 't': out += '\t'; break;
      case '\\': out += '\\'; break;
      default:
        out += '\\';
        out += s[i];
    }
  }
  return out;
}

}  // namespace gsmat
