#include "gsmat/query.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>

#include "gsmat/error.hpp"
#include "gsmat/ntriples.hpp"

namespace gsmat {

Term make_variable(std::string_view name) {
  std::string v(name);
  if (v.empty() || (v[0] != '?' && v[0] != '$')) v.insert(v.begin(), '?');
  v[0] = '?';
  return Term{Term::Kind::variable, std::move(v)};
}

Term make_iri(std::string_view iri) { return Term{Term::Kind::iri, std::string(iri)}; }

std::string to_string(const Term& t) {
  switch (t.kind) {
    case Term::Kind::iri: return "<" + t.value + ">";
    default: return t.value;
  }
}

std::string to_string(const TriplePattern& tp) {
  return to_string(tp.s) + " " + to_string(tp.p) + " " + to_string(tp.o);
}

namespace {

constexpr std::string_view kRdfType = "http://www.w3.org/1999/02/22-rdf-syntax-ns#type";

bool iequals(std::string_view a, std::string_view b) {
  return a.size() == b.size() && std::equal(a.begin(), a.end(), b.begin(), [](char x, char y) {
           return std::tolower(static_cast<unsigned char>(x)) == std::tolower(static_cast<unsigned char>(y));
         });
}

class QueryParser {
 public:
  explicit QueryParser(std::string_view text) : text_(text) {}

  QueryGraph parse() {
    QueryGraph q;
    while (peek_keyword("PREFIX")) parse_prefix();
    if (peek_keyword("BASE")) fail_unsupported("BASE declarations");
    expect_keyword("SELECT");
    if (peek_keyword("DISTINCT")) {
      take_word();
      q.distinct = true;
    } else if (peek_keyword("REDUCED")) {
      fail_unsupported("REDUCED");
    }

    std::vector<std::string> projected;
    skip();
    if (at('*')) {
      ++pos_;
      q.select_all = true;
    } else {
      while (skip(), at('?') || at('$')) projected.push_back(read_variable().value);
      if (projected.empty()) fail("expected '*' or at least one variable after SELECT");
    }

    if (peek_keyword("WHERE")) take_word();
    skip();
    if (!at('{')) fail("expected '{'");
    ++pos_;

    std::size_t ordinal = 0;
    for (;;) {
      skip();
      if (at('}')) {
        ++pos_;
        break;
      }
      if (pos_ >= text_.size()) fail("unterminated group pattern, expected '}'");
      if (at('{')) fail_unsupported("nested group patterns");
      for (std::string_view kw : {"OPTIONAL", "FILTER", "UNION", "MINUS", "BIND", "VALUES", "GRAPH", "SERVICE"}) {
        if (peek_keyword(kw)) fail_unsupported(std::string(kw));
      }
      TriplePattern tp;
      tp.s = read_term(Position::subject);
      tp.p = read_term(Position::predicate);
      tp.o = read_term(Position::object);
      tp.ordinal = ++ordinal;
      q.patterns.push_back(std::move(tp));
      skip();
      if (at('.')) {
        ++pos_;
      } else if (at(';') || at(',')) {
        fail_unsupported("';' and ',' triple abbreviations");
      } else if (!at('}')) {
        fail("expected '.' or '}' after triple pattern");
      }
    }
    skip();
    if (pos_ < text_.size()) {
      const auto word = peek_word();
      if (!word.empty()) fail_unsupported("solution modifier " + std::string(word));
      fail("unexpected trailing content");
    }
    if (q.patterns.empty()) fail("empty basic graph pattern");

    for (const auto& tp : q.patterns) {
      for (const Term* t : {&tp.s, &tp.o}) {
        if (t->is_variable() && std::find(q.variables.begin(), q.variables.end(), t->value) == q.variables.end()) {
          q.variables.push_back(t->value);
        }
      }
    }
    if (q.select_all) {
      for (const auto& v : q.variables) {
        if (v.front() == '?') q.projection.push_back(v);
      }
    } else {
      for (const auto& v : projected) {
        if (std::find(q.variables.begin(), q.variables.end(), v) == q.variables.end()) {
          throw ParseError("projected variable " + v + " does not occur in the pattern");
        }
      }
      q.projection = std::move(projected);
    }
    return q;
  }

 private:
  enum class Position { subject, predicate, object };

  [[noreturn]] void fail(const std::string& what) const { throw ParseError(what, line()); }
  [[noreturn]] void fail_unsupported(const std::string& what) const {
    throw UnsupportedFeature("unsupported: " + what, line());
  }

  std::size_t line() const { return 1 + std::count(text_.begin(), text_.begin() + std::min(pos_, text_.size()), '\n'); }

  bool at(char c) const { return pos_ < text_.size() && text_[pos_] == c; }

  // Skips whitespace and '#' comments.
  void skip() {
    for (;;) {
      pos_ = lex::skip_space(text_, pos_);
      if (!at('#')) return;
      while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
    }
  }

  std::string_view peek_word() {
    skip();
    std::size_t end = pos_;
    while (end < text_.size() && std::isalpha(static_cast<unsigned char>(text_[end]))) ++end;
    return text_.substr(pos_, end - pos_);
  }

  bool peek_keyword(std::string_view kw) {
    const auto w = peek_word();
    if (!iequals(w, kw)) return false;
    // "PREFIX" must not be the start of a prefixed name such as "prefix:x".
    const std::size_t end = pos_ + w.size();
    return end >= text_.size() || (text_[end] != ':' && !lex::is_name_char(text_[end]));
  }

  std::string_view take_word() {
    const auto w = peek_word();
    pos_ += w.size();
    return w;
  }

  void expect_keyword(std::string_view kw) {
    if (!peek_keyword(kw)) fail("expected " + std::string(kw));
    take_word();
  }

  void parse_prefix() {
    take_word();
    skip();
    const std::size_t start = pos_;
    while (pos_ < text_.size() && lex::is_name_char(text_[pos_])) ++pos_;
    if (!at(':')) fail("expected ':' in PREFIX declaration");
    std::string name(text_.substr(start, pos_ - start));
    ++pos_;
    skip();
    const auto end = lex::scan_iri(text_, pos_);
    if (!end) fail("expected <iri> in PREFIX declaration");
    prefixes_[name] = std::string(text_.substr(pos_ + 1, *end - pos_ - 2));
    pos_ = *end;
  }

  Term read_variable() {
    const std::size_t start = pos_++;
    while (pos_ < text_.size() && lex::is_name_char(text_[pos_]) && text_[pos_] != '.' && text_[pos_] != '-') {
      ++pos_;
    }
    if (pos_ == start + 1) fail("empty variable name");
    return make_variable(text_.substr(start, pos_ - start));
  }

  std::string read_prefixed_name() {
    const std::size_t start = pos_;
    while (pos_ < text_.size() && lex::is_name_char(text_[pos_])) ++pos_;
    if (!at(':')) fail("expected a term, found '" + std::string(text_.substr(start, std::max<std::size_t>(1, pos_ - start))) + "'");
    const std::string prefix(text_.substr(start, pos_ - start));
    ++pos_;
    const std::size_t local_start = pos_;
    while (pos_ < text_.size() && (lex::is_name_char(text_[pos_]) || text_[pos_] == ':')) ++pos_;
    while (pos_ > local_start && text_[pos_ - 1] == '.') --pos_;
    const auto it = prefixes_.find(prefix);
    if (it == prefixes_.end()) fail("unknown prefix '" + prefix + ":'");
    return it->second + std::string(text_.substr(local_start, pos_ - local_start));
  }

  Term read_term(Position where) {
    skip();
    if (pos_ >= text_.size()) fail("unexpected end of query inside a triple pattern");
    const char c = text_[pos_];
    if (c == '?' || c == '$') {
      if (where == Position::predicate) fail_unsupported("variable in predicate position");
      return read_variable();
    }
    if (c == '<') {
      const auto end = lex::scan_iri(text_, pos_);
      if (!end) fail("malformed IRI");
      Term t = make_iri(text_.substr(pos_ + 1, *end - pos_ - 2));
      pos_ = *end;
      return t;
    }
    if (c == '"') {
      if (where != Position::object) fail("literal outside the object position");
      return read_literal();
    }
    if (c == '_' && pos_ + 1 < text_.size() && text_[pos_ + 1] == ':') {
      if (where == Position::predicate) fail("blank node in predicate position");
      const auto end = lex::scan_blank(text_, pos_);
      if (!end) fail("malformed blank node label");
      Term t{Term::Kind::blank, std::string(text_.substr(pos_, *end - pos_))};
      pos_ = *end;
      return t;
    }
    if (where == Position::predicate && c == 'a' &&
        (pos_ + 1 >= text_.size() || !(lex::is_name_char(text_[pos_ + 1]) || text_[pos_ + 1] == ':'))) {
      ++pos_;
      return make_iri(kRdfType);
    }
    return make_iri(read_prefixed_name());
  }

  Term read_literal() {
    // Lexical part and language tag are kept verbatim; a prefixed datatype is
    // expanded so the token matches the N-Triples form stored in the dictionary.
    std::size_t i = pos_ + 1;
    for (; i < text_.size() && text_[i] != '"'; ++i) {
      if (text_[i] == '\\') ++i;
      if (i < text_.size() && text_[i] == '\n') fail("unterminated literal");
    }
    if (i >= text_.size()) fail("unterminated literal");
    std::string value(text_.substr(pos_, i + 1 - pos_));
    pos_ = i + 1;
    if (at('@')) {
      const std::size_t start = pos_++;
      while (pos_ < text_.size() && (std::isalnum(static_cast<unsigned char>(text_[pos_])) || text_[pos_] == '-')) {
        ++pos_;
      }
      if (pos_ == start + 1) fail("malformed language tag");
      value += text_.substr(start, pos_ - start);
    } else if (text_.substr(pos_, 2) == "^^") {
      pos_ += 2;
      if (at('<')) {
        const auto end = lex::scan_iri(text_, pos_);
        if (!end) fail("malformed datatype IRI");
        value += "^^" + std::string(text_.substr(pos_, *end - pos_));
        pos_ = *end;
      } else {
        value += "^^<" + read_prefixed_name() + ">";
      }
    }
    return Term{Term::Kind::literal, std::move(value)};
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::map<std::string, std::string> prefixes_;
};

}  // namespace

QueryGraph parse_query(std::string_view text) { return QueryParser(text).parse(); }

std::string to_sparql(const QueryGraph& q) {
  std::string out = "SELECT ";
  if (q.distinct) out += "DISTINCT ";
  if (q.select_all) {
    out += "*";
  } else {
    for (std::size_t i = 0; i < q.projection.size(); ++i) {
      if (i) out += ' ';
      out += q.projection[i];
    }
  }
  out += " WHERE {\n";
  for (const auto& tp : q.patterns) out += "  " + to_string(tp) + " .\n";
  out += "}\n";
  return out;
}

std::vector<std::string> BoundPattern::variables() const {
  std::vector<std::string> vars;
  if (s.is_variable()) vars.push_back(s.var);
  if (o.is_variable() && (vars.empty() || vars.front() != o.var)) vars.push_back(o.var);
  return vars;
}

bool BoundQuery::matches_nothing() const {
  return std::any_of(patterns.begin(), patterns.end(), [](const BoundPattern& p) { return p.matches_nothing(); });
}

namespace {

NodeSlot bind_slot(const Term& t, const TermDictionary& dict) {
  NodeSlot slot;
  if (t.is_variable()) {
    slot.kind = NodeSlot::Kind::variable;
    slot.var = t.value;
  } else if (auto id = dict.find_node(t.node_key())) {
    slot.kind = NodeSlot::Kind::constant;
    slot.id = *id;
  } else {
    slot.kind = NodeSlot::Kind::missing;
  }
  return slot;
}

}  // namespace

BoundQuery bind_constants(const QueryGraph& graph, const TermDictionary& dict) {
  BoundQuery q;
  q.projection = graph.projection;
  q.distinct = graph.distinct;
  q.patterns.reserve(graph.patterns.size());
  for (const auto& tp : graph.patterns) {
    BoundPattern bp;
    bp.source = tp;
    bp.pred = dict.find_predicate(tp.p.value).value_or(kNoPred);
    bp.s = bind_slot(tp.s, dict);
    bp.o = bind_slot(tp.o, dict);
    q.patterns.push_back(std::move(bp));
  }
  return q;
}

}  // namespace gsmat
