#include "featgts/dsl.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <set>
#include <sstream>

namespace featgts {

std::string Diagnostic::to_string() const {
  return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

namespace {

// --- Lexer ---------------------------------------------------------------------

enum class Tok { Ident, Number, Punct, End, Bad };

struct Token {
  Tok kind;
  std::string text;
  int line;
  int col;
};

bool ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
bool ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }
bool digit(char c) { return std::isdigit(static_cast<unsigned char>(c)); }

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  std::size_t i = 0;
  int line = 1, col = 1;
  auto advance = [&](std::size_t n) {
    for (; n && i < src.size(); --n, ++i) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
    }
  };
  while (i < src.size()) {
    const char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '#' || (c == '/' && i + 1 < src.size() && src[i + 1] == '/')) {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    const int l = line, k = col;
    std::size_t j = i;
    if (ident_start(c)) {
      while (j < src.size() && ident_char(src[j])) ++j;
      out.push_back({Tok::Ident, std::string(src.substr(i, j - i)), l, k});
    } else if (digit(c) || (c == '-' && j + 1 < src.size() && digit(src[j + 1]))) {
      ++j;
      while (j < src.size() && digit(src[j])) ++j;
      if (j + 1 < src.size() && src[j] == '.' && digit(src[j + 1])) {
        ++j;
        while (j < src.size() && digit(src[j])) ++j;
      }
      if (j < src.size() && (src[j] == 'e' || src[j] == 'E')) {
        std::size_t e = j + 1;
        if (e < src.size() && (src[e] == '+' || src[e] == '-')) ++e;
        if (e < src.size() && digit(src[e])) {
          j = e;
          while (j < src.size() && digit(src[j])) ++j;
        }
      }
      out.push_back({Tok::Number, std::string(src.substr(i, j - i)), l, k});
    } else if (src.substr(i, 2) == "->" || src.substr(i, 2) == "..") {
      j += 2;
      out.push_back({Tok::Punct, std::string(src.substr(i, 2)), l, k});
    } else if (std::string_view("{};:,.()[]=@?").find(c) != std::string_view::npos) {
      ++j;
      out.push_back({Tok::Punct, std::string(1, c), l, k});
    } else {
      // One byte at a time; a multibyte character yields several Bad tokens
      // but parsing stops at the first.
      ++j;
      out.push_back({Tok::Bad, std::string(1, c), l, k});
    }
    advance(j - i);
  }
  out.push_back({Tok::End, "", line, col});
  return out;
}

// --- Parser --------------------------------------------------------------------

struct Failure {
  Diagnostic diag;
  ErrorKind kind;
};

std::string quoted(const std::string& s) { return "'" + s + "'"; }

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Bad: return "unexpected character " + quoted(t.text);
    default: return quoted(t.text);
  }
}

struct PendingAttr {
  std::string node_type;
  std::string name;
  AttrDomain domain;
  bool default_grid = false;
};

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  ModelDocument run() {
    keyword("model");
    const Token& head = peek();
    doc_.model.model.name = ident("model name");
    model_line_ = head.line;
    model_col_ = head.col;
    punct("{");
    bool have_features = false;
    for (;;) {
      if (is("features")) {
        if (have_features) consistency(peek(), "duplicate features block");
        have_features = true;
        features();
      } else if (is("types")) {
        types();
      } else if (is("defaults")) {
        defaults();
      } else if (is("rule")) {
        rule();
      } else if (is_punct("}")) {
        next();
        break;
      } else {
        fail({"'defaults'", "'features'", "'rule'", "'types'", "'}'"});
      }
    }
    if (peek().kind != Tok::End) fail({"end of input"});
    return finish(have_features);
  }

 private:
  // Token helpers.
  const Token& peek() const { return toks_[pos_]; }
  const Token& next() {
    tried_.clear();
    return toks_[pos_ < toks_.size() - 1 ? pos_++ : pos_];
  }
  // Failed lookaheads at the current token join the expected set of the next
  // syntax error, so optional suffixes such as '@f' are reported too.
  bool is(const char* word) const {
    if (peek().kind == Tok::Ident && peek().text == word) return true;
    tried_.push_back(quoted(word));
    return false;
  }
  bool is_punct(const char* p) const {
    if (peek().kind == Tok::Punct && peek().text == p) return true;
    tried_.push_back(quoted(p));
    return false;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    expected.insert(expected.end(), tried_.begin(), tried_.end());
    std::sort(expected.begin(), expected.end());
    expected.erase(std::unique(expected.begin(), expected.end()), expected.end());
    const Token& t = peek();
    std::string msg = "expected ";
    if (expected.size() > 1) msg += "one of ";
    for (std::size_t i = 0; i < expected.size(); ++i) msg += (i ? ", " : "") + expected[i];
    msg += " but found " + describe(t);
    throw Failure{Diagnostic{t.line, t.col, msg, std::move(expected)}, ErrorKind::Parse};
  }

  [[noreturn]] void consistency(const Token& at, const std::string& msg) const {
    throw Failure{Diagnostic{at.line, at.col, msg, {}}, ErrorKind::Consistency};
  }

  void keyword(const char* word) {
    if (!is(word)) fail({quoted(word)});
    next();
  }
  void punct(const char* p) {
    if (!is_punct(p)) fail({quoted(p)});
    next();
  }
  std::string ident(const char* what) {
    if (peek().kind != Tok::Ident) fail({what});
    return next().text;
  }
  std::int64_t integer(const char* what) {
    const Token& t = peek();
    std::int64_t v = 0;
    if (t.kind != Tok::Number) fail({what});
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) fail({what});
    next();
    return v;
  }
  double real(const char* what) {
    const Token& t = peek();
    double v = 0;
    if (t.kind != Tok::Number) fail({what});
    auto [p, ec] = std::from_chars(t.text.data(), t.text.data() + t.text.size(), v);
    if (ec != std::errc() || p != t.text.data() + t.text.size()) fail({what});
    next();
    return v;
  }
  std::optional<std::string> annotation() {
    if (!is_punct("@")) return std::nullopt;
    next();
    return ident("feature name");
  }

  // Blocks.
  void features() {
    keyword("features");
    punct("{");
    while (!is_punct("}")) {
      Feature f;
      if (is("root")) {
        next();
        f.name = ident("feature name");
        f.kind = Variability::Root;
        features_.push_back(std::move(f));
      } else if (is("mandatory") || is("optional")) {
        f.kind = next().text == "mandatory" ? Variability::Mandatory : Variability::Optional;
        f.name = ident("feature name");
        punct(":");
        f.parent = ident("parent feature");
        features_.push_back(std::move(f));
      } else if (is("alt")) {
        next();
        std::vector<std::string> names{ident("feature name")};
        while (is_punct(",")) {
          next();
          names.push_back(ident("feature name"));
        }
        punct(":");
        const std::string parent = ident("parent feature");
        for (auto& n : names) features_.push_back(Feature{n, parent, Variability::Alternative, groups_});
        ++groups_;
      } else {
        fail({"'alt'", "'mandatory'", "'optional'", "'root'", "'}'"});
      }
      punct(";");
    }
    next();
  }

  AttrDomain domain(bool& default_grid) {
    default_grid = false;
    if (is_punct("{")) {
      next();
      std::vector<std::string> names{ident("symbol")};
      while (is_punct(",")) {
        next();
        names.push_back(ident("symbol"));
      }
      punct("}");
      return AttrDomain::symbols(std::move(names));
    }
    if (is("int")) {
      next();
      punct("[");
      const auto lo = integer("integer");
      punct("..");
      const auto hi = integer("integer");
      punct("]");
      return AttrDomain::int_range(lo, hi);
    }
    if (is("grid")) {
      next();
      if (!is_punct("[")) {
        default_grid = true;
        return AttrDomain::grid(1);
      }
      next();
      const Token& at = peek();
      const auto size = integer("grid size");
      if (size < 1 || size > 1'000'000) consistency(at, "grid size must lie in 1..1000000");
      punct("]");
      return AttrDomain::grid(static_cast<int>(size));
    }
    fail({"'grid'", "'int'", "'{'"});
  }

  void types() {
    keyword("types");
    punct("{");
    auto& m = doc_.model.mapping;
    while (!is_punct("}")) {
      if (is("node")) {
        next();
        const std::string name = ident("node type name");
        node_types_.push_back(name);
        if (auto f = annotation()) m.node_types[name] = *f;
      } else if (is("edge")) {
        next();
        EdgeType e;
        e.name = ident("edge type name");
        punct(":");
        e.source = ident("source node type");
        punct("->");
        e.target = ident("target node type");
        if (auto f = annotation()) m.edge_types[e.name] = *f;
        edge_types_.push_back(std::move(e));
      } else if (is("attr")) {
        next();
        PendingAttr a;
        a.node_type = ident("node type name");
        punct(".");
        a.name = ident("attribute name");
        punct(":");
        a.domain = domain(a.default_grid);
        if (auto f = annotation()) m.attrs[{a.node_type, a.name}] = *f;
        attrs_.push_back(std::move(a));
      } else {
        fail({"'attr'", "'edge'", "'node'", "'}'"});
      }
      punct(";");
    }
    next();
  }

  void defaults() {
    keyword("defaults");
    punct("{");
    while (!is_punct("}")) {
      if (is("grid")) {
        next();
        const Token& at = peek();
        const auto g = integer("grid size");
        if (g < 1 || g > 1'000'000) consistency(at, "grid size must lie in 1..1000000");
        doc_.grid = static_cast<int>(g);
      } else if (is("rate")) {
        next();
        const Token& at = peek();
        const double r = real("rate");
        if (!(r > 0.0)) consistency(at, "default rate must be positive");
        doc_.default_rate = r;
      } else {
        fail({"'grid'", "'rate'", "'}'"});
      }
      punct(";");
    }
    next();
  }

  AttrTerm term() {
    if (is_punct("?")) {
      next();
      return AttrTerm::variable(ident("variable name"));
    }
    if (is_punct("(")) {
      next();
      const auto x = integer("integer");
      punct(",");
      const auto y = integer("integer");
      punct(")");
      return AttrTerm::constant(Cell{static_cast<int>(x), static_cast<int>(y)});
    }
    if (peek().kind == Tok::Number) return AttrTerm::constant(integer("integer"));
    if (peek().kind == Tok::Ident) {
      const Token& at = peek();
      std::string name = next().text;
      if (!is_punct("(")) return AttrTerm::constant(std::move(name));
      auto fn = builtin_from_name(name);
      if (!fn) consistency(at, "unknown function '" + name + "'");
      next();
      punct("?");
      std::string var = ident("variable name");
      punct(")");
      return AttrTerm::builtin(*fn, std::move(var));
    }
    fail({"'('", "'?'", "integer", "symbol"});
  }

  void pattern(const std::string& rule, Side side, Pattern& p) {
    auto& m = doc_.model.mapping;
    punct("{");
    while (!is_punct("}")) {
      if (is("node")) {
        next();
        const Token& at = peek();
        const std::string id = ident("node id");
        punct(":");
        PatternNode n;
        n.type = ident("node type name");
        if (auto f = annotation()) note_element(m.rule_nodes, {rule, id}, *f, at);
        if (is_punct("{")) {
          next();
          while (!is_punct("}")) {
            const Token& attr_at = peek();
            const std::string attr = ident("attribute name");
            punct("=");
            AttrTerm t = term();
            if (!n.attrs.emplace(attr, std::move(t)).second)
              consistency(attr_at, "attribute '" + attr + "' given twice");
            if (auto f = annotation()) m.rule_attrs[{rule, side, id, attr}] = *f;
            if (!is_punct(",")) break;
            next();
          }
          punct("}");
        }
        if (!p.nodes.emplace(id, std::move(n)).second) consistency(at, "duplicate node id '" + id + "'");
      } else if (is("edge")) {
        next();
        const Token& at = peek();
        const std::string id = ident("edge id");
        punct(":");
        Edge e;
        e.type = ident("edge type name");
        e.source = ident("source node id");
        punct("->");
        e.target = ident("target node id");
        if (auto f = annotation()) note_element(m.rule_edges, {rule, id}, *f, at);
        if (!p.edges.emplace(id, std::move(e)).second) consistency(at, "duplicate edge id '" + id + "'");
      } else {
        fail({"'edge'", "'node'", "'}'"});
      }
      punct(";");
    }
    next();
  }

  // A preserved element may be annotated on either side, but consistently.
  void note_element(std::map<std::pair<std::string, std::string>, std::string>& m,
                    const std::pair<std::string, std::string>& key, const std::string& f, const Token& at) {
    auto [it, fresh] = m.emplace(key, f);
    if (!fresh && it->second != f)
      consistency(at, "element '" + key.second + "' annotated with both '" + it->second + "' and '" + f + "'");
  }

  void rule() {
    keyword("rule");
    const Token& at = peek();
    Rule r;
    r.name = ident("rule name");
    std::optional<double> rate;
    if (is("rate")) {
      next();
      const Token& rate_at = peek();
      rate = real("rate");
      if (!(*rate > 0.0)) consistency(rate_at, "rate must be positive");
    }
    if (auto f = annotation()) doc_.model.mapping.rules[r.name] = *f;
    punct("{");
    keyword("lhs");
    pattern(r.name, Side::Lhs, r.lhs);
    keyword("rhs");
    pattern(r.name, Side::Rhs, r.rhs);
    punct("}");
    for (const auto& other : rules_)
      if (other.first.name == r.name) consistency(at, "duplicate rule '" + r.name + "'");
    rules_.emplace_back(std::move(r), rate);
  }

  ModelDocument finish(bool have_features) {
    const Token origin{Tok::End, "", model_line_, model_col_};
    try {
      if (!have_features)
        features_ = {Feature{doc_.model.model.name, "", Variability::Root, -1}};
      doc_.model.diagram = FeatureDiagram(features_);
      std::vector<AttrDecl> attrs;
      const int grid = doc_.grid.value_or(kDefaultGrid);
      for (auto& a : attrs_)
        attrs.push_back(AttrDecl{a.node_type, a.name, a.default_grid ? AttrDomain::grid(grid) : a.domain});
      doc_.model.model.types = TypeGraph(node_types_, edge_types_, std::move(attrs));
    } catch (const Error& e) {
      consistency(origin, e.what());
    }
    for (auto& [r, rate] : rules_) {
      r.rate = rate.value_or(doc_.default_rate.value_or(1.0));
      doc_.model.model.rules.push_back(std::move(r));
    }
    return std::move(doc_);
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  mutable std::vector<std::string> tried_;
  int model_line_ = 1;
  int model_col_ = 1;
  ModelDocument doc_;
  std::vector<Feature> features_;
  int groups_ = 0;
  std::vector<std::string> node_types_;
  std::vector<EdgeType> edge_types_;
  std::vector<PendingAttr> attrs_;
  std::vector<std::pair<Rule, std::optional<double>>> rules_;
};

}  // namespace

ParseResult parse_model(std::string_view text) {
  ParseResult out;
  Parser parser(lex(text));
  ModelDocument doc;
  try {
    doc = parser.run();
  } catch (const Failure& f) {
    out.kind = f.kind;
    out.diagnostics.push_back(f.diag);
    return out;
  }
  auto report = check_feature_model(doc.model);
  if (!report.ok()) {
    out.kind = ErrorKind::Consistency;
    for (const auto& v : report.violations) {
      std::string msg = v.element + ": " + v.detail;
      if (!v.required.empty()) msg += " (requires " + v.required + ")";
      out.diagnostics.push_back(Diagnostic{1, 1, std::move(msg), {}});
    }
    return out;
  }
  out.document = std::move(doc);
  return out;
}

// --- Printer -------------------------------------------------------------------

namespace {

std::string number(double x) {
  char buf[64];
  auto [p, ec] = std::to_chars(buf, buf + sizeof buf, x);
  return std::string(buf, p);
}

std::string domain_text(const AttrDomain& d, int grid) {
  if (d.kind() == AttrDomain::Kind::Grid && d.grid_size() != grid)
    return "grid[" + std::to_string(d.grid_size()) + "]";
  return d.to_string();
}

template <class Map, class Key>
std::string note(const Map& m, const Key& k) {
  auto it = m.find(k);
  return it == m.end() ? "" : " @" + it->second;
}

void print_pattern(std::ostringstream& os, const FeatureMapping& m, const std::string& rule, Side side,
                   const char* label, const Pattern& p) {
  os << "    " << label << " {\n";
  for (const auto& [id, n] : p.nodes) {
    os << "      node " << id << " : " << n.type << note(m.rule_nodes, std::pair{rule, id});
    if (!n.attrs.empty()) {
      os << " {";
      bool first = true;
      for (const auto& [attr, t] : n.attrs) {
        os << (first ? " " : ", ") << attr << " = " << to_string(t)
           << note(m.rule_attrs, std::tuple{rule, side, id, attr});
        first = false;
      }
      os << " }";
    }
    os << ";\n";
  }
  for (const auto& [id, e] : p.edges)
    os << "      edge " << id << " : " << e.type << " " << e.source << " -> " << e.target
       << note(m.rule_edges, std::pair{rule, id}) << ";\n";
  os << "    }\n";
}

}  // namespace

std::string print_model(const ModelDocument& doc) {
  const auto& fm = doc.model;
  const auto& m = fm.mapping;
  const auto& tg = fm.model.types;
  const int grid = doc.grid.value_or(kDefaultGrid);
  std::ostringstream os;
  os << "model " << fm.model.name << " {\n";

  const auto& fs = fm.diagram.features();
  const bool implicit = fs.size() == 1 && fs.front().name == fm.model.name;
  if (!implicit && !fs.empty()) {
    os << "  features {\n";
    std::set<int> printed;
    for (const auto& f : fs) {
      switch (f.kind) {
        case Variability::Root: os << "    root " << f.name << ";\n"; break;
        case Variability::Mandatory: os << "    mandatory " << f.name << " : " << f.parent << ";\n"; break;
        case Variability::Optional: os << "    optional " << f.name << " : " << f.parent << ";\n"; break;
        case Variability::Alternative: {
          if (!printed.insert(f.group).second) break;
          os << "    alt ";
          bool first = true;
          for (const auto& g : fs)
            if (g.kind == Variability::Alternative && g.group == f.group) {
              os << (first ? "" : ", ") << g.name;
              first = false;
            }
          os << " : " << f.parent << ";\n";
          break;
        }
      }
    }
    os << "  }\n\n";
  }

  os << "  types {\n";
  for (const auto& n : tg.node_types()) os << "    node " << n << note(m.node_types, n) << ";\n";
  for (const auto& e : tg.edge_types())
    os << "    edge " << e.name << " : " << e.source << " -> " << e.target << note(m.edge_types, e.name) << ";\n";
  for (const auto& a : tg.attrs())
    os << "    attr " << a.node_type << "." << a.name << " : " << domain_text(a.domain, grid)
       << note(m.attrs, std::pair{a.node_type, a.name}) << ";\n";
  os << "  }\n";

  if (doc.grid || doc.default_rate) {
    os << "\n  defaults {\n";
    if (doc.grid) os << "    grid " << *doc.grid << ";\n";
    if (doc.default_rate) os << "    rate " << number(*doc.default_rate) << ";\n";
    os << "  }\n";
  }

  for (const auto& r : fm.model.rules) {
    os << "\n  rule " << r.name << " rate " << number(r.rate) << note(m.rules, r.name) << " {\n";
    print_pattern(os, m, r.name, Side::Lhs, "lhs", r.lhs);
    print_pattern(os, m, r.name, Side::Rhs, "rhs", r.rhs);
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

ModelDocument plain_document(const GTS& g) {
  ModelDocument doc;
  doc.model.model = g;
  doc.model.diagram = FeatureDiagram({Feature{g.name, "", Variability::Root, -1}});
  for (const auto& a : g.types.attrs())
    if (a.domain.kind() == AttrDomain::Kind::Grid) {
      doc.grid = a.domain.grid_size();
      break;
    }
  return doc;
}

}  // namespace featgts
