#include <filesystem>
#include <random>

#include "doctest.h"
#include "featgts/dsl.hpp"
#include "featgts/sim.hpp"
#include "fixtures.hpp"
#include "oracles.hpp"

using namespace featgts;
namespace fs = std::filesystem;

namespace {

std::vector<fs::path> fixture_files(const std::string& dir) {
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(fixtures::source_path("tests/fixtures/" + dir)))
    if (e.path().extension() == ".fgts") out.push_back(e.path());
  std::sort(out.begin(), out.end());
  return out;
}

Diagnostic first_diagnostic(std::string_view text) {
  auto r = parse_model(text);
  REQUIRE_FALSE(r.ok());
  REQUIRE_FALSE(r.diagnostics.empty());
  return r.diagnostics.front();
}

// Random documents that are consistent by construction: types belong to the
// root, each rule to a random feature, rule internals follow their rule.
class DocumentGenerator {
 public:
  explicit DocumentGenerator(std::uint64_t seed) : rng_(seed) {}

  ModelDocument operator()() {
    ModelDocument doc;
    auto& fm = doc.model;
    fm.diagram = oracle::random_diagram(1 + pick(5), rng_);
    fm.model.name = "M" + std::to_string(pick(100));
    if (pick(2)) doc.grid = 2 + pick(8);
    if (pick(2)) doc.default_rate = rates_[pick(rates_.size())];

    std::vector<std::string> nodes;
    for (int i = 0, n = 1 + pick(3); i < n; ++i) nodes.push_back("T" + std::to_string(i));
    std::vector<EdgeType> edges;
    for (int i = 0, n = pick(3); i < n; ++i)
      edges.push_back({"e" + std::to_string(i), nodes[pick(nodes.size())], nodes[pick(nodes.size())]});
    std::vector<AttrDecl> attrs;
    for (const auto& t : nodes)
      for (int i = 0, n = pick(3); i < n; ++i) attrs.push_back({t, "a" + std::to_string(i), domain(doc)});
    fm.model.types = TypeGraph(nodes, edges, attrs);

    for (int i = 0, n = pick(4); i < n; ++i) {
      Rule r = rule("r" + std::to_string(i), fm.model.types);
      if (pick(2)) r.rate = rates_[pick(rates_.size())];
      else r.rate = doc.default_rate.value_or(1.0);
      const auto& features = fm.diagram.features();
      if (pick(2)) fm.mapping.rules[r.name] = features[pick(features.size())].name;
      fm.model.rules.push_back(std::move(r));
    }
    return doc;
  }

 private:
  int pick(std::size_t n) { return static_cast<int>(rng_() % n); }

  AttrDomain domain(const ModelDocument& doc) {
    switch (pick(4)) {
      case 0: return AttrDomain::symbols({"u", "v", "w"});
      case 1: {
        const std::int64_t lo = pick(5) - 2;
        return AttrDomain::int_range(lo, lo + pick(4));
      }
      case 2: return AttrDomain::grid(doc.grid.value_or(kDefaultGrid));
      default: return AttrDomain::grid(1 + pick(6));
    }
  }

  Rule rule(const std::string& name, const TypeGraph& tg) {
    Rule r;
    r.name = name;
    int var = 0;
    const auto& types = tg.node_types();
    for (int i = 0, n = 1 + pick(3); i < n; ++i) {
      const std::string id = "n" + std::to_string(i);
      PatternNode lhs{types[pick(types.size())], {}};
      PatternNode rhs{lhs.type, {}};
      for (const auto* d : tg.attrs_of(lhs.type)) {
        auto values = d->domain.values();
        if (pick(3) == 0) continue;
        AttrTerm t = pick(2) ? AttrTerm::constant(values[pick(values.size())])
                             : AttrTerm::variable("x" + std::to_string(var++));
        lhs.attrs[d->name] = t;
        if (pick(2)) {
          if (d->domain.kind() == AttrDomain::Kind::Grid && t.as_variable() && pick(2))
            rhs.attrs[d->name] = AttrTerm::builtin(static_cast<Builtin>(pick(4)), t.as_variable()->name);
          else
            rhs.attrs[d->name] = pick(2) ? t : AttrTerm::constant(values[pick(values.size())]);
        }
      }
      r.lhs.nodes[id] = lhs;
      if (pick(4)) r.rhs.nodes[id] = rhs;
    }
    if (pick(3) == 0) {
      PatternNode created{types[pick(types.size())], {}};
      for (const auto* d : tg.attrs_of(created.type)) {
        auto values = d->domain.values();
        created.attrs[d->name] = AttrTerm::constant(values[pick(values.size())]);
      }
      r.rhs.nodes["c"] = created;
    }
    int eid = 0;
    for (Pattern* side : {&r.lhs, &r.rhs}) {
      auto& p = *side;
      for (const auto& et : tg.edge_types()) {
        std::vector<std::string> src, tgt;
        for (const auto& [id, n] : p.nodes) {
          if (n.type == et.source) src.push_back(id);
          if (n.type == et.target) tgt.push_back(id);
        }
        if (src.empty() || tgt.empty() || pick(2)) continue;
        p.edges["f" + std::to_string(eid++)] = Edge{et.name, src[pick(src.size())], tgt[pick(tgt.size())]};
      }
    }
    return r;
  }

  std::mt19937_64 rng_;
  const std::vector<double> rates_{0.5, 1.0, 2.25, 1e-3, 3.0, 0.1};
};

}  // namespace

TEST_SUITE("dsl") {

TEST_CASE("bundled model") {
  const auto& doc = fixtures::sir_document();
  CHECK(doc.grid == 10);
  CHECK(doc.model.model.name == "SIR");
  CHECK(doc.model.model.rules.size() == 7);
  CHECK(fixtures::basic().rules.size() == 2);
  CHECK(doc.model.model.types.attr("Agent", "l")->domain == AttrDomain::grid(10));
  CHECK(doc.model.model.rule("infect")->rate == 0.02);
}

TEST_CASE("print then parse is the identity on fixtures") {
  std::vector<fs::path> files = fixture_files("valid");
  files.push_back(fixtures::source_path("models/sir.fgts"));
  for (const auto& f : files) {
    INFO(f.string());
    auto r = parse_model(fixtures::read(f.string()));
    REQUIRE(r.ok());
    const auto printed = print_model(*r.document);
    auto again = parse_model(printed);
    REQUIRE(again.ok());
    CHECK(*again.document == *r.document);
    CHECK(print_model(*again.document) == printed);
  }
}

TEST_CASE("print then parse is the identity on random documents") {
  DocumentGenerator gen(41);
  int rules = 0;
  for (int i = 0; i < 300; ++i) {
    auto doc = gen();
    auto valid = check_feature_model(doc.model);
    if (!valid.ok()) {
      FAIL_CHECK(valid.describe());
      continue;
    }
    rules += static_cast<int>(doc.model.model.rules.size());
    const auto text = print_model(doc);
    auto r = parse_model(text);
    INFO(text);
    REQUIRE(r.ok());
    CHECK(*r.document == doc);
  }
  CHECK(rules > 200);
}

TEST_CASE("valid fixture details") {
  auto r = parse_model(fixtures::read(fixtures::source_path("tests/fixtures/valid/groups.fgts")));
  REQUIRE(r.ok());
  const auto& fm = r.document->model;
  CHECK(fm.diagram.groups() == std::vector<std::vector<std::string>>{{"car", "bike"}});
  CHECK(fm.diagram.feature("road")->kind == Variability::Mandatory);
  CHECK(fm.model.types.attr("Vehicle", "pos")->domain == AttrDomain::grid(5));
  CHECK(fm.model.types.attr("Vehicle", "speed")->domain == AttrDomain::int_range(0, 3));
  CHECK(fm.model.rule("accelerate")->rate == 0.25);
  CHECK(fm.model.rule("pedal")->rate == 0.15);
  CHECK(valid_configurations(fm.diagram).size() == 4);

  auto plain = parse_model(fixtures::read(fixtures::source_path("tests/fixtures/valid/minimal.fgts")));
  REQUIRE(plain.ok());
  CHECK(plain.document->model.diagram.root() == "Decay");
  CHECK(print_model(*plain.document).find("features") == std::string::npos);
}

TEST_CASE("malformed fixtures map to their error kind") {
  auto files = fixture_files("malformed");
  CHECK(files.size() >= 10);
  for (const auto& f : files) {
    INFO(f.string());
    const auto name = f.filename().string();
    auto r = parse_model(fixtures::read(f.string()));
    REQUIRE_FALSE(r.ok());
    REQUIRE_FALSE(r.diagnostics.empty());
    CHECK(r.diagnostics[0].line >= 1);
    CHECK(r.diagnostics[0].column >= 1);
    if (name.rfind("parse_", 0) == 0)
      CHECK(r.kind == ErrorKind::Parse);
    else
      CHECK(r.kind == ErrorKind::Consistency);
  }
}

TEST_CASE("syntax diagnostics carry position and expected tokens") {
  auto d = first_diagnostic("model m {\n  types {\n    node A\n  }\n}\n");
  CHECK(d.line == 4);
  CHECK(d.column == 3);
  CHECK(d.expected == std::vector<std::string>{"';'", "'@'"});
  CHECK(d.to_string() == "4:3: expected one of ';', '@' but found '}'");

  auto bad = first_diagnostic("model m { types { node A; attr A.x : {u}; } rule r { lhs { node a : A { x = $ }; } rhs { } } }");
  CHECK(bad.message.find("unexpected character '$'") != std::string::npos);

  auto rate = first_diagnostic("model m { rule r 3 { lhs { } rhs { } } }");
  CHECK(rate.expected == std::vector<std::string>{"'@'", "'rate'", "'{'"});

  auto end = first_diagnostic("model m {");
  CHECK(end.message.find("end of input") != std::string::npos);

  CHECK(first_diagnostic("").expected == std::vector<std::string>{"'model'"});
}

TEST_CASE("consistency diagnostics name the problem") {
  auto undeclared = parse_model("model m { types { node A; } rule r { lhs { node a : Ghost; } rhs { } } }");
  REQUIRE_FALSE(undeclared.ok());
  CHECK(undeclared.kind == ErrorKind::Consistency);
  CHECK(undeclared.diagnostics[0].message.find("Ghost") != std::string::npos);

  auto dup = parse_model("model m { types { node A; node A; } }");
  REQUIRE_FALSE(dup.ok());
  CHECK(dup.kind == ErrorKind::Consistency);

  auto dep = parse_model(fixtures::read(fixtures::source_path("tests/fixtures/malformed/consistency_dependency.fgts")));
  REQUIRE_FALSE(dep.ok());
  CHECK(dep.diagnostics[0].message.find("edge type link") != std::string::npos);
}

TEST_CASE("comments, numbers and terms") {
  auto r = parse_model(
      "# hash comment\n"
      "model m { // slash comment\n"
      "  types { node A; attr A.g : grid[4]; attr A.n : int[-3..3]; }\n"
      "  defaults { rate 2.5e-1; }\n"
      "  rule r { lhs { node a : A { g = (1, 2), n = -3 }; } rhs { node a : A { g = (3,3), n = 3 }; } }\n"
      "  rule s { lhs { node a : A { g = ?p }; } rhs { node a : A { g = decX(?p) }; } }\n"
      "}\n");
  REQUIRE(r.ok());
  const auto& g = r.document->model.model;
  CHECK(g.rule("r")->rate == 0.25);
  CHECK(g.rule("r")->lhs.nodes.at("a").attrs.at("g") == AttrTerm::constant(Value{Cell{1, 2}}));
  CHECK(g.rule("r")->lhs.nodes.at("a").attrs.at("n") == AttrTerm::constant(Value{std::int64_t{-3}}));
  CHECK(g.rule("s")->rhs.nodes.at("a").attrs.at("g") == AttrTerm::builtin(Builtin::DecX, "p"));

  auto unknown_fn = parse_model("model m { types { node A; attr A.g : grid; } rule s { lhs { node a : A { g = ?p }; } rhs { node a : A { g = up(?p) }; } } }");
  REQUIRE_FALSE(unknown_fn.ok());
  CHECK(unknown_fn.kind == ErrorKind::Consistency);
}

TEST_CASE("plain documents of variants") {
  for (const auto& c : valid_configurations(fixtures::sir().diagram)) {
    const auto v = fixtures::variant(c);
    const auto doc = plain_document(v);
    auto r = parse_model(print_model(doc));
    REQUIRE(r.ok());
    CHECK(r.document->model.model == v);
    CHECK(r.document->model.diagram.features().size() == 1);
  }
  const auto small = with_grid(fixtures::location(), 4);
  auto r = parse_model(print_model(plain_document(small)));
  REQUIRE(r.ok());
  CHECK(r.document->model.model == small);
}

}  // TEST_SUITE
