#include "doctest.h"
#include "featgts/compose.hpp"
#include "featgts/error.hpp"
#include "featgts/sim.hpp"
#include "fixtures.hpp"

using namespace featgts;
using fixtures::rule;

namespace {

std::string error_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.what();
  }
  return "";
}

}  // namespace

TEST_SUITE("compose") {

TEST_CASE("check_extension") {
  const auto& sir = fixtures::basic();
  const auto& net = fixtures::network();
  const auto& loc = fixtures::location();

  auto w = check_extension(sir, net);
  CHECK(w.rule_correspondence == std::map<std::string, std::string>{{"infect", "infect"}, {"recover", "recover"}});
  CHECK(is_included(sir.types, w.ext.types));

  auto id = check_extension(loc, loc);
  CHECK(id.rule_correspondence.size() == loc.rules.size());
  CHECK(is_conservative(id).conservative);

  CHECK(error_of([&] { check_extension(net, loc); }) ==
        "'SIR_location' does not extend 'SIR_network': edge type 'link' absent");

  GTS wrong = net;
  for (auto& r : wrong.rules)
    if (r.name == "recover") r.rhs.nodes.at("n1").attrs.at("s") = AttrTerm::constant(Value{std::string("S")});
  CHECK(error_of([&] { check_extension(sir, wrong); }).find("rule 'recover'") != std::string::npos);

  GTS missing = net;
  missing.rules.pop_back();
  CHECK(!error_of([&] { check_extension(sir, missing); }).empty());
}

TEST_CASE("conservativity verdicts") {
  const auto& sir = fixtures::basic();
  CHECK(is_conservative(check_extension(sir, fixtures::location())).conservative);
  CHECK(is_conservative(check_extension(sir, fixtures::network())).conservative);
  CHECK(is_conservative(check_extension(sir, fixtures::dynamics())).conservative);
  CHECK(is_conservative(check_extension(sir, fixtures::full())).conservative);

  auto rep = is_conservative(check_extension(fixtures::network(), fixtures::dynamics()));
  CHECK_FALSE(rep.conservative);
  REQUIRE(rep.offending_rules.size() == 1);
  CHECK(rep.offending_rules[0].first == "desert");
  CHECK(rep.offending_rules[0].second.deleted_edge_types == std::vector<std::string>{"link"});
  CHECK(rep.offending_rules[0].second.created_edge_types == std::vector<std::string>{"link"});
  CHECK(rep.describe() == "NOT conservative: desert (deletes link, creates link)");
  CHECK(is_conservative(check_extension(sir, sir)).describe() == "conservative");

  for (const auto& c : valid_configurations(fixtures::sir().diagram)) {
    auto v = fixtures::variant(c);
    CHECK(is_conservative(check_extension(v, v)).conservative);
  }
}

TEST_CASE("new rule with an effect on base types is reported") {
  const auto& sir = fixtures::basic();
  GTS ext = sir;
  Rule relapse{"relapse", {}, {}, 1.0};
  relapse.lhs.nodes["n"] = PatternNode{"Agent", {{"s", AttrTerm::constant(Value{std::string("R")})}}};
  relapse.rhs.nodes["n"] = PatternNode{"Agent", {{"s", AttrTerm::constant(Value{std::string("S")})}}};
  ext.rules.push_back(relapse);
  auto rep = is_conservative(check_extension(sir, ext));
  CHECK_FALSE(rep.conservative);
  REQUIRE(rep.offending_rules.size() == 1);
  CHECK(rep.offending_rules[0].first == "relapse");
}

TEST_CASE("merge location and network") {
  const auto& sir = fixtures::basic();
  auto merged = merge(sir, fixtures::location(), fixtures::network());
  CHECK(merged.types.attr("Agent", "l"));
  CHECK(merged.types.edge_type("link"));
  CHECK(merged.rules.size() == 6);
  const auto& infect = rule(merged, "infect");
  CHECK(infect.lhs.edges.size() == 1);
  CHECK(infect.lhs.nodes.at("n1").attrs.count("l"));
  CHECK(infect.lhs.nodes.at("n2").attrs.count("l"));
  CHECK(rule(merged, "recover") == rule(sir, "recover"));
  for (const char* r : {"north", "south", "east", "west"}) CHECK(rule(merged, r) == rule(fixtures::location(), r));
  CHECK(isomorphic(merged, fixtures::variant({"SIR", "location", "network"})));
  CHECK(merged.name == "SIR_location_SIR_network");
}

TEST_CASE("merge laws") {
  const auto& sir = fixtures::basic();
  const auto& loc = fixtures::location();
  const auto& net = fixtures::network();
  CHECK(isomorphic(merge(sir, sir, sir), sir));
  CHECK(isomorphic(merge(loc, loc, loc), loc));
  CHECK(isomorphic(merge(sir, loc, net), merge(sir, net, loc)));
  auto m = merge(sir, loc, net);
  CHECK_NOTHROW(check_extension(loc, m));
  CHECK_NOTHROW(check_extension(net, m));
  CHECK(isomorphic(merge(sir, sir, net), net));

  auto nd = merge(net, net, fixtures::dynamics());
  CHECK(isomorphic(nd, fixtures::dynamics()));
  CHECK(rule(nd, "infect").lhs.edges.size() == 1);
  CHECK(!rule(nd, "infect").lhs.nodes.at("n1").attrs.count("l"));
  CHECK(nd.rule("desert"));

  auto ld = merge(sir, loc, fixtures::dynamics());
  CHECK(isomorphic(ld, fixtures::full()));
}

TEST_CASE("merge rejects clashes") {
  const auto& sir = fixtures::basic();
  GTS other = fixtures::network();
  other.types = TypeGraph({"Agent"}, {{"link", "Agent", "Agent"}},
                          {{"Agent", "s", AttrDomain::symbols({"S", "I", "R"})},
                           {"Agent", "l", AttrDomain::int_range(0, 3)}});
  auto msg = error_of([&] { merge(sir, fixtures::location(), other); });
  CHECK(msg.rfind("merge: non-orthogonal extensions: ", 0) == 0);

  auto slow = with_rates(fixtures::location(), {{"infect", 0.5}});
  auto fast = with_rates(fixtures::network(), {{"infect", 0.7}});
  CHECK(error_of([&] { merge(sir, slow, fast); }).rfind("merge: non-orthogonal extensions: ", 0) == 0);
  auto one = merge(sir, slow, fixtures::network());
  CHECK(rule(one, "infect").rate == 0.5);

  CHECK_THROWS_AS(merge(fixtures::network(), fixtures::location(), fixtures::network()), Error);
}

TEST_CASE("derive agrees with merge along the feature tree") {
  const auto& fm = fixtures::sir();
  for (const auto& c : valid_configurations(fm.diagram)) {
    INFO(join(c));
    CHECK(isomorphic(derive_variant(fm, c), merge_along_tree(fm, c)));
  }
  CHECK_THROWS_AS(merge_along_tree(fm, {"SIR", "dynamics"}), Error);
}

}  // TEST_SUITE
