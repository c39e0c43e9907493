#include "featgts/compose.hpp"

#include <algorithm>
#include <functional>

#include "featgts/error.hpp"

namespace featgts {

ExtensionWitness check_extension(const GTS& base, const GTS& ext) {
  if (auto why = inclusion_failure(base.types, ext.types))
    throw Error(ErrorKind::Consistency, "'" + ext.name + "' does not extend '" + base.name + "': " + *why);
  ExtensionWitness w{base, ext, {}};
  for (const auto& r : base.rules) {
    const Rule* er = ext.rule(r.name);
    if (!er)
      throw Error(ErrorKind::Consistency,
                  "'" + ext.name + "' does not extend '" + base.name + "': rule '" + r.name + "' absent");
    if (!isomorphic(project_rule(*er, ext.types, base.types), r))
      throw Error(ErrorKind::Consistency, "'" + ext.name + "' does not extend '" + base.name + "': rule '" +
                                              r.name + "' does not project onto its base rule");
    w.rule_correspondence.emplace(r.name, er->name);
  }
  return w;
}

std::string ConservativityReport::describe() const {
  if (conservative) return "conservative";
  std::string s = "NOT conservative: ";
  for (size_t i = 0; i < offending_rules.size(); ++i) {
    if (i) s += "; ";
    s += offending_rules[i].first + " (" + offending_rules[i].second.describe() + ")";
  }
  return s;
}

ConservativityReport is_conservative(const ExtensionWitness& w) {
  std::map<std::string, std::string> ext_to_base;
  for (const auto& [b, e] : w.rule_correspondence) ext_to_base.emplace(e, b);
  ConservativityReport report;
  for (const auto& r : w.ext.rules) {
    Effect projected = effect_of(project_rule(r, w.ext.types, w.base.types));
    auto it = ext_to_base.find(r.name);
    const bool ok = it == ext_to_base.end() ? projected.empty()
                                            : projected == effect_of(*w.base.rule(it->second));
    if (!ok) report.offending_rules.emplace_back(r.name, std::move(projected));
  }
  report.conservative = report.offending_rules.empty();
  return report;
}

// --- Merge ------------------------------------------------------------------

namespace {

[[noreturn]] void clash(const std::string& what) {
  throw Error(ErrorKind::Consistency, "merge: non-orthogonal extensions: " + what);
}

TypeGraph unite(const TypeGraph& a, const TypeGraph& b) {
  std::vector<std::string> nodes = a.node_types();
  for (const auto& n : b.node_types())
    if (!a.has_node_type(n)) nodes.push_back(n);
  std::vector<EdgeType> edges = a.edge_types();
  for (const auto& e : b.edge_types()) {
    const auto* other = a.edge_type(e.name);
    if (!other) edges.push_back(e);
    else if (!(*other == e)) clash("edge type '" + e.name + "' declared differently");
  }
  std::vector<AttrDecl> attrs = a.attrs();
  for (const auto& d : b.attrs()) {
    const auto* other = a.attr(d.node_type, d.name);
    if (!other) attrs.push_back(d);
    else if (!(other->domain == d.domain)) clash("attribute '" + d.node_type + "." + d.name + "' declared differently");
  }
  return TypeGraph(std::move(nodes), std::move(edges), std::move(attrs));
}

// Union of two extended patterns over a shared base pattern. Elements that
// both sides add under the same id must agree exactly.
Pattern amalgamate(const Pattern& base, const Pattern& p1, const Pattern& p2, const std::string& rule) {
  for (const auto& [id, n] : base.nodes)
    for (const auto* p : {&p1, &p2}) {
      auto it = p->nodes.find(id);
      if (it == p->nodes.end() || it->second.type != n.type)
        clash("rule '" + rule + "' does not preserve base element '" + id + "'");
    }
  Pattern out = p1;
  for (const auto& [id, n] : p2.nodes) {
    auto [it, fresh] = out.nodes.emplace(id, n);
    if (fresh) continue;
    auto& merged = it->second;
    if (merged.type != n.type) clash("rule '" + rule + "' node '" + id + "' typed differently");
    for (const auto& [attr, term] : n.attrs) {
      auto [at, added] = merged.attrs.emplace(attr, term);
      if (!added && !(at->second == term))
        clash("rule '" + rule + "' node '" + id + "' constrains '" + attr + "' differently");
    }
  }
  for (const auto& [id, e] : p2.edges) {
    auto [it, fresh] = out.edges.emplace(id, e);
    if (!fresh && !(it->second == e)) clash("rule '" + rule + "' edge '" + id + "' differs");
  }
  return out;
}

double merged_rate(double base, double r1, double r2, const std::string& rule) {
  if (r1 == r2) return r1;
  if (r1 == base) return r2;
  if (r2 == base) return r1;
  clash("rule '" + rule + "' has conflicting rates");
}

}  // namespace

GTS merge(const GTS& base, const GTS& ext1, const GTS& ext2) {
  check_extension(base, ext1);
  check_extension(base, ext2);
  GTS out;
  out.name = ext1.name + "_" + ext2.name;
  out.types = unite(ext1.types, ext2.types);
  for (const auto& b : base.rules) {
    const Rule& r1 = *ext1.rule(b.name);
    const Rule& r2 = *ext2.rule(b.name);
    out.rules.push_back(Rule{b.name, amalgamate(b.lhs, r1.lhs, r2.lhs, b.name),
                             amalgamate(b.rhs, r1.rhs, r2.rhs, b.name), merged_rate(b.rate, r1.rate, r2.rate, b.name)});
  }
  for (const auto& r : ext1.rules)
    if (!base.rule(r.name)) out.rules.push_back(r);
  for (const auto& r : ext2.rules) {
    if (base.rule(r.name)) continue;
    if (const Rule* other = out.rule(r.name)) {
      if (!(*other == r)) clash("rule '" + r.name + "' defined differently by both extensions");
      continue;
    }
    out.rules.push_back(r);
  }
  auto errs = gts_violations(out);
  if (!errs.empty()) throw Error(ErrorKind::Consistency, "merge produced an ill-typed system: " + errs.front());
  return out;
}

GTS merge_along_tree(const FeatureModel& fm, const Configuration& c) {
  if (!is_valid(fm.diagram, c))
    throw Error(ErrorKind::InvalidConfiguration, "invalid configuration {" + join(c) + "}");
  const auto& fd = fm.diagram;
  auto path_of = [&fd](const std::string& f) {
    auto p = fd.root_path(f);
    return Configuration(p.begin(), p.end());
  };
  GTS current = filter_model(fm, {fd.root()});
  std::function<void(const std::string&)> visit = [&](const std::string& parent) {
    for (const auto& child : fd.children(parent)) {
      if (!c.count(child)) continue;
      current = merge(filter_model(fm, path_of(parent)), current, filter_model(fm, path_of(child)));
      visit(child);
    }
  };
  visit(fd.root());
  return current;
}

}  // namespace featgts
