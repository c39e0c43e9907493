#include "featgts/feature.hpp"

#include <algorithm>

#include "featgts/error.hpp"

namespace featgts {

// --- FeatureDiagram ---------------------------------------------------------

std::vector<std::string> FeatureDiagram::violations(const std::vector<Feature>& features) {
  std::vector<std::string> out;
  if (features.empty()) return {"feature diagram has no features"};
  std::map<std::string, const Feature*> by_name;
  int roots = 0;
  for (const auto& f : features) {
    if (!by_name.emplace(f.name, &f).second) out.push_back("duplicate feature '" + f.name + "'");
    if (f.kind == Variability::Root) {
      ++roots;
      if (!f.parent.empty()) out.push_back("root feature '" + f.name + "' has a parent");
    } else if (f.parent.empty()) {
      out.push_back("feature '" + f.name + "' has no parent");
    }
  }
  if (roots != 1) out.push_back("feature diagram must have exactly one root");
  if (features.front().kind != Variability::Root) out.push_back("the root must be declared first");
  for (const auto& f : features) {
    if (f.parent.empty()) continue;
    if (!by_name.count(f.parent)) {
      out.push_back("feature '" + f.name + "' has unknown parent '" + f.parent + "'");
      continue;
    }
    // Walk to the root; a cycle never reaches it.
    std::set<std::string> seen{f.name};
    const Feature* cur = &f;
    while (!cur->parent.empty()) {
      auto it = by_name.find(cur->parent);
      if (it == by_name.end()) break;
      if (!seen.insert(it->first).second) {
        out.push_back("feature '" + f.name + "' lies on a cycle");
        break;
      }
      cur = it->second;
    }
  }
  std::map<int, std::vector<const Feature*>> groups;
  for (const auto& f : features) {
    if (f.kind == Variability::Alternative) groups[f.group].push_back(&f);
    else if (f.group >= 0) out.push_back("feature '" + f.name + "' is grouped but not alternative");
  }
  for (const auto& [g, members] : groups) {
    if (members.size() < 2)
      out.push_back("alternative group of '" + members.front()->name + "' has fewer than 2 members");
    for (const auto* m : members)
      if (m->parent != members.front()->parent)
        out.push_back("alternative group of '" + members.front()->name + "' mixes parents");
  }
  return out;
}

FeatureDiagram::FeatureDiagram(std::vector<Feature> features) {
  auto errs = violations(features);
  if (!errs.empty()) throw Error(ErrorKind::Consistency, "feature diagram: " + errs.front());
  // Gather each alternative group at its first member and renumber groups in
  // order of appearance, so that equal trees compare equal however declared.
  std::map<int, int> renumbered;
  for (const auto& f : features) {
    if (f.kind != Variability::Alternative) {
      features_.push_back(f);
      continue;
    }
    if (renumbered.count(f.group)) continue;
    const int id = static_cast<int>(renumbered.size());
    renumbered[f.group] = id;
    for (const auto& g : features)
      if (g.kind == Variability::Alternative && g.group == f.group) {
        features_.push_back(g);
        features_.back().group = id;
      }
  }
}

const Feature* FeatureDiagram::feature(const std::string& name) const {
  for (const auto& f : features_)
    if (f.name == name) return &f;
  return nullptr;
}

std::vector<std::string> FeatureDiagram::children(const std::string& name) const {
  std::vector<std::string> out;
  for (const auto& f : features_)
    if (f.parent == name) out.push_back(f.name);
  return out;
}

std::vector<std::string> FeatureDiagram::root_path(const std::string& name) const {
  std::vector<std::string> out;
  for (const Feature* f = feature(name); f; f = f->parent.empty() ? nullptr : feature(f->parent))
    out.push_back(f->name);
  std::reverse(out.begin(), out.end());
  return out;
}

bool FeatureDiagram::is_ancestor_or_self(const std::string& ancestor, const std::string& name) const {
  for (const Feature* f = feature(name); f; f = f->parent.empty() ? nullptr : feature(f->parent))
    if (f->name == ancestor) return true;
  return false;
}

std::vector<std::vector<std::string>> FeatureDiagram::groups() const {
  std::map<int, std::vector<std::string>> g;
  for (const auto& f : features_)
    if (f.kind == Variability::Alternative) g[f.group].push_back(f.name);
  std::vector<std::vector<std::string>> out;
  for (auto& [k, v] : g) out.push_back(std::move(v));
  return out;
}

bool is_valid(const FeatureDiagram& fd, const Configuration& c) {
  if (fd.features().empty() || !c.count(fd.root())) return false;
  for (const auto& name : c) {
    const Feature* f = fd.feature(name);
    if (!f) return false;
    if (!f->parent.empty() && !c.count(f->parent)) return false;
  }
  for (const auto& f : fd.features())
    if (f.kind == Variability::Mandatory && c.count(f.parent) && !c.count(f.name)) return false;
  for (const auto& group : fd.groups()) {
    if (!c.count(fd.feature(group.front())->parent)) continue;
    auto chosen = std::count_if(group.begin(), group.end(), [&c](const auto& m) { return c.count(m) > 0; });
    if (chosen != 1) return false;
  }
  return true;
}

namespace {

using Choices = std::vector<Configuration>;

Choices product(const Choices& a, const Choices& b) {
  Choices out;
  for (const auto& x : a)
    for (const auto& y : b) {
      Configuration z = x;
      z.insert(y.begin(), y.end());
      out.push_back(std::move(z));
    }
  return out;
}

// Every valid selection of the subtree rooted at a selected feature.
Choices subtree_choices(const FeatureDiagram& fd, const std::string& name) {
  Choices acc{{name}};
  std::set<int> groups_done;
  for (const auto& child : fd.children(name)) {
    const Feature* f = fd.feature(child);
    Choices options;
    switch (f->kind) {
      case Variability::Mandatory:
        options = subtree_choices(fd, child);
        break;
      case Variability::Optional:
        options = subtree_choices(fd, child);
        options.insert(options.begin(), Configuration{});
        break;
      case Variability::Alternative:
        if (!groups_done.insert(f->group).second) continue;
        for (const auto& g : fd.features())
          if (g.kind == Variability::Alternative && g.group == f->group) {
            auto sub = subtree_choices(fd, g.name);
            options.insert(options.end(), sub.begin(), sub.end());
          }
        break;
      case Variability::Root:
        break;
    }
    acc = product(acc, options);
  }
  return acc;
}

}  // namespace

std::vector<Configuration> valid_configurations(const FeatureDiagram& fd, std::size_t bound) {
  if (fd.features().size() > bound)
    throw Error(ErrorKind::Runtime, "feature diagram has " + std::to_string(fd.features().size()) +
                                        " features; enumeration bound is " + std::to_string(bound));
  if (fd.features().empty()) return {};
  auto all = subtree_choices(fd, fd.root());
  std::map<std::string, int> order;
  for (size_t i = 0; i < fd.features().size(); ++i) order[fd.features()[i].name] = static_cast<int>(i);
  auto key = [&order](const Configuration& c) {
    std::vector<int> idx;
    for (const auto& n : c) idx.push_back(order.at(n));
    std::sort(idx.begin(), idx.end());
    return std::make_pair(idx.size(), idx);
  };
  std::sort(all.begin(), all.end(), [&key](const auto& a, const auto& b) { return key(a) < key(b); });
  all.erase(std::unique(all.begin(), all.end()), all.end());
  return all;
}

Configuration upward_closure(const FeatureDiagram& fd, const Configuration& c) {
  Configuration out;
  for (const auto& name : c) {
    if (!fd.feature(name)) {
      out.insert(name);
      continue;
    }
    for (const auto& a : fd.root_path(name)) out.insert(a);
  }
  return out;
}

std::string join(const Configuration& c, const std::string& sep) {
  std::string s;
  for (const auto& n : c) s += (s.empty() ? "" : sep) + n;
  return s;
}

// --- FeatureModel -----------------------------------------------------------

namespace {

template <typename Map, typename Key>
const std::string& lookup_or(const Map& m, const Key& k, const std::string& fallback) {
  auto it = m.find(k);
  return it == m.end() ? fallback : it->second;
}

}  // namespace

const std::string& FeatureModel::node_type_feature(const std::string& type) const {
  return lookup_or(mapping.node_types, type, diagram.root());
}

const std::string& FeatureModel::edge_type_feature(const std::string& type) const {
  return lookup_or(mapping.edge_types, type, diagram.root());
}

const std::string& FeatureModel::attr_feature(const std::string& node_type, const std::string& attr) const {
  return lookup_or(mapping.attrs, std::make_pair(node_type, attr), diagram.root());
}

const std::string& FeatureModel::rule_feature(const std::string& rule) const {
  return lookup_or(mapping.rules, rule, diagram.root());
}

const std::string& FeatureModel::rule_node_feature(const std::string& rule, const std::string& id) const {
  return lookup_or(mapping.rule_nodes, std::make_pair(rule, id), rule_feature(rule));
}

const std::string& FeatureModel::rule_edge_feature(const std::string& rule, const std::string& id) const {
  return lookup_or(mapping.rule_edges, std::make_pair(rule, id), rule_feature(rule));
}

const std::string& FeatureModel::rule_attr_feature(const std::string& rule, Side side, const std::string& node,
                                                   const std::string& attr) const {
  return lookup_or(mapping.rule_attrs, std::make_tuple(rule, side, node, attr), rule_feature(rule));
}

std::string ConsistencyReport::describe() const {
  std::string s;
  for (const auto& v : violations) {
    if (!s.empty()) s += "\n";
    s += v.element + ": " + v.detail;
    if (!v.required.empty()) s += " (requires " + v.required + ")";
  }
  return s;
}

namespace {

const char* side_name(Side s) { return s == Side::Lhs ? "lhs" : "rhs"; }

class Checker {
 public:
  explicit Checker(const FeatureModel& fm) : fm_(fm) {}

  ConsistencyReport run() {
    for (const auto& v : gts_violations(fm_.model)) report_.violations.push_back({fm_.model.name, "", v});
    check_mapping_targets();
    check_dependencies();
    return std::move(report_);
  }

 private:
  void unknown_feature(const std::string& element, const std::string& feature) {
    if (!fm_.diagram.feature(feature))
      report_.violations.push_back({element, "", "mapped to unknown feature '" + feature + "'"});
  }

  void unknown_element(const std::string& element) {
    report_.violations.push_back({element, "", "annotated element does not exist"});
  }

  void check_mapping_targets() {
    const auto& m = fm_.mapping;
    const auto& g = fm_.model;
    for (const auto& [t, f] : m.node_types) {
      unknown_feature("node type " + t, f);
      if (!g.types.has_node_type(t)) unknown_element("node type " + t);
    }
    for (const auto& [t, f] : m.edge_types) {
      unknown_feature("edge type " + t, f);
      if (!g.types.edge_type(t)) unknown_element("edge type " + t);
    }
    for (const auto& [k, f] : m.attrs) {
      unknown_feature("attribute " + k.first + "." + k.second, f);
      if (!g.types.attr(k.first, k.second)) unknown_element("attribute " + k.first + "." + k.second);
    }
    for (const auto& [r, f] : m.rules) {
      unknown_feature("rule " + r, f);
      if (!g.rule(r)) unknown_element("rule " + r);
    }
    for (const auto& [k, f] : m.rule_nodes) {
      unknown_feature("rule " + k.first + " node " + k.second, f);
      const Rule* r = g.rule(k.first);
      if (!r || (!r->lhs.nodes.count(k.second) && !r->rhs.nodes.count(k.second)))
        unknown_element("rule " + k.first + " node " + k.second);
    }
    for (const auto& [k, f] : m.rule_edges) {
      unknown_feature("rule " + k.first + " edge " + k.second, f);
      const Rule* r = g.rule(k.first);
      if (!r || (!r->lhs.edges.count(k.second) && !r->rhs.edges.count(k.second)))
        unknown_element("rule " + k.first + " edge " + k.second);
    }
    for (const auto& [k, f] : m.rule_attrs) {
      const auto& [rule, side, node, attr] = k;
      const std::string el = "rule " + rule + " " + side_name(side) + " " + node + "." + attr;
      unknown_feature(el, f);
      const Rule* r = g.rule(rule);
      bool exists = false;
      if (r) {
        const Pattern& p = side == Side::Lhs ? r->lhs : r->rhs;
        auto n = p.nodes.find(node);
        exists = n != p.nodes.end() && n->second.attrs.count(attr) > 0;
      }
      if (!exists) unknown_element(el);
    }
  }

  // m(required) must lie on the root path of m(element).
  void require(const std::string& element, const std::string& element_feature, const std::string& required,
               const std::string& required_feature) {
    if (!fm_.diagram.feature(element_feature) || !fm_.diagram.feature(required_feature)) return;
    if (fm_.diagram.is_ancestor_or_self(required_feature, element_feature)) return;
    report_.violations.push_back({element, required,
                                  "feature '" + element_feature + "' does not extend '" + required_feature +
                                      "' of the required element"});
  }

  void check_dependencies() {
    const auto& tg = fm_.model.types;
    for (const auto& e : tg.edge_types()) {
      const auto& f = fm_.edge_type_feature(e.name);
      require("edge type " + e.name, f, "node type " + e.source, fm_.node_type_feature(e.source));
      require("edge type " + e.name, f, "node type " + e.target, fm_.node_type_feature(e.target));
    }
    for (const auto& a : tg.attrs())
      require("attribute " + a.node_type + "." + a.name, fm_.attr_feature(a.node_type, a.name),
              "node type " + a.node_type, fm_.node_type_feature(a.node_type));
    for (const auto& r : fm_.model.rules) check_rule(r);
  }

  void check_rule(const Rule& r) {
    const auto& rf = fm_.rule_feature(r.name);
    const std::string rule_el = "rule " + r.name;
    std::map<std::string, std::string> node_types;
    for (const auto* p : {&r.lhs, &r.rhs})
      for (const auto& [id, n] : p->nodes) node_types[id] = n.type;
    for (const auto& [id, type] : node_types) {
      const std::string el = rule_el + " node " + id;
      const auto& f = fm_.rule_node_feature(r.name, id);
      require(el, f, rule_el, rf);
      require(el, f, "node type " + type, fm_.node_type_feature(type));
    }
    std::map<std::string, const Edge*> edges;
    for (const auto* p : {&r.lhs, &r.rhs})
      for (const auto& [id, e] : p->edges) edges[id] = &e;
    for (const auto& [id, e] : edges) {
      const std::string el = rule_el + " edge " + id;
      const auto& f = fm_.rule_edge_feature(r.name, id);
      require(el, f, rule_el, rf);
      require(el, f, "edge type " + e->type, fm_.edge_type_feature(e->type));
      for (const auto& end : {e->source, e->target})
        require(el, f, rule_el + " node " + end, fm_.rule_node_feature(r.name, end));
    }
    // Variables bound on the lhs, with the features of their binding entries.
    std::map<std::string, std::vector<std::string>> binders;
    for (const auto& [id, n] : r.lhs.nodes)
      for (const auto& [attr, term] : n.attrs)
        if (const auto* v = term.variable_name())
          binders[*v].push_back(fm_.rule_attr_feature(r.name, Side::Lhs, id, attr));
    for (Side side : {Side::Lhs, Side::Rhs}) {
      const Pattern& p = side == Side::Lhs ? r.lhs : r.rhs;
      for (const auto& [id, n] : p.nodes)
        for (const auto& [attr, term] : n.attrs) {
          const std::string el = rule_el + " " + side_name(side) + " " + id + "." + attr;
          const auto& f = fm_.rule_attr_feature(r.name, side, id, attr);
          require(el, f, rule_el, rf);
          require(el, f, rule_el + " node " + id, fm_.rule_node_feature(r.name, id));
          require(el, f, "attribute " + n.type + "." + attr, fm_.attr_feature(n.type, attr));
          const auto* v = term.variable_name();
          if (side == Side::Rhs && v) {
            const auto& bs = binders[*v];
            bool bound = std::any_of(bs.begin(), bs.end(), [&](const std::string& b) {
              return fm_.diagram.feature(b) && fm_.diagram.is_ancestor_or_self(b, f);
            });
            if (!bound && fm_.diagram.feature(f))
              report_.violations.push_back({el, "lhs binding of ?" + *v,
                                            "no lhs occurrence of the variable is present with feature '" + f + "'"});
          }
        }
    }
  }

  const FeatureModel& fm_;
  ConsistencyReport report_;
};

}  // namespace

ConsistencyReport check_feature_model(const FeatureModel& fm) { return Checker(fm).run(); }

GTS derive_variant(const FeatureModel& fm, const Configuration& c) {
  if (!is_valid(fm.diagram, c))
    throw Error(ErrorKind::InvalidConfiguration, "invalid configuration {" + join(c) + "}");
  auto report = check_feature_model(fm);
  if (!report.ok()) throw Error(ErrorKind::Consistency, "inconsistent feature model: " + report.describe());
  return filter_model(fm, c);
}

GTS filter_model(const FeatureModel& fm, const Configuration& c) {

  const auto& tg = fm.model.types;
  std::vector<std::string> nodes;
  for (const auto& n : tg.node_types())
    if (c.count(fm.node_type_feature(n))) nodes.push_back(n);
  std::vector<EdgeType> edges;
  for (const auto& e : tg.edge_types())
    if (c.count(fm.edge_type_feature(e.name))) edges.push_back(e);
  std::vector<AttrDecl> attrs;
  for (const auto& a : tg.attrs())
    if (c.count(fm.attr_feature(a.node_type, a.name))) attrs.push_back(a);

  GTS out;
  // Named after the model plus the non-root features, e.g. SIR_location.
  out.name = fm.model.name;
  for (const auto& f : c)
    if (f != fm.diagram.root()) out.name += "_" + f;
  out.types = TypeGraph(std::move(nodes), std::move(edges), std::move(attrs));
  for (const auto& r : fm.model.rules) {
    if (!c.count(fm.rule_feature(r.name))) continue;
    Rule kept{r.name, {}, {}, r.rate};
    for (Side side : {Side::Lhs, Side::Rhs}) {
      const Pattern& src = side == Side::Lhs ? r.lhs : r.rhs;
      Pattern& dst = side == Side::Lhs ? kept.lhs : kept.rhs;
      for (const auto& [id, n] : src.nodes) {
        if (!c.count(fm.rule_node_feature(r.name, id))) continue;
        PatternNode pn{n.type, {}};
        for (const auto& [attr, term] : n.attrs)
          if (c.count(fm.rule_attr_feature(r.name, side, id, attr))) pn.attrs.emplace(attr, term);
        dst.nodes.emplace(id, std::move(pn));
      }
      for (const auto& [id, e] : src.edges)
        if (c.count(fm.rule_edge_feature(r.name, id))) dst.edges.emplace(id, e);
    }
    out.rules.push_back(std::move(kept));
  }
  auto errs = gts_violations(out);
  if (!errs.empty())
    throw Error(ErrorKind::Consistency, "variant {" + join(c) + "} is ill-typed: " + errs.front());
  return out;
}

}  // namespace featgts
