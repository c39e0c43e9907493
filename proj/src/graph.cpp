#include "featgts/graph.hpp"

#include <algorithm>
#include <set>

#include "featgts/error.hpp"
#include "featgts/match.hpp"

namespace featgts {

std::string to_string(const Value& v) {
  if (const auto* s = std::get_if<std::string>(&v)) return *s;
  if (const auto* i = std::get_if<std::int64_t>(&v)) return std::to_string(*i);
  const auto& c = std::get<Cell>(v);
  return "(" + std::to_string(c.x) + "," + std::to_string(c.y) + ")";
}

AttrDomain AttrDomain::symbols(std::vector<std::string> names) {
  AttrDomain d;
  d.kind_ = Kind::Symbols;
  d.symbols_ = std::move(names);
  return d;
}

AttrDomain AttrDomain::int_range(std::int64_t lo, std::int64_t hi) {
  AttrDomain d;
  d.kind_ = Kind::IntRange;
  d.lo_ = lo;
  d.hi_ = hi;
  return d;
}

AttrDomain AttrDomain::grid(int size) {
  AttrDomain d;
  d.kind_ = Kind::Grid;
  d.lo_ = 0;
  d.hi_ = size;
  return d;
}

bool AttrDomain::empty() const {
  switch (kind_) {
    case Kind::Symbols: return symbols_.empty();
    case Kind::IntRange: return lo_ > hi_;
    case Kind::Grid: return hi_ <= 0;
  }
  return true;
}

bool AttrDomain::contains(const Value& v) const {
  switch (kind_) {
    case Kind::Symbols: {
      const auto* s = std::get_if<std::string>(&v);
      return s && std::find(symbols_.begin(), symbols_.end(), *s) != symbols_.end();
    }
    case Kind::IntRange: {
      const auto* i = std::get_if<std::int64_t>(&v);
      return i && *i >= lo_ && *i <= hi_;
    }
    case Kind::Grid: {
      const auto* c = std::get_if<Cell>(&v);
      return c && c->x >= 0 && c->y >= 0 && c->x < hi_ && c->y < hi_;
    }
  }
  return false;
}

std::vector<Value> AttrDomain::values() const {
  std::vector<Value> out;
  switch (kind_) {
    case Kind::Symbols:
      for (const auto& s : symbols_) out.emplace_back(s);
      break;
    case Kind::IntRange:
      for (auto i = lo_; i <= hi_; ++i) out.emplace_back(i);
      break;
    case Kind::Grid:
      for (int x = 0; x < hi_; ++x)
        for (int y = 0; y < hi_; ++y) out.emplace_back(Cell{x, y});
      break;
  }
  return out;
}

std::string AttrDomain::to_string() const {
  switch (kind_) {
    case Kind::Symbols: {
      std::string s = "{";
      for (size_t i = 0; i < symbols_.size(); ++i) s += (i ? ", " : "") + symbols_[i];
      return s + "}";
    }
    case Kind::IntRange:
      return "int[" + std::to_string(lo_) + ".." + std::to_string(hi_) + "]";
    case Kind::Grid:
      return "grid";
  }
  return "";
}

// --- TypeGraph --------------------------------------------------------------

std::vector<std::string> TypeGraph::violations(const std::vector<std::string>& node_types,
                                               const std::vector<EdgeType>& edge_types,
                                               const std::vector<AttrDecl>& attrs) {
  std::vector<std::string> out;
  std::set<std::string> nodes;
  for (const auto& n : node_types)
    if (!nodes.insert(n).second) out.push_back("duplicate node type '" + n + "'");
  std::set<std::string> edges;
  for (const auto& e : edge_types) {
    if (!edges.insert(e.name).second) out.push_back("duplicate edge type '" + e.name + "'");
    if (!nodes.count(e.source))
      out.push_back("edge type '" + e.name + "' has unknown source node type '" + e.source + "'");
    if (!nodes.count(e.target))
      out.push_back("edge type '" + e.name + "' has unknown target node type '" + e.target + "'");
  }
  std::set<std::pair<std::string, std::string>> seen;
  for (const auto& a : attrs) {
    if (!seen.emplace(a.node_type, a.name).second)
      out.push_back("duplicate attribute '" + a.node_type + "." + a.name + "'");
    if (!nodes.count(a.node_type))
      out.push_back("attribute '" + a.node_type + "." + a.name + "' on unknown node type");
    if (a.domain.empty()) out.push_back("attribute '" + a.node_type + "." + a.name + "' has empty domain");
  }
  return out;
}

TypeGraph::TypeGraph(std::vector<std::string> node_types, std::vector<EdgeType> edge_types,
                     std::vector<AttrDecl> attrs) {
  auto errs = violations(node_types, edge_types, attrs);
  if (!errs.empty()) throw Error(ErrorKind::Consistency, "type graph: " + errs.front());
  std::sort(node_types.begin(), node_types.end());
  std::sort(edge_types.begin(), edge_types.end());
  std::sort(attrs.begin(), attrs.end(), [](const AttrDecl& a, const AttrDecl& b) {
    return std::tie(a.node_type, a.name) < std::tie(b.node_type, b.name);
  });
  node_types_ = std::move(node_types);
  edge_types_ = std::move(edge_types);
  attrs_ = std::move(attrs);
}

bool TypeGraph::has_node_type(const std::string& name) const {
  return std::binary_search(node_types_.begin(), node_types_.end(), name);
}

const EdgeType* TypeGraph::edge_type(const std::string& name) const {
  for (const auto& e : edge_types_)
    if (e.name == name) return &e;
  return nullptr;
}

const AttrDecl* TypeGraph::attr(const std::string& node_type, const std::string& name) const {
  for (const auto& a : attrs_)
    if (a.node_type == node_type && a.name == name) return &a;
  return nullptr;
}

std::vector<const AttrDecl*> TypeGraph::attrs_of(const std::string& node_type) const {
  std::vector<const AttrDecl*> out;
  for (const auto& a : attrs_)
    if (a.node_type == node_type) out.push_back(&a);
  return out;
}

std::optional<std::string> inclusion_failure(const TypeGraph& base, const TypeGraph& ext) {
  for (const auto& n : base.node_types())
    if (!ext.has_node_type(n)) return "node type '" + n + "' absent";
  for (const auto& e : base.edge_types()) {
    const auto* other = ext.edge_type(e.name);
    if (!other) return "edge type '" + e.name + "' absent";
    if (!(*other == e)) return "edge type '" + e.name + "' has a different signature";
  }
  for (const auto& a : base.attrs()) {
    const auto* other = ext.attr(a.node_type, a.name);
    if (!other) return "attribute '" + a.node_type + "." + a.name + "' absent";
    if (!(other->domain == a.domain))
      return "attribute '" + a.node_type + "." + a.name + "' has a different domain";
  }
  return std::nullopt;
}

// --- InstanceGraph ----------------------------------------------------------

void InstanceGraph::add_node(const std::string& id, std::string type,
                             std::map<std::string, Value> attrs) {
  if (nodes_.count(id)) throw Error(ErrorKind::Runtime, "duplicate node id '" + id + "'");
  nodes_.emplace(id, Node{std::move(type), std::move(attrs)});
}

void InstanceGraph::add_edge(const std::string& id, std::string type, std::string source,
                             std::string target) {
  if (edges_.count(id)) throw Error(ErrorKind::Runtime, "duplicate edge id '" + id + "'");
  edges_.emplace(id, Edge{std::move(type), std::move(source), std::move(target)});
}

void InstanceGraph::remove_node(const std::string& id) { nodes_.erase(id); }
void InstanceGraph::remove_edge(const std::string& id) { edges_.erase(id); }

void InstanceGraph::set_attr(const std::string& node, const std::string& attr, Value v) {
  auto it = nodes_.find(node);
  if (it == nodes_.end()) throw Error(ErrorKind::Runtime, "unknown node id '" + node + "'");
  it->second.attrs[attr] = std::move(v);
}

const Node* InstanceGraph::node(const std::string& id) const {
  auto it = nodes_.find(id);
  return it == nodes_.end() ? nullptr : &it->second;
}

const Edge* InstanceGraph::edge(const std::string& id) const {
  auto it = edges_.find(id);
  return it == edges_.end() ? nullptr : &it->second;
}

TypingReport check_typing(const InstanceGraph& g, const TypeGraph& tg) {
  TypingReport r;
  for (const auto& [id, n] : g.nodes()) {
    if (!tg.has_node_type(n.type)) {
      r.violations.push_back("node '" + id + "': unknown node type '" + n.type + "'");
      continue;
    }
    for (const auto* decl : tg.attrs_of(n.type)) {
      auto it = n.attrs.find(decl->name);
      if (it == n.attrs.end())
        r.violations.push_back("node '" + id + "': missing attribute '" + decl->name + "'");
      else if (!decl->domain.contains(it->second))
        r.violations.push_back("node '" + id + "': value " + to_string(it->second) +
                               " outside domain of '" + decl->name + "'");
    }
    for (const auto& [name, v] : n.attrs)
      if (!tg.attr(n.type, name))
        r.violations.push_back("node '" + id + "': undeclared attribute '" + name + "'");
  }
  for (const auto& [id, e] : g.edges()) {
    const auto* et = tg.edge_type(e.type);
    if (!et) {
      r.violations.push_back("edge '" + id + "': unknown edge type '" + e.type + "'");
      continue;
    }
    const auto* s = g.node(e.source);
    const auto* t = g.node(e.target);
    if (!s || !t) {
      r.violations.push_back("edge '" + id + "': dangling edge");
      continue;
    }
    if (s->type != et->source)
      r.violations.push_back("edge '" + id + "': source has type '" + s->type + "', expected '" +
                             et->source + "'");
    if (t->type != et->target)
      r.violations.push_back("edge '" + id + "': target has type '" + t->type + "', expected '" +
                             et->target + "'");
  }
  return r;
}

InstanceGraph restrict(const InstanceGraph& g, const TypeGraph& from, const TypeGraph& sub) {
  if (auto why = inclusion_failure(sub, from))
    throw Error(ErrorKind::Consistency, "restrict: not a sub-type-graph: " + *why);
  InstanceGraph out;
  for (const auto& [id, n] : g.nodes()) {
    if (!sub.has_node_type(n.type)) continue;
    std::map<std::string, Value> attrs;
    for (const auto& [name, v] : n.attrs)
      if (sub.attr(n.type, name)) attrs.emplace(name, v);
    out.add_node(id, n.type, std::move(attrs));
  }
  for (const auto& [id, e] : g.edges()) {
    if (!sub.edge_type(e.type)) continue;
    if (!out.node(e.source) || !out.node(e.target)) continue;
    out.add_edge(id, e.type, e.source, e.target);
  }
  return out;
}

// --- Morphisms --------------------------------------------------------------

namespace {

GraphMorphism to_morphism(const CompiledPattern& p, const HostIndex& host, const Assignment& a) {
  GraphMorphism m;
  for (size_t i = 0; i < p.nodes().size(); ++i) m.node_map[p.nodes()[i].id] = host.node_id(a.nodes[i]);
  for (size_t i = 0; i < p.edges().size(); ++i) m.edge_map[p.edges()[i].id] = host.edge_id(a.edges[i]);
  return m;
}

}  // namespace

std::vector<GraphMorphism> find_morphisms(const InstanceGraph& pattern, const InstanceGraph& host) {
  HostIndex index(host);
  CompiledPattern p(Pattern::from_graph(pattern), index);
  std::vector<GraphMorphism> out;
  for_each_occurrence(p, index, [&](const Assignment& a) {
    out.push_back(to_morphism(p, index, a));
    return true;
  });
  return out;
}

bool isomorphic(const InstanceGraph& a, const InstanceGraph& b) {
  if (a.nodes().size() != b.nodes().size() || a.edges().size() != b.edges().size()) return false;
  // Injective with equal cardinalities is bijective. The constant pattern only
  // constrains a's attributes, so b's key sets are compared explicitly.
  HostIndex index(b);
  CompiledPattern p(Pattern::from_graph(a), index);
  bool found = false;
  for_each_occurrence(p, index, [&](const Assignment& as) {
    for (size_t i = 0; i < p.nodes().size(); ++i)
      if (index.attrs(as.nodes[i]).size() != p.nodes()[i].attrs.size()) return true;
    found = true;
    return false;
  });
  return found;
}

}  // namespace featgts
