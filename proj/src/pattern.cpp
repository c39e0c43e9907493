#include "featgts/pattern.hpp"

namespace featgts {

std::string to_string(Builtin fn) {
  switch (fn) {
    case Builtin::IncX: return "incX";
    case Builtin::DecX: return "decX";
    case Builtin::IncY: return "incY";
    case Builtin::DecY: return "decY";
  }
  return "?";
}

std::optional<Builtin> builtin_from_name(const std::string& name) {
  if (name == "incX") return Builtin::IncX;
  if (name == "decX") return Builtin::DecX;
  if (name == "incY") return Builtin::IncY;
  if (name == "decY") return Builtin::DecY;
  return std::nullopt;
}

Cell apply_builtin(Builtin fn, Cell c, int grid_size) {
  auto wrap = [grid_size](int v) { return ((v % grid_size) + grid_size) % grid_size; };
  switch (fn) {
    case Builtin::IncX: return {wrap(c.x + 1), c.y};
    case Builtin::DecX: return {wrap(c.x - 1), c.y};
    case Builtin::IncY: return {c.x, wrap(c.y + 1)};
    case Builtin::DecY: return {c.x, wrap(c.y - 1)};
  }
  return c;
}

const std::string* AttrTerm::variable_name() const {
  if (const auto* v = as_variable()) return &v->name;
  if (const auto* b = as_builtin()) return &b->var;
  return nullptr;
}

std::string to_string(const AttrTerm& t) {
  if (const auto* c = t.as_constant()) return to_string(c->value);
  if (const auto* v = t.as_variable()) return "?" + v->name;
  const auto* b = t.as_builtin();
  return to_string(b->fn) + "(?" + b->var + ")";
}

Pattern Pattern::from_graph(const InstanceGraph& g) {
  Pattern p;
  for (const auto& [id, n] : g.nodes()) {
    PatternNode pn{n.type, {}};
    for (const auto& [name, v] : n.attrs) pn.attrs.emplace(name, AttrTerm::constant(v));
    p.nodes.emplace(id, std::move(pn));
  }
  for (const auto& [id, e] : g.edges()) p.edges.emplace(id, e);
  return p;
}

std::set<std::string> Pattern::variables() const {
  std::set<std::string> out;
  for (const auto& [id, n] : nodes)
    for (const auto& [name, t] : n.attrs)
      if (const auto* v = t.variable_name()) out.insert(*v);
  return out;
}

Pattern restrict(const Pattern& p, const TypeGraph& sub) {
  Pattern out;
  for (const auto& [id, n] : p.nodes) {
    if (!sub.has_node_type(n.type)) continue;
    PatternNode pn{n.type, {}};
    for (const auto& [name, t] : n.attrs)
      if (sub.attr(n.type, name)) pn.attrs.emplace(name, t);
    out.nodes.emplace(id, std::move(pn));
  }
  for (const auto& [id, e] : p.edges) {
    if (!sub.edge_type(e.type)) continue;
    if (!out.nodes.count(e.source) || !out.nodes.count(e.target)) continue;
    out.edges.emplace(id, e);
  }
  return out;
}

}  // namespace featgts
