#include <algorithm>
#include <cmath>
#include <set>
#include <tuple>

#include "featgts/error.hpp"
#include "featgts/rule.hpp"

namespace featgts {

namespace {

std::string where(const Rule& r, const char* side, const std::string& id) {
  return "rule '" + r.name + "' " + side + " '" + id + "': ";
}

void check_side(const Rule& r, const Pattern& p, const char* side, const TypeGraph& tg, bool is_rhs,
                std::map<std::string, const AttrDomain*>& var_domains,
                std::vector<std::string>& out) {
  for (const auto& [id, n] : p.nodes) {
    if (!tg.has_node_type(n.type)) {
      out.push_back(where(r, side, id) + "undeclared node type '" + n.type + "'");
      continue;
    }
    for (const auto& [name, term] : n.attrs) {
      const auto* decl = tg.attr(n.type, name);
      if (!decl) {
        out.push_back(where(r, side, id) + "undeclared attribute '" + n.type + "." + name + "'");
        continue;
      }
      if (const auto* c = term.as_constant()) {
        if (!decl->domain.contains(c->value))
          out.push_back(where(r, side, id) + "constant " + to_string(c->value) + " outside domain of '" +
                        name + "'");
        continue;
      }
      if (const auto* b = term.as_builtin()) {
        if (!is_rhs) out.push_back(where(r, side, id) + "builtin " + to_string(b->fn) + " on the lhs");
        if (decl->domain.kind() != AttrDomain::Kind::Grid)
          out.push_back(where(r, side, id) + "builtin " + to_string(b->fn) + " on non-grid attribute '" +
                        name + "'");
      }
      const std::string& var = *term.variable_name();
      if (is_rhs) {
        auto it = var_domains.find(var);
        if (it == var_domains.end())
          out.push_back(where(r, side, id) + "variable ?" + var + " does not occur in the lhs");
        else if (!(*it->second == decl->domain))
          out.push_back(where(r, side, id) + "variable ?" + var + " used with two domains");
      } else {
        auto [it, fresh] = var_domains.emplace(var, &decl->domain);
        if (!fresh && !(*it->second == decl->domain))
          out.push_back(where(r, side, id) + "variable ?" + var + " used with two domains");
      }
    }
  }
  for (const auto& [id, e] : p.edges) {
    const auto* et = tg.edge_type(e.type);
    if (!et) {
      out.push_back(where(r, side, id) + "undeclared edge type '" + e.type + "'");
      continue;
    }
    auto s = p.nodes.find(e.source);
    auto t = p.nodes.find(e.target);
    if (s == p.nodes.end() || t == p.nodes.end()) {
      out.push_back(where(r, side, id) + "dangling edge");
      continue;
    }
    if (s->second.type != et->source || t->second.type != et->target)
      out.push_back(where(r, side, id) + "endpoint types do not match edge type '" + e.type + "'");
  }
}

}  // namespace

std::vector<std::string> rule_violations(const Rule& r, const TypeGraph& tg) {
  std::vector<std::string> out;
  if (!(r.rate > 0.0) || !std::isfinite(r.rate))
    out.push_back("rule '" + r.name + "': rate must be positive");
  std::map<std::string, const AttrDomain*> var_domains;
  check_side(r, r.lhs, "lhs", tg, false, var_domains, out);
  check_side(r, r.rhs, "rhs", tg, true, var_domains, out);
  for (const auto& [id, n] : r.rhs.nodes) {
    auto l = r.lhs.nodes.find(id);
    if (l != r.lhs.nodes.end()) {
      if (l->second.type != n.type) out.push_back(where(r, "rhs", id) + "preserved node changes type");
      continue;
    }
    for (const auto* decl : tg.attrs_of(n.type))
      if (!n.attrs.count(decl->name))
        out.push_back(where(r, "rhs", id) + "created node lacks attribute '" + decl->name + "'");
  }
  for (const auto& [id, e] : r.rhs.edges) {
    auto l = r.lhs.edges.find(id);
    if (l != r.lhs.edges.end() && !(l->second == e))
      out.push_back(where(r, "rhs", id) + "preserved edge changes type or endpoints");
  }
  return out;
}

const Rule* GTS::rule(const std::string& rule_name) const {
  for (const auto& r : rules)
    if (r.name == rule_name) return &r;
  return nullptr;
}

std::vector<std::string> gts_violations(const GTS& g) {
  std::vector<std::string> out;
  std::set<std::string> names;
  for (const auto& r : g.rules) {
    if (!names.insert(r.name).second) out.push_back("duplicate rule name '" + r.name + "'");
    auto v = rule_violations(r, g.types);
    out.insert(out.end(), v.begin(), v.end());
  }
  return out;
}

// --- Isomorphism ------------------------------------------------------------

namespace {

struct RuleNode {
  std::string id;
  std::string type;
  bool in_lhs = false;
  bool in_rhs = false;
  const std::map<std::string, AttrTerm>* lhs_attrs = nullptr;
  const std::map<std::string, AttrTerm>* rhs_attrs = nullptr;
};

std::vector<RuleNode> rule_nodes(const Rule& r) {
  std::map<std::string, RuleNode> m;
  for (const auto& [id, n] : r.lhs.nodes) {
    auto& rn = m[id];
    rn.id = id;
    rn.type = n.type;
    rn.in_lhs = true;
    rn.lhs_attrs = &n.attrs;
  }
  for (const auto& [id, n] : r.rhs.nodes) {
    auto& rn = m[id];
    rn.id = id;
    rn.type = n.type;
    rn.in_rhs = true;
    rn.rhs_attrs = &n.attrs;
  }
  std::vector<RuleNode> out;
  for (auto& [id, rn] : m) out.push_back(rn);
  return out;
}

using VarMap = std::map<std::string, std::string>;

bool unify_var(const std::string& a, const std::string& b, VarMap& fwd, VarMap& bwd) {
  auto f = fwd.find(a);
  auto g = bwd.find(b);
  if (f == fwd.end() && g == bwd.end()) {
    fwd.emplace(a, b);
    bwd.emplace(b, a);
    return true;
  }
  return f != fwd.end() && g != bwd.end() && f->second == b && g->second == a;
}

bool unify_terms(const std::map<std::string, AttrTerm>* a, const std::map<std::string, AttrTerm>* b,
                 VarMap& fwd, VarMap& bwd) {
  if (!a || !b) return a == b;
  if (a->size() != b->size()) return false;
  for (const auto& [name, ta] : *a) {
    auto it = b->find(name);
    if (it == b->end()) return false;
    const auto& tb = it->second;
    if (const auto* ca = ta.as_constant()) {
      const auto* cb = tb.as_constant();
      if (!cb || !(ca->value == cb->value)) return false;
    } else if (const auto* va = ta.as_variable()) {
      const auto* vb = tb.as_variable();
      if (!vb || !unify_var(va->name, vb->name, fwd, bwd)) return false;
    } else {
      const auto* ba = ta.as_builtin();
      const auto* bb = tb.as_builtin();
      if (!bb || ba->fn != bb->fn || !unify_var(ba->var, bb->var, fwd, bwd)) return false;
    }
  }
  return true;
}

using EdgeKey = std::tuple<std::string, std::string, std::string, bool, bool>;

std::multiset<EdgeKey> edge_keys(const Rule& r, const std::map<std::string, std::string>& rename) {
  std::map<std::string, std::pair<const Edge*, std::pair<bool, bool>>> all;
  for (const auto& [id, e] : r.lhs.edges) all[id] = {&e, {true, false}};
  for (const auto& [id, e] : r.rhs.edges) {
    auto& slot = all[id];
    slot.first = &e;
    slot.second.second = true;
  }
  std::multiset<EdgeKey> out;
  for (const auto& [id, entry] : all) {
    const Edge& e = *entry.first;
    auto map = [&rename](const std::string& n) {
      auto it = rename.find(n);
      return it == rename.end() ? n : it->second;
    };
    out.emplace(e.type, map(e.source), map(e.target), entry.second.first, entry.second.second);
  }
  return out;
}

bool iso_search(const std::vector<RuleNode>& an, const std::vector<RuleNode>& bn, size_t i,
                std::vector<bool>& used, std::map<std::string, std::string>& node_map, VarMap fwd,
                VarMap bwd, const Rule& a, const std::multiset<EdgeKey>& b_edges) {
  if (i == an.size()) return edge_keys(a, node_map) == b_edges;
  const auto& x = an[i];
  for (size_t j = 0; j < bn.size(); ++j) {
    if (used[j]) continue;
    const auto& y = bn[j];
    if (x.type != y.type || x.in_lhs != y.in_lhs || x.in_rhs != y.in_rhs) continue;
    VarMap f = fwd;
    VarMap b = bwd;
    if (!unify_terms(x.lhs_attrs, y.lhs_attrs, f, b) || !unify_terms(x.rhs_attrs, y.rhs_attrs, f, b))
      continue;
    used[j] = true;
    node_map[x.id] = y.id;
    if (iso_search(an, bn, i + 1, used, node_map, std::move(f), std::move(b), a, b_edges)) return true;
    node_map.erase(x.id);
    used[j] = false;
  }
  return false;
}

}  // namespace

bool isomorphic(const Rule& a, const Rule& b) {
  auto an = rule_nodes(a);
  auto bn = rule_nodes(b);
  if (an.size() != bn.size()) return false;
  auto b_edges = edge_keys(b, {});
  if (edge_keys(a, {}).size() != b_edges.size()) return false;
  std::vector<bool> used(bn.size(), false);
  std::map<std::string, std::string> node_map;
  return iso_search(an, bn, 0, used, node_map, {}, {}, a, b_edges);
}

bool isomorphic(const GTS& a, const GTS& b) {
  if (!(a.types == b.types) || a.rules.size() != b.rules.size()) return false;
  for (const auto& ra : a.rules) {
    const Rule* rb = b.rule(ra.name);
    if (!rb || ra.rate != rb->rate || !isomorphic(ra, *rb)) return false;
  }
  return true;
}

// --- Matching and application -----------------------------------------------

std::vector<Match> find_matches(const Rule& r, const InstanceGraph& host) {
  HostIndex index(host);
  CompiledPattern p(r.lhs, index);
  std::vector<Match> out;
  for_each_occurrence(p, index, [&](const Assignment& a) {
    Match m;
    for (size_t i = 0; i < p.nodes().size(); ++i)
      m.morphism.node_map[p.nodes()[i].id] = index.node_id(a.nodes[i]);
    for (size_t i = 0; i < p.edges().size(); ++i)
      m.morphism.edge_map[p.edges()[i].id] = index.edge_id(a.edges[i]);
    for (size_t v = 0; v < p.variables().size(); ++v)
      m.binding[p.variables()[v]] = index.value(a.bindings[v]);
    out.push_back(std::move(m));
    return true;
  });
  return out;
}

CompiledRule::CompiledRule(const Rule& r, const TypeGraph& tg, HostIndex& host)
    : rule_(&r), lhs_(r.lhs, host) {
  std::map<std::string, int> lhs_node_index;
  for (size_t i = 0; i < lhs_.nodes().size(); ++i) lhs_node_index[lhs_.nodes()[i].id] = static_cast<int>(i);
  const auto& vars = lhs_.variables();
  auto compile_term = [&](const std::string& node_type, const std::string& attr, const AttrTerm& t) {
    Term out{Term::Kind::Constant};
    if (const auto* c = t.as_constant()) {
      out.code = host.intern_value(c->value);
    } else {
      const std::string& var = *t.variable_name();
      auto it = std::lower_bound(vars.begin(), vars.end(), var);
      if (it == vars.end() || *it != var)
        throw Error(ErrorKind::Consistency, "rule '" + r.name + "': variable ?" + var + " unbound");
      out.var = static_cast<int>(it - vars.begin());
      if (const auto* b = t.as_builtin()) {
        const auto* decl = tg.attr(node_type, attr);
        if (!decl || decl->domain.kind() != AttrDomain::Kind::Grid)
          throw Error(ErrorKind::Consistency, "rule '" + r.name + "': builtin on non-grid attribute");
        out.kind = Term::Kind::Builtin;
        out.fn = b->fn;
        out.grid = decl->domain.grid_size();
      } else {
        out.kind = Term::Kind::Variable;
      }
    }
    return out;
  };

  for (size_t i = 0; i < lhs_.nodes().size(); ++i) {
    const auto& id = lhs_.nodes()[i].id;
    auto rn = r.rhs.nodes.find(id);
    if (rn == r.rhs.nodes.end()) {
      deleted_nodes_.push_back(static_cast<int>(i));
      continue;
    }
    const auto& ln = r.lhs.nodes.at(id);
    for (const auto& [attr, term] : rn->second.attrs) {
      auto lt = ln.attrs.find(attr);
      if (lt != ln.attrs.end() && lt->second == term) continue;
      updates_.emplace_back(static_cast<int>(i),
                            Update{host.intern_slot(attr), compile_term(ln.type, attr, term)});
    }
  }
  for (size_t k = 0; k < lhs_.edges().size(); ++k)
    if (!r.rhs.edges.count(lhs_.edges()[k].id)) deleted_edges_.push_back(static_cast<int>(k));

  std::map<std::string, int> created_index;
  for (const auto& [id, n] : r.rhs.nodes) {
    if (lhs_node_index.count(id)) continue;
    Created c{id, host.intern_type(n.type), {}};
    for (const auto& [attr, term] : n.attrs)
      c.attrs.push_back(Update{host.intern_slot(attr), compile_term(n.type, attr, term)});
    created_index[id] = static_cast<int>(created_nodes_.size());
    created_nodes_.push_back(std::move(c));
  }
  auto ref = [&](const std::string& id) {
    if (auto it = lhs_node_index.find(id); it != lhs_node_index.end()) return NodeRef{false, it->second};
    auto it = created_index.find(id);
    if (it == created_index.end())
      throw Error(ErrorKind::Consistency, "rule '" + r.name + "': rhs edge endpoint '" + id + "' unknown");
    return NodeRef{true, it->second};
  };
  for (const auto& [id, e] : r.rhs.edges) {
    if (r.lhs.edges.count(id)) continue;
    created_edges_.push_back({host.intern_type(e.type), ref(e.source), ref(e.target)});
  }
}

std::int64_t CompiledRule::eval(const Term& t, const Assignment& a, HostIndex& host) const {
  switch (t.kind) {
    case Term::Kind::Constant: return t.code;
    case Term::Kind::Variable: return a.bindings[t.var];
    case Term::Kind::Builtin: {
      const auto* cell = std::get_if<Cell>(&host.value(a.bindings[t.var]));
      if (!cell) throw Error(ErrorKind::Runtime, "builtin applied to a non-grid value");
      return host.intern_value(apply_builtin(t.fn, *cell, t.grid));
    }
  }
  return -1;
}

void CompiledRule::apply(HostIndex& host, const Assignment& a) const {
  if (!is_occurrence(lhs_, host, a))
    throw Error(ErrorKind::Runtime, "rule '" + rule_->name + "': stale match");
  // Dangling condition: every edge at a deleted node must itself be deleted.
  if (!deleted_nodes_.empty()) {
    std::set<int> deleted_edges;
    for (int k : deleted_edges_) deleted_edges.insert(a.edges[k]);
    for (int i : deleted_nodes_) {
      const int n = a.nodes[i];
      for (const auto* adj : {&host.out_edges(n), &host.in_edges(n)})
        for (int e : *adj)
          if (!deleted_edges.count(e))
            throw Error(ErrorKind::Runtime, "rule '" + rule_->name + "': dangling condition violated at '" +
                                                host.node_id(n) + "'");
    }
  }
  // Evaluate every term before mutating so updates see the matched state.
  std::vector<std::int64_t> update_values;
  for (const auto& [i, u] : updates_) update_values.push_back(eval(u.term, a, host));
  std::vector<std::vector<std::pair<int, std::int64_t>>> created_attrs;
  for (const auto& c : created_nodes_) {
    std::vector<std::pair<int, std::int64_t>> attrs;
    for (const auto& u : c.attrs) attrs.emplace_back(u.slot, eval(u.term, a, host));
    created_attrs.push_back(std::move(attrs));
  }

  for (int k : deleted_edges_) host.remove_edge(a.edges[k]);
  for (int i : deleted_nodes_) host.remove_node(a.nodes[i]);
  for (size_t j = 0; j < updates_.size(); ++j)
    host.set_attr(a.nodes[updates_[j].first], updates_[j].second.slot, update_values[j]);
  std::vector<int> created;
  for (size_t j = 0; j < created_nodes_.size(); ++j)
    created.push_back(host.add_node(host.fresh_node_id(), created_nodes_[j].type, std::move(created_attrs[j])));
  auto resolve = [&](const NodeRef& r) { return r.created ? created[r.index] : a.nodes[r.index]; };
  for (const auto& e : created_edges_)
    host.add_edge(host.fresh_edge_id(), e.type, resolve(e.src), resolve(e.tgt));
}

InstanceGraph apply(const Rule& r, const InstanceGraph& host, const Match& m, const TypeGraph& tg) {
  HostIndex index(host);
  CompiledRule cr(r, tg, index);
  const auto& p = cr.lhs();
  Assignment a;
  for (const auto& spec : p.nodes()) {
    auto it = m.morphism.node_map.find(spec.id);
    a.nodes.push_back(it == m.morphism.node_map.end() ? -1 : index.find_node(it->second));
  }
  for (const auto& spec : p.edges()) {
    auto it = m.morphism.edge_map.find(spec.id);
    a.edges.push_back(it == m.morphism.edge_map.end() ? -1 : index.find_edge(it->second));
  }
  for (const auto& var : p.variables()) {
    auto it = m.binding.find(var);
    a.bindings.push_back(it == m.binding.end() ? -1 : index.intern_value(it->second));
  }
  cr.apply(index, a);
  return index.to_graph();
}

// --- Effects and projection -------------------------------------------------

bool Effect::empty() const {
  return deleted_node_types.empty() && created_node_types.empty() && deleted_edge_types.empty() &&
         created_edge_types.empty() && attr_changes.empty();
}

std::string Effect::describe() const {
  std::vector<std::string> parts;
  for (const auto& t : deleted_node_types) parts.push_back("deletes " + t);
  for (const auto& t : deleted_edge_types) parts.push_back("deletes " + t);
  for (const auto& t : created_node_types) parts.push_back("creates " + t);
  for (const auto& t : created_edge_types) parts.push_back("creates " + t);
  for (const auto& c : attr_changes)
    parts.push_back("changes " + c.node_type + "." + c.attr + " " + c.before + "->" + c.after);
  if (parts.empty()) return "no effect";
  std::string s;
  for (size_t i = 0; i < parts.size(); ++i) s += (i ? ", " : "") + parts[i];
  return s;
}

Effect effect_of(const Rule& r) {
  Effect e;
  for (const auto& [id, n] : r.lhs.nodes) {
    auto rn = r.rhs.nodes.find(id);
    if (rn == r.rhs.nodes.end()) {
      e.deleted_node_types.push_back(n.type);
      continue;
    }
    for (const auto& [attr, term] : rn->second.attrs) {
      auto lt = n.attrs.find(attr);
      if (lt != n.attrs.end() && lt->second == term) continue;
      e.attr_changes.push_back({n.type, attr, lt == n.attrs.end() ? "_" : to_string(lt->second), to_string(term)});
    }
  }
  for (const auto& [id, n] : r.rhs.nodes)
    if (!r.lhs.nodes.count(id)) e.created_node_types.push_back(n.type);
  for (const auto& [id, ed] : r.lhs.edges)
    if (!r.rhs.edges.count(id)) e.deleted_edge_types.push_back(ed.type);
  for (const auto& [id, ed] : r.rhs.edges)
    if (!r.lhs.edges.count(id)) e.created_edge_types.push_back(ed.type);
  for (auto* v : {&e.deleted_node_types, &e.created_node_types, &e.deleted_edge_types, &e.created_edge_types})
    std::sort(v->begin(), v->end());
  std::sort(e.attr_changes.begin(), e.attr_changes.end());
  e.attr_changes.erase(std::unique(e.attr_changes.begin(), e.attr_changes.end()), e.attr_changes.end());
  return e;
}

Rule project_rule(const Rule& r, const TypeGraph& rule_types, const TypeGraph& base) {
  if (auto why = inclusion_failure(base, rule_types))
    throw Error(ErrorKind::Consistency, "project_rule: base is not included: " + *why);
  return Rule{r.name, restrict(r.lhs, base), restrict(r.rhs, base), r.rate};
}

}  // namespace featgts
