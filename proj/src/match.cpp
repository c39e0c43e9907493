#include "featgts/match.hpp"

#include <algorithm>
#include <numeric>

#include "featgts/error.hpp"

namespace featgts {

// --- HostIndex --------------------------------------------------------------

HostIndex::HostIndex(const InstanceGraph& g)
    : node_ids_(std::make_unique<std::vector<std::string>>()), empty_(IdLess{node_ids_.get()}) {
  for (const auto& [id, n] : g.nodes()) {
    std::vector<std::pair<int, std::int64_t>> attrs;
    for (const auto& [name, v] : n.attrs) attrs.emplace_back(intern_slot(name), intern_value(v));
    add_node(id, intern_type(n.type), std::move(attrs));
  }
  for (const auto& [id, e] : g.edges()) {
    int s = find_node(e.source);
    int t = find_node(e.target);
    if (s < 0 || t < 0) throw Error(ErrorKind::Runtime, "edge '" + id + "' is dangling");
    add_edge(id, intern_type(e.type), s, t);
  }
}

InstanceGraph HostIndex::to_graph() const {
  InstanceGraph g;
  for (int n = 0; n < node_count(); ++n) {
    if (!node_alive_[n]) continue;
    std::map<std::string, Value> attrs;
    for (const auto& [slot, code] : node_attrs_[n]) attrs.emplace(slots_[slot], values_[code]);
    g.add_node(node_id(n), types_[node_type_[n]], std::move(attrs));
  }
  for (int e = 0; e < edge_count(); ++e) {
    if (!edge_alive_[e]) continue;
    g.add_edge(edge_ids_[e], types_[edge_type_[e]], node_id(edge_src_[e]), node_id(edge_tgt_[e]));
  }
  return g;
}

int HostIndex::type_id(const std::string& name) const {
  auto it = type_ids_.find(name);
  return it == type_ids_.end() ? -1 : it->second;
}

int HostIndex::slot_id(const std::string& name) const {
  auto it = slot_ids_.find(name);
  return it == slot_ids_.end() ? -1 : it->second;
}

std::int64_t HostIndex::value_code(const Value& v) const {
  auto it = value_ids_.find(v);
  return it == value_ids_.end() ? -1 : it->second;
}

int HostIndex::intern_type(const std::string& name) {
  auto [it, fresh] = type_ids_.try_emplace(name, static_cast<int>(types_.size()));
  if (fresh) types_.push_back(name);
  return it->second;
}

int HostIndex::intern_slot(const std::string& name) {
  auto [it, fresh] = slot_ids_.try_emplace(name, static_cast<int>(slots_.size()));
  if (fresh) slots_.push_back(name);
  return it->second;
}

std::int64_t HostIndex::intern_value(const Value& v) {
  auto [it, fresh] = value_ids_.try_emplace(v, static_cast<std::int64_t>(values_.size()));
  if (fresh) values_.push_back(v);
  return it->second;
}

int HostIndex::find_node(const std::string& id) const {
  auto it = node_lookup_.find(id);
  return it == node_lookup_.end() ? -1 : it->second;
}

int HostIndex::find_edge(const std::string& id) const {
  auto it = edge_lookup_.find(id);
  return it == edge_lookup_.end() ? -1 : it->second;
}

std::int64_t HostIndex::attr(int n, int slot) const {
  for (const auto& [s, code] : node_attrs_[n])
    if (s == slot) return code;
  return -1;
}

const HostIndex::NodeSet& HostIndex::nodes_of_type(int type) const {
  auto it = by_type_.find(type);
  return it == by_type_.end() ? empty_ : it->second;
}

const HostIndex::NodeSet& HostIndex::nodes_with(int type, int slot, std::int64_t code) const {
  auto it = by_attr_.find(BucketKey{type, slot, code});
  return it == by_attr_.end() ? empty_ : it->second;
}

HostIndex::NodeSet& HostIndex::bucket(std::map<BucketKey, NodeSet>& m, const BucketKey& k) {
  return m.try_emplace(k, IdLess{node_ids_.get()}).first->second;
}

HostIndex::NodeSet& HostIndex::type_bucket(int type) {
  return by_type_.try_emplace(type, IdLess{node_ids_.get()}).first->second;
}

void HostIndex::set_attr(int n, int slot, std::int64_t code) {
  const int type = node_type_[n];
  for (auto& [s, c] : node_attrs_[n]) {
    if (s != slot) continue;
    if (c == code) return;
    bucket(by_attr_, {type, slot, c}).erase(n);
    c = code;
    bucket(by_attr_, {type, slot, code}).insert(n);
    return;
  }
  node_attrs_[n].emplace_back(slot, code);
  std::sort(node_attrs_[n].begin(), node_attrs_[n].end());
  bucket(by_attr_, {type, slot, code}).insert(n);
  ++slot_count_[{type, slot}];
}

std::size_t HostIndex::nodes_having(int type, int slot) const {
  auto it = slot_count_.find({type, slot});
  return it == slot_count_.end() ? 0 : it->second;
}

int HostIndex::add_node(const std::string& id, int type,
                        std::vector<std::pair<int, std::int64_t>> attrs) {
  if (node_lookup_.count(id)) throw Error(ErrorKind::Runtime, "duplicate node id '" + id + "'");
  const int n = node_count();
  node_ids_->push_back(id);
  node_lookup_.emplace(id, n);
  node_type_.push_back(type);
  std::sort(attrs.begin(), attrs.end());
  node_attrs_.push_back(std::move(attrs));
  node_alive_.push_back(true);
  out_.emplace_back();
  in_.emplace_back();
  type_bucket(type).insert(n);
  for (const auto& [slot, code] : node_attrs_[n]) {
    bucket(by_attr_, {type, slot, code}).insert(n);
    ++slot_count_[{type, slot}];
  }
  return n;
}

void HostIndex::remove_node(int n) {
  if (!node_alive_[n]) return;
  while (!out_[n].empty()) remove_edge(out_[n].back());
  while (!in_[n].empty()) remove_edge(in_[n].back());
  type_bucket(node_type_[n]).erase(n);
  for (const auto& [slot, code] : node_attrs_[n]) {
    bucket(by_attr_, {node_type_[n], slot, code}).erase(n);
    --slot_count_[{node_type_[n], slot}];
  }
  node_alive_[n] = false;
  node_lookup_.erase(node_id(n));
}

int HostIndex::add_edge(const std::string& id, int type, int src, int tgt) {
  if (edge_lookup_.count(id)) throw Error(ErrorKind::Runtime, "duplicate edge id '" + id + "'");
  const int e = edge_count();
  edge_ids_.push_back(id);
  edge_lookup_.emplace(id, e);
  edge_type_.push_back(type);
  edge_src_.push_back(src);
  edge_tgt_.push_back(tgt);
  edge_alive_.push_back(true);
  out_[src].push_back(e);
  in_[tgt].push_back(e);
  return e;
}

void HostIndex::remove_edge(int e) {
  if (!edge_alive_[e]) return;
  auto drop = [e](std::vector<int>& v) { v.erase(std::find(v.begin(), v.end(), e)); };
  drop(out_[edge_src_[e]]);
  drop(in_[edge_tgt_[e]]);
  edge_alive_[e] = false;
  edge_lookup_.erase(edge_ids_[e]);
}

std::string HostIndex::fresh_node_id() {
  std::string id;
  do id = "_n" + std::to_string(++fresh_node_);
  while (node_lookup_.count(id));
  return id;
}

std::string HostIndex::fresh_edge_id() {
  std::string id;
  do id = "_e" + std::to_string(++fresh_edge_);
  while (edge_lookup_.count(id));
  return id;
}

// --- CompiledPattern --------------------------------------------------------

CompiledPattern::CompiledPattern(const Pattern& p, HostIndex& host) {
  auto vars = p.variables();
  vars_.assign(vars.begin(), vars.end());
  auto var_index = [this](const std::string& name) {
    return static_cast<int>(std::lower_bound(vars_.begin(), vars_.end(), name) - vars_.begin());
  };
  std::map<std::string, int> node_index;
  for (const auto& [id, n] : p.nodes) {
    NodeSpec spec{id, host.intern_type(n.type), {}};
    for (const auto& [name, term] : n.attrs) {
      AttrConstraint c{host.intern_slot(name), -1, -1};
      if (const auto* k = term.as_constant()) {
        c.code = host.intern_value(k->value);
      } else if (const auto* v = term.as_variable()) {
        c.var = var_index(v->name);
      } else {
        matchable_ = false;
      }
      spec.attrs.push_back(c);
    }
    node_index.emplace(id, static_cast<int>(nodes_.size()));
    nodes_.push_back(std::move(spec));
  }
  for (const auto& [id, e] : p.edges) {
    auto s = node_index.find(e.source);
    auto t = node_index.find(e.target);
    if (s == node_index.end() || t == node_index.end())
      throw Error(ErrorKind::Consistency, "pattern edge '" + id + "' is dangling");
    edges_.push_back({id, host.intern_type(e.type), s->second, t->second});
  }
}

// --- Search -----------------------------------------------------------------

namespace {

class Search {
 public:
  // `order` lists pattern nodes in the order they are placed. Occurrences
  // come out sorted by host ids only for the identity order.
  Search(const CompiledPattern& p, const HostIndex& h, std::vector<int> order,
         const std::function<bool(const Assignment&)>& visit)
      : p_(p), h_(h), visit_(visit), used_node_(h.node_count(), false),
        used_edge_(h.edge_count(), false), bound_(p.variables().size(), false), order_(std::move(order)) {
    a_.nodes.assign(p.nodes().size(), -1);
    a_.edges.assign(p.edges().size(), -1);
    a_.bindings.assign(p.variables().size(), -1);
    std::vector<size_t> rank(p.nodes().size());
    for (size_t d = 0; d < order_.size(); ++d) rank[order_[d]] = d;
    back_edges_.resize(p.nodes().size());
    for (size_t k = 0; k < p.edges().size(); ++k) {
      const auto& e = p.edges()[k];
      back_edges_[rank[e.src] > rank[e.tgt] ? e.src : e.tgt].push_back(static_cast<int>(k));
    }
  }

  void run() {
    if (!p_.matchable()) return;
    for (const auto& e : p_.edges())
      if (e.type < 0) return;
    nodes(0);
  }

 private:
  bool edge_exists(int type, int src, int tgt) const {
    for (int e : h_.out_edges(src))
      if (h_.edge_type(e) == type && h_.edge_target(e) == tgt) return true;
    return false;
  }

  // Candidate host nodes for pattern node i: the smallest of the type bucket,
  // the attribute buckets, and the neighbourhoods of already placed nodes.
  bool candidates(size_t i, std::vector<int>& out, const HostIndex::NodeSet*& set) const {
    const auto& spec = p_.nodes()[i];
    if (spec.type < 0) return false;
    set = &h_.nodes_of_type(spec.type);
    size_t best = set->size();
    for (const auto& c : spec.attrs) {
      if (c.slot < 0) return false;
      std::int64_t code = c.code;
      if (c.var >= 0) {
        if (!bound_[c.var]) continue;
        code = a_.bindings[c.var];
      } else if (code < 0) {
        return false;
      }
      const auto& b = h_.nodes_with(spec.type, c.slot, code);
      if (b.size() < best) {
        best = b.size();
        set = &b;
      }
    }
    int best_edge = -1;
    for (int k : back_edges_[i]) {
      const auto& e = p_.edges()[k];
      if (e.src == e.tgt) continue;
      const int other = e.src == static_cast<int>(i) ? e.tgt : e.src;
      const auto& adj = e.src == other ? h_.out_edges(a_.nodes[other]) : h_.in_edges(a_.nodes[other]);
      if (adj.size() < best) {
        best = adj.size();
        best_edge = k;
      }
    }
    if (best_edge >= 0) {
      set = nullptr;
      const auto& e = p_.edges()[best_edge];
      if (e.tgt == static_cast<int>(i)) {
        for (int he : h_.out_edges(a_.nodes[e.src]))
          if (h_.edge_type(he) == e.type) out.push_back(h_.edge_target(he));
      } else {
        for (int he : h_.in_edges(a_.nodes[e.tgt]))
          if (h_.edge_type(he) == e.type) out.push_back(h_.edge_source(he));
      }
    }
    return true;
  }

  bool try_node(size_t i, int c) {
    const auto& spec = p_.nodes()[i];
    if (!h_.node_alive(c) || used_node_[c] || h_.node_type(c) != spec.type) return false;
    for (const auto& k : spec.attrs) {
      const std::int64_t v = h_.attr(c, k.slot);
      if (v < 0) return false;
      if (k.var < 0) {
        if (v != k.code) return false;
      } else if (bound_[k.var]) {
        if (a_.bindings[k.var] != v) return false;
      } else {
        bound_[k.var] = true;
        a_.bindings[k.var] = v;
        bound_stack_.push_back(k.var);
      }
    }
    a_.nodes[i] = c;
    for (int k : back_edges_[i]) {
      const auto& e = p_.edges()[k];
      if (!edge_exists(e.type, a_.nodes[e.src], a_.nodes[e.tgt])) return false;
    }
    return true;
  }

  void nodes(size_t depth) {
    if (stop_) return;
    if (depth == order_.size()) {
      edges(0);
      return;
    }
    const size_t i = order_[depth];
    std::vector<int> list;
    const HostIndex::NodeSet* set = nullptr;
    if (!candidates(i, list, set)) return;
    auto step = [&](int c) {
      const size_t mark = bound_stack_.size();
      if (try_node(i, c)) {
        used_node_[c] = true;
        nodes(depth + 1);
        used_node_[c] = false;
      }
      a_.nodes[i] = -1;
      for (; bound_stack_.size() > mark; bound_stack_.pop_back()) bound_[bound_stack_.back()] = false;
    };
    if (set) {
      for (int c : *set) {
        step(c);
        if (stop_) return;
      }
    } else {
      sort_by_id(list);
      list.erase(std::unique(list.begin(), list.end()), list.end());
      for (int c : list) {
        step(c);
        if (stop_) return;
      }
    }
  }

  void edges(size_t k) {
    if (stop_) return;
    if (k == p_.edges().size()) {
      if (!visit_(a_)) stop_ = true;
      return;
    }
    const auto& e = p_.edges()[k];
    const int src = a_.nodes[e.src];
    const int tgt = a_.nodes[e.tgt];
    std::vector<int> cands;
    for (int he : h_.out_edges(src))
      if (!used_edge_[he] && h_.edge_type(he) == e.type && h_.edge_target(he) == tgt) cands.push_back(he);
    std::sort(cands.begin(), cands.end(),
              [this](int x, int y) { return h_.edge_id(x) < h_.edge_id(y); });
    for (int he : cands) {
      used_edge_[he] = true;
      a_.edges[k] = he;
      edges(k + 1);
      used_edge_[he] = false;
      if (stop_) return;
    }
    a_.edges[k] = -1;
  }

  void sort_by_id(std::vector<int>& v) const {
    std::sort(v.begin(), v.end(), [this](int x, int y) { return h_.node_id(x) < h_.node_id(y); });
  }

  const CompiledPattern& p_;
  const HostIndex& h_;
  const std::function<bool(const Assignment&)>& visit_;
  Assignment a_;
  std::vector<bool> used_node_;
  std::vector<bool> used_edge_;
  std::vector<bool> bound_;
  std::vector<int> bound_stack_;  // variables bound so far, innermost last
  std::vector<int> order_;
  std::vector<std::vector<int>> back_edges_;  // edges whose later endpoint is this node
  bool stop_ = false;
};

}  // namespace

void for_each_occurrence(const CompiledPattern& p, const HostIndex& host,
                         const std::function<bool(const Assignment&)>& visit) {
  std::vector<int> order(p.nodes().size());
  std::iota(order.begin(), order.end(), 0);
  Search(p, host, std::move(order), visit).run();
}

namespace {

// Placement order for counting: greedily the node with the smallest
// candidate estimate, preferring nodes tied by an edge or a shared variable
// to those already placed.
std::vector<int> selective_order(const CompiledPattern& p, const HostIndex& host) {
  const size_t n = p.nodes().size();
  std::vector<size_t> estimate(n);
  for (size_t i = 0; i < n; ++i) {
    const auto& spec = p.nodes()[i];
    estimate[i] = host.nodes_of_type(spec.type).size();
    for (const auto& k : spec.attrs)
      if (k.var < 0) estimate[i] = std::min(estimate[i], host.nodes_with(spec.type, k.slot, k.code).size());
  }
  auto tied = [&](size_t i, const std::vector<bool>& placed) {
    for (const auto& e : p.edges())
      if ((e.src == static_cast<int>(i) && placed[e.tgt]) || (e.tgt == static_cast<int>(i) && placed[e.src]))
        return true;
    for (const auto& k : p.nodes()[i].attrs) {
      if (k.var < 0) continue;
      for (size_t j = 0; j < n; ++j) {
        if (!placed[j]) continue;
        for (const auto& o : p.nodes()[j].attrs)
          if (o.var == k.var) return true;
      }
    }
    return false;
  };
  std::vector<int> order;
  std::vector<bool> placed(n, false);
  while (order.size() < n) {
    int best = -1;
    bool best_tied = false;
    for (size_t i = 0; i < n; ++i) {
      if (placed[i]) continue;
      const bool t = tied(i, placed);
      if (best < 0 || (t && !best_tied) || (t == best_tied && estimate[i] < estimate[best])) {
        best = static_cast<int>(i);
        best_tied = t;
      }
    }
    placed[best] = true;
    order.push_back(best);
  }
  return order;
}

}  // namespace

std::uint64_t count_occurrences(const CompiledPattern& p, const HostIndex& host) {
  // A lone node without edges is counted by bucket size when it has at most
  // one constant and its variables are distinct and carried by every node of
  // its type.
  if (p.matchable() && p.nodes().size() == 1 && p.edges().empty()) {
    const auto& spec = p.nodes().front();
    const auto& all = host.nodes_of_type(spec.type);
    const HostIndex::NodeSet* bucket = &all;
    int constants = 0;
    std::vector<int> vars;
    bool simple = true;
    for (const auto& k : spec.attrs) {
      if (k.var < 0) {
        bucket = &host.nodes_with(spec.type, k.slot, k.code);
        simple = simple && ++constants == 1;
      } else {
        simple = simple && std::find(vars.begin(), vars.end(), k.var) == vars.end() &&
                 host.nodes_having(spec.type, k.slot) == all.size();
        vars.push_back(k.var);
      }
    }
    if (simple) return bucket->size();
  }
  std::uint64_t n = 0;
  const std::function<bool(const Assignment&)> tally = [&n](const Assignment&) {
    ++n;
    return true;
  };
  Search(p, host, selective_order(p, host), tally).run();
  return n;
}

bool is_occurrence(const CompiledPattern& p, const HostIndex& host, const Assignment& a) {
  if (!p.matchable()) return false;
  if (a.nodes.size() != p.nodes().size() || a.edges.size() != p.edges().size() ||
      a.bindings.size() != p.variables().size())
    return false;
  std::vector<bool> used_node(host.node_count(), false);
  for (size_t i = 0; i < a.nodes.size(); ++i) {
    const int n = a.nodes[i];
    const auto& spec = p.nodes()[i];
    if (n < 0 || n >= host.node_count() || !host.node_alive(n) || used_node[n]) return false;
    used_node[n] = true;
    if (spec.type < 0 || host.node_type(n) != spec.type) return false;
    for (const auto& k : spec.attrs) {
      if (k.slot < 0) return false;
      const std::int64_t v = host.attr(n, k.slot);
      const std::int64_t want = k.var < 0 ? k.code : a.bindings[k.var];
      if (v < 0 || v != want) return false;
    }
  }
  std::vector<bool> used_edge(host.edge_count(), false);
  for (size_t k = 0; k < a.edges.size(); ++k) {
    const int e = a.edges[k];
    const auto& spec = p.edges()[k];
    if (e < 0 || e >= host.edge_count() || !host.edge_alive(e) || used_edge[e]) return false;
    used_edge[e] = true;
    if (host.edge_type(e) != spec.type || host.edge_source(e) != a.nodes[spec.src] ||
        host.edge_target(e) != a.nodes[spec.tgt])
      return false;
  }
  return true;
}

}  // namespace featgts
