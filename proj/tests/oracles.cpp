#include "oracles.hpp"

#include <algorithm>
#include <functional>
#include <set>

namespace oracle {

namespace {

// Enumerates injective node maps (pattern ids in order, host ids in order)
// accepted by `node_ok`, then injective edge maps, calling `emit`.
void enumerate(const std::vector<std::string>& pnodes, const std::vector<std::string>& hnodes,
               const std::map<std::string, Edge>& pedges, const InstanceGraph& host,
               const std::function<bool(const std::map<std::string, std::string>&)>& node_ok,
               const std::function<void(const GraphMorphism&)>& emit) {
  std::map<std::string, std::string> nm;
  std::set<std::string> used;
  std::vector<std::string> eids;
  for (const auto& [id, e] : pedges) eids.push_back(id);

  std::function<void(std::size_t, std::map<std::string, std::string>&, std::set<std::string>&)> edges =
      [&](std::size_t k, std::map<std::string, std::string>& em, std::set<std::string>& eused) {
        if (k == eids.size()) {
          emit(GraphMorphism{nm, em});
          return;
        }
        const Edge& pe = pedges.at(eids[k]);
        for (const auto& [hid, he] : host.edges()) {
          if (eused.count(hid) || he.type != pe.type) continue;
          if (he.source != nm.at(pe.source) || he.target != nm.at(pe.target)) continue;
          em[eids[k]] = hid;
          eused.insert(hid);
          edges(k + 1, em, eused);
          eused.erase(hid);
          em.erase(eids[k]);
        }
      };

  std::function<void(std::size_t)> nodes = [&](std::size_t i) {
    if (i == pnodes.size()) {
      if (!node_ok(nm)) return;
      std::map<std::string, std::string> em;
      std::set<std::string> eused;
      edges(0, em, eused);
      return;
    }
    for (const auto& h : hnodes) {
      if (used.count(h)) continue;
      nm[pnodes[i]] = h;
      used.insert(h);
      nodes(i + 1);
      used.erase(h);
      nm.erase(pnodes[i]);
    }
  };
  nodes(0);
}

std::vector<std::string> keys(const auto& m) {
  std::vector<std::string> out;
  for (const auto& [k, v] : m) out.push_back(k);
  return out;
}

}  // namespace

std::vector<Match> matches(const Rule& r, const InstanceGraph& host) {
  std::vector<Match> out;
  std::map<std::string, Value> binding;
  auto node_ok = [&](const std::map<std::string, std::string>& nm) {
    binding.clear();
    for (const auto& [pid, pn] : r.lhs.nodes) {
      const Node& hn = host.nodes().at(nm.at(pid));
      if (hn.type != pn.type) return false;
      for (const auto& [attr, term] : pn.attrs) {
        auto it = hn.attrs.find(attr);
        if (it == hn.attrs.end()) return false;
        if (const auto* c = term.as_constant()) {
          if (!(c->value == it->second)) return false;
        } else if (const auto* v = term.as_variable()) {
          auto [b, fresh] = binding.emplace(v->name, it->second);
          if (!fresh && !(b->second == it->second)) return false;
        } else {
          return false;
        }
      }
    }
    return true;
  };
  enumerate(keys(r.lhs.nodes), keys(host.nodes()), r.lhs.edges, host, node_ok,
            [&](const GraphMorphism& m) { out.push_back(Match{m, binding}); });
  return out;
}

std::vector<GraphMorphism> morphisms(const InstanceGraph& pattern, const InstanceGraph& host) {
  std::vector<GraphMorphism> out;
  auto node_ok = [&](const std::map<std::string, std::string>& nm) {
    for (const auto& [pid, pn] : pattern.nodes()) {
      const Node& hn = host.nodes().at(nm.at(pid));
      if (hn.type != pn.type) return false;
      for (const auto& [attr, v] : pn.attrs) {
        auto it = hn.attrs.find(attr);
        if (it == hn.attrs.end() || !(it->second == v)) return false;
      }
    }
    return true;
  };
  enumerate(keys(pattern.nodes()), keys(host.nodes()), pattern.edges(), host, node_ok,
            [&](const GraphMorphism& m) { out.push_back(m); });
  return out;
}

bool is_morphism(const GraphMorphism& m, const InstanceGraph& pattern, const InstanceGraph& host) {
  if (m.node_map.size() != pattern.nodes().size() || m.edge_map.size() != pattern.edges().size()) return false;
  std::set<std::string> images;
  for (const auto& [pid, pn] : pattern.nodes()) {
    auto it = m.node_map.find(pid);
    if (it == m.node_map.end() || !images.insert(it->second).second) return false;
    const Node* hn = host.node(it->second);
    if (!hn || hn->type != pn.type) return false;
    for (const auto& [attr, v] : pn.attrs) {
      auto a = hn->attrs.find(attr);
      if (a == hn->attrs.end() || !(a->second == v)) return false;
    }
  }
  std::set<std::string> eimages;
  for (const auto& [pid, pe] : pattern.edges()) {
    auto it = m.edge_map.find(pid);
    if (it == m.edge_map.end() || !eimages.insert(it->second).second) return false;
    const Edge* he = host.edge(it->second);
    if (!he || he->type != pe.type) return false;
    if (he->source != m.node_map.at(pe.source) || he->target != m.node_map.at(pe.target)) return false;
  }
  return true;
}

bool isomorphic(const InstanceGraph& a, const InstanceGraph& b) {
  if (a.nodes().size() != b.nodes().size() || a.edges().size() != b.edges().size()) return false;
  for (const auto& m : morphisms(a, b)) {
    // Injective with equal sizes is bijective; attributes must also agree
    // in the reverse direction.
    bool same = true;
    for (const auto& [pid, hid] : m.node_map)
      if (a.nodes().at(pid).attrs.size() != b.nodes().at(hid).attrs.size()) same = false;
    if (same) return true;
  }
  return false;
}

bool valid(const FeatureDiagram& fd, const Configuration& c) {
  for (const auto& f : c)
    if (!fd.feature(f)) return false;
  if (!c.count(fd.root())) return false;
  for (const auto& f : fd.features()) {
    const bool in = c.count(f.name);
    const bool parent_in = !f.parent.empty() && c.count(f.parent);
    if (in && !f.parent.empty() && !parent_in) return false;
    if (f.kind == Variability::Mandatory && parent_in && !in) return false;
  }
  std::map<int, int> chosen;
  std::map<int, std::string> parent;
  for (const auto& f : fd.features())
    if (f.kind == Variability::Alternative) {
      parent[f.group] = f.parent;
      chosen[f.group] += c.count(f.name) ? 1 : 0;
    }
  for (const auto& [g, n] : chosen)
    if (c.count(parent[g]) && n != 1) return false;
  return true;
}

std::vector<Configuration> configurations(const FeatureDiagram& fd) {
  const auto& fs = fd.features();
  std::set<Configuration> out;
  for (std::uint64_t mask = 0; mask < (std::uint64_t{1} << fs.size()); ++mask) {
    Configuration c;
    for (std::size_t i = 0; i < fs.size(); ++i)
      if (mask >> i & 1) c.insert(fs[i].name);
    if (valid(fd, c)) out.insert(c);
  }
  return {out.begin(), out.end()};
}

double ks(const std::vector<double>& a, const std::vector<double>& b) {
  auto cdf = [](const std::vector<double>& xs, double x) {
    return static_cast<double>(std::count_if(xs.begin(), xs.end(), [x](double v) { return v <= x; })) /
           static_cast<double>(xs.size());
  };
  double d = 0.0;
  for (const auto* s : {&a, &b})
    for (double x : *s) d = std::max(d, std::abs(cdf(a, x) - cdf(b, x)));
  return d;
}

std::map<std::string, std::size_t> degrees(const InstanceGraph& g) {
  std::map<std::string, std::size_t> out;
  for (const auto& [id, n] : g.nodes()) out[id] = 0;
  for (const auto& [id, e] : g.edges()) {
    ++out[e.source];
    ++out[e.target];
  }
  return out;
}

InstanceGraph random_graph(const TypeGraph& tg, std::mt19937_64& rng, int max_nodes, int max_edges) {
  auto pick = [&rng](std::size_t n) { return static_cast<std::size_t>(rng() % n); };
  InstanceGraph g;
  const auto& types = tg.node_types();
  const int n = static_cast<int>(pick(max_nodes + 1));
  std::map<std::string, std::vector<std::string>> by_type;
  for (int i = 0; i < n && !types.empty(); ++i) {
    const std::string& t = types[pick(types.size())];
    std::map<std::string, Value> attrs;
    for (const auto* d : tg.attrs_of(t)) {
      auto values = d->domain.values();
      attrs[d->name] = values[pick(values.size())];
    }
    const std::string id = "h" + std::to_string(i);
    g.add_node(id, t, std::move(attrs));
    by_type[t].push_back(id);
  }
  const int m = static_cast<int>(pick(max_edges + 1));
  for (int k = 0; k < m && !tg.edge_types().empty(); ++k) {
    const auto& et = tg.edge_types()[pick(tg.edge_types().size())];
    const auto& src = by_type[et.source];
    const auto& tgt = by_type[et.target];
    if (src.empty() || tgt.empty()) continue;
    g.add_edge("x" + std::to_string(k), et.name, src[pick(src.size())], tgt[pick(tgt.size())]);
  }
  return g;
}

FeatureDiagram random_diagram(int n, std::mt19937_64& rng) {
  std::vector<Feature> fs{Feature{"f0", "", Variability::Root, -1}};
  for (int i = 1; i < n; ++i) {
    Feature f{"f" + std::to_string(i), fs[rng() % fs.size()].name,
              rng() % 3 == 0 ? Variability::Mandatory : Variability::Optional, -1};
    fs.push_back(std::move(f));
  }
  // Turn some sets of optional siblings into alternative groups.
  int group = 0;
  for (const auto& parent : std::vector<Feature>(fs)) {
    std::vector<std::size_t> kids;
    for (std::size_t i = 0; i < fs.size(); ++i)
      if (fs[i].parent == parent.name && fs[i].kind == Variability::Optional) kids.push_back(i);
    if (kids.size() < 2 || rng() % 2) continue;
    const std::size_t members = 2 + rng() % (kids.size() - 1);
    for (std::size_t k = 0; k < members; ++k) {
      fs[kids[k]].kind = Variability::Alternative;
      fs[kids[k]].group = group;
    }
    ++group;
  }
  return FeatureDiagram(fs);
}

}  // namespace oracle
