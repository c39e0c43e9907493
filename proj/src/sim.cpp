#include "featgts/sim.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <exception>
#include <thread>

#include "featgts/error.hpp"
#include "rng.hpp"

namespace featgts {

namespace {

// Rules of one system compiled against one host.
struct CompiledSystem {
  std::vector<CompiledRule> rules;
  std::map<std::string, std::size_t> by_name;

  CompiledSystem(const GTS& g, HostIndex& host) {
    rules.reserve(g.rules.size());
    for (const auto& r : g.rules) {
      by_name.emplace(r.name, rules.size());
      rules.emplace_back(r, g.types, host);
    }
  }
};

Event record(double time, const CompiledRule& cr, const HostIndex& host, const Assignment& a) {
  Event ev{time, cr.rule().name, {}, {}};
  for (int n : a.nodes) ev.nodes.push_back(host.node_id(n));
  for (int e : a.edges) ev.edges.push_back(host.edge_id(e));
  return ev;
}

// Rebuilds the assignment of a recorded event; bindings are read off the
// matched nodes. Missing ids become -1 and fail is_occurrence later.
Assignment resolve(const CompiledPattern& p, const HostIndex& host, const Event& ev) {
  Assignment a;
  a.bindings.assign(p.variables().size(), -1);
  if (ev.nodes.size() != p.nodes().size() || ev.edges.size() != p.edges().size()) return a;
  for (std::size_t i = 0; i < ev.nodes.size(); ++i) {
    const int n = host.find_node(ev.nodes[i]);
    a.nodes.push_back(n);
    if (n < 0) continue;
    for (const auto& k : p.nodes()[i].attrs)
      if (k.var >= 0 && a.bindings[k.var] < 0) a.bindings[k.var] = host.attr(n, k.slot);
  }
  for (const auto& id : ev.edges) a.edges.push_back(host.find_edge(id));
  return a;
}

void step(CompiledSystem& sys, HostIndex& host, const Event& ev, std::size_t index) {
  auto it = sys.by_name.find(ev.rule);
  if (it == sys.by_name.end())
    throw Error(ErrorKind::Runtime, "event " + std::to_string(index) + ": unknown rule '" + ev.rule + "'");
  const auto& cr = sys.rules[it->second];
  const Assignment a = resolve(cr.lhs(), host, ev);
  if (!is_occurrence(cr.lhs(), host, a))
    throw Error(ErrorKind::Runtime, "event " + std::to_string(index) + " (" + ev.rule + "): not a match");
  cr.apply(host, a);
}

Trajectory run_one(const std::shared_ptr<const GTS>& system, const InstanceGraph& init, const SimConfig& cfg,
                   std::uint64_t seed) {
  Trajectory t;
  t.system = system;
  t.horizon = cfg.horizon;
  t.initial = init;

  HostIndex host(init);
  CompiledSystem sys(*system, host);
  detail::Rng rng(seed);
  std::vector<std::uint64_t> counts(sys.rules.size());
  double now = 0.0;

  for (;;) {
    if (t.events.size() >= cfg.max_events) {
      t.stop = StopReason::MaxEvents;
      break;
    }
    double total = 0.0;
    for (std::size_t i = 0; i < sys.rules.size(); ++i) {
      counts[i] = count_occurrences(sys.rules[i].lhs(), host);
      total += sys.rules[i].rule().rate * static_cast<double>(counts[i]);
    }
    if (total <= 0.0) {
      t.stop = StopReason::Exhausted;
      break;
    }
    const double next = now - std::log(rng.uniform()) / total;
    if (next > cfg.horizon) {
      t.stop = StopReason::Horizon;
      break;
    }
    now = next;

    const double pick = rng.uniform() * total;
    std::size_t chosen = sys.rules.size();
    double acc = 0.0;
    for (std::size_t i = 0; i < sys.rules.size(); ++i) {
      if (!counts[i]) continue;
      chosen = i;
      acc += sys.rules[i].rule().rate * static_cast<double>(counts[i]);
      if (pick < acc) break;
    }
    const auto& cr = sys.rules[chosen];
    std::uint64_t k = rng.below(counts[chosen]);
    Assignment picked;
    for_each_occurrence(cr.lhs(), host, [&](const Assignment& a) {
      if (k--) return true;
      picked = a;
      return false;
    });
    t.events.push_back(record(now, cr, host, picked));
    cr.apply(host, picked);
  }
  t.final_state = host.to_graph();
  return t;
}

}  // namespace

std::vector<Trajectory> simulate(const GTS& gts, const InstanceGraph& init, const SimConfig& cfg) {
  if (!(cfg.horizon > 0.0)) throw Error(ErrorKind::Runtime, "horizon must be positive");
  if (cfg.runs < 1) throw Error(ErrorKind::Runtime, "at least one run is required");
  auto typing = check_typing(init, gts.types);
  if (!typing.ok()) throw Error(ErrorKind::Runtime, "initial state is ill-typed: " + typing.violations.front());
  auto errs = gts_violations(gts);
  if (!errs.empty()) throw Error(ErrorKind::Consistency, errs.front());

  auto system = std::make_shared<const GTS>(gts);
  std::vector<Trajectory> out(cfg.runs);
  std::vector<std::exception_ptr> failures(cfg.runs);
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i; (i = next.fetch_add(1)) < cfg.runs;) {
      try {
        out[i] = run_one(system, init, cfg, cfg.seed + i);
      } catch (...) {
        failures[i] = std::current_exception();
      }
    }
  };
  unsigned threads = cfg.threads ? cfg.threads : std::max(1u, std::thread::hardware_concurrency());
  threads = static_cast<unsigned>(std::min<std::size_t>(threads, cfg.runs));
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (unsigned i = 0; i < threads; ++i) pool.emplace_back(worker);
  }
  for (auto& f : failures)
    if (f) std::rethrow_exception(f);
  return out;
}

InstanceGraph replay(const Trajectory& t) {
  if (!t.system) throw Error(ErrorKind::Runtime, "trajectory has no system");
  HostIndex host(t.initial);
  CompiledSystem sys(*t.system, host);
  for (std::size_t i = 0; i < t.events.size(); ++i) step(sys, host, t.events[i], i);
  return host.to_graph();
}

void validate(const Trajectory& t) {
  if (!t.system) throw Error(ErrorKind::Runtime, "trajectory has no system");
  auto typing = check_typing(t.initial, t.system->types);
  if (!typing.ok()) throw Error(ErrorKind::Runtime, "initial state is ill-typed: " + typing.violations.front());
  double last = 0.0;
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    const double time = t.events[i].time;
    if (!(time > last) || time > t.horizon)
      throw Error(ErrorKind::Runtime, "event " + std::to_string(i) + ": time out of order");
    last = time;
  }
  if (!(replay(t) == t.final_state)) throw Error(ErrorKind::Runtime, "replay does not reproduce the final state");
}

Trajectory project_trajectory(const Trajectory& t, const ExtensionWitness& w) {
  auto report = is_conservative(w);
  if (!report.conservative)
    throw Error(ErrorKind::Consistency, "cannot project onto '" + w.base.name + "': " + report.describe());
  const auto& from = w.ext.types;
  const auto& to = w.base.types;

  // Per ext rule: the base rule it maps to, and which match positions survive.
  struct Plan {
    std::string base_rule;
    std::vector<std::size_t> nodes;
    std::vector<std::size_t> edges;
  };
  std::map<std::string, Plan> plans;
  for (const auto& [base_name, ext_name] : w.rule_correspondence) {
    const Rule& er = *w.ext.rule(ext_name);
    const Rule& br = *w.base.rule(base_name);
    Plan plan{base_name, {}, {}};
    std::size_t i = 0;
    for (const auto& [id, n] : er.lhs.nodes) {
      if (to.has_node_type(n.type)) {
        if (!br.lhs.nodes.count(id))
          throw Error(ErrorKind::Runtime, "rule '" + ext_name + "' does not share node ids with its base rule");
        plan.nodes.push_back(i);
      }
      ++i;
    }
    i = 0;
    for (const auto& [id, e] : er.lhs.edges) {
      if (to.edge_type(e.type) && to.has_node_type(er.lhs.nodes.at(e.source).type) &&
          to.has_node_type(er.lhs.nodes.at(e.target).type)) {
        if (!br.lhs.edges.count(id))
          throw Error(ErrorKind::Runtime, "rule '" + ext_name + "' does not share edge ids with its base rule");
        plan.edges.push_back(i);
      }
      ++i;
    }
    plans.emplace(ext_name, std::move(plan));
  }

  Trajectory out;
  out.system = std::make_shared<const GTS>(w.base);
  out.horizon = t.horizon;
  out.initial = restrict(t.initial, from, to);
  out.final_state = restrict(t.final_state, from, to);
  out.stop = t.stop;
  for (const auto& ev : t.events) {
    auto it = plans.find(ev.rule);
    if (it == plans.end()) continue;  // projects to an empty effect
    Event pe{ev.time, it->second.base_rule, {}, {}};
    for (auto i : it->second.nodes) pe.nodes.push_back(ev.nodes.at(i));
    for (auto i : it->second.edges) pe.edges.push_back(ev.edges.at(i));
    out.events.push_back(std::move(pe));
  }
  return out;
}

// --- Observables -------------------------------------------------------------

std::size_t count(const InstanceGraph& g, const Predicate& p) {
  std::size_t n = 0;
  for (const auto& [id, node] : g.nodes()) {
    if (node.type != p.node_type) continue;
    auto it = node.attrs.find(p.attr);
    if (it != node.attrs.end() && it->second == p.value) ++n;
  }
  return n;
}

std::string observable_name(const Predicate& p) {
  return p.node_type + "." + p.attr + ":" + to_string(p.value);
}

std::vector<TimeSeries> observe_all(const Trajectory& t, const std::string& node_type, const std::string& attr) {
  if (!t.system) throw Error(ErrorKind::Runtime, "trajectory has no system");
  const AttrDecl* decl = t.system->types.attr(node_type, attr);
  if (!decl) throw Error(ErrorKind::Runtime, "attribute '" + node_type + "." + attr + "' is not declared");
  std::vector<Predicate> preds;
  for (auto& v : decl->domain.values()) preds.push_back(Predicate{node_type, attr, v});
  HostIndex host(t.initial);
  CompiledSystem sys(*t.system, host);
  const int type = host.intern_type(node_type);
  const int slot = host.intern_slot(attr);
  std::vector<std::int64_t> codes;
  std::vector<TimeSeries> series;
  for (const auto& p : preds) {
    codes.push_back(host.intern_value(p.value));
    series.push_back(TimeSeries{observable_name(p), {}, {}});
  }
  auto sample = [&](double time) {
    for (std::size_t i = 0; i < codes.size(); ++i) {
      series[i].times.push_back(time);
      series[i].values.push_back(host.nodes_with(type, slot, codes[i]).size());
    }
  };
  sample(0.0);
  for (std::size_t i = 0; i < t.events.size(); ++i) {
    step(sys, host, t.events[i], i);
    sample(t.events[i].time);
  }
  return series;
}

TimeSeries observe(const Trajectory& t, const Predicate& p) {
  for (auto& s : observe_all(t, p.node_type, p.attr))
    if (s.observable == observable_name(p)) return s;
  throw Error(ErrorKind::Runtime, "value " + to_string(p.value) + " is outside the domain of " + p.attr);
}

// --- Statistics --------------------------------------------------------------

double ks_statistic(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw Error(ErrorKind::Runtime, "KS statistic needs non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double n = static_cast<double>(a.size());
  const double m = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] == x) ++i;
    while (j < b.size() && b[j] == x) ++j;
    d = std::max(d, std::abs(static_cast<double>(i) / n - static_cast<double>(j) / m));
  }
  return d;
}

double ks_threshold(std::size_t n, std::size_t m, double alpha) {
  if (!(alpha > 0.0 && alpha < 1.0)) throw Error(ErrorKind::Runtime, "alpha must lie in (0, 1)");
  if (!n || !m) throw Error(ErrorKind::Runtime, "KS threshold needs non-empty samples");
  const double c = std::sqrt(-std::log(alpha / 2.0) / 2.0);
  const double dn = static_cast<double>(n), dm = static_cast<double>(m);
  return c * std::sqrt((dn + dm) / (dn * dm));
}

Summary summarize(const std::vector<double>& xs) {
  Summary s;
  s.n = xs.size();
  if (xs.empty()) return s;
  s.min = *std::min_element(xs.begin(), xs.end());
  s.max = *std::max_element(xs.begin(), xs.end());
  double sum = 0.0;
  for (double x : xs) sum += x;
  s.mean = sum / static_cast<double>(s.n);
  if (s.n > 1) {
    double sq = 0.0;
    for (double x : xs) sq += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(sq / static_cast<double>(s.n - 1));
  }
  return s;
}

namespace {

std::string fixed(double x, int digits = 6) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, x);
  return buf;
}

std::string describe_summary(const Summary& s) {
  return "n=" + std::to_string(s.n) + " mean=" + fixed(s.mean) + " sd=" + fixed(s.sd) + " min=" + fixed(s.min) +
         " max=" + fixed(s.max);
}

}  // namespace

std::string ComparisonReport::describe() const {
  std::string s;
  s += "observable: " + observable + "\n";
  s += "variant a: " + describe_summary(a) + "\n";
  s += "variant b: " + describe_summary(b) + "\n";
  s += "KS D: " + fixed(d) + "\n";
  s += "threshold: " + fixed(threshold) + " (alpha " + fixed(alpha, 4) + ")\n";
  s += std::string("decision: ") + (relevant ? "relevant" : "not relevant") + "\n";
  return s;
}

std::string ComparisonReport::summary_line() const {
  return "observable=" + observable + " D=" + fixed(d) + " threshold=" + fixed(threshold) +
         " alpha=" + fixed(alpha, 4) + " decision=" + (relevant ? "relevant" : "not-relevant");
}

ComparisonReport compare_variants(const std::vector<Trajectory>& a, const std::vector<Trajectory>& b,
                                  const ExtensionWitness& wa, const ExtensionWitness& wb, const Predicate& p,
                                  double alpha) {
  if (!isomorphic(wa.base, wb.base)) throw Error(ErrorKind::Consistency, "variants are compared over different bases");
  for (const auto* w : {&wa, &wb}) {
    auto r = is_conservative(*w);
    if (!r.conservative)
      throw Error(ErrorKind::Consistency, "'" + w->ext.name + "' over '" + w->base.name + "': " + r.describe());
  }
  if (a.size() < 2 || b.size() < 2) throw Error(ErrorKind::Runtime, "comparison needs at least two runs per variant");
  auto finals = [&p](const std::vector<Trajectory>& ts, const ExtensionWitness& w) {
    std::vector<double> xs;
    for (const auto& t : ts) xs.push_back(static_cast<double>(count(project_trajectory(t, w).final_state, p)));
    return xs;
  };
  const auto xa = finals(a, wa);
  const auto xb = finals(b, wb);
  ComparisonReport r;
  r.observable = observable_name(p);
  r.a = summarize(xa);
  r.b = summarize(xb);
  r.d = ks_statistic(xa, xb);
  r.threshold = ks_threshold(xa.size(), xb.size(), alpha);
  r.alpha = alpha;
  r.relevant = r.d > r.threshold;
  return r;
}

// --- Model parameters --------------------------------------------------------

GTS with_grid(const GTS& g, int size) {
  if (size < 1) throw Error(ErrorKind::Consistency, "grid size must be positive");
  auto attrs = g.types.attrs();
  for (auto& d : attrs)
    if (d.domain.kind() == AttrDomain::Kind::Grid) d.domain = AttrDomain::grid(size);
  GTS out = g;
  out.types = TypeGraph(g.types.node_types(), g.types.edge_types(), std::move(attrs));
  auto errs = gts_violations(out);
  if (!errs.empty()) throw Error(ErrorKind::Consistency, errs.front());
  return out;
}

GTS with_rates(const GTS& g, const std::map<std::string, double>& rates) {
  GTS out = g;
  for (const auto& [name, rate] : rates) {
    auto it = std::find_if(out.rules.begin(), out.rules.end(), [&](const Rule& r) { return r.name == name; });
    if (it == out.rules.end()) throw Error(ErrorKind::Consistency, "no rule named '" + name + "'");
    if (!(rate > 0.0)) throw Error(ErrorKind::Consistency, "rate of '" + name + "' must be positive");
    it->rate = rate;
  }
  return out;
}

}  // namespace featgts
