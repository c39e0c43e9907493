#include "featgts/featgts.h"

#include <charconv>
#include <cstdlib>
#include <cstring>
#include <sstream>

#include "featgts/compose.hpp"
#include "featgts/dsl.hpp"
#include "featgts/error.hpp"
#include "featgts/init.hpp"
#include "featgts/sim.hpp"

using namespace featgts;

struct fg_model {
  ModelDocument doc;
};
struct fg_gts {
  GTS gts;
};
struct fg_graph {
  InstanceGraph graph;
};
struct fg_trajectories {
  std::vector<Trajectory> runs;
};

namespace {

thread_local std::string last_error;

template <class F>
fg_status guard(F&& f) {
  try {
    last_error.clear();
    f();
    return FG_OK;
  } catch (const Error& e) {
    last_error = e.what();
    return static_cast<fg_status>(e.kind());
  } catch (const std::exception& e) {
    last_error = e.what();
    return FG_ERR_RUNTIME;
  }
}

void require(const void* p, const char* what) {
  if (!p) throw Error(ErrorKind::Runtime, std::string(what) + " is null");
}

char* dup(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::string item;
  std::istringstream in(s);
  while (std::getline(in, item, sep)) out.push_back(item);
  return out;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return "";
  return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

Configuration features(const char* text) {
  require(text, "feature list");
  Configuration c;
  for (const auto& f : split(text, ',')) {
    auto name = trim(f);
    if (name.empty()) throw Error(ErrorKind::InvalidConfiguration, std::string("empty feature in '") + text + "'");
    c.insert(name);
  }
  return c;
}

std::map<std::string, double> parse_rates(const std::string& text) {
  std::map<std::string, double> out;
  for (const auto& item : split(text, ',')) {
    auto eq = item.find('=');
    double v = 0;
    const std::string name = trim(item.substr(0, eq));
    const std::string num = eq == std::string::npos ? "" : trim(item.substr(eq + 1));
    auto [p, ec] = std::from_chars(num.data(), num.data() + num.size(), v);
    if (name.empty() || num.empty() || ec != std::errc() || p != num.data() + num.size())
      throw Error(ErrorKind::Runtime, "bad rate '" + item + "', expected name=value");
    out[name] = v;
  }
  return out;
}

// Applies only the rates of rules the system has.
GTS with_known_rates(const GTS& g, const std::map<std::string, double>& rates) {
  std::map<std::string, double> known;
  for (const auto& [name, v] : rates)
    if (g.rule(name)) known.emplace(name, v);
  return with_rates(g, known);
}

Predicate parse_observable(const std::string& text, const TypeGraph& tg) {
  const auto dot = text.find('.');
  const auto eq = text.find('=');
  if (dot == std::string::npos || eq == std::string::npos || eq < dot)
    throw Error(ErrorKind::Runtime, "bad observable '" + text + "', expected Type.attr=value");
  Predicate p{text.substr(0, dot), text.substr(dot + 1, eq - dot - 1), Value{}};
  const std::string raw = text.substr(eq + 1);
  const AttrDecl* decl = tg.attr(p.node_type, p.attr);
  if (!decl) throw Error(ErrorKind::Runtime, "observable attribute '" + p.node_type + "." + p.attr + "' is not declared");
  for (const auto& v : decl->domain.values())
    if (to_string(v) == raw) {
      p.value = v;
      return p;
    }
  throw Error(ErrorKind::Runtime, "value '" + raw + "' is outside the domain of " + p.node_type + "." + p.attr);
}

}  // namespace

extern "C" {

const char* fg_version(void) { return "0.1.0"; }

const char* fg_last_error(void) { return last_error.c_str(); }

void fg_string_free(char* s) { std::free(s); }

fg_status fg_model_parse(const char* text, size_t len, fg_model** out) {
  return guard([&] {
    require(text, "text");
    require(out, "out");
    *out = nullptr;
    auto result = parse_model(std::string_view(text, len));
    if (!result.ok()) {
      std::string msg;
      for (const auto& d : result.diagnostics) msg += (msg.empty() ? "" : "\n") + d.to_string();
      throw Error(result.kind, msg);
    }
    *out = new fg_model{std::move(*result.document)};
  });
}

void fg_model_free(fg_model* m) { delete m; }

fg_status fg_model_print(const fg_model* m, char** out) {
  return guard([&] {
    require(m, "model");
    require(out, "out");
    *out = dup(print_model(m->doc));
  });
}

fg_status fg_model_configurations(const fg_model* m, char** out) {
  return guard([&] {
    require(m, "model");
    require(out, "out");
    std::string s;
    for (const auto& c : valid_configurations(m->doc.model.diagram)) s += join(c) + "\n";
    *out = dup(s);
  });
}

fg_status fg_model_derive(const fg_model* m, const char* feats, fg_gts** out) {
  return guard([&] {
    require(m, "model");
    require(out, "out");
    *out = new fg_gts{derive_variant(m->doc.model, features(feats))};
  });
}

fg_status fg_model_merge(const fg_model* m, const char* left, const char* right, fg_gts** out) {
  return guard([&] {
    require(m, "model");
    require(out, "out");
    const auto& fm = m->doc.model;
    const auto l = upward_closure(fm.diagram, features(left));
    const auto r = upward_closure(fm.diagram, features(right));
    Configuration base;
    for (const auto& f : l)
      if (r.count(f)) base.insert(f);
    GTS el = derive_variant(fm, l);
    GTS er = derive_variant(fm, r);
    *out = new fg_gts{merge(filter_model(fm, base), el, er)};
  });
}

fg_status fg_model_check_conservative(const fg_model* m, const char* base, const char* ext, int* conservative,
                                      char** report) {
  return guard([&] {
    require(m, "model");
    require(conservative, "conservative");
    require(report, "report");
    const auto& fm = m->doc.model;
    auto w = check_extension(derive_variant(fm, features(base)), derive_variant(fm, features(ext)));
    auto r = is_conservative(w);
    *conservative = r.conservative ? 1 : 0;
    *report = dup(r.describe());
  });
}

void fg_gts_free(fg_gts* g) { delete g; }

fg_status fg_gts_print(const fg_gts* g, char** out) {
  return guard([&] {
    require(g, "system");
    require(out, "out");
    *out = dup(print_model(plain_document(g->gts)));
  });
}

fg_status fg_gts_with_grid(fg_gts* g, int size) {
  return guard([&] {
    require(g, "system");
    g->gts = with_grid(g->gts, size);
  });
}

fg_status fg_gts_with_rates(fg_gts* g, const char* rates) {
  return guard([&] {
    require(g, "system");
    require(rates, "rates");
    g->gts = with_rates(g->gts, parse_rates(rates));
  });
}

fg_status fg_gts_generate_init(const fg_gts* g, const char* init, int grid, uint64_t seed, fg_graph** out) {
  return guard([&] {
    require(g, "system");
    require(init, "init");
    require(out, "out");
    auto spec = parse_init_spec(init);
    spec.grid = grid;
    spec.seed = seed;
    *out = new fg_graph{generate_init(spec, g->gts.types)};
  });
}

void fg_graph_free(fg_graph* g) { delete g; }

size_t fg_graph_node_count(const fg_graph* g) { return g ? g->graph.nodes().size() : 0; }

size_t fg_graph_edge_count(const fg_graph* g) { return g ? g->graph.edges().size() : 0; }

static SimConfig sim_config(const fg_sim_options& o) {
  SimConfig cfg;
  cfg.horizon = o.horizon;
  if (o.max_events) cfg.max_events = o.max_events;
  cfg.seed = o.seed;
  cfg.runs = o.runs;
  cfg.threads = o.threads;
  return cfg;
}

fg_status fg_simulate(const fg_gts* g, const fg_graph* init, const fg_sim_options* opts, fg_trajectories** out) {
  return guard([&] {
    require(g, "system");
    require(init, "initial state");
    require(opts, "options");
    require(out, "out");
    *out = new fg_trajectories{simulate(g->gts, init->graph, sim_config(*opts))};
  });
}

void fg_trajectories_free(fg_trajectories* t) { delete t; }

size_t fg_trajectories_count(const fg_trajectories* t) { return t ? t->runs.size() : 0; }

fg_status fg_trajectories_events_csv(const fg_trajectories* t, char** out) {
  return guard([&] {
    require(t, "trajectories");
    require(out, "out");
    std::ostringstream os;
    write_events_csv(os, t->runs);
    *out = dup(os.str());
  });
}

fg_status fg_trajectories_observables_csv(const fg_trajectories* t, const char* node_type, const char* attr,
                                          char** out) {
  return guard([&] {
    require(t, "trajectories");
    require(node_type, "node type");
    require(attr, "attribute");
    require(out, "out");
    std::ostringstream os;
    write_observables_csv(os, t->runs, node_type, attr);
    *out = dup(os.str());
  });
}

fg_status fg_compare(const fg_model* m, const fg_compare_options* o, int* relevant, char** report, char** summary) {
  return guard([&] {
    require(m, "model");
    require(o, "options");
    require(o->init, "init");
    require(o->observable, "observable");
    require(relevant, "relevant");
    require(report, "report");
    require(summary, "summary");
    const auto& fm = m->doc.model;
    auto prepare = [&](const char* feats) {
      GTS g = derive_variant(fm, features(feats));
      if (o->grid) g = with_grid(g, o->grid);
      if (o->rates) g = with_known_rates(g, parse_rates(o->rates));
      return g;
    };
    if (o->rates) {
      for (const auto& [name, v] : parse_rates(o->rates))
        if (!fm.model.rule(name)) throw Error(ErrorKind::Consistency, "no rule named '" + name + "'");
    }
    const GTS base = prepare(o->base);
    const GTS a = prepare(o->features_a);
    const GTS b = prepare(o->features_b);
    const auto wa = check_extension(base, a);
    const auto wb = check_extension(base, b);
    const auto p = parse_observable(o->observable, base.types);

    auto spec = parse_init_spec(o->init);
    spec.seed = o->sim.seed;
    auto init_of = [&](const GTS& g) {
      // Links only where the variant has them; the draws before the links
      // are shared so both variants start from the same agents.
      InitSpec s = spec;
      if (!g.types.edge_type("link")) s.network = InitSpec::Network::None;
      return generate_init(s, g.types);
    };
    SimConfig cfg = sim_config(o->sim);
    const auto runs_a = simulate(a, init_of(a), cfg);
    cfg.seed = o->sim.seed + o->sim.runs;
    const auto runs_b = simulate(b, init_of(b), cfg);
    auto r = compare_variants(runs_a, runs_b, wa, wb, p, o->alpha);
    *relevant = r.relevant ? 1 : 0;
    *report = dup(r.describe());
    *summary = dup(r.summary_line());
  });
}

}  // extern "C"
