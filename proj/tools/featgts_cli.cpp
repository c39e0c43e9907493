// featgts command-line tool. Talks to the library only through the C API.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>

#include "CLI11.hpp"
#include "featgts/featgts.h"

namespace {

constexpr int kUsage = 64;

struct Failure {
  int code;
  std::string message;
};

void check(fg_status s) {
  if (s != FG_OK) throw Failure{s, fg_last_error()};
}

struct StringDeleter {
  void operator()(char* s) const { fg_string_free(s); }
};
using CString = std::unique_ptr<char, StringDeleter>;

template <class T, void (*Free)(T*)>
struct Deleter {
  void operator()(T* p) const { Free(p); }
};
using Model = std::unique_ptr<fg_model, Deleter<fg_model, fg_model_free>>;
using System = std::unique_ptr<fg_gts, Deleter<fg_gts, fg_gts_free>>;
using Graph = std::unique_ptr<fg_graph, Deleter<fg_graph, fg_graph_free>>;
using Runs = std::unique_ptr<fg_trajectories, Deleter<fg_trajectories, fg_trajectories_free>>;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Failure{FG_ERR_RUNTIME, "cannot read '" + path + "'"};
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_out(const std::string& path, const std::string& text) {
  if (path == "-") {
    std::cout << text << std::flush;
    return;
  }
  std::ofstream out(path, std::ios::binary);
  if (!out || !(out << text)) throw Failure{FG_ERR_RUNTIME, "cannot write '" + path + "'"};
}

Model load(const std::string& path) {
  const std::string text = read_file(path);
  fg_model* m = nullptr;
  check(fg_model_parse(text.data(), text.size(), &m));
  return Model(m);
}

std::uint64_t effective_seed(std::uint64_t seed) {
  const char* env = std::getenv("FEATGTS_SEED");
  if (!env || !*env) return seed;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(env, &end, 10);
  if (*end) throw Failure{kUsage, std::string("FEATGTS_SEED is not an integer: ") + env};
  return v;
}

struct SimArgs {
  std::string features;
  std::string init;
  int grid = 0;
  std::string rates;
  double horizon = 100.0;
  std::uint64_t max_events = 0;
  std::size_t runs = 1;
  std::uint64_t seed = 0;
  unsigned threads = 0;
};

void add_sim_options(CLI::App* cmd, SimArgs& a) {
  cmd->add_option("--init", a.init, "N,k[,p|ring-d]: agents, infected, network")->required();
  cmd->add_option("--grid", a.grid, "grid size for location models");
  cmd->add_option("--rates", a.rates, "rule rates as name=value,...");
  cmd->add_option("--horizon", a.horizon, "simulated time limit");
  cmd->add_option("--max-events", a.max_events, "event limit per run");
  cmd->add_option("--runs", a.runs, "number of runs");
  cmd->add_option("--seed", a.seed, "seed of run 0; FEATGTS_SEED overrides");
  cmd->add_option("--threads", a.threads, "worker threads, 0 for all cores");
}

fg_sim_options sim_options(const SimArgs& a) {
  return fg_sim_options{a.horizon, a.max_events, effective_seed(a.seed), a.runs, a.threads};
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Feature-oriented graph transformation models: variants, merges, simulation"};
  app.require_subcommand(1);
  app.set_version_flag("--version", fg_version());

  std::string model, out = "-";

  auto* validate = app.add_subcommand("validate", "parse and check a model");
  validate->add_option("model", model)->required();

  auto* configs = app.add_subcommand("configs", "list valid configurations");
  configs->add_option("model", model)->required();
  configs->add_option("--out", out, "output file, - for stdout");

  std::string feats;
  auto* derive = app.add_subcommand("derive", "write the variant of a configuration");
  derive->add_option("model", model)->required();
  derive->add_option("--features", feats, "comma-separated configuration")->required();
  derive->add_option("--out", out, "output file, - for stdout");

  std::string left, right;
  auto* merge = app.add_subcommand("merge", "merge two variants over their common base");
  merge->add_option("model", model)->required();
  merge->add_option("--left", left, "features of the first extension")->required();
  merge->add_option("--right", right, "features of the second extension")->required();
  merge->add_option("--out", out, "output file, - for stdout");

  std::string base, ext;
  auto* conservative = app.add_subcommand("check-conservative", "check that an extension adds no effects on base types");
  conservative->add_option("model", model)->required();
  conservative->add_option("--base", base, "base configuration")->required();
  conservative->add_option("--ext", ext, "extended configuration")->required();

  SimArgs sim;
  std::string observe = "Agent.s";
  auto* simulate = app.add_subcommand("simulate", "run stochastic simulations, writing events.csv and observables.csv");
  simulate->add_option("model", model)->required();
  simulate->add_option("--features", sim.features, "comma-separated configuration")->required();
  add_sim_options(simulate, sim);
  simulate->add_option("--observe", observe, "attribute counted in observables.csv");
  simulate->add_option("--out", out, "output directory, - for stdout");

  std::string feats_b, observable = "Agent.s=R";
  double alpha = 0.05;
  auto* compare = app.add_subcommand("compare", "test whether two variants behave differently on a common base");
  compare->add_option("model", model)->required();
  compare->add_option("--features-a", sim.features, "first configuration")->required();
  compare->add_option("--features-b", feats_b, "second configuration")->required();
  compare->add_option("--base", base, "common base configuration")->required();
  add_sim_options(compare, sim);
  compare->add_option("--observable", observable, "Type.attr=value counted in final states");
  compare->add_option("--alpha", alpha, "significance level")->check(CLI::Range(0.0, 1.0));
  compare->add_option("--out", out, "report file, - for stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::Success& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kUsage;
  }

  try {
    if (*validate) {
      load(model);
      std::cout << model << ": ok\n";
      return 0;
    }
    if (*configs) {
      auto m = load(model);
      char* s = nullptr;
      check(fg_model_configurations(m.get(), &s));
      write_out(out, CString(s).get());
      return 0;
    }
    if (*derive) {
      auto m = load(model);
      fg_gts* g = nullptr;
      check(fg_model_derive(m.get(), feats.c_str(), &g));
      System sys(g);
      char* s = nullptr;
      check(fg_gts_print(sys.get(), &s));
      write_out(out, CString(s).get());
      return 0;
    }
    if (*merge) {
      auto m = load(model);
      fg_gts* g = nullptr;
      check(fg_model_merge(m.get(), left.c_str(), right.c_str(), &g));
      System sys(g);
      char* s = nullptr;
      check(fg_gts_print(sys.get(), &s));
      write_out(out, CString(s).get());
      return 0;
    }
    if (*conservative) {
      auto m = load(model);
      int ok = 0;
      char* s = nullptr;
      check(fg_model_check_conservative(m.get(), base.c_str(), ext.c_str(), &ok, &s));
      std::cout << CString(s).get() << "\n";
      return ok ? 0 : 1;
    }
    if (*simulate) {
      const auto dot = observe.find('.');
      if (dot == std::string::npos) throw Failure{kUsage, "--observe expects Type.attr"};
      auto m = load(model);
      fg_gts* g = nullptr;
      check(fg_model_derive(m.get(), sim.features.c_str(), &g));
      System sys(g);
      if (sim.grid) check(fg_gts_with_grid(sys.get(), sim.grid));
      if (!sim.rates.empty()) check(fg_gts_with_rates(sys.get(), sim.rates.c_str()));
      const auto opts = sim_options(sim);
      fg_graph* init = nullptr;
      check(fg_gts_generate_init(sys.get(), sim.init.c_str(), 0, opts.seed, &init));
      Graph graph(init);
      fg_trajectories* t = nullptr;
      check(fg_simulate(sys.get(), graph.get(), &opts, &t));
      Runs runs(t);
      char* events = nullptr;
      check(fg_trajectories_events_csv(runs.get(), &events));
      CString ev(events);
      char* obs = nullptr;
      check(fg_trajectories_observables_csv(runs.get(), observe.substr(0, dot).c_str(),
                                            observe.substr(dot + 1).c_str(), &obs));
      CString ob(obs);
      if (out == "-") {
        write_out(out, std::string(ev.get()) + ob.get());
      } else {
        std::error_code ec;
        std::filesystem::create_directories(out, ec);
        if (ec) throw Failure{FG_ERR_RUNTIME, "cannot create '" + out + "': " + ec.message()};
        write_out((std::filesystem::path(out) / "events.csv").string(), ev.get());
        write_out((std::filesystem::path(out) / "observables.csv").string(), ob.get());
      }
      return 0;
    }
    if (*compare) {
      auto m = load(model);
      fg_compare_options o{};
      o.features_a = sim.features.c_str();
      o.features_b = feats_b.c_str();
      o.base = base.c_str();
      o.init = sim.init.c_str();
      o.grid = sim.grid;
      o.rates = sim.rates.empty() ? nullptr : sim.rates.c_str();
      o.observable = observable.c_str();
      o.alpha = alpha;
      o.sim = sim_options(sim);
      int relevant = 0;
      char* report = nullptr;
      char* summary = nullptr;
      check(fg_compare(m.get(), &o, &relevant, &report, &summary));
      CString r(report), s(summary);
      write_out(out, std::string(r.get()) + s.get() + "\n");
      return relevant ? 2 : 0;
    }
  } catch (const Failure& f) {
    std::cerr << "featgts: " << f.message << "\n";
    return f.code;
  }
  return kUsage;
}
