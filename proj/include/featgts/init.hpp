#pragma once

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "featgts/graph.hpp"
#include "featgts/sim.hpp"

namespace featgts {

/// Initial population for the SIR family: `Agent` nodes with attribute `s`,
/// optionally placed on the grid attribute `l` and linked by `link` edges.
struct InitSpec {
  enum class Network { None, Uniform, Ring };

  std::size_t population = 0;
  std::size_t infected = 0;
  int grid = 0;  // 0: use the type graph's grid size
  Network network = Network::None;
  double p = 0.0;     // Uniform: probability of a link per unordered pair
  std::size_t d = 0;  // Ring: links to the next d agents
  std::uint64_t seed = 0;
};

/// Parses "N,k", "N,k,p" or "N,k,ring-d". Throws Error(Runtime).
InitSpec parse_init_spec(const std::string& text);

/// Deterministic under `spec.seed`. Infected agents are drawn uniformly,
/// then cells, then links. Throws Error(Runtime) when the init spec asks for
/// types the graph lacks or is inconsistent.
InstanceGraph generate_init(const InitSpec& spec, const TypeGraph& tg);

/// run,time,rule,nodes with nodes joined by ';'.
void write_events_csv(std::ostream& os, const std::vector<Trajectory>& runs);

/// run,time and one column per domain value of `node_type.attr`.
void write_observables_csv(std::ostream& os, const std::vector<Trajectory>& runs, const std::string& node_type,
                           const std::string& attr);

}  // namespace featgts
