#pragma once

#include <cstddef>
#include <cstdint>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include "featgts/compose.hpp"
#include "featgts/graph.hpp"
#include "featgts/rule.hpp"

namespace featgts {

struct SimConfig {
  double horizon = 100.0;
  std::uint64_t max_events = 1'000'000;
  std::uint64_t seed = 0;
  std::size_t runs = 1;
  unsigned threads = 0;  // 0: hardware concurrency
};

/// One rule application. `nodes` and `edges` hold the host ids matched by
/// the rule's lhs nodes and edges, in pattern id order.
struct Event {
  double time = 0.0;
  std::string rule;
  std::vector<std::string> nodes;
  std::vector<std::string> edges;
  bool operator==(const Event&) const = default;
};

enum class StopReason { Horizon, MaxEvents, Exhausted };

struct Trajectory {
  std::shared_ptr<const GTS> system;
  double horizon = 0.0;
  InstanceGraph initial;
  std::vector<Event> events;
  InstanceGraph final_state;
  StopReason stop = StopReason::Horizon;
};

/// Gillespie simulation with propensity rate * #matches per rule. Run i uses
/// seed + i; runs execute concurrently and are returned in run order.
/// Throws Error(Runtime) when `init` is ill-typed or the config is invalid.
std::vector<Trajectory> simulate(const GTS& gts, const InstanceGraph& init, const SimConfig& cfg);

/// Replays the events from the initial state and returns the state reached.
/// Throws Error(Runtime) naming the first event that does not apply.
InstanceGraph replay(const Trajectory& t);

/// Replay plus the trajectory invariants: strictly increasing times within
/// the horizon and a final state equal to the replayed one.
void validate(const Trajectory& t);

/// Restricts a trajectory of w.ext to w.base. Events of corresponding rules
/// are renamed and keep their base-typed matches; other events are dropped.
/// Throws Error(Consistency) when the extension is not conservative.
Trajectory project_trajectory(const Trajectory& t, const ExtensionWitness& w);

/// Counts nodes of `node_type` whose `attr` equals `value`.
struct Predicate {
  std::string node_type;
  std::string attr;
  Value value;
};

std::size_t count(const InstanceGraph& g, const Predicate& p);

struct TimeSeries {
  std::string observable;
  std::vector<double> times;
  std::vector<std::size_t> values;
};

/// Sampled at t = 0 and after every event.
TimeSeries observe(const Trajectory& t, const Predicate& p);

/// One series per domain value of the attribute, in domain order.
std::vector<TimeSeries> observe_all(const Trajectory& t, const std::string& node_type, const std::string& attr);

std::string observable_name(const Predicate& p);

// --- Statistics --------------------------------------------------------------

/// Two-sample Kolmogorov-Smirnov statistic sup |F_a - F_b|.
double ks_statistic(std::vector<double> a, std::vector<double> b);

/// Asymptotic critical value c(alpha) * sqrt((n + m) / (n m)).
double ks_threshold(std::size_t n, std::size_t m, double alpha);

struct Summary {
  std::size_t n = 0;
  double mean = 0.0;
  double sd = 0.0;
  double min = 0.0;
  double max = 0.0;
};

Summary summarize(const std::vector<double>& xs);

struct ComparisonReport {
  std::string observable;
  Summary a;
  Summary b;
  double d = 0.0;
  double threshold = 0.0;
  double alpha = 0.05;
  bool relevant = false;

  /// Multi-line human-readable report.
  std::string describe() const;
  /// observable=... D=... threshold=... alpha=... decision=...
  std::string summary_line() const;
};

/// Projects both trajectory sets onto the common base and compares the final
/// values of the observable. Throws Error(Consistency) if the witnesses have
/// different bases or are not conservative, Error(Runtime) for fewer than two
/// runs per side.
ComparisonReport compare_variants(const std::vector<Trajectory>& a, const std::vector<Trajectory>& b,
                                  const ExtensionWitness& wa, const ExtensionWitness& wb, const Predicate& p,
                                  double alpha = 0.05);

// --- Model parameters --------------------------------------------------------

/// Replaces the size of every grid attribute domain.
GTS with_grid(const GTS& g, int size);

/// Overrides rule rates by name. Throws Error(Consistency) for unknown rules
/// or non-positive rates.
GTS with_rates(const GTS& g, const std::map<std::string, double>& rates);

}  // namespace featgts
