#pragma once

#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "featgts/dsl.hpp"
#include "featgts/feature.hpp"

namespace fixtures {

inline std::string read(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string source_path(const std::string& rel) { return std::string(FEATGTS_SOURCE_DIR) + "/" + rel; }

inline const featgts::ModelDocument& sir_document() {
  static const featgts::ModelDocument doc = [] {
    auto r = featgts::parse_model(read(source_path("models/sir.fgts")));
    if (!r.ok()) throw std::runtime_error("bundled model does not parse: " + r.diagnostics.front().to_string());
    return *r.document;
  }();
  return doc;
}

inline const featgts::FeatureModel& sir() { return sir_document().model; }

inline featgts::GTS variant(const featgts::Configuration& c) { return featgts::derive_variant(sir(), c); }

inline const featgts::GTS& basic() {
  static const featgts::GTS g = variant({"SIR"});
  return g;
}
inline const featgts::GTS& location() {
  static const featgts::GTS g = variant({"SIR", "location"});
  return g;
}
inline const featgts::GTS& network() {
  static const featgts::GTS g = variant({"SIR", "network"});
  return g;
}
inline const featgts::GTS& dynamics() {
  static const featgts::GTS g = variant({"SIR", "network", "dynamics"});
  return g;
}
inline const featgts::GTS& full() {
  static const featgts::GTS g = variant({"SIR", "location", "network", "dynamics"});
  return g;
}

inline void agent(featgts::InstanceGraph& g, const std::string& id, const std::string& s) {
  g.add_node(id, "Agent", {{"s", featgts::Value{s}}});
}

inline void agent(featgts::InstanceGraph& g, const std::string& id, const std::string& s, int x, int y) {
  g.add_node(id, "Agent", {{"s", featgts::Value{s}}, {"l", featgts::Value{featgts::Cell{x, y}}}});
}

inline const featgts::Rule& rule(const featgts::GTS& g, const std::string& name) {
  const auto* r = g.rule(name);
  if (!r) throw std::runtime_error("no rule " + name);
  return *r;
}

}  // namespace fixtures
