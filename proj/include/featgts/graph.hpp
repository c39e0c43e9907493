#pragma once

#include <compare>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace featgts {

/// A position on the G x G torus used by the location attribute.
struct Cell {
  int x = 0;
  int y = 0;
  auto operator<=>(const Cell&) const = default;
};

/// Attribute value: a symbol, an integer, or a grid cell.
using Value = std::variant<std::string, std::int64_t, Cell>;

std::string to_string(const Value& v);

/// The set of values an attribute may take.
class AttrDomain {
 public:
  enum class Kind { Symbols, IntRange, Grid };

  static AttrDomain symbols(std::vector<std::string> names);
  static AttrDomain int_range(std::int64_t lo, std::int64_t hi);
  static AttrDomain grid(int size);

  Kind kind() const { return kind_; }
  const std::vector<std::string>& symbol_names() const { return symbols_; }
  std::int64_t lo() const { return lo_; }
  std::int64_t hi() const { return hi_; }
  int grid_size() const { return static_cast<int>(hi_); }

  bool empty() const;
  bool contains(const Value& v) const;
  /// All values in canonical order (symbols in declaration order).
  std::vector<Value> values() const;
  std::string to_string() const;

  bool operator==(const AttrDomain&) const = default;

 private:
  Kind kind_ = Kind::Symbols;
  std::vector<std::string> symbols_;
  std::int64_t lo_ = 0;
  std::int64_t hi_ = 0;
};

struct EdgeType {
  std::string name;
  std::string source;
  std::string target;
  auto operator<=>(const EdgeType&) const = default;
};

struct AttrDecl {
  std::string node_type;
  std::string name;
  AttrDomain domain;
  bool operator==(const AttrDecl&) const = default;
};

/// Node types, edge types and attribute declarations of a model. Entries are
/// kept sorted by name so that equality is set equality.
class TypeGraph {
 public:
  TypeGraph() = default;
  /// Throws Error(Consistency) when an invariant is broken.
  TypeGraph(std::vector<std::string> node_types, std::vector<EdgeType> edge_types,
            std::vector<AttrDecl> attrs);

  /// Invariant violations of the given declarations; empty when valid.
  static std::vector<std::string> violations(const std::vector<std::string>& node_types,
                                             const std::vector<EdgeType>& edge_types,
                                             const std::vector<AttrDecl>& attrs);

  const std::vector<std::string>& node_types() const { return node_types_; }
  const std::vector<EdgeType>& edge_types() const { return edge_types_; }
  const std::vector<AttrDecl>& attrs() const { return attrs_; }

  bool has_node_type(const std::string& name) const;
  const EdgeType* edge_type(const std::string& name) const;
  const AttrDecl* attr(const std::string& node_type, const std::string& name) const;
  std::vector<const AttrDecl*> attrs_of(const std::string& node_type) const;

  bool operator==(const TypeGraph&) const = default;

 private:
  std::vector<std::string> node_types_;
  std::vector<EdgeType> edge_types_;
  std::vector<AttrDecl> attrs_;
};

/// Why `base` is not included by name in `ext`, or nullopt if it is.
std::optional<std::string> inclusion_failure(const TypeGraph& base, const TypeGraph& ext);
inline bool is_included(const TypeGraph& base, const TypeGraph& ext) {
  return !inclusion_failure(base, ext).has_value();
}

struct Node {
  std::string type;
  std::map<std::string, Value> attrs;
  bool operator==(const Node&) const = default;
};

struct Edge {
  std::string type;
  std::string source;
  std::string target;
  bool operator==(const Edge&) const = default;
};

/// A concrete world state. Parallel edges are allowed.
class InstanceGraph {
 public:
  void add_node(const std::string& id, std::string type, std::map<std::string, Value> attrs = {});
  void add_edge(const std::string& id, std::string type, std::string source, std::string target);
  void remove_node(const std::string& id);
  void remove_edge(const std::string& id);
  void set_attr(const std::string& node, const std::string& attr, Value v);

  const std::map<std::string, Node>& nodes() const { return nodes_; }
  const std::map<std::string, Edge>& edges() const { return edges_; }
  const Node* node(const std::string& id) const;
  const Edge* edge(const std::string& id) const;

  bool operator==(const InstanceGraph&) const = default;

 private:
  std::map<std::string, Node> nodes_;
  std::map<std::string, Edge> edges_;
};

struct TypingReport {
  std::vector<std::string> violations;
  bool ok() const { return violations.empty(); }
};

TypingReport check_typing(const InstanceGraph& g, const TypeGraph& tg);

/// Keeps the part of `g` typed over `sub`. `from` is the type graph governing
/// `g`; throws Error(Consistency) unless `sub` is included in it.
InstanceGraph restrict(const InstanceGraph& g, const TypeGraph& from, const TypeGraph& sub);

struct GraphMorphism {
  std::map<std::string, std::string> node_map;
  std::map<std::string, std::string> edge_map;
  bool operator==(const GraphMorphism&) const = default;
};

/// All injective type-, structure- and attribute-preserving morphisms, sorted
/// by the images of the pattern nodes taken in id order.
std::vector<GraphMorphism> find_morphisms(const InstanceGraph& pattern, const InstanceGraph& host);

bool isomorphic(const InstanceGraph& a, const InstanceGraph& b);

}  // namespace featgts
