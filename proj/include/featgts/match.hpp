#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <vector>

#include "featgts/pattern.hpp"

namespace featgts {

/// Mutable, indexed view of an instance graph used by the matcher and the
/// simulator. Values, types and attribute names are interned to integers;
/// nodes are bucketed by type and by (type, attribute, value).
///
/// Not copyable: the bucket comparators refer to the id table.
class HostIndex {
 public:
  explicit HostIndex(const InstanceGraph& g);
  HostIndex(const HostIndex&) = delete;
  HostIndex& operator=(const HostIndex&) = delete;
  HostIndex(HostIndex&&) = default;
  HostIndex& operator=(HostIndex&&) = default;

  InstanceGraph to_graph() const;

  struct IdLess {
    const std::vector<std::string>* ids;
    bool operator()(int a, int b) const { return (*ids)[a] < (*ids)[b]; }
  };
  using NodeSet = std::set<int, IdLess>;

  // Interning. Lookups return -1 when the name or value never occurred.
  int type_id(const std::string& name) const;
  int slot_id(const std::string& name) const;
  std::int64_t value_code(const Value& v) const;
  int intern_type(const std::string& name);
  int intern_slot(const std::string& name);
  std::int64_t intern_value(const Value& v);
  const Value& value(std::int64_t code) const { return values_[code]; }
  const std::string& type_name(int t) const { return types_[t]; }
  const std::string& slot_name(int s) const { return slots_[s]; }

  // Nodes.
  int node_count() const { return static_cast<int>(node_type_.size()); }
  bool node_alive(int n) const { return node_alive_[n]; }
  const std::string& node_id(int n) const { return (*node_ids_)[n]; }
  int node_type(int n) const { return node_type_[n]; }
  int find_node(const std::string& id) const;
  /// Interned attribute code, or -1 when the node has no such attribute.
  std::int64_t attr(int n, int slot) const;
  const std::vector<std::pair<int, std::int64_t>>& attrs(int n) const { return node_attrs_[n]; }

  // Edges.
  int edge_count() const { return static_cast<int>(edge_type_.size()); }
  bool edge_alive(int e) const { return edge_alive_[e]; }
  const std::string& edge_id(int e) const { return edge_ids_[e]; }
  int edge_type(int e) const { return edge_type_[e]; }
  int edge_source(int e) const { return edge_src_[e]; }
  int edge_target(int e) const { return edge_tgt_[e]; }
  int find_edge(const std::string& id) const;
  const std::vector<int>& out_edges(int n) const { return out_[n]; }
  const std::vector<int>& in_edges(int n) const { return in_[n]; }

  // Buckets; empty set when nothing qualifies.
  const NodeSet& nodes_of_type(int type) const;
  const NodeSet& nodes_with(int type, int slot, std::int64_t code) const;
  /// Alive nodes of `type` carrying attribute `slot`, whatever its value.
  std::size_t nodes_having(int type, int slot) const;

  // Mutation.
  void set_attr(int n, int slot, std::int64_t code);
  int add_node(const std::string& id, int type, std::vector<std::pair<int, std::int64_t>> attrs);
  void remove_node(int n);
  int add_edge(const std::string& id, int type, int src, int tgt);
  void remove_edge(int e);

  /// Ids not currently in use, taken from a deterministic counter.
  std::string fresh_node_id();
  std::string fresh_edge_id();

 private:
  struct BucketKey {
    int type;
    int slot;
    std::int64_t code;
    auto operator<=>(const BucketKey&) const = default;
  };

  NodeSet& bucket(std::map<BucketKey, NodeSet>& m, const BucketKey& k);
  NodeSet& type_bucket(int type);

  std::vector<std::string> types_;
  std::map<std::string, int> type_ids_;
  std::vector<std::string> slots_;
  std::map<std::string, int> slot_ids_;
  std::vector<Value> values_;
  std::map<Value, std::int64_t> value_ids_;

  std::unique_ptr<std::vector<std::string>> node_ids_;
  std::map<std::string, int> node_lookup_;
  std::vector<int> node_type_;
  std::vector<std::vector<std::pair<int, std::int64_t>>> node_attrs_;
  std::vector<bool> node_alive_;
  std::vector<std::vector<int>> out_;
  std::vector<std::vector<int>> in_;

  std::vector<std::string> edge_ids_;
  std::map<std::string, int> edge_lookup_;
  std::vector<int> edge_type_;
  std::vector<int> edge_src_;
  std::vector<int> edge_tgt_;
  std::vector<bool> edge_alive_;

  std::map<int, NodeSet> by_type_;
  std::map<BucketKey, NodeSet> by_attr_;
  std::map<std::pair<int, int>, std::size_t> slot_count_;
  NodeSet empty_;

  std::uint64_t fresh_node_ = 0;
  std::uint64_t fresh_edge_ = 0;
};

/// A pattern compiled against one HostIndex, whose tables it extends with any
/// names and values it mentions. Pattern nodes and edges are numbered in id
/// order; variables in name order.
class CompiledPattern {
 public:
  CompiledPattern(const Pattern& p, HostIndex& host);

  struct AttrConstraint {
    int slot;
    std::int64_t code;  // constants only
    int var;            // variable index, or -1 for a constant
  };
  struct NodeSpec {
    std::string id;
    int type;
    std::vector<AttrConstraint> attrs;
  };
  struct EdgeSpec {
    std::string id;
    int type;
    int src;
    int tgt;
  };

  const std::vector<NodeSpec>& nodes() const { return nodes_; }
  const std::vector<EdgeSpec>& edges() const { return edges_; }
  const std::vector<std::string>& variables() const { return vars_; }
  /// False when the pattern uses a builtin and therefore can never match.
  bool matchable() const { return matchable_; }

 private:
  std::vector<NodeSpec> nodes_;
  std::vector<EdgeSpec> edges_;
  std::vector<std::string> vars_;
  bool matchable_ = true;
};

/// One injective occurrence of a compiled pattern, in host indices.
struct Assignment {
  std::vector<int> nodes;                // per pattern node
  std::vector<int> edges;                // per pattern edge
  std::vector<std::int64_t> bindings;    // per variable
};

/// Enumerates occurrences in deterministic order. The visitor returns false
/// to stop early.
void for_each_occurrence(const CompiledPattern& p, const HostIndex& host,
                         const std::function<bool(const Assignment&)>& visit);

std::uint64_t count_occurrences(const CompiledPattern& p, const HostIndex& host);

/// Whether `a` is an occurrence of `p`, checked directly without search.
bool is_occurrence(const CompiledPattern& p, const HostIndex& host, const Assignment& a);

}  // namespace featgts
