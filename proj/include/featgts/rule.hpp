#pragma once

#include <map>
#include <string>
#include <vector>

#include "featgts/graph.hpp"
#include "featgts/match.hpp"
#include "featgts/pattern.hpp"

namespace featgts {

/// A graph transformation rule. Ids present in both sides are preserved;
/// lhs-only elements are deleted and rhs-only elements created. `rate` is the
/// per-match propensity coefficient used by the simulator.
struct Rule {
  std::string name;
  Pattern lhs;
  Pattern rhs;
  double rate = 1.0;
  bool operator==(const Rule&) const = default;
};

/// Well-typedness of a rule over `tg`; empty when valid.
std::vector<std::string> rule_violations(const Rule& r, const TypeGraph& tg);

/// A graph transformation system: a type graph and uniquely named rules.
struct GTS {
  std::string name;
  TypeGraph types;
  std::vector<Rule> rules;

  const Rule* rule(const std::string& rule_name) const;
  bool operator==(const GTS&) const = default;
};

std::vector<std::string> gts_violations(const GTS& g);

/// Type graph equality plus rule-by-rule isomorphism and equal rates.
bool isomorphic(const GTS& a, const GTS& b);

/// Isomorphism of the (lhs, rhs) pattern pairs, up to renaming of element
/// ids and variables. Rates are not compared.
bool isomorphic(const Rule& a, const Rule& b);

struct Match {
  GraphMorphism morphism;
  std::map<std::string, Value> binding;
  bool operator==(const Match&) const = default;
};

std::vector<Match> find_matches(const Rule& r, const InstanceGraph& host);

/// Double-pushout application. Throws Error(Runtime) when `m` is not a match
/// of `r` in `host` or the dangling condition fails.
InstanceGraph apply(const Rule& r, const InstanceGraph& host, const Match& m, const TypeGraph& tg);

/// What a rule does at the type level.
struct Effect {
  struct AttrChange {
    std::string node_type;
    std::string attr;
    std::string before;  // lhs term, "_" when unconstrained
    std::string after;
    auto operator<=>(const AttrChange&) const = default;
  };

  std::vector<std::string> deleted_node_types;  // sorted multisets
  std::vector<std::string> created_node_types;
  std::vector<std::string> deleted_edge_types;
  std::vector<std::string> created_edge_types;
  std::vector<AttrChange> attr_changes;  // sorted, unique

  bool empty() const;
  /// e.g. "deletes link, creates link"; "no effect" when empty.
  std::string describe() const;
  bool operator==(const Effect&) const = default;
};

Effect effect_of(const Rule& r);

/// Restricts both sides of `r` to `base`. Throws Error(Consistency) unless
/// `base` is included in `rule_types`.
Rule project_rule(const Rule& r, const TypeGraph& rule_types, const TypeGraph& base);

/// A rule compiled against one HostIndex for repeated in-place application.
class CompiledRule {
 public:
  CompiledRule(const Rule& r, const TypeGraph& tg, HostIndex& host);

  const Rule& rule() const { return *rule_; }
  const CompiledPattern& lhs() const { return lhs_; }

  /// Validates the occurrence and the dangling condition, then rewrites
  /// `host` in place. Throws Error(Runtime) on failure.
  void apply(HostIndex& host, const Assignment& a) const;

 private:
  struct Term {
    enum class Kind { Constant, Variable, Builtin } kind;
    std::int64_t code = -1;
    int var = -1;
    Builtin fn = Builtin::IncX;
    int grid = 0;
  };
  struct Update {
    int slot;
    Term term;
  };
  struct Created {
    std::string pattern_id;
    int type;
    std::vector<Update> attrs;
  };
  struct NodeRef {
    bool created;
    int index;
  };
  struct CreatedEdge {
    int type;
    NodeRef src;
    NodeRef tgt;
  };

  std::int64_t eval(const Term& t, const Assignment& a, HostIndex& host) const;

  const Rule* rule_;
  CompiledPattern lhs_;
  std::vector<int> deleted_nodes_;
  std::vector<int> deleted_edges_;
  std::vector<std::pair<int, Update>> updates_;
  std::vector<Created> created_nodes_;
  std::vector<CreatedEdge> created_edges_;
};

}  // namespace featgts
