#pragma once

#include <cstddef>
#include <map>
#include <set>
#include <string>
#include <tuple>
#include <vector>

#include "featgts/rule.hpp"

namespace featgts {

enum class Variability { Root, Mandatory, Optional, Alternative };

struct Feature {
  std::string name;
  std::string parent;  // empty for the root
  Variability kind = Variability::Optional;
  int group = -1;  // alternative group index, Alternative only
  bool operator==(const Feature&) const = default;
};

/// A feature tree with mandatory/optional children and exactly-one groups.
class FeatureDiagram {
 public:
  FeatureDiagram() = default;
  /// Throws Error(Consistency) when the features do not form a valid tree.
  explicit FeatureDiagram(std::vector<Feature> features);

  static std::vector<std::string> violations(const std::vector<Feature>& features);

  /// Declaration order with the root first, except that alternative groups
  /// are gathered at their first member and numbered in order of appearance.
  const std::vector<Feature>& features() const { return features_; }
  const std::string& root() const { return features_.front().name; }
  const Feature* feature(const std::string& name) const;
  std::vector<std::string> children(const std::string& name) const;
  /// Root first, `name` last.
  std::vector<std::string> root_path(const std::string& name) const;
  bool is_ancestor_or_self(const std::string& ancestor, const std::string& name) const;
  std::vector<std::vector<std::string>> groups() const;

  bool operator==(const FeatureDiagram&) const = default;

 private:
  std::vector<Feature> features_;
};

using Configuration = std::set<std::string>;

bool is_valid(const FeatureDiagram& fd, const Configuration& c);

/// Valid configurations ordered by size, then by declaration order of their
/// members. Throws Error(Runtime) when the diagram has more than `bound`
/// features.
std::vector<Configuration> valid_configurations(const FeatureDiagram& fd, std::size_t bound = 24);

/// Adds every ancestor of every member.
Configuration upward_closure(const FeatureDiagram& fd, const Configuration& c);

enum class Side { Lhs, Rhs };

/// Explicit feature annotations. Absent entries fall back to a default: the
/// root for types and rules, the enclosing rule's feature for rule elements.
struct FeatureMapping {
  std::map<std::string, std::string> node_types;
  std::map<std::string, std::string> edge_types;
  std::map<std::pair<std::string, std::string>, std::string> attrs;       // (node type, attr)
  std::map<std::string, std::string> rules;
  std::map<std::pair<std::string, std::string>, std::string> rule_nodes;  // (rule, node id)
  std::map<std::pair<std::string, std::string>, std::string> rule_edges;  // (rule, edge id)
  std::map<std::tuple<std::string, Side, std::string, std::string>, std::string> rule_attrs;
  bool operator==(const FeatureMapping&) const = default;
};

/// A feature diagram, the 150% model holding every feature's elements, and
/// the mapping of model elements to features.
struct FeatureModel {
  FeatureDiagram diagram;
  GTS model;
  FeatureMapping mapping;

  const std::string& node_type_feature(const std::string& type) const;
  const std::string& edge_type_feature(const std::string& type) const;
  const std::string& attr_feature(const std::string& node_type, const std::string& attr) const;
  const std::string& rule_feature(const std::string& rule) const;
  const std::string& rule_node_feature(const std::string& rule, const std::string& id) const;
  const std::string& rule_edge_feature(const std::string& rule, const std::string& id) const;
  const std::string& rule_attr_feature(const std::string& rule, Side side, const std::string& node,
                                       const std::string& attr) const;

  bool operator==(const FeatureModel&) const = default;
};

struct ConsistencyReport {
  struct Violation {
    std::string element;
    std::string required;  // empty when not a dependency violation
    std::string detail;
  };
  std::vector<Violation> violations;
  bool ok() const { return violations.empty(); }
  std::string describe() const;
};

ConsistencyReport check_feature_model(const FeatureModel& fm);

/// Filters the 150% model down to the elements whose feature is in `c`.
/// Throws Error(InvalidConfiguration) or Error(Consistency).
GTS derive_variant(const FeatureModel& fm, const Configuration& c);

/// The filtering step of derive_variant without the configuration check, for
/// parent-closed feature sets such as a single root path. Throws
/// Error(Consistency) when the result is ill-typed.
GTS filter_model(const FeatureModel& fm, const Configuration& features);

std::string join(const Configuration& c, const std::string& sep = ",");

}  // namespace featgts
