#pragma once

#include <map>
#include <string>
#include <utility>
#include <vector>

#include "featgts/feature.hpp"
#include "featgts/rule.hpp"

namespace featgts {

/// Evidence that `ext` extends `base`: the type graph is included by name and
/// every base rule has a same-named ext rule that projects back onto it.
struct ExtensionWitness {
  GTS base;
  GTS ext;
  std::map<std::string, std::string> rule_correspondence;  // base rule -> ext rule
};

/// Throws Error(Consistency) naming the first failed condition.
ExtensionWitness check_extension(const GTS& base, const GTS& ext);

struct ConservativityReport {
  bool conservative = true;
  std::vector<std::pair<std::string, Effect>> offending_rules;  // with projected effect
  /// "conservative" or "NOT conservative: desert (deletes link, creates link)".
  std::string describe() const;
};

/// An extension is conservative when every ext rule, restricted to the base
/// types, has the effect of its base counterpart, or no effect if it is new.
ConservativityReport is_conservative(const ExtensionWitness& w);

/// Composes two extensions of `base`: type graphs are united over the shared
/// base, corresponding rules are amalgamated over their base rule, and rules
/// new to one side are copied. Throws Error(Consistency) on clashes.
GTS merge(const GTS& base, const GTS& ext1, const GTS& ext2);

/// Builds the variant for `c` by merging per-feature extensions along the
/// feature tree, starting from the root model.
GTS merge_along_tree(const FeatureModel& fm, const Configuration& c);

}  // namespace featgts
