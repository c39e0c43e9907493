#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "featgts/error.hpp"
#include "featgts/feature.hpp"

namespace featgts {

/// A parsed `.fgts` file: the feature model plus the defaults block.
struct ModelDocument {
  FeatureModel model;
  std::optional<int> grid;             // size of `grid` domains, 10 when absent
  std::optional<double> default_rate;  // rate of rules that give none, 1 when absent
  bool operator==(const ModelDocument&) const = default;
};

inline constexpr int kDefaultGrid = 10;

struct Diagnostic {
  int line = 0;  // 1-based
  int column = 0;
  std::string message;
  std::vector<std::string> expected;  // sorted, for syntax errors
  /// "3:14: expected one of ';', '@' but found '}'".
  std::string to_string() const;
};

struct ParseResult {
  std::optional<ModelDocument> document;
  ErrorKind kind = ErrorKind::Parse;  // Parse or Consistency when !ok()
  std::vector<Diagnostic> diagnostics;
  bool ok() const { return document.has_value(); }
};

/// Never throws on bad input; syntax and consistency problems come back as
/// diagnostics.
ParseResult parse_model(std::string_view text);

std::string print_model(const ModelDocument& doc);

/// A feature-free document for a single system: implicit root, no
/// annotations, the grid default taken from the type graph.
ModelDocument plain_document(const GTS& g);

}  // namespace featgts
