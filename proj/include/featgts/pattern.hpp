#pragma once

#include <map>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include "featgts/graph.hpp"

namespace featgts {

enum class Builtin { IncX, DecX, IncY, DecY };

std::string to_string(Builtin fn);
std::optional<Builtin> builtin_from_name(const std::string& name);
/// Moves a cell one step on the torus of the given size.
Cell apply_builtin(Builtin fn, Cell c, int grid_size);

/// What a rule says about one attribute of a pattern node.
class AttrTerm {
 public:
  struct Constant {
    Value value;
    bool operator==(const Constant&) const = default;
  };
  struct Variable {
    std::string name;
    bool operator==(const Variable&) const = default;
  };
  struct BuiltinApp {
    Builtin fn;
    std::string var;
    bool operator==(const BuiltinApp&) const = default;
  };

  AttrTerm() = default;
  AttrTerm(Constant c) : v_(std::move(c)) {}
  AttrTerm(Variable v) : v_(std::move(v)) {}
  AttrTerm(BuiltinApp b) : v_(std::move(b)) {}

  static AttrTerm constant(Value v) { return Constant{std::move(v)}; }
  static AttrTerm variable(std::string name) { return Variable{std::move(name)}; }
  static AttrTerm builtin(Builtin fn, std::string var) { return BuiltinApp{fn, std::move(var)}; }

  const Constant* as_constant() const { return std::get_if<Constant>(&v_); }
  const Variable* as_variable() const { return std::get_if<Variable>(&v_); }
  const BuiltinApp* as_builtin() const { return std::get_if<BuiltinApp>(&v_); }

  /// The variable this term reads, if any.
  const std::string* variable_name() const;

  bool operator==(const AttrTerm&) const = default;

 private:
  std::variant<Constant, Variable, BuiltinApp> v_;
};

/// Surface syntax: `S`, `3`, `(1,2)`, `?x`, `incY(?x)`.
std::string to_string(const AttrTerm& t);

struct PatternNode {
  std::string type;
  std::map<std::string, AttrTerm> attrs;  // partial: unmentioned attributes are unconstrained
  bool operator==(const PatternNode&) const = default;
};

/// An instance graph whose attribute positions hold terms instead of values.
struct Pattern {
  std::map<std::string, PatternNode> nodes;
  std::map<std::string, Edge> edges;

  /// Every attribute becomes a constant term.
  static Pattern from_graph(const InstanceGraph& g);

  std::set<std::string> variables() const;
  bool operator==(const Pattern&) const = default;
};

/// Pattern analogue of `restrict`: drops nodes, edges and attribute entries
/// whose types are not in `sub`.
Pattern restrict(const Pattern& p, const TypeGraph& sub);

}  // namespace featgts
