#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rfeas/expr.hpp"

namespace rfeas {

enum class Role { Uncertain, Control, Design };

const char* role_keyword(Role role) noexcept;

struct VariableSpec {
  std::string name;
  Role role = Role::Uncertain;
  double lo = 0.0;  // uncertain / control
  double hi = 0.0;
  double fixed_value = 0.0;  // design
};

/// A process constraint g(x) <= 0.
struct Constraint {
  std::string label;
  Expr g;
};

struct Problem {
  std::string name = "unnamed";
  std::vector<VariableSpec> variables;
  std::vector<Constraint> constraints;
  double alpha = 1.0;
  /// Non-fatal findings from validation (e.g. declared but unused variables).
  std::vector<std::string> warnings;

  const VariableSpec* find(std::string_view name) const;
  std::vector<const VariableSpec*> with_role(Role role) const;
  bool has_controls() const;
  /// Fixed values of all design variables.
  Env design_values() const;
};

/// Parses and validates a problem file.
Problem parse_problem(std::string_view text);

/// Parses a single expression. Errors are reported on line 1.
Expr parse_expr(std::string_view text);

/// Text that parses back to an equivalent problem. Comments are not kept.
std::string emit_problem(const Problem& p);

/// Checks the invariants parse_problem enforces; for programmatically built
/// problems. Refreshes p.warnings.
void validate(Problem& p);

/// Field-by-field equality with bitwise numbers and structural expressions.
bool same_problem(const Problem& a, const Problem& b);

}  // namespace rfeas
