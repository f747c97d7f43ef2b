#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <set>
#include <span>
#include <string>
#include <string_view>
#include <vector>

namespace rfeas {

/// Variable bindings used for evaluation.
using Env = std::map<std::string, double, std::less<>>;

/// Immutable expression over named real variables.
///
/// Nodes are reference counted and never mutated after construction, so an
/// Expr can be copied freely and shared between threads. Composite region
/// functions reuse subtrees (the same node may be referenced from several
/// parents); the structure is still finite and acyclic.
class Expr {
 public:
  enum class Kind : std::uint8_t {
    Constant,
    Variable,
    Negate,
    Abs,
    Sqrt,
    Add,
    Sub,
    Mul,
    Div,
    Pow,
    Min,
    Max,
  };

  /// The constant 0.
  Expr();

  static Expr constant(double value);
  static Expr variable(std::string name);
  static Expr negate(Expr child);
  static Expr abs(Expr child);
  static Expr sqrt(Expr child);
  static Expr binary(Kind kind, Expr left, Expr right);
  static Expr pow(Expr base, double exponent);
  /// n-ary min / max; requires at least two arguments.
  static Expr min(std::vector<Expr> args);
  static Expr max(std::vector<Expr> args);

  Kind kind() const noexcept;
  /// Constant value, or the exponent of a Pow node.
  double value() const noexcept;
  const std::string& name() const noexcept;
  std::span<const Expr> children() const noexcept;

  bool is_constant() const noexcept { return kind() == Kind::Constant; }
  /// Identity of the underlying node; used to share work between aliases.
  const void* id() const noexcept { return node_.get(); }

 private:
  struct Node;
  explicit Expr(std::shared_ptr<const Node> node) : node_(std::move(node)) {}
  std::shared_ptr<const Node> node_;
};

Expr operator+(Expr a, Expr b);
Expr operator-(Expr a, Expr b);
Expr operator*(Expr a, Expr b);
Expr operator/(Expr a, Expr b);
Expr operator-(Expr a);

/// Exact evaluation. Throws rfeas::Error with UnboundVariable,
/// DivisionByZero, Domain or NonFiniteResult.
double eval(const Expr& e, const Env& env);

/// Replaces bound variables with constants and folds constant subtrees.
Expr substitute(const Expr& e, const Env& bindings);

/// Canonical text in the problem-file expression grammar. Every binary child
/// is parenthesized; the outermost node is not.
std::string to_text(const Expr& e);

/// Names of all variables referenced by e.
std::set<std::string, std::less<>> referenced_variables(const Expr& e);

/// Same node kinds, constants (bitwise), names and shape.
bool structurally_equal(const Expr& a, const Expr& b);

/// Number of distinct nodes (shared subtrees counted once).
std::size_t distinct_node_count(const Expr& e);

/// Flattened, register-based form of an Expr for hot loops.
///
/// Variables are read from a span whose order is given by `slots` at
/// construction. Shared subtrees are computed once per evaluation. Results
/// are bit-identical to eval() because both use the same operation kernels.
class CompiledExpr {
 public:
  CompiledExpr() = default;
  CompiledExpr(const Expr& e, const std::vector<std::string>& slots);

  double operator()(std::span<const double> values) const;

  std::size_t register_count() const noexcept { return code_.size(); }

 private:
  struct Instr {
    Expr::Kind kind;
    std::uint32_t a = 0;  // operand register, or variable slot
    std::uint32_t b = 0;  // second operand register, or n-ary arg offset
    std::uint32_t n = 0;  // n-ary arg count
    double c = 0.0;       // constant or exponent
  };
  std::vector<Instr> code_;
  std::vector<std::uint32_t> nary_args_;
  std::vector<std::string> slot_names_;
};

}  // namespace rfeas
