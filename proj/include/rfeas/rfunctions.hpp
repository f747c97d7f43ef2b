#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "rfeas/dsl.hpp"
#include "rfeas/expr.hpp"

namespace rfeas {

// Rα system of R-functions. For alpha = 1 conjunction and disjunction reduce
// to min and max.

/// R-conjunction: 1/(1+α) (a + b − sqrt(a² + b² − 2αab)). Its sign follows
/// min(a, b). Requires −1 < alpha <= 1 and finite arguments.
double r_conj(double a, double b, double alpha);

/// R-disjunction: 1/(1+α) (a + b + sqrt(a² + b² − 2αab)). Sign follows max(a, b).
double r_disj(double a, double b, double alpha);

/// R-negation.
inline double r_neg(double a) { return -a; }

/// Symbolic R-conjunction. alpha = 1 uses ½(a + b − |a − b|); other values use
/// the radical form with the radicand written as a sum of squares.
Expr r_conj_expr(const Expr& a, const Expr& b, double alpha);
Expr r_disj_expr(const Expr& a, const Expr& b, double alpha);

/// The single implicit function R∧(−g₁, …, −g_J) of a problem.
struct RegionExpr {
  Expr expr;
  double alpha = 1.0;
  /// Constraint labels in the order they were folded (left fold).
  std::vector<std::string> fold_order;
  std::string problem_name;
  /// Uncertain and control variables in declaration order; the coordinate
  /// order used by compiled evaluation and all region tools.
  std::vector<std::string> free_variables;
  /// Constraint functions with design values substituted, in fold order.
  std::vector<Expr> constraints;

  CompiledExpr compiled;
  std::vector<CompiledExpr> compiled_constraints;

  /// R at a point given in free_variables order.
  double value(std::span<const double> point) const { return compiled(point); }
  /// min_j(−g_j) at a point given in free_variables order.
  double min_phi(std::span<const double> point) const;
};

/// Builds R∧ by left-folding r_conj over φ_j = −g_j in declaration order,
/// with design variables replaced by their fixed values.
RegionExpr build_region(const Problem& p);

/// Same, folding constraints in the given order (a permutation of indices).
RegionExpr build_region(const Problem& p, const std::vector<std::size_t>& order);

/// R∧ at a point; binds every free variable.
double eval_region(const RegionExpr& r, const Env& point);

/// Orders an Env into the region's coordinate order.
std::vector<double> to_coordinates(const std::vector<std::string>& names, const Env& point);

struct PsiEval {
  double psi = 0.0;
  std::vector<std::pair<std::string, double>> per_constraint;
  std::string active_label;
  std::optional<Env> z_star;
  bool converged = true;
  long inner_evals = 0;
  /// The evaluated point lies outside the declared bounds T (not an error).
  bool outside_domain = false;
};

/// Open-loop feasibility ψ(x) = −R∧(x). Throws HasControlVariables when the
/// problem declares controls.
PsiEval psi_open(const Problem& p, const Env& x);
PsiEval psi_open(const Problem& p, const RegionExpr& r, const Env& x);

/// Fills per_constraint and active_label (arg max g_j, lowest index on ties).
void fill_constraint_report(const RegionExpr& r, std::span<const double> point, PsiEval& out);

}  // namespace rfeas
