#include "rfeas/rfunctions.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#include "rfeas/error.hpp"

namespace rfeas {

namespace {

constexpr double kRadicandFloor = -1e-12;

void check_args(double a, double b, double alpha) {
  if (!(alpha > -1.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must satisfy -1 < alpha <= 1");
  }
  if (!std::isfinite(a) || !std::isfinite(b)) {
    throw Error(ErrorCode::NonFiniteInput, "R-function arguments must be finite");
  }
}

// a² + b² − 2αab, evaluated symmetrically in (a, b).
double radical(double a, double b, double alpha) {
  double radicand = (a * a + b * b) - (2.0 * alpha) * (a * b);
  if (radicand < 0.0) {
    if (radicand < kRadicandFloor) {
      throw Error(ErrorCode::Domain, "negative radicand in R-function");
    }
    radicand = 0.0;
  }
  return std::sqrt(radicand);
}

}  // namespace

double r_conj(double a, double b, double alpha) {
  check_args(a, b, alpha);
  const double sum = a + b;
  if (alpha == 1.0) return (sum - std::fabs(a - b)) / 2.0;
  const double s = radical(a, b, alpha);
  // For a + b > 0 the rationalized form avoids cancellation and keeps the
  // sign of ab exactly.
  if (sum > 0.0) return (2.0 * (a * b)) / (sum + s);
  return (sum - s) / (1.0 + alpha);
}

double r_disj(double a, double b, double alpha) { return -r_conj(-a, -b, alpha); }

Expr r_conj_expr(const Expr& a, const Expr& b, double alpha) {
  if (!(alpha > -1.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must satisfy -1 < alpha <= 1");
  }
  if (alpha == 1.0) return ((a + b) - Expr::abs(a - b)) / Expr::constant(2.0);
  const Expr radicand = Expr::constant((1.0 - alpha) / 2.0) * Expr::pow(a + b, 2.0) +
                        Expr::constant((1.0 + alpha) / 2.0) * Expr::pow(a - b, 2.0);
  return ((a + b) - Expr::sqrt(radicand)) / Expr::constant(1.0 + alpha);
}

Expr r_disj_expr(const Expr& a, const Expr& b, double alpha) {
  if (!(alpha > -1.0 && alpha <= 1.0)) {
    throw Error(ErrorCode::AlphaOutOfRange, "alpha must satisfy -1 < alpha <= 1");
  }
  if (alpha == 1.0) return ((a + b) + Expr::abs(a - b)) / Expr::constant(2.0);
  const Expr radicand = Expr::constant((1.0 - alpha) / 2.0) * Expr::pow(a + b, 2.0) +
                        Expr::constant((1.0 + alpha) / 2.0) * Expr::pow(a - b, 2.0);
  return ((a + b) + Expr::sqrt(radicand)) / Expr::constant(1.0 + alpha);
}

double RegionExpr::min_phi(std::span<const double> point) const {
  double m = -compiled_constraints.front()(point);
  for (std::size_t j = 1; j < compiled_constraints.size(); ++j) {
    m = std::min(m, -compiled_constraints[j](point));
  }
  return m;
}

RegionExpr build_region(const Problem& p) {
  std::vector<std::size_t> order(p.constraints.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  return build_region(p, order);
}

RegionExpr build_region(const Problem& p, const std::vector<std::size_t>& order) {
  Problem checked = p;
  validate(checked);
  if (order.size() != p.constraints.size()) {
    throw Error(ErrorCode::InvalidArgument, "fold order must list every constraint once");
  }
  std::vector<bool> seen(order.size(), false);
  for (std::size_t i : order) {
    if (i >= order.size() || seen[i]) {
      throw Error(ErrorCode::InvalidArgument, "fold order must be a permutation");
    }
    seen[i] = true;
  }

  RegionExpr r;
  r.alpha = p.alpha;
  r.problem_name = p.name;
  for (const auto& v : p.variables) {
    if (v.role != Role::Design) r.free_variables.push_back(v.name);
  }
  const Env design = p.design_values();
  for (std::size_t i : order) {
    r.fold_order.push_back(p.constraints[i].label);
    r.constraints.push_back(substitute(p.constraints[i].g, design));
  }
  Expr acc = Expr::negate(r.constraints.front());
  for (std::size_t j = 1; j < r.constraints.size(); ++j) {
    acc = r_conj_expr(acc, Expr::negate(r.constraints[j]), p.alpha);
  }
  r.expr = acc;
  r.compiled = CompiledExpr(r.expr, r.free_variables);
  for (const auto& g : r.constraints) r.compiled_constraints.emplace_back(g, r.free_variables);
  return r;
}

std::vector<double> to_coordinates(const std::vector<std::string>& names, const Env& point) {
  std::vector<double> out;
  out.reserve(names.size());
  for (const auto& n : names) {
    auto it = point.find(n);
    if (it == point.end()) throw Error(ErrorCode::UnboundVariable, "unbound variable '" + n + "'");
    out.push_back(it->second);
  }
  return out;
}

double eval_region(const RegionExpr& r, const Env& point) {
  const auto coords = to_coordinates(r.free_variables, point);
  return r.value(coords);
}

void fill_constraint_report(const RegionExpr& r, std::span<const double> point, PsiEval& out) {
  out.per_constraint.clear();
  double best = 0.0;
  for (std::size_t j = 0; j < r.compiled_constraints.size(); ++j) {
    const double g = r.compiled_constraints[j](point);
    out.per_constraint.emplace_back(r.fold_order[j], g);
    if (j == 0 || g > best) {
      best = g;
      out.active_label = r.fold_order[j];
    }
  }
}

PsiEval psi_open(const Problem& p, const Env& x) { return psi_open(p, build_region(p), x); }

PsiEval psi_open(const Problem& p, const RegionExpr& r, const Env& x) {
  if (p.has_controls()) {
    throw Error(ErrorCode::HasControlVariables, "problem has control variables; use psi_closed");
  }
  const auto coords = to_coordinates(r.free_variables, x);
  PsiEval out;
  out.psi = -r.value(coords);
  out.inner_evals = 1;
  fill_constraint_report(r, coords, out);
  for (std::size_t i = 0; i < coords.size(); ++i) {
    const VariableSpec* v = p.find(r.free_variables[i]);
    if (coords[i] < v->lo || coords[i] > v->hi) out.outside_domain = true;
  }
  return out;
}

}  // namespace rfeas
