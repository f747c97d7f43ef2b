#include "rfeas/solver.hpp"

#include <algorithm>
#include <cmath>
#include <set>

#include "rfeas/error.hpp"
#include "rfeas/parallel.hpp"
#include "rfeas/random.hpp"

namespace rfeas {

void SolverOptions::check() const {
  if (coarse_grid_per_dim < 1 || multistart_count < 1 || max_inner_evals < 1) {
    throw Error(ErrorCode::InvalidArgument, "solver counts must be >= 1");
  }
  if (!(z_tolerance > 0.0) || !(value_tolerance > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "solver tolerances must be > 0");
  }
}

Box uncertain_box(const Problem& p) {
  Box box;
  for (const VariableSpec* v : p.with_role(Role::Uncertain)) {
    box.lo.push_back(v->lo);
    box.hi.push_back(v->hi);
  }
  return box;
}

std::vector<std::string> uncertain_names(const Problem& p) {
  std::vector<std::string> out;
  for (const VariableSpec* v : p.with_role(Role::Uncertain)) out.push_back(v->name);
  return out;
}

PsiEval psi_closed(const Problem& p, const Env& x, const SolverOptions& opts) {
  return psi_closed(p, build_region(p), x, opts);
}

PsiEval psi_closed(const Problem& p, const RegionExpr& r, const Env& x, const SolverOptions& opts) {
  opts.check();
  std::vector<std::size_t> control_slots;
  Box zbox;
  std::vector<double> coords(r.free_variables.size(), 0.0);
  for (std::size_t i = 0; i < r.free_variables.size(); ++i) {
    const VariableSpec* v = p.find(r.free_variables[i]);
    if (v->role == Role::Control) {
      control_slots.push_back(i);
      zbox.lo.push_back(v->lo);
      zbox.hi.push_back(v->hi);
    } else {
      auto it = x.find(v->name);
      if (it == x.end()) throw Error(ErrorCode::UnboundVariable, "unbound variable '" + v->name + "'");
      coords[i] = it->second;
    }
  }
  if (control_slots.empty()) {
    throw Error(ErrorCode::NoControlVariables, "problem has no control variables; use psi_open");
  }

  auto objective = [&](std::span<const double> z) {
    std::vector<double> c = coords;
    for (std::size_t k = 0; k < control_slots.size(); ++k) c[control_slots[k]] = z[k];
    return -r.value(c);
  };
  MultistartOptions ms;
  ms.grid_per_dim = opts.coarse_grid_per_dim;
  ms.starts = opts.multistart_count;
  ms.x_tol = opts.z_tolerance;
  ms.f_tol = opts.value_tolerance;
  ms.max_evals = opts.max_inner_evals;
  ms.seed = opts.seed;
  ms.threads = 1;
  const MultistartResult best = multistart_minimize(objective, zbox, ms);

  PsiEval out;
  out.psi = best.f;
  out.converged = best.converged;
  out.inner_evals = best.evals;
  Env z;
  for (std::size_t k = 0; k < control_slots.size(); ++k) {
    coords[control_slots[k]] = best.x[k];
    z[r.free_variables[control_slots[k]]] = best.x[k];
  }
  out.z_star = std::move(z);
  fill_constraint_report(r, coords, out);
  for (std::size_t i = 0; i < r.free_variables.size(); ++i) {
    const VariableSpec* v = p.find(r.free_variables[i]);
    if (v->role == Role::Uncertain && (coords[i] < v->lo || coords[i] > v->hi)) out.outside_domain = true;
  }
  return out;
}

PsiEval evaluate_psi(const Problem& p, const RegionExpr& r, const Env& x, const SolverOptions& opts) {
  return p.has_controls() ? psi_closed(p, r, x, opts) : psi_open(p, r, x);
}

std::vector<double> SweepAxis::values() const {
  if (!(step > 0.0) || !(hi >= lo) || !std::isfinite(lo) || !std::isfinite(hi)) {
    throw Error(ErrorCode::InvalidArgument, "sweep range for '" + name + "' needs step > 0 and lo <= hi");
  }
  const double count = std::floor((hi - lo) / step + 1e-9) + 1.0;
  if (count > 1e8) throw Error(ErrorCode::InvalidArgument, "sweep range for '" + name + "' is too large");
  std::vector<double> out(static_cast<std::size_t>(count));
  for (std::size_t i = 0; i < out.size(); ++i) out[i] = lo + static_cast<double>(i) * step;
  return out;
}

SweepResult sweep(const Problem& p, const std::vector<SweepAxis>& axes, const Env& fixed,
                  const SolverOptions& opts) {
  opts.check();
  if (axes.empty()) throw Error(ErrorCode::InvalidArgument, "sweep needs at least one axis");
  std::set<std::string, std::less<>> swept;
  std::vector<std::vector<double>> grids;
  for (const auto& a : axes) {
    const VariableSpec* v = p.find(a.name);
    if (!v) throw Error(ErrorCode::UnknownVariable, "unknown variable '" + a.name + "'");
    if (v->role != Role::Uncertain) {
      throw Error(ErrorCode::InvalidArgument, "swept variable '" + a.name + "' is not an uncertain parameter");
    }
    if (!swept.insert(a.name).second) {
      throw Error(ErrorCode::InvalidArgument, "variable '" + a.name + "' swept twice");
    }
    grids.push_back(a.values());
  }
  for (const VariableSpec* v : p.with_role(Role::Uncertain)) {
    if (!swept.count(v->name) && !fixed.count(v->name)) {
      throw Error(ErrorCode::UnboundVariable, "uncertain variable '" + v->name + "' is neither swept nor fixed");
    }
  }

  std::size_t total = 1;
  for (const auto& g : grids) total *= g.size();
  const RegionExpr region = build_region(p);
  SweepResult result;
  for (const auto& a : axes) result.axes.push_back(a.name);
  result.rows.resize(total);
  parallel_for(total, opts.threads, [&](std::size_t index) {
    Env x = fixed;
    std::size_t rem = index;
    for (std::size_t k = axes.size(); k-- > 0;) {
      x[axes[k].name] = grids[k][rem % grids[k].size()];
      rem /= grids[k].size();
    }
    SolverOptions local = opts;
    local.seed = SplitMix64::mix(opts.seed ^ SplitMix64::mix(index + 1));
    local.threads = 1;
    PsiEval e = evaluate_psi(p, region, x, local);
    SweepRow& row = result.rows[index];
    row.x = std::move(x);
    row.psi = e.psi;
    row.z_star = std::move(e.z_star);
    row.active_label = std::move(e.active_label);
    row.converged = e.converged;
  });
  return result;
}

CriticalResult critical_search(const Problem& p, const SolverOptions& opts) {
  opts.check();
  const Box box = uncertain_box(p);
  const auto names = uncertain_names(p);
  if (names.empty()) throw Error(ErrorCode::InvalidProblem, "problem has no uncertain parameters");
  const RegionExpr region = build_region(p);
  SolverOptions inner = opts;
  inner.threads = 1;

  auto to_env = [&](std::span<const double> x) {
    Env env;
    for (std::size_t k = 0; k < names.size(); ++k) env[names[k]] = x[k];
    return env;
  };
  auto negated_psi = [&](std::span<const double> x) { return -evaluate_psi(p, region, to_env(x), inner).psi; };

  MultistartOptions ms;
  ms.grid_per_dim = opts.coarse_grid_per_dim;
  ms.starts = opts.multistart_count;
  ms.x_tol = opts.z_tolerance;
  ms.f_tol = opts.value_tolerance;
  ms.max_evals = opts.max_inner_evals;
  ms.seed = opts.seed;
  ms.threads = opts.threads;
  const MultistartResult best = multistart_minimize(negated_psi, box, ms);

  CriticalResult out;
  out.x_star = to_env(best.x);
  out.psi_max = -best.f;
  out.converged = best.converged;
  out.evaluations = best.evals;

  std::vector<std::size_t> idx(best.finals.size());
  for (std::size_t i = 0; i < idx.size(); ++i) idx[i] = i;
  std::stable_sort(idx.begin(), idx.end(),
                   [&](std::size_t a, std::size_t b) { return best.finals[a].f < best.finals[b].f; });
  std::vector<std::vector<double>> kept;
  for (std::size_t i : idx) {
    const LocalResult& fin = best.finals[i];
    if (fin.f > best.f + opts.value_tolerance) break;
    bool duplicate = false;
    for (const auto& k : kept) {
      bool same = true;
      for (std::size_t d = 0; d < k.size(); ++d) {
        if (std::fabs(k[d] - fin.x[d]) > 1e-6 * (box.hi[d] - box.lo[d])) same = false;
      }
      duplicate = duplicate || same;
    }
    if (duplicate) continue;
    kept.push_back(fin.x);
    out.ties.push_back({to_env(fin.x), -fin.f});
  }
  return out;
}

}  // namespace rfeas
