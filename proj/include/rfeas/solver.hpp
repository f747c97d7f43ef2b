#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "rfeas/dsl.hpp"
#include "rfeas/optimize.hpp"
#include "rfeas/rfunctions.hpp"

namespace rfeas {

struct SolverOptions {
  int coarse_grid_per_dim = 65;
  int multistart_count = 5;
  double z_tolerance = 1e-8;
  double value_tolerance = 1e-10;
  long max_inner_evals = 20000;
  std::uint64_t seed = 0;
  /// Worker cap for sweeps and critical-point search; 0 = hardware threads.
  /// Results never depend on it.
  unsigned threads = 0;

  void check() const;
};

/// Closed-loop feasibility ψ(x) = min_z −R∧(z, x) over the declared control
/// box. A run that hits max_inner_evals returns its best point with
/// converged = false.
PsiEval psi_closed(const Problem& p, const Env& x, const SolverOptions& opts = {});
PsiEval psi_closed(const Problem& p, const RegionExpr& r, const Env& x, const SolverOptions& opts = {});

/// psi_open or psi_closed, whichever fits the problem.
PsiEval evaluate_psi(const Problem& p, const RegionExpr& r, const Env& x, const SolverOptions& opts = {});

struct SweepAxis {
  std::string name;
  double lo = 0.0;
  double hi = 0.0;
  double step = 0.0;

  /// lo + i·step for i = 0 … while ≤ hi (with 1e-9·step slack).
  std::vector<double> values() const;
};

struct SweepRow {
  Env x;
  double psi = 0.0;
  std::optional<Env> z_star;
  std::string active_label;
  bool converged = true;
};

struct SweepResult {
  std::vector<std::string> axes;
  std::vector<SweepRow> rows;
};

/// ψ over the Cartesian product of the axes (last axis varies fastest).
/// Uncertain variables that are not swept must be given in `fixed`.
SweepResult sweep(const Problem& p, const std::vector<SweepAxis>& axes, const Env& fixed,
                  const SolverOptions& opts = {});

struct CriticalPoint {
  Env x;
  double psi = 0.0;
};

struct CriticalResult {
  Env x_star;
  double psi_max = 0.0;
  /// Distinct local maxima whose ψ is within value_tolerance of psi_max,
  /// best first (includes x_star).
  std::vector<CriticalPoint> ties;
  bool converged = true;
  long evaluations = 0;
};

/// Multistart maximization of ψ over the uncertain-parameter box T.
CriticalResult critical_search(const Problem& p, const SolverOptions& opts = {});

/// Box of the uncertain parameters (declaration order).
Box uncertain_box(const Problem& p);
std::vector<std::string> uncertain_names(const Problem& p);

}  // namespace rfeas
