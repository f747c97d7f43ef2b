#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

namespace rfeas {

/// Axis-aligned box, one interval per coordinate.
struct Box {
  std::vector<double> lo;
  std::vector<double> hi;

  std::size_t dims() const { return lo.size(); }
  double volume() const;
  /// Throws DimensionMismatch / InvalidBounds on malformed boxes.
  void check() const;
};

using Objective = std::function<double(std::span<const double>)>;

struct LocalResult {
  std::vector<double> x;
  double f = 0.0;
  long evals = 0;
  bool converged = false;
};

/// Golden-section search on [a, b] given f(a) and f(b). Stops when the
/// bracket is narrower than x_tol and its end values are within f_tol of the
/// interior best, or when max_evals is reached. Returns the best point seen.
LocalResult golden_section(const std::function<double(double)>& f, double a, double b, double fa,
                           double fb, double x_tol, double f_tol, long max_evals);

/// Nelder–Mead simplex search with iterates clamped to `box`.
LocalResult nelder_mead(const Objective& f, std::vector<double> start, const std::vector<double>& step,
                        const Box& box, double x_tol, double f_tol, long max_evals);

/// Halton points in [0,1)^dims with a seeded Cranley–Patterson rotation.
std::vector<std::vector<double>> halton_points(std::size_t count, std::size_t dims, std::uint64_t seed);

struct MultistartOptions {
  int grid_per_dim = 65;
  int starts = 5;
  double x_tol = 1e-8;
  double f_tol = 1e-10;
  long max_evals = 20000;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct MultistartResult {
  std::vector<double> x;
  double f = 0.0;
  /// Final point of every local refinement, in start order.
  std::vector<LocalResult> finals;
  long evals = 0;
  bool converged = false;
};

/// Global-then-local minimization over a box. Up to two dimensions: a uniform
/// grid (endpoints included), then golden-section (1-D) or Nelder–Mead (2-D)
/// from the best `starts` grid local minima. Higher dimensions: Nelder–Mead
/// from `starts` scrambled Halton points. Deterministic for a fixed seed and
/// independent of `threads`.
MultistartResult multistart_minimize(const Objective& f, const Box& box, const MultistartOptions& opts);

}  // namespace rfeas
