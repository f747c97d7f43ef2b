#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include "rfeas/dsl.hpp"
#include "rfeas/optimize.hpp"
#include "rfeas/rfunctions.hpp"
#include "rfeas/solver.hpp"

namespace rfeas {

/// A scalar field over named coordinates whose region is {x : value(x) >= 0}.
/// Either R∧ of a problem over its free variables, or the projected
/// closed-loop region with value −ψ(x) over the uncertain parameters.
struct ImplicitFunction {
  std::vector<std::string> names;
  /// Declared bounds of the coordinates; the default sampling box.
  Box domain;
  std::function<double(std::span<const double>)> fn;

  double operator()(std::span<const double> x) const { return fn(x); }
  std::size_t dims() const { return names.size(); }
};

ImplicitFunction region_function(const Problem& p);
ImplicitFunction region_function(const Problem& p, std::shared_ptr<const RegionExpr> r);

/// {x : ψ_closed(x) <= 0}, one inner minimization per evaluation.
ImplicitFunction projected_function(const Problem& p, const SolverOptions& opts);

/// Projected region when the problem has controls, R∧ otherwise.
ImplicitFunction feasibility_function(const Problem& p, const SolverOptions& opts);

enum class Membership { Feasible, Infeasible, Boundary };
const char* membership_name(Membership m);

/// Boundary iff |R| <= tol, Feasible iff R > tol, Infeasible iff R < −tol.
Membership classify(double value, double tol);
Membership classify(const ImplicitFunction& f, std::span<const double> point, double tol);

struct VolumeEstimate {
  double volume = 0.0;
  double std_error = 0.0;
  long long samples = 0;
  long long hits = 0;
  std::uint64_t seed = 0;
  Box sampling_box;
};

/// Points are drawn in chunks of this many samples, one RNG stream per chunk.
inline constexpr std::size_t kSampleChunk = 1024;

VolumeEstimate mc_volume(const ImplicitFunction& f, const Box& box, long long samples, std::uint64_t seed,
                         unsigned threads = 0);

struct BoundingBox {
  std::vector<std::string> names;
  std::vector<double> lo;
  std::vector<double> hi;
  std::string method;
  long long samples = 0;
  long long hits = 0;
  long long evaluations = 0;
};

BoundingBox mc_bbox(const ImplicitFunction& f, const Box& box, long long samples, std::uint64_t seed,
                    unsigned threads = 0);

struct DirectionExtremum {
  std::vector<double> direction;
  std::vector<double> x;
  /// min over the region of directionᵀx.
  double value = 0.0;
  double residual = 0.0;
  long long evaluations = 0;
};

struct OptBoxOptions {
  /// Empty means ±e_k for every coordinate.
  std::vector<std::vector<double>> directions;
  int starts_per_direction = 8;
  long long start_samples = 20000;
  std::uint64_t seed = 0;
  double residual_tol = 1e-6;
  unsigned threads = 0;
};

struct OptBoxResult {
  BoundingBox box;
  std::vector<DirectionExtremum> extrema;
};

/// Penalized minimization of dᵀx + μR(x)² per direction with μ-continuation.
/// A final point is accepted when |R| <= residual_tol, or when it is feasible
/// and pinned to a face of the box. Throws NoConvergence otherwise.
OptBoxResult opt_bbox(const ImplicitFunction& f, const Box& box, const OptBoxOptions& opts);

using Vertex = std::array<double, 2>;

struct Boundary2D {
  std::vector<std::string> names;
  Box box;
  std::vector<std::vector<Vertex>> polylines;
  /// Closed polylines do not repeat their first vertex.
  std::vector<bool> closed;
  int grid_n = 0;
  double tol = 0.0;
  double max_residual = 0.0;
};

/// Marching squares on a grid_n × grid_n cell grid, edge crossings refined by
/// bisection to |R| <= tol (at most 60 steps). Saddle cells follow the sign at
/// the cell center.
Boundary2D boundary_2d(const ImplicitFunction& f, const Box& box, int grid_n, double tol, unsigned threads = 0);

struct GridField {
  std::string x_name;
  std::string y_name;
  Box box;
  int nx = 0;
  int ny = 0;
  /// Row-major, row 0 at the lowest y; value at each cell center.
  std::vector<double> values;

  double at(int ix, int iy) const { return values[static_cast<std::size_t>(iy) * nx + ix]; }
  double cell_x(int ix) const;
  double cell_y(int iy) const;
};

GridField grid_field(const ImplicitFunction& f, const Box& box, int nx, int ny, unsigned threads = 0);

}  // namespace rfeas
