#include "rfeas/region.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>

#include "rfeas/error.hpp"
#include "rfeas/format.hpp"
#include "rfeas/parallel.hpp"
#include "rfeas/random.hpp"

namespace rfeas {

namespace {

std::string point_text(std::span<const double> x) {
  std::string s = "(";
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k) s += ", ";
    s += format_double(x[k]);
  }
  return s + ")";
}

std::string named_point_text(const std::vector<std::string>& names, std::span<const double> x) {
  std::string s;
  for (std::size_t k = 0; k < x.size(); ++k) {
    if (k) s += ", ";
    s += (k < names.size() ? names[k] : "?") + "=" + format_double(x[k]);
  }
  return s;
}

// Evaluates f and attaches the point to any failure.
double eval_at(const ImplicitFunction& f, std::span<const double> x) {
  double v;
  try {
    v = f(x);
  } catch (const Error& e) {
    throw Error(e.code(), std::string(e.what()) + " at " + named_point_text(f.names, x));
  }
  if (!std::isfinite(v)) {
    throw Error(ErrorCode::NonFiniteResult, "non-finite region value at " + named_point_text(f.names, x));
  }
  return v;
}

void check_box_for(const ImplicitFunction& f, const Box& box) {
  box.check();
  if (box.dims() != f.dims()) {
    throw Error(ErrorCode::DimensionMismatch, "box has " + std::to_string(box.dims()) +
                                                  " dimensions, region has " + std::to_string(f.dims()));
  }
}

// Sample `k` of chunk `c` (consecutive draws from the chunk's stream).
class ChunkSampler {
 public:
  ChunkSampler(const Box& box, std::uint64_t seed, std::size_t chunk)
      : box_(box), rng_(SplitMix64::stream(seed, chunk)), x_(box.dims()) {}

  std::span<const double> next() {
    for (std::size_t d = 0; d < x_.size(); ++d) {
      x_[d] = box_.lo[d] + rng_.uniform() * (box_.hi[d] - box_.lo[d]);
    }
    return x_;
  }

 private:
  const Box& box_;
  SplitMix64 rng_;
  std::vector<double> x_;
};

std::size_t chunk_count(long long samples) {
  return static_cast<std::size_t>((samples + static_cast<long long>(kSampleChunk) - 1) /
                                  static_cast<long long>(kSampleChunk));
}

std::size_t chunk_size(long long samples, std::size_t c) {
  const long long start = static_cast<long long>(c * kSampleChunk);
  return static_cast<std::size_t>(std::min<long long>(kSampleChunk, samples - start));
}

// Feasible sample points in sequential order.
std::vector<std::vector<double>> feasible_samples(const ImplicitFunction& f, const Box& box, long long samples,
                                                  std::uint64_t seed, unsigned threads) {
  const std::size_t chunks = chunk_count(samples);
  std::vector<std::vector<std::vector<double>>> found(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    ChunkSampler s(box, seed, c);
    for (std::size_t k = 0, n = chunk_size(samples, c); k < n; ++k) {
      auto x = s.next();
      if (eval_at(f, x) >= 0.0) found[c].emplace_back(x.begin(), x.end());
    }
  });
  std::vector<std::vector<double>> out;
  for (auto& chunk : found) {
    for (auto& x : chunk) out.push_back(std::move(x));
  }
  return out;
}

}  // namespace

ImplicitFunction region_function(const Problem& p) {
  return region_function(p, std::make_shared<const RegionExpr>(build_region(p)));
}

ImplicitFunction region_function(const Problem& p, std::shared_ptr<const RegionExpr> r) {
  ImplicitFunction f;
  f.names = r->free_variables;
  for (const auto& n : f.names) {
    const VariableSpec* v = p.find(n);
    f.domain.lo.push_back(v->lo);
    f.domain.hi.push_back(v->hi);
  }
  f.fn = [r](std::span<const double> x) { return r->value(x); };
  return f;
}

ImplicitFunction projected_function(const Problem& p, const SolverOptions& opts) {
  opts.check();
  if (!p.has_controls()) throw Error(ErrorCode::NoControlVariables, "problem has no control variables");
  auto problem = std::make_shared<const Problem>(p);
  auto region = std::make_shared<const RegionExpr>(build_region(p));
  SolverOptions inner = opts;
  inner.threads = 1;
  ImplicitFunction f;
  f.names = uncertain_names(p);
  f.domain = uncertain_box(p);
  f.fn = [problem, region, inner, names = f.names](std::span<const double> x) {
    Env env;
    for (std::size_t k = 0; k < names.size(); ++k) env[names[k]] = x[k];
    return -psi_closed(*problem, *region, env, inner).psi;
  };
  return f;
}

ImplicitFunction feasibility_function(const Problem& p, const SolverOptions& opts) {
  return p.has_controls() ? projected_function(p, opts) : region_function(p);
}

const char* membership_name(Membership m) {
  switch (m) {
    case Membership::Feasible: return "feasible";
    case Membership::Infeasible: return "infeasible";
    case Membership::Boundary: return "boundary";
  }
  return "unknown";
}

Membership classify(double value, double tol) {
  if (!(tol >= 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be >= 0");
  if (std::fabs(value) <= tol) return Membership::Boundary;
  return value > tol ? Membership::Feasible : Membership::Infeasible;
}

Membership classify(const ImplicitFunction& f, std::span<const double> point, double tol) {
  if (point.size() != f.dims()) throw Error(ErrorCode::DimensionMismatch, "point has wrong dimension");
  return classify(eval_at(f, point), tol);
}

VolumeEstimate mc_volume(const ImplicitFunction& f, const Box& box, long long samples, std::uint64_t seed,
                         unsigned threads) {
  check_box_for(f, box);
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
  const std::size_t chunks = chunk_count(samples);
  std::vector<long long> hits(chunks, 0);
  parallel_for(chunks, threads, [&](std::size_t c) {
    ChunkSampler s(box, seed, c);
    long long h = 0;
    for (std::size_t k = 0, n = chunk_size(samples, c); k < n; ++k) {
      if (eval_at(f, s.next()) >= 0.0) ++h;
    }
    hits[c] = h;
  });
  VolumeEstimate out;
  out.samples = samples;
  out.hits = std::accumulate(hits.begin(), hits.end(), 0LL);
  out.seed = seed;
  out.sampling_box = box;
  const double bv = box.volume();
  const double p = static_cast<double>(out.hits) / static_cast<double>(samples);
  out.volume = p * bv;
  out.std_error = bv * std::sqrt(p * (1.0 - p) / static_cast<double>(samples));
  return out;
}

BoundingBox mc_bbox(const ImplicitFunction& f, const Box& box, long long samples, std::uint64_t seed,
                    unsigned threads) {
  check_box_for(f, box);
  if (samples < 1) throw Error(ErrorCode::InvalidArgument, "samples must be >= 1");
  const std::size_t n = box.dims();
  const std::size_t chunks = chunk_count(samples);
  struct Partial {
    long long hits = 0;
    std::vector<double> lo, hi;
  };
  std::vector<Partial> parts(chunks);
  parallel_for(chunks, threads, [&](std::size_t c) {
    Partial& part = parts[c];
    part.lo.assign(n, INFINITY);
    part.hi.assign(n, -INFINITY);
    ChunkSampler s(box, seed, c);
    for (std::size_t k = 0, m = chunk_size(samples, c); k < m; ++k) {
      auto x = s.next();
      if (eval_at(f, x) < 0.0) continue;
      ++part.hits;
      for (std::size_t d = 0; d < n; ++d) {
        part.lo[d] = std::min(part.lo[d], x[d]);
        part.hi[d] = std::max(part.hi[d], x[d]);
      }
    }
  });
  BoundingBox out;
  out.names = f.names;
  out.method = "mc";
  out.samples = samples;
  out.evaluations = samples;
  out.lo.assign(n, INFINITY);
  out.hi.assign(n, -INFINITY);
  for (const auto& part : parts) {
    out.hits += part.hits;
    for (std::size_t d = 0; d < n; ++d) {
      out.lo[d] = std::min(out.lo[d], part.lo[d]);
      out.hi[d] = std::max(out.hi[d], part.hi[d]);
    }
  }
  if (out.hits == 0) {
    throw Error(ErrorCode::NoFeasibleSamples, "no feasible point among " + std::to_string(samples) + " samples");
  }
  return out;
}

OptBoxResult opt_bbox(const ImplicitFunction& f, const Box& box, const OptBoxOptions& opts) {
  check_box_for(f, box);
  const std::size_t n = box.dims();
  if (opts.starts_per_direction < 1 || opts.start_samples < 0 || !(opts.residual_tol > 0.0)) {
    throw Error(ErrorCode::InvalidArgument, "invalid opt_bbox options");
  }

  std::vector<std::vector<double>> dirs = opts.directions;
  if (dirs.empty()) {
    for (std::size_t k = 0; k < n; ++k) {
      for (double s : {1.0, -1.0}) {
        std::vector<double> d(n, 0.0);
        d[k] = s;
        dirs.push_back(d);
      }
    }
  }
  for (auto& d : dirs) {
    if (d.size() != n) throw Error(ErrorCode::DimensionMismatch, "direction has wrong dimension");
    double norm = 0.0;
    for (double v : d) norm += v * v;
    norm = std::sqrt(norm);
    if (!(norm > 0.0) || !std::isfinite(norm)) throw Error(ErrorCode::InvalidArgument, "zero direction");
    for (double& v : d) v /= norm;
  }
  // Index of the direction equal to s·e_k, or npos.
  auto find_axis = [&](std::size_t k, double s) {
    for (std::size_t i = 0; i < dirs.size(); ++i) {
      bool match = true;
      for (std::size_t j = 0; j < n; ++j) match = match && dirs[i][j] == (j == k ? s : 0.0);
      if (match) return i;
    }
    throw Error(ErrorCode::InvalidArgument, "directions must include +e_k and -e_k for every coordinate");
  };

  std::vector<std::vector<double>> pool;
  if (opts.start_samples > 0) pool = feasible_samples(f, box, opts.start_samples, opts.seed, opts.threads);
  const std::size_t starts = static_cast<std::size_t>(opts.starts_per_direction);

  auto starts_for = [&](const std::vector<double>& d) {
    std::vector<std::vector<double>> out;
    if (pool.empty()) {
      for (auto& u : halton_points(starts, n, opts.seed)) {
        for (std::size_t k = 0; k < n; ++k) u[k] = box.lo[k] + u[k] * (box.hi[k] - box.lo[k]);
        out.push_back(u);
      }
      return out;
    }
    std::vector<std::size_t> idx(pool.size());
    std::iota(idx.begin(), idx.end(), std::size_t{0});
    auto proj = [&](std::size_t i) { return std::inner_product(d.begin(), d.end(), pool[i].begin(), 0.0); };
    std::stable_sort(idx.begin(), idx.end(), [&](std::size_t a, std::size_t b) { return proj(a) < proj(b); });
    // Half from the most extreme samples, the rest spread over the pool.
    std::vector<std::size_t> pick;
    const std::size_t best = std::min(idx.size(), (starts + 1) / 2);
    for (std::size_t i = 0; i < best; ++i) pick.push_back(idx[i]);
    const std::size_t rest = starts - best;
    for (std::size_t i = 0; i < rest; ++i) {
      const std::size_t j = idx[(i + 1) * idx.size() / (rest + 1)];
      if (std::find(pick.begin(), pick.end(), j) == pick.end()) pick.push_back(j);
    }
    for (std::size_t i : pick) out.push_back(pool[i]);
    return out;
  };

  std::vector<std::vector<std::vector<double>>> start_sets;
  for (const auto& d : dirs) start_sets.push_back(starts_for(d));

  struct Task {
    std::size_t dir, start;
  };
  std::vector<Task> tasks;
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    for (std::size_t s = 0; s < start_sets[i].size(); ++s) tasks.push_back({i, s});
  }
  std::vector<DirectionExtremum> finals(tasks.size());
  std::vector<bool> accepted(tasks.size(), false);
  double max_width = 0.0;
  for (std::size_t k = 0; k < n; ++k) max_width = std::max(max_width, box.hi[k] - box.lo[k]);

  parallel_for(tasks.size(), opts.threads, [&](std::size_t t) {
    const auto& d = dirs[tasks[t].dir];
    std::vector<double> x = start_sets[tasks[t].dir][tasks[t].start];
    long long evals = 0;
    double step_scale = 0.05;
    for (double mu : {1.0, 1e2, 1e4, 1e6}) {
      auto obj = [&](std::span<const double> y) {
        const double r = eval_at(f, y);
        return std::inner_product(d.begin(), d.end(), y.begin(), 0.0) + mu * r * r;
      };
      std::vector<double> step(n);
      for (std::size_t k = 0; k < n; ++k) step[k] = step_scale * (box.hi[k] - box.lo[k]);
      LocalResult lr = nelder_mead(obj, x, step, box, 1e-12 * max_width, 1e-13, 4000);
      evals += lr.evals;
      x = lr.x;
      step_scale *= 0.1;
    }
    const double r = eval_at(f, x);
    ++evals;
    bool on_face = false;
    for (std::size_t k = 0; k < n; ++k) {
      const double eps = 1e-9 * (box.hi[k] - box.lo[k]);
      on_face = on_face || (d[k] > 0.0 && x[k] <= box.lo[k] + eps) || (d[k] < 0.0 && x[k] >= box.hi[k] - eps);
    }
    DirectionExtremum& out = finals[t];
    out.direction = d;
    out.value = std::inner_product(d.begin(), d.end(), x.begin(), 0.0);
    out.x = std::move(x);
    out.residual = r;
    out.evaluations = evals;
    accepted[t] = std::fabs(r) <= opts.residual_tol || (on_face && r >= 0.0);
  });

  OptBoxResult result;
  result.extrema.resize(dirs.size());
  std::vector<bool> have(dirs.size(), false);
  long long total_evals = 0;
  for (std::size_t t = 0; t < tasks.size(); ++t) {
    total_evals += finals[t].evaluations;
    const std::size_t i = tasks[t].dir;
    if (!accepted[t]) continue;
    if (!have[i] || finals[t].value < result.extrema[i].value) {
      result.extrema[i] = finals[t];
      have[i] = true;
    }
  }
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    if (!have[i]) {
      throw Error(ErrorCode::NoConvergence, "no start met the residual tolerance for direction " + point_text(dirs[i]));
    }
  }
  for (std::size_t i = 0; i < dirs.size(); ++i) {
    long long e = 0;
    for (std::size_t t = 0; t < tasks.size(); ++t) {
      if (tasks[t].dir == i) e += finals[t].evaluations;
    }
    result.extrema[i].evaluations = e;
  }
  BoundingBox& bb = result.box;
  bb.names = f.names;
  bb.method = "opt";
  bb.samples = opts.start_samples;
  bb.hits = static_cast<long long>(pool.size());
  bb.evaluations = total_evals + opts.start_samples;
  for (std::size_t k = 0; k < n; ++k) {
    bb.lo.push_back(result.extrema[find_axis(k, 1.0)].value);
    bb.hi.push_back(-result.extrema[find_axis(k, -1.0)].value);
  }
  return result;
}

namespace {

struct EdgeCrossing {
  std::size_t id;
  Vertex in, out;
  Vertex v{};
  double residual = 0.0;
};

}  // namespace

Boundary2D boundary_2d(const ImplicitFunction& f, const Box& box, int grid_n, double tol, unsigned threads) {
  if (f.dims() != 2) {
    throw Error(ErrorCode::DimensionMismatch, "boundary extraction needs exactly 2 free variables, got " +
                                                  std::to_string(f.dims()));
  }
  check_box_for(f, box);
  if (grid_n < 16) throw Error(ErrorCode::InvalidArgument, "grid must be >= 16");
  if (!(tol > 0.0)) throw Error(ErrorCode::InvalidArgument, "tolerance must be > 0");

  const std::size_t n = static_cast<std::size_t>(grid_n);
  const std::size_t m = n + 1;
  const double hx = (box.hi[0] - box.lo[0]) / static_cast<double>(n);
  const double hy = (box.hi[1] - box.lo[1]) / static_cast<double>(n);
  auto gx = [&](std::size_t i) { return i == n ? box.hi[0] : box.lo[0] + static_cast<double>(i) * hx; };
  auto gy = [&](std::size_t j) { return j == n ? box.hi[1] : box.lo[1] + static_cast<double>(j) * hy; };

  std::vector<double> val(m * m);
  parallel_for(m, threads, [&](std::size_t j) {
    for (std::size_t i = 0; i < m; ++i) {
      const double p[2] = {gx(i), gy(j)};
      val[j * m + i] = eval_at(f, p);
    }
  });
  // Strictly positive counts as inside, so regions touching at a single point
  // stay separate contours.
  auto inside = [&](std::size_t i, std::size_t j) { return val[j * m + i] > 0.0; };

  // Edge ids: horizontal (i,j)-(i+1,j) is 2(j·m+i), vertical (i,j)-(i,j+1) is 2(j·m+i)+1.
  std::map<std::size_t, std::size_t> crossing_index;
  std::vector<EdgeCrossing> crossings;
  auto add_edge = [&](std::size_t i0, std::size_t j0, std::size_t i1, std::size_t j1, std::size_t id) {
    if (inside(i0, j0) == inside(i1, j1)) return;
    EdgeCrossing c;
    c.id = id;
    Vertex a{gx(i0), gy(j0)}, b{gx(i1), gy(j1)};
    if (inside(i0, j0)) {
      c.in = a;
      c.out = b;
    } else {
      c.in = b;
      c.out = a;
    }
    crossing_index.emplace(id, crossings.size());
    crossings.push_back(c);
  };
  for (std::size_t j = 0; j < m; ++j) {
    for (std::size_t i = 0; i < m; ++i) {
      if (i < n) add_edge(i, j, i + 1, j, 2 * (j * m + i));
      if (j < n) add_edge(i, j, i, j + 1, 2 * (j * m + i) + 1);
    }
  }

  parallel_for(crossings.size(), threads, [&](std::size_t c) {
    EdgeCrossing& e = crossings[c];
    Vertex a = e.in, b = e.out;
    Vertex best = a;
    double best_r = std::fabs(eval_at(f, a));
    const double rb = std::fabs(eval_at(f, b));
    if (rb < best_r) {
      best = b;
      best_r = rb;
    }
    for (int it = 0; it < 60 && best_r > tol; ++it) {
      const Vertex mid{(a[0] + b[0]) / 2.0, (a[1] + b[1]) / 2.0};
      const double r = eval_at(f, mid);
      if (std::fabs(r) < best_r) {
        best = mid;
        best_r = std::fabs(r);
      }
      if (r > 0.0) {
        a = mid;
      } else {
        b = mid;
      }
    }
    e.v = best;
    e.residual = best_r;
  });

  // Segments per cell, as pairs of edge ids.
  std::vector<std::array<std::size_t, 2>> segments;
  for (std::size_t j = 0; j < n; ++j) {
    for (std::size_t i = 0; i < n; ++i) {
      const std::size_t e[4] = {2 * (j * m + i), 2 * (j * m + i + 1) + 1, 2 * ((j + 1) * m + i),
                                2 * (j * m + i) + 1};  // bottom, right, top, left
      std::vector<std::size_t> hit;
      for (std::size_t k : e) {
        if (crossing_index.count(k)) hit.push_back(k);
      }
      if (hit.size() == 2) {
        segments.push_back({hit[0], hit[1]});
      } else if (hit.size() == 4) {
        const double center[2] = {box.lo[0] + (static_cast<double>(i) + 0.5) * hx,
                                  box.lo[1] + (static_cast<double>(j) + 0.5) * hy};
        if ((eval_at(f, center) > 0.0) == inside(i, j)) {
          segments.push_back({e[0], e[1]});
          segments.push_back({e[2], e[3]});
        } else {
          segments.push_back({e[3], e[0]});
          segments.push_back({e[1], e[2]});
        }
      }
    }
  }

  std::map<std::size_t, std::vector<std::size_t>> by_edge;
  for (std::size_t s = 0; s < segments.size(); ++s) {
    by_edge[segments[s][0]].push_back(s);
    by_edge[segments[s][1]].push_back(s);
  }
  std::vector<bool> used(segments.size(), false);
  Boundary2D out;
  out.names = f.names;
  out.box = box;
  out.grid_n = grid_n;
  out.tol = tol;
  const double diag = std::hypot(hx, hy);

  auto walk = [&](std::size_t first_seg, std::size_t start_edge) {
    std::vector<std::size_t> chain{start_edge};
    std::size_t seg = first_seg;
    std::size_t edge = start_edge;
    bool cycle = false;
    while (true) {
      used[seg] = true;
      edge = segments[seg][0] == edge ? segments[seg][1] : segments[seg][0];
      if (edge == start_edge) {
        cycle = true;
        break;
      }
      chain.push_back(edge);
      std::size_t next = segments.size();
      for (std::size_t s : by_edge[edge]) {
        if (!used[s]) {
          next = s;
          break;
        }
      }
      if (next == segments.size()) break;
      seg = next;
    }
    std::vector<Vertex> line;
    for (std::size_t id : chain) {
      const auto& c = crossings[crossing_index.at(id)];
      out.max_residual = std::max(out.max_residual, c.residual);
      // A crossing exactly at a grid vertex is reached from both of its edges.
      if (line.empty() || line.back() != c.v) line.push_back(c.v);
    }
    if (cycle && line.size() > 1 && line.back() == line.front()) line.pop_back();
    const bool near = line.size() > 2 &&
                      std::hypot(line.front()[0] - line.back()[0], line.front()[1] - line.back()[1]) <= diag;
    out.polylines.push_back(std::move(line));
    out.closed.push_back(cycle || near);
  };

  // Open chains start at edges used by a single segment (on the box border).
  for (const auto& [edge, segs] : by_edge) {
    if (segs.size() == 1 && !used[segs[0]]) walk(segs[0], edge);
  }
  for (std::size_t s = 0; s < segments.size(); ++s) {
    if (!used[s]) walk(s, segments[s][0]);
  }
  return out;
}

double GridField::cell_x(int ix) const {
  return box.lo[0] + (static_cast<double>(ix) + 0.5) * (box.hi[0] - box.lo[0]) / static_cast<double>(nx);
}

double GridField::cell_y(int iy) const {
  return box.lo[1] + (static_cast<double>(iy) + 0.5) * (box.hi[1] - box.lo[1]) / static_cast<double>(ny);
}

GridField grid_field(const ImplicitFunction& f, const Box& box, int nx, int ny, unsigned threads) {
  if (f.dims() != 2) {
    throw Error(ErrorCode::DimensionMismatch, "grid field needs exactly 2 free variables, got " +
                                                  std::to_string(f.dims()));
  }
  check_box_for(f, box);
  if (nx < 2 || ny < 2) throw Error(ErrorCode::InvalidArgument, "grid needs nx, ny >= 2");
  GridField g;
  g.x_name = f.names[0];
  g.y_name = f.names[1];
  g.box = box;
  g.nx = nx;
  g.ny = ny;
  g.values.resize(static_cast<std::size_t>(nx) * static_cast<std::size_t>(ny));
  parallel_for(static_cast<std::size_t>(ny), threads, [&](std::size_t iy) {
    for (int ix = 0; ix < nx; ++ix) {
      const double p[2] = {g.cell_x(ix), g.cell_y(static_cast<int>(iy))};
      try {
        g.values[iy * static_cast<std::size_t>(nx) + static_cast<std::size_t>(ix)] = eval_at(f, p);
      } catch (const Error& e) {
        throw Error(e.code(), std::string(e.what()) + " (cell " + std::to_string(ix) + ", " + std::to_string(iy) + ")");
      }
    }
  });
  return g;
}

}  // namespace rfeas
