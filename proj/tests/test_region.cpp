#include <bit>
#include <cmath>
#include <set>

#include "doctest.h"
#include "rfeas/builtins.hpp"
#include "rfeas/error.hpp"
#include "rfeas/region.hpp"
#include "support.hpp"

using namespace rfeas;

namespace {

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }

const char* kSquare =
    "param x in [-1, 2]\nparam y in [-1, 2]\n"
    "constraint g1: -x <= 0\nconstraint g2: x - 1 <= 0\nconstraint g3: -y <= 0\nconstraint g4: y - 1 <= 0\n";

const char* kDisk = "param x in [-2, 2]\nparam y in [-2, 2]\nconstraint c: x^2 + y^2 - 1 <= 0\n";

ImplicitFunction fn(const char* text) { return region_function(parse_problem(text)); }

ErrorCode code_of(auto&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.code();
  }
  return ErrorCode::Ok;
}

}  // namespace

TEST_CASE("classify examples") {
  const ImplicitFunction ex2 = region_function(load_builtin("ex2"));
  const double p1[] = {2.5, 20}, p2[] = {10, 0};
  CHECK(classify(ex2, p1, 1e-9) == Membership::Feasible);
  CHECK(classify(ex2, p2, 1e-9) == Membership::Infeasible);

  const ImplicitFunction ex5 = region_function(load_builtin("ex5"));
  REQUIRE(ex5.names == std::vector<std::string>{"theta", "z"});
  const double p3[] = {1.5, 1.5};
  CHECK(classify(ex5, p3, 1e-9) == Membership::Boundary);

  CHECK(classify(1e-9, 1e-9) == Membership::Boundary);
  CHECK(classify(-1e-9, 1e-9) == Membership::Boundary);
  CHECK(classify(2e-9, 1e-9) == Membership::Feasible);
  CHECK(classify(0.0, 0.0) == Membership::Boundary);
  CHECK(std::string(membership_name(Membership::Infeasible)) == "infeasible");
}

TEST_CASE("unit square volume") {
  const ImplicitFunction sq = fn(kSquare);
  const Box box{{-1, -1}, {2, 2}};
  const VolumeEstimate v = mc_volume(sq, box, 200000, 3);
  CHECK(std::abs(v.volume - 1.0) <= 3 * v.std_error);
  CHECK(v.volume == doctest::Approx(9.0 * v.hits / v.samples));
  const double p = static_cast<double>(v.hits) / v.samples;
  CHECK(v.std_error == doctest::Approx(9.0 * std::sqrt(p * (1 - p) / v.samples)));
  CHECK(v.seed == 3);
  CHECK(v.samples == 200000);
  CHECK(v.sampling_box.lo == box.lo);
}

TEST_CASE("MC estimates are consistent across seeds") {
  const ImplicitFunction sq = fn(kSquare);
  const Box box{{-1, -1}, {2, 2}};
  int within = 0;
  for (std::uint64_t seed = 0; seed < 100; ++seed) {
    const VolumeEstimate v = mc_volume(sq, box, 20000, seed, 1);
    if (std::abs(v.volume - 1.0) <= 4 * v.std_error) ++within;
  }
  CHECK(within >= 99);
}

TEST_CASE("MC results do not depend on the thread count") {
  const ImplicitFunction ex3 = region_function(load_builtin("ex3"));
  const VolumeEstimate a = mc_volume(ex3, ex3.domain, 100000, 9, 1);
  const VolumeEstimate b = mc_volume(ex3, ex3.domain, 100000, 9, 4);
  const VolumeEstimate c = mc_volume(ex3, ex3.domain, 100000, 9, 7);
  CHECK(a.hits == b.hits);
  CHECK(a.hits == c.hits);
  CHECK(bits(a.volume) == bits(b.volume));

  const BoundingBox x = mc_bbox(ex3, ex3.domain, 50000, 4, 1), y = mc_bbox(ex3, ex3.domain, 50000, 4, 3);
  CHECK(x.lo == y.lo);
  CHECK(x.hi == y.hi);
}

TEST_CASE("adding a constraint never increases the volume") {
  const Problem base = load_builtin("ex1");
  const ImplicitFunction full = region_function(base);
  for (const char* name : {"ex1-trimmed", "ex1-trimmed-prose"}) {
    const ImplicitFunction trimmed = region_function(load_builtin(name));
    for (std::uint64_t seed : {1, 2, 3}) {
      const VolumeEstimate a = mc_volume(full, full.domain, 50000, seed);
      const VolumeEstimate b = mc_volume(trimmed, full.domain, 50000, seed);
      CHECK(b.volume <= a.volume);
    }
    const ImplicitFunction pa = projected_function(base, {}), pb = projected_function(load_builtin(name), {});
    CHECK(mc_volume(pb, pa.domain, 2000, 5).volume <= mc_volume(pa, pa.domain, 2000, 5).volume);
  }
}

TEST_CASE("sampling errors report the point") {
  const ImplicitFunction f = fn("param x in [-1, 1]\nconstraint c: -sqrt(x) <= 0\n");
  try {
    mc_volume(f, f.domain, 1000, 0);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::Domain);
    CHECK(std::string(e.what()).find(" at x=-") != std::string::npos);
  }
  const ImplicitFunction empty = fn("param x in [-1, 1]\nconstraint c: x^2 + 1 <= 0\n");
  CHECK(code_of([&] { mc_bbox(empty, empty.domain, 1000, 0); }) == ErrorCode::NoFeasibleSamples);
  CHECK(code_of([&] { mc_volume(empty, Box{{0, 0}, {1, 1}}, 10, 0); }) == ErrorCode::DimensionMismatch);
  CHECK(code_of([&] { mc_volume(empty, empty.domain, 0, 0); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("mc bounding boxes") {
  const ImplicitFunction disk = fn(kDisk);
  const BoundingBox b = mc_bbox(disk, disk.domain, 1000000, 1);
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(b.lo[k] + 1) <= 0.01);
    CHECK(std::abs(b.hi[k] - 1) <= 0.01);
    CHECK(b.lo[k] >= -1);
    CHECK(b.hi[k] <= 1);
  }
  CHECK(b.method == "mc");

  const ImplicitFunction sq = fn(kSquare);
  const BoundingBox s = mc_bbox(sq, Box{{-1, -1}, {2, 2}}, 200000, 2);
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(s.lo[k]) <= 0.01);
    CHECK(std::abs(s.hi[k] - 1) <= 0.01);
  }

  // Reference bounds for ex4 from a 2001 x 2001 scan of the raw constraints.
  const Problem p4 = load_builtin("ex4");
  double ylo = INFINITY, yhi = -INFINITY;
  for (int i = 0; i <= 2000; ++i) {
    for (int j = 0; j <= 2000; ++j) {
      const double t1 = -2 + 4.0 * i / 2000, t2 = -1 + 2.0 * j / 2000;
      if (testing::max_g(p4, {{"theta1", t1}, {"theta2", t2}}) <= 0) {
        ylo = std::min(ylo, t2);
        yhi = std::max(yhi, t2);
      }
    }
  }
  const ImplicitFunction ex4 = region_function(p4);
  const BoundingBox b4 = mc_bbox(ex4, ex4.domain, 400000, 1);
  CHECK(b4.lo[1] > -1);
  CHECK(b4.hi[1] < 1);
  CHECK(b4.lo[1] < 0);
  CHECK(b4.hi[1] > 0);
  CHECK(std::abs(b4.lo[1] - ylo) <= 0.01);
  CHECK(std::abs(b4.hi[1] - yhi) <= 0.01);
}

TEST_CASE("optimization bounding boxes") {
  const ImplicitFunction disk = fn(kDisk);
  OptBoxOptions opts;
  const OptBoxResult r = opt_bbox(disk, disk.domain, opts);
  REQUIRE(r.extrema.size() == 4);
  CHECK(r.extrema[0].direction == std::vector<double>{1, 0});
  CHECK(std::abs(r.extrema[0].x[0] + 1) <= 1e-4);  // direction (1, 0)
  CHECK(std::abs(r.extrema[1].x[0] - 1) <= 1e-4);  // direction (-1, 0)
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(r.box.lo[k] + 1) <= 1e-4);
    CHECK(std::abs(r.box.hi[k] - 1) <= 1e-4);
  }
  for (const auto& e : r.extrema) CHECK(std::abs(e.residual) <= 1e-6);
  CHECK(r.box.method == "opt");

  const ImplicitFunction ex2 = region_function(load_builtin("ex2"));
  const OptBoxResult r2 = opt_bbox(ex2, ex2.domain, opts);
  CHECK(std::abs(r2.box.hi[1] - 38.0) <= 0.1);
  // theta1 extremes: the line meets the lower parabola, the parabolas meet each other.
  CHECK(std::abs(r2.box.lo[0] - (3 - std::sqrt(137.0)) / 2) <= 1e-3);
  CHECK(std::abs(r2.box.hi[0] - std::sqrt(21.0)) <= 1e-3);
  CHECK(std::abs(r2.box.lo[1] + 2.25) <= 1e-3);

  // Containment of the sampled box in the optimized one.
  for (const auto* f : {&disk, &ex2}) {
    const OptBoxResult o = opt_bbox(*f, f->domain, opts);
    const BoundingBox m = mc_bbox(*f, f->domain, 200000, 7);
    for (std::size_t k = 0; k < f->dims(); ++k) {
      CHECK(m.lo[k] >= o.box.lo[k] - 1e-3);
      CHECK(m.hi[k] <= o.box.hi[k] + 1e-3);
    }
  }

  OptBoxOptions t1 = opts, t4 = opts;
  t1.threads = 1;
  t4.threads = 4;
  const OptBoxResult a = opt_bbox(ex2, ex2.domain, t1), b = opt_bbox(ex2, ex2.domain, t4);
  CHECK(a.box.lo == b.box.lo);
  CHECK(a.box.hi == b.box.hi);

  OptBoxOptions diag = opts;
  diag.directions = {{1, 0}, {-1, 0}, {0, 1}, {0, -1}, {std::sqrt(0.5), std::sqrt(0.5)}};
  const OptBoxResult d = opt_bbox(disk, disk.domain, diag);
  REQUIRE(d.extrema.size() == 5);
  CHECK(d.extrema[4].value == doctest::Approx(-1.0).epsilon(1e-4));

  OptBoxOptions missing = opts;
  missing.directions = {{1, 0}};
  CHECK(code_of([&] { opt_bbox(disk, disk.domain, missing); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("boundary of the unit disk") {
  const ImplicitFunction disk = fn(kDisk);
  const Boundary2D b = boundary_2d(disk, disk.domain, 256, 1e-10);
  REQUIRE(b.polylines.size() == 1);
  CHECK(b.closed[0]);
  CHECK(b.max_residual <= 1e-10);
  const double h = 4.0 / 256;
  const auto& line = b.polylines[0];
  CHECK(line.size() > 100);
  for (std::size_t i = 0; i < line.size(); ++i) {
    const auto& v = line[i];
    REQUIRE(std::abs(v[0] * v[0] + v[1] * v[1] - 1) <= 2e-10);
    const auto& w = line[(i + 1) % line.size()];
    REQUIRE(std::abs(v[0] - w[0]) <= h * (1 + 1e-9));
    REQUIRE(std::abs(v[1] - w[1]) <= h * (1 + 1e-9));
  }
}

TEST_CASE("boundaries of the two-dimensional built-ins") {
  const ImplicitFunction ex4 = region_function(load_builtin("ex4"));
  const Boundary2D in_t = boundary_2d(ex4, ex4.domain, 512, 1e-10);
  CHECK(in_t.polylines.size() >= 2);
  CHECK(in_t.max_residual <= 1e-10);

  const Boundary2D wide = boundary_2d(ex4, Box{{-2, -1.25}, {2, 1.25}}, 512, 1e-10);
  int closed = 0;
  for (bool c : wide.closed) closed += c;
  CHECK(closed >= 2);

  const ImplicitFunction ex1 = region_function(load_builtin("ex1"));
  const Boundary2D b1 = boundary_2d(ex1, Box{{1, 0}, {1.8, 250}}, 512, 1e-10);
  CHECK(b1.polylines.size() >= 2);
  CHECK(b1.max_residual <= 1e-10);

  CHECK(code_of([&] { boundary_2d(ex4, ex4.domain, 8, 1e-10); }) == ErrorCode::InvalidArgument);
  const ImplicitFunction ex7 = region_function(load_builtin("ex7"));
  CHECK(code_of([&] { boundary_2d(ex7, ex7.domain, 64, 1e-10); }) == ErrorCode::DimensionMismatch);

  const Boundary2D a = boundary_2d(ex4, ex4.domain, 128, 1e-10, 1);
  const Boundary2D c = boundary_2d(ex4, ex4.domain, 128, 1e-10, 4);
  CHECK(a.polylines == c.polylines);
}

TEST_CASE("grid field examples") {
  const ImplicitFunction one = fn("param x in [0, 1]\nparam y in [0, 1]\nconstraint c: -1 + 0 * x + 0 * y <= 0\n");
  const GridField f = grid_field(one, one.domain, 4, 3);
  CHECK(f.values.size() == 12);
  for (double v : f.values) CHECK(v == 1.0);

  const ImplicitFunction disk = fn(kDisk);
  const GridField d = grid_field(disk, disk.domain, 3, 3);
  CHECK(d.at(1, 1) > 0);
  for (int ix : {0, 2}) {
    for (int iy : {0, 2}) CHECK(d.at(ix, iy) < 0);
  }
  CHECK(d.cell_x(0) == doctest::Approx(-4.0 / 3));
  CHECK(d.cell_y(2) == doctest::Approx(4.0 / 3));

  const ImplicitFunction ex2 = region_function(load_builtin("ex2"));
  const GridField g = grid_field(ex2, ex2.domain, 256, 256);
  const int ix = static_cast<int>((2.5 + 6) / 12 * 256), iy = static_cast<int>((20 + 4) / 46.0 * 256);
  CHECK(g.at(ix, iy) > 0);
  CHECK(g.at(255, 0) < 0);

  CHECK(code_of([&] { grid_field(disk, disk.domain, 1, 5); }) == ErrorCode::InvalidArgument);
  const GridField t1 = grid_field(ex2, ex2.domain, 64, 32, 1), t4 = grid_field(ex2, ex2.domain, 64, 32, 4);
  CHECK(t1.values == t4.values);
}

TEST_CASE("grid sign changes are crossed by the boundary") {
  for (const char* which : {"disk", "ex2", "ex4"}) {
    CAPTURE(which);
    const ImplicitFunction f = std::string(which) == "disk" ? fn(kDisk) : region_function(load_builtin(which));
    const int n = 64;
    const GridField g = grid_field(f, f.domain, n, n);
    // Marching grid whose vertices are the field's cell centers.
    const Box inner{{g.cell_x(0), g.cell_y(0)}, {g.cell_x(n - 1), g.cell_y(n - 1)}};
    const Boundary2D b = boundary_2d(f, inner, n - 1, 1e-10);
    const double hx = (inner.hi[0] - inner.lo[0]) / (n - 1), hy = (inner.hi[1] - inner.lo[1]) / (n - 1);
    std::set<std::pair<int, int>> h_edges, v_edges;
    for (const auto& line : b.polylines) {
      for (const auto& v : line) {
        const double fx = (v[0] - inner.lo[0]) / hx, fy = (v[1] - inner.lo[1]) / hy;
        if (std::abs(fy - std::round(fy)) < 1e-6) h_edges.insert({static_cast<int>(std::floor(fx)), static_cast<int>(std::round(fy))});
        if (std::abs(fx - std::round(fx)) < 1e-6) v_edges.insert({static_cast<int>(std::round(fx)), static_cast<int>(std::floor(fy))});
      }
    }
    auto inside = [&](int i, int j) { return g.at(i, j) > 0; };
    int changes = 0;
    for (int j = 0; j < n; ++j) {
      for (int i = 0; i + 1 < n; ++i) {
        if (inside(i, j) != inside(i + 1, j)) {
          ++changes;
          CHECK(h_edges.count({i, j}) == 1);
        }
      }
    }
    for (int j = 0; j + 1 < n; ++j) {
      for (int i = 0; i < n; ++i) {
        if (inside(i, j) != inside(i, j + 1)) {
          ++changes;
          CHECK(v_edges.count({i, j}) == 1);
        }
      }
    }
    CHECK(changes > 0);
  }
}
