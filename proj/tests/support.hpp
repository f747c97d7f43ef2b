#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include "rfeas/dsl.hpp"
#include "rfeas/expr.hpp"

namespace testing {

// xorshift64*; deliberately not the library's generator.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : s_(seed ? seed : 0x9e3779b97f4a7c15ULL) {}
  std::uint64_t next() {
    s_ ^= s_ >> 12;
    s_ ^= s_ << 25;
    s_ ^= s_ >> 27;
    return s_ * 0x2545f4914f6cdd1dULL;
  }
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + uniform() * (hi - lo); }
  int below(int n) { return static_cast<int>(next() % static_cast<std::uint64_t>(n)); }

 private:
  std::uint64_t s_;
};

inline std::string fixture_path(const std::string& name) { return std::string(RFEAS_FIXTURE_DIR) + "/" + name; }

inline std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in(path);
  std::vector<std::string> out;
  for (std::string line; std::getline(in, line);) {
    if (!line.empty() && line[0] != '#') out.push_back(line);
  }
  return out;
}

inline std::vector<std::string> split(const std::string& s, const std::string& sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const auto pos = s.find(sep, start);
    out.push_back(s.substr(start, pos == std::string::npos ? std::string::npos : pos - start));
    if (pos == std::string::npos) return out;
    start = pos + sep.size();
  }
}

// max_j g_j straight from the problem's constraint trees.
inline double max_g(const rfeas::Problem& p, const rfeas::Env& env) {
  double m = -INFINITY;
  for (const auto& c : p.constraints) m = std::max(m, rfeas::eval(c.g, env));
  return m;
}

struct OracleResult {
  double psi;
  double z;
};

// Brute-force min over one control of max_j g_j: a uniform z-grid, then
// ternary search on the bracketing cells (the objective is convex in z for
// the built-ins that use it). Works on the raw constraint trees.
inline OracleResult brute_force_psi(const rfeas::Problem& p, const rfeas::Env& x, int grid = 100000) {
  std::vector<std::string> slots;
  std::vector<double> values;
  std::size_t z_slot = 0;
  const rfeas::VariableSpec* z = nullptr;
  for (const auto& v : p.variables) {
    slots.push_back(v.name);
    if (v.role == rfeas::Role::Control) {
      z = &v;
      z_slot = values.size();
      values.push_back(0.0);
    } else if (v.role == rfeas::Role::Design) {
      values.push_back(v.fixed_value);
    } else {
      values.push_back(x.at(v.name));
    }
  }
  std::vector<rfeas::CompiledExpr> gs;
  for (const auto& c : p.constraints) gs.emplace_back(c.g, slots);
  auto f = [&](double zv) {
    values[z_slot] = zv;
    double m = -INFINITY;
    for (const auto& g : gs) m = std::max(m, g(values));
    return m;
  };
  const double h = (z->hi - z->lo) / grid;
  int best = 0;
  double fbest = INFINITY;
  for (int i = 0; i <= grid; ++i) {
    const double v = f(z->lo + i * h);
    if (v < fbest) {
      fbest = v;
      best = i;
    }
  }
  double a = z->lo + std::max(0, best - 1) * h;
  double b = z->lo + std::min(grid, best + 1) * h;
  for (int it = 0; it < 200; ++it) {
    const double m1 = a + (b - a) / 3, m2 = b - (b - a) / 3;
    if (f(m1) <= f(m2)) {
      b = m2;
    } else {
      a = m1;
    }
  }
  const double zm = (a + b) / 2;
  const double fm = f(zm);
  return fm < fbest ? OracleResult{fm, zm} : OracleResult{fbest, z->lo + best * h};
}

// Random expression tree over the given variables. Division and sqrt are
// guarded so evaluation stays finite on [-3, 3].
inline rfeas::Expr random_tree(Rng& rng, const std::vector<std::string>& vars, int depth) {
  using rfeas::Expr;
  if (depth <= 0 || rng.below(5) == 0) {
    switch (rng.below(3)) {
      case 0: return Expr::variable(vars[rng.below(static_cast<int>(vars.size()))]);
      case 1: return Expr::constant(std::round(rng.uniform(-10, 10) * 8) / 8);
      default: return Expr::constant(rng.uniform(-5, 5));
    }
  }
  auto sub = [&] { return random_tree(rng, vars, depth - 1); };
  switch (rng.below(11)) {
    case 0: return Expr::negate(sub());
    case 1: return Expr::abs(sub());
    case 2: return Expr::sqrt(Expr::abs(sub()));
    case 3: return sub() + sub();
    case 4: return sub() - sub();
    case 5: return sub() * sub();
    case 6: return sub() / (Expr::abs(sub()) + Expr::constant(1.0));
    case 7: return Expr::pow(sub(), static_cast<double>(rng.below(4)));
    case 8: return Expr::pow(Expr::abs(sub()) + Expr::constant(0.5), rng.below(2) ? 0.5 : -1.5);
    case 9: {
      std::vector<Expr> args{sub(), sub()};
      if (rng.below(2)) args.push_back(sub());
      return Expr::min(args);
    }
    default: {
      std::vector<Expr> args{sub(), sub()};
      if (rng.below(2)) args.push_back(sub());
      return Expr::max(args);
    }
  }
}

}  // namespace testing
