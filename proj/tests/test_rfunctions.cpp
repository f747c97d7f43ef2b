#include <bit>
#include <cmath>

#include "doctest.h"
#include "rfeas/builtins.hpp"
#include "rfeas/error.hpp"
#include "rfeas/rfunctions.hpp"
#include "support.hpp"

using namespace rfeas;

namespace {

std::uint64_t bits(double v) { return std::bit_cast<std::uint64_t>(v); }
int step(double v) { return v >= 0.0 ? 1 : 0; }

Problem interval_problem() {
  return parse_problem("param x in [-3, 3]\nconstraint g1: x - 1 <= 0\nconstraint g2: -x <= 0\n");
}

// Random point in the box of the region's free variables.
Env random_point(testing::Rng& rng, const Problem& p, const RegionExpr& r) {
  Env env;
  for (const auto& name : r.free_variables) {
    const auto* v = p.find(name);
    env[name] = rng.uniform(v->lo, v->hi);
  }
  return env;
}

double min_phi(const Problem& p, const Env& free) {
  Env env = free;
  for (const auto& [k, v] : p.design_values()) env[k] = v;
  return -testing::max_g(p, env);
}

}  // namespace

TEST_CASE("scalar examples") {
  CHECK(r_conj(3, 5, 1) == 3.0);
  CHECK(r_conj(1, -1, 0) == doctest::Approx(-std::sqrt(2.0)).epsilon(1e-15));
  CHECK(r_conj(0, 0, 0.5) == 0.0);
  CHECK(r_disj(3, 5, 1) == 5.0);
  CHECK(r_disj(1, -1, 0) == doctest::Approx(std::sqrt(2.0)).epsilon(1e-15));
  CHECK(r_disj(-2, -2, 1) == -2.0);
  CHECK(r_neg(2) == -2.0);
  CHECK(r_neg(0) == 0.0);
  CHECK(r_neg(-std::sqrt(2.0)) == std::sqrt(2.0));
}

TEST_CASE("scalar errors") {
  CHECK_THROWS_AS(r_conj(1, 2, 1.5), Error);
  CHECK_THROWS_AS(r_conj(1, 2, -1), Error);
  try {
    r_disj(NAN, 1, 0.5);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NonFiniteInput);
  }
  try {
    r_conj(1, 1, 2);
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::AlphaOutOfRange);
  }
}

TEST_CASE("alpha = 1 reduces to min and max") {
  testing::Rng rng(1);
  for (int i = 0; i < 100000; ++i) {
    const double a = rng.uniform(-10, 10), b = rng.uniform(-10, 10);
    REQUIRE(std::abs(r_conj(a, b, 1) - std::min(a, b)) <= 1e-12);
    REQUIRE(std::abs(r_disj(a, b, 1) - std::max(a, b)) <= 1e-12);
  }
}

TEST_CASE("sign equivalence, De Morgan and symmetry") {
  testing::Rng rng(2);
  for (double alpha : {-0.5, 0.0, 0.5, 1.0}) {
    CAPTURE(alpha);
    for (int i = 0; i < 100000; ++i) {
      double a = rng.uniform(-10, 10), b = rng.uniform(-10, 10);
      if (i % 10 == 0) a = 0.0;
      if (i % 15 == 0) b = -a;
      REQUIRE(step(r_conj(a, b, alpha)) == step(std::min(a, b)));
      REQUIRE(step(r_disj(a, b, alpha)) == step(std::max(a, b)));
      REQUIRE(bits(r_disj(a, b, alpha)) == bits(-r_conj(-a, -b, alpha)));
      REQUIRE(bits(r_conj(a, b, alpha)) == bits(r_conj(b, a, alpha)));
      REQUIRE(bits(r_disj(a, b, alpha)) == bits(r_disj(b, a, alpha)));
    }
  }
}

TEST_CASE("symbolic forms match the scalar ones") {
  testing::Rng rng(3);
  const Expr a = Expr::variable("a"), b = Expr::variable("b");
  for (double alpha : {-0.5, 0.0, 0.5, 1.0}) {
    const Expr c = r_conj_expr(a, b, alpha), d = r_disj_expr(a, b, alpha);
    for (int i = 0; i < 2000; ++i) {
      const double x = rng.uniform(-10, 10), y = rng.uniform(-10, 10);
      const Env env{{"a", x}, {"b", y}};
      REQUIRE(eval(c, env) == doctest::Approx(r_conj(x, y, alpha)).epsilon(1e-12).scale(1.0));
      REQUIRE(eval(d, env) == doctest::Approx(r_disj(x, y, alpha)).epsilon(1e-12).scale(1.0));
    }
  }
  // Radicand never goes negative, even for equal arguments.
  CHECK(eval(r_conj_expr(a, b, 0.3), {{"a", 0.1}, {"b", 0.1}}) == doctest::Approx(r_conj(0.1, 0.1, 0.3)).epsilon(1e-14));
}

TEST_CASE("build_region examples") {
  const RegionExpr r = build_region(interval_problem());
  CHECK(eval_region(r, {{"x", 0.5}}) == 0.5);
  CHECK(eval_region(r, {{"x", 2}}) == -1.0);
  CHECK(r.fold_order == std::vector<std::string>{"g1", "g2"});

  const RegionExpr r2 = build_region(load_builtin("ex2"));
  CHECK(eval_region(r2, {{"theta1", 2.5}, {"theta2", 20}}) == 13.25);

  const RegionExpr r4 = build_region(load_builtin("ex4"));
  CHECK(eval_region(r4, {{"theta1", 0}, {"theta2", 0}}) == 0.0);

  const RegionExpr r5 = build_region(load_builtin("ex5"));
  CHECK(r5.free_variables == std::vector<std::string>{"theta", "z"});
  CHECK(referenced_variables(r5.expr).count("d") == 0);
  CHECK(r5.problem_name == "ex5");
}

TEST_CASE("region sign equals the sign of min phi on every built-in") {
  testing::Rng rng(4);
  for (const auto& name : builtin_names()) {
    for (double alpha : {-0.5, 0.0, 0.5, 1.0}) {
      CAPTURE(name);
      CAPTURE(alpha);
      Problem p = load_builtin(name);
      p.alpha = alpha;
      const RegionExpr r = build_region(p);
      for (int i = 0; i < 10000; ++i) {
        const Env x = random_point(rng, p, r);
        const double m = min_phi(p, x);
        const double v = eval_region(r, x);
        REQUIRE(step(v) == step(m));
        if (alpha == 1.0) REQUIRE(v == doctest::Approx(m).epsilon(1e-12).scale(1.0));
        const auto coords = to_coordinates(r.free_variables, x);
        REQUIRE(r.value(coords) == v);
      }
    }
  }
}

TEST_CASE("fold order changes values but not signs") {
  testing::Rng rng(5);
  for (const char* name : {"ex1", "ex3", "ex4", "ex6", "ex7"}) {
    for (double alpha : {-0.5, 0.0, 0.5, 1.0}) {
      CAPTURE(name);
      CAPTURE(alpha);
      Problem p = load_builtin(name);
      p.alpha = alpha;
      std::vector<std::size_t> rev(p.constraints.size());
      for (std::size_t i = 0; i < rev.size(); ++i) rev[i] = rev.size() - 1 - i;
      const RegionExpr fwd = build_region(p);
      const RegionExpr bwd = build_region(p, rev);
      CHECK(bwd.fold_order.front() == p.constraints.back().label);
      for (int i = 0; i < 5000; ++i) {
        const Env x = random_point(rng, p, fwd);
        const double a = eval_region(fwd, x), b = eval_region(bwd, x);
        REQUIRE(step(a) == step(b));
        if (alpha == 1.0) REQUIRE(a == doctest::Approx(b).epsilon(1e-12).scale(1.0));
      }
    }
  }
  CHECK_THROWS_AS(build_region(load_builtin("ex2"), {0, 0, 1}), Error);
}

TEST_CASE("psi_open examples") {
  const Problem ex2 = load_builtin("ex2");
  PsiEval a = psi_open(ex2, {{"theta1", 2.5}, {"theta2", 20}});
  CHECK(a.psi == -13.25);
  CHECK(a.active_label == "f2");
  CHECK_FALSE(a.z_star.has_value());
  REQUIRE(a.per_constraint.size() == 3);
  CHECK(a.per_constraint[0].second == -16.25);

  PsiEval b = psi_open(ex2, {{"theta1", 10}, {"theta2", 0}});
  CHECK(b.psi == 108.0);
  CHECK(b.active_label == "f2");

  const Problem half = parse_problem("param x in [-1, 1]\nconstraint g: x <= 0\n");
  CHECK(psi_open(half, {{"x", 0}}).psi == 0.0);

  PsiEval out = psi_open(ex2, {{"theta1", 7}, {"theta2", 0}});
  CHECK(out.outside_domain);

  // Ties go to the lowest index.
  const Problem tie = parse_problem("param x in [-1, 1]\nconstraint a: x <= 0\nconstraint b: x <= 0\n");
  CHECK(psi_open(tie, {{"x", 0.5}}).active_label == "a");

  try {
    psi_open(load_builtin("ex5"), {{"theta", 1.5}});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::HasControlVariables);
  }
}

TEST_CASE("psi_open equals max g at alpha = 1") {
  testing::Rng rng(6);
  for (const char* name : {"ex2", "ex3", "ex4"}) {
    const Problem p = load_builtin(name);
    const RegionExpr r = build_region(p);
    for (int i = 0; i < 2000; ++i) {
      const Env x = random_point(rng, p, r);
      const PsiEval e = psi_open(p, r, x);
      REQUIRE(std::abs(e.psi - testing::max_g(p, x)) <= 1e-12);
      REQUIRE((e.psi <= 0) == (testing::max_g(p, x) <= 0));
    }
  }
}
