#include <cmath>
#include <functional>
#include <map>
#include <sstream>

#include "doctest.h"
#include "rfeas/builtins.hpp"
#include "rfeas/error.hpp"
#include "support.hpp"

using namespace rfeas;

namespace {

using G = std::function<double(const Env&)>;

// The constraint sets written out by hand (design values inlined).
std::map<std::string, std::vector<G>> hand_coded() {
  const std::vector<G> ex1 = {
      [](const Env& e) { const double F = e.at("F_H1"), Q = e.at("Q_c"); return -25 + Q * (1 / F - 0.5) + 10 / F; },
      [](const Env& e) { const double F = e.at("F_H1"), Q = e.at("Q_c"); return -190 + 10 / F + Q / F; },
      [](const Env& e) { const double F = e.at("F_H1"), Q = e.at("Q_c"); return -270 + 250 / F + Q / F; },
      [](const Env& e) { const double F = e.at("F_H1"), Q = e.at("Q_c"); return 260 - 250 / F - Q / F; },
  };
  auto with = [&](G extra) {
    auto v = ex1;
    v.push_back(std::move(extra));
    return v;
  };
  std::map<std::string, std::vector<G>> m;
  m["ex1"] = ex1;
  m["ex1-trimmed"] = with([](const Env& e) { return 1.7 - e.at("F_H1"); });
  m["ex1-trimmed-prose"] = with([](const Env& e) { return e.at("F_H1") - 1.7; });
  m["ex2"] = {
      [](const Env& e) { const double a = e.at("theta1"), b = e.at("theta2"); return b + a * a - a - 40; },
      [](const Env& e) { const double a = e.at("theta1"), b = e.at("theta2"); return a * a + a - b - 2; },
      [](const Env& e) { const double a = e.at("theta1"), b = e.at("theta2"); return b - 4 * a - 30; },
  };
  m["ex3"] = {
      [](const Env& e) { const double a = e.at("theta1"), b = e.at("theta2"); return b - 2 * a - 15; },
      [](const Env& e) { const double a = e.at("theta1"), b = e.at("theta2"); return a * a / 2 + 4 * a - 5 - b; },
      [](const Env& e) { const double a = e.at("theta1"), b = e.at("theta2"); return b * (6 + a) - 80; },
      [](const Env& e) {
        const double a = e.at("theta1"), b = e.at("theta2");
        return 10 - (a - 4) * (a - 4) / 5 - 2 * b * b;
      },
  };
  m["ex4"] = {
      [](const Env& e) {
        const double a = e.at("theta1"), b = e.at("theta2");
        return 4 * a * a - 2.1 * std::pow(a, 4) + std::pow(a, 6) / 3 + a * b - 4 * b * b + 4 * std::pow(b, 4);
      },
      [](const Env& e) { return 2 * e.at("theta1") - e.at("theta2") - 3; },
      [](const Env& e) { return -0.8 * e.at("theta1") + e.at("theta2") - 1.8; },
  };
  m["ex5"] = {
      [](const Env& e) { return -e.at("z") + e.at("theta"); },
      [](const Env& e) { return e.at("z") - 2 * e.at("theta") + 2 - 0.5; },
  };
  m["ex6"] = {
      [](const Env& e) { return -e.at("z") + e.at("theta"); },
      [](const Env& e) { return e.at("z") - 2 * e.at("theta") + 2 - 1; },
      [](const Env& e) { return -e.at("z") + 6 * e.at("theta") - 9; },
  };
  m["ex7"] = {
      [](const Env& e) {
        const double t1 = e.at("theta1"), t2 = e.at("theta2"), t3 = e.at("theta3"), z = e.at("z");
        return -z - t1 + 0.5 * t2 * t2 + 2 * t3 * t3 + 3 - 3 - 8;
      },
      [](const Env& e) {
        const double t1 = e.at("theta1"), t2 = e.at("theta2"), t3 = e.at("theta3"), z = e.at("z");
        return -z - t1 / 3 - t2 - t3 / 3 + 1 + 8.0 / 3;
      },
      [](const Env& e) {
        const double t1 = e.at("theta1"), t2 = e.at("theta2"), t3 = e.at("theta3"), z = e.at("z");
        return z + t1 * t1 - t2 - 3 + t3 - 4;
      },
  };
  return m;
}

Env parse_point(const std::string& text) {
  Env env;
  for (const auto& part : testing::split(text, ",")) {
    const auto kv = testing::split(part, "=");
    env[kv.at(0)] = std::stod(kv.at(1));
  }
  return env;
}

std::string trim(const std::string& s) {
  const auto a = s.find_first_not_of(' '), b = s.find_last_not_of(' ');
  return a == std::string::npos ? "" : s.substr(a, b - a + 1);
}

}  // namespace

TEST_CASE("nine built-ins that all parse") {
  const auto& names = builtin_names();
  CHECK(names == std::vector<std::string>{"ex1", "ex1-trimmed", "ex1-trimmed-prose", "ex2", "ex3", "ex4", "ex5",
                                          "ex6", "ex7"});
  for (const auto& n : names) {
    CAPTURE(n);
    const Problem p = load_builtin(n);
    CHECK(p.warnings.empty());
    CHECK(p.alpha == 1.0);
  }
  try {
    builtin_text("ex8");
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UnknownBuiltin);
  }
  const Problem ex7 = load_builtin("ex7");
  CHECK(ex7.find("d1")->fixed_value == 3.0);
  CHECK(ex7.find("d2")->fixed_value == 1.0);
  CHECK(ex7.find("z")->lo == -100.0);
  CHECK(load_builtin("ex5").find("z")->hi == 20.0);
  CHECK(load_builtin("ex6").find("d")->fixed_value == 1.0);
  CHECK(load_builtin("ex1").find("Q_c")->hi == 300.0);
}

TEST_CASE("constraint lines match the fixture byte for byte") {
  std::map<std::string, std::vector<std::string>> expected;
  for (const auto& line : testing::read_lines(testing::fixture_path("builtin_constraints.txt"))) {
    const auto bar = line.find(" | ");
    expected[line.substr(0, bar)].push_back(line.substr(bar + 3));
  }
  REQUIRE(expected.size() == builtin_names().size());
  for (const auto& name : builtin_names()) {
    CAPTURE(name);
    std::vector<std::string> actual;
    std::istringstream in{std::string(builtin_text(name))};
    for (std::string line; std::getline(in, line);) {
      if (line.rfind("constraint ", 0) == 0) actual.push_back(line);
    }
    CHECK(actual == expected[name]);
  }
}

TEST_CASE("constraints at pinned points match stored values") {
  const auto by_hand = hand_coded();
  std::map<std::string, int> rows;
  for (const auto& line : testing::read_lines(testing::fixture_path("builtin_points.txt"))) {
    const auto parts = testing::split(line, " | ");
    REQUIRE(parts.size() == 3);
    const std::string name = trim(parts[0]);
    CAPTURE(line);
    const Problem p = load_builtin(name);
    Env env = parse_point(trim(parts[1]));
    const auto stored = testing::split(trim(parts[2]), ",");
    REQUIRE(stored.size() == p.constraints.size());
    const auto& hand = by_hand.at(name);
    Env full = env;
    for (const auto& [k, v] : p.design_values()) full[k] = v;
    for (std::size_t j = 0; j < stored.size(); ++j) {
      const double want = std::stod(stored[j]);
      const double got = eval(p.constraints[j].g, full);
      CHECK(std::abs(got - want) <= 1e-12 * std::max(1.0, std::abs(want)));
      CHECK(std::abs(hand[j](env) - want) <= 1e-12 * std::max(1.0, std::abs(want)));
    }
    ++rows[name];
  }
  for (const auto& name : builtin_names()) CHECK(rows[name] == 5);
}
