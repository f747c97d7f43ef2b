#include "rfeas/builtins.hpp"

#include <utility>

#include "rfeas/error.hpp"

namespace rfeas {

namespace {

// Heat exchanger network.
constexpr const char* kEx1Base = R"(problem ex1
param F_H1 in [1, 1.8]
# Q_c >= 0 is a cooling load; 300 covers the largest feasible load (227)
# with margin. An enclosure, not part of the constraint set.
control Q_c in [0, 300]
constraint f1: -25 + Q_c * (1 / F_H1 - 0.5) + 10 / F_H1 <= 0
constraint f2: -190 + 10 / F_H1 + Q_c / F_H1 <= 0
constraint f3: -270 + 250 / F_H1 + Q_c / F_H1 <= 0
constraint f4: 260 - 250 / F_H1 - Q_c / F_H1 <= 0
)";

// Trimming constraint exactly as printed; keeps F_H1 >= 1.7.
constexpr const char* kEx1TrimmedTail = R"(constraint f5: 1.7 - F_H1 <= 0
)";

// Trimming as described in words; removes the tip F_H1 > 1.7.
constexpr const char* kEx1TrimmedProseTail = R"(constraint f5: F_H1 - 1.7 <= 0
)";

constexpr const char* kEx2 = R"(problem ex2
# No bounds are given for this set. The box encloses the region: the
# parabolas meet at theta1 = +-sqrt(21), and theta2 stays within [-2.25, 40.25].
param theta1 in [-6, 6]
param theta2 in [-4, 42]
constraint f1: theta2 + theta1^2 - theta1 - 40 <= 0
constraint f2: theta1^2 + theta1 - theta2 - 2 <= 0
constraint f3: theta2 - 4 * theta1 - 30 <= 0
)";

// f2 uses theta1^2/2; see the README on this example.
constexpr const char* kEx3 = R"(problem ex3
param theta1 in [-10, 10]
param theta2 in [-15, 15]
constraint f1: theta2 - 2 * theta1 - 15 <= 0
constraint f2: theta1^2 / 2 + 4 * theta1 - 5 - theta2 <= 0
constraint f3: theta2 * (6 + theta1) - 80 <= 0
constraint f4: 10 - (theta1 - 4)^2 / 5 - 2 * theta2^2 <= 0
)";

// Six-hump camel plus two linear cuts.
constexpr const char* kEx4 = R"(problem ex4
param theta1 in [-2, 2]
param theta2 in [-1, 1]
constraint f1: 4 * theta1^2 - 2.1 * theta1^4 + theta1^6 / 3 + theta1 * theta2 - 4 * theta2^2 + 4 * theta2^4 <= 0
constraint f2: 2 * theta1 - theta2 - 3 <= 0
constraint f3: -0.8 * theta1 + theta2 - 1.8 <= 0
)";

constexpr const char* kEx5 = R"(problem ex5
param theta in [1, 2]
control z in [-20, 20]
design d = 0.5
constraint f1: -z + theta <= 0
constraint f2: z - 2 * theta + 2 - d <= 0
)";

constexpr const char* kEx6 = R"(problem ex6
param theta in [1, 2]
control z in [-20, 20]
design d = 1
constraint f1: -z + theta <= 0
constraint f2: z - 2 * theta + 2 - d <= 0
constraint f3: -z + 6 * theta - 9 * d <= 0
)";

constexpr const char* kEx7 = R"(problem ex7
param theta1 in [0, 4]
param theta2 in [0, 4]
param theta3 in [0, 4]
control z in [-100, 100]
design d1 = 3
design d2 = 1
constraint f1: -z - theta1 + 0.5 * theta2^2 + 2.0 * theta3^2 + d1 - 3 * d2 - 8 <= 0
constraint f2: -z - theta1 / 3 - theta2 - theta3 / 3 + d2 + 8 / 3 <= 0
constraint f3: z + theta1 * theta1 - theta2 - d1 + theta3 - 4 <= 0
)";

std::string trimmed(const char* name, const char* tail) {
  std::string text = kEx1Base;
  text.replace(0, text.find('\n'), std::string("problem ") + name);
  return text + tail;
}

const std::vector<std::pair<std::string, std::string>>& registry() {
  static const std::vector<std::pair<std::string, std::string>> items = {
      {"ex1", kEx1Base},
      {"ex1-trimmed", trimmed("ex1_trimmed", kEx1TrimmedTail)},
      {"ex1-trimmed-prose", trimmed("ex1_trimmed_prose", kEx1TrimmedProseTail)},
      {"ex2", kEx2},
      {"ex3", kEx3},
      {"ex4", kEx4},
      {"ex5", kEx5},
      {"ex6", kEx6},
      {"ex7", kEx7},
  };
  return items;
}

}  // namespace

const std::vector<std::string>& builtin_names() {
  static const std::vector<std::string> names = [] {
    std::vector<std::string> out;
    for (const auto& [name, text] : registry()) out.push_back(name);
    return out;
  }();
  return names;
}

std::string_view builtin_text(std::string_view name) {
  for (const auto& [n, text] : registry()) {
    if (n == name) return text;
  }
  throw Error(ErrorCode::UnknownBuiltin, "unknown built-in problem '" + std::string(name) + "'");
}

Problem load_builtin(std::string_view name) { return parse_problem(builtin_text(name)); }

}  // namespace rfeas
