#pragma once

#include <string>

namespace rfeas {

/// Shortest decimal text that parses back to exactly `value`.
std::string format_double(double value);

}  // namespace rfeas
