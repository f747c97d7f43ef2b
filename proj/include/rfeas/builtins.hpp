#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "rfeas/dsl.hpp"

namespace rfeas {

/// Names of the embedded example problems, in a fixed order.
const std::vector<std::string>& builtin_names();

/// Problem-file text of a built-in. Throws UnknownBuiltin.
std::string_view builtin_text(std::string_view name);

Problem load_builtin(std::string_view name);

}  // namespace rfeas
