#include "rfeas/format.hpp"

#include <charconv>

namespace rfeas {

std::string format_double(double value) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, value);
  return std::string(buf, res.ptr);
}

}  // namespace rfeas
