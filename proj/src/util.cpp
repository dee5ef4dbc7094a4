#include "tsgb/util.hpp"

#include <charconv>
#include <cmath>

namespace tsgb {

std::string format_double(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

std::string format_bool(bool v) { return v ? "1" : "0"; }

}  // namespace tsgb
