#pragma once

#include <cmath>
#include <nlohmann/json.hpp>

namespace balayage::detail {

// JSON has no inf/nan; they are written as strings so reports stay parseable.
inline nlohmann::json json_number(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

}  // namespace balayage::detail
