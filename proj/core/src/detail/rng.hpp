#pragma once

#include <cstdint>
#include <random>

namespace balayage::detail {

// mt19937_64 with a portable [0, 1) mapping; std distributions differ between libraries.
class Rng {
public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}
  double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  std::uint64_t next() { return gen_(); }

private:
  std::mt19937_64 gen_;
};

}  // namespace balayage::detail
