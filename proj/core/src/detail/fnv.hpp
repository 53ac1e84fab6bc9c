#pragma once

#include <cstdint>
#include <cstring>
#include <string_view>

namespace balayage::detail {

class Fnv1a {
public:
  void add_bytes(const void* data, std::size_t n) {
    const auto* p = static_cast<const unsigned char*>(data);
    for (std::size_t i = 0; i < n; ++i) {
      h_ ^= p[i];
      h_ *= 1099511628211ULL;
    }
  }
  void add(double v) {
    if (v == 0.0) v = 0.0;  // fold -0
    std::uint64_t bits = 0;
    std::memcpy(&bits, &v, sizeof bits);
    add(bits);
  }
  void add(std::uint64_t v) {
    unsigned char b[8];
    for (int i = 0; i < 8; ++i) b[i] = static_cast<unsigned char>(v >> (8 * i));
    add_bytes(b, 8);
  }
  void add(std::int64_t v) { add(static_cast<std::uint64_t>(v)); }
  void add(std::string_view s) { add_bytes(s.data(), s.size()); }
  std::uint64_t value() const { return h_; }

private:
  std::uint64_t h_ = 14695981039346656037ULL;
};

}  // namespace balayage::detail
