#pragma once

#include <cstdint>
#include <random>

namespace featgts::detail {

// mt19937_64 with platform-independent conversions; the standard
// distributions are implementation-defined and would break reproducibility.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : gen_(seed) {}

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(gen_() >> 11) + 0.5) * 0x1.0p-53; }

  // Uniform on [0, n); n > 0.
  std::uint64_t below(std::uint64_t n) {
    auto k = static_cast<std::uint64_t>(uniform() * static_cast<double>(n));
    return k < n ? k : n - 1;
  }

 private:
  std::mt19937_64 gen_;
};

}  // namespace featgts::detail
