#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace opuc {

// SplitMix64: counter-based 64-bit generator (Steele, Lea, Flood).
class SplitMix64 {
 public:
  explicit SplitMix64(std::uint64_t seed = 0) : state_(seed), seed_(seed) {}

  std::uint64_t seed() const { return seed_; }

  std::uint64_t next() {
    std::uint64_t z = (state_ += 0x9E3779B97F4A7C15ULL);
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform on the open interval (0, 1).
  double uniform() { return (static_cast<double>(next() >> 11) + 0.5) * 0x1.0p-53; }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2 * std::log(uniform()));
    const double t = 2 * std::numbers::pi * uniform();
    spare_ = r * std::sin(t);
    has_spare_ = true;
    return r * std::cos(t);
  }

  double exponential() { return -std::log(uniform()); }

 private:
  std::uint64_t state_;
  std::uint64_t seed_;
  double spare_ = 0;
  bool has_spare_ = false;
};

}  // namespace opuc
