#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace ordcif {

// splitmix64 finalizer.
constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * UINT64_C(0xBF58476D1CE4E5B9);
  z = (z ^ (z >> 27)) * UINT64_C(0x94D049BB133111EB);
  return z ^ (z >> 31);
}

// Seed for replicate `index` of stream `stream`. Depends only on its
// arguments, so replicates can run in any order on any number of workers.
constexpr std::uint64_t sub_seed(std::uint64_t seed, std::uint64_t stream, std::uint64_t index) noexcept {
  constexpr std::uint64_t golden = UINT64_C(0x9E3779B97F4A7C15);
  std::uint64_t h = mix64(seed + golden);
  h = mix64(h ^ (stream + golden * 2));
  return mix64(h ^ (index + golden * 3));
}

/**
 * Counter-based 64-bit generator: the i-th output is mix64(key + i * golden).
 * Normals use Box-Muller so that draws are identical on every platform.
 */
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t key) noexcept : key_(key) {}

  std::uint64_t next_u64() noexcept {
    return mix64(key_ + (++counter_) * UINT64_C(0x9E3779B97F4A7C15));
  }

  // Uniform on the open interval (0, 1).
  double uniform() noexcept {
    return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
  }

  double normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double r = std::sqrt(-2.0 * std::log(uniform()));
    const double theta = 2.0 * std::numbers::pi * uniform();
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  // Exponential with the given rate; +infinity when rate is 0.
  double exponential(double rate) noexcept {
    if (rate <= 0) return HUGE_VAL;
    return -std::log(uniform()) / rate;
  }

  std::uint64_t key() const noexcept { return key_; }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace ordcif
