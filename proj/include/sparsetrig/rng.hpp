#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

namespace sparsetrig {

// Counter-based generator: the i-th draw of stream s under seed x is a pure
// function of (x, s, i). Draws are platform independent (no std distributions).
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  CounterRng substream(std::uint64_t id) const { return CounterRng(seed_, mix(stream_ ^ mix(id + 0x632be59bd9b4e019ULL))); }

  std::uint64_t next() {
    const std::uint64_t key = mix(seed_ + 0x9e3779b97f4a7c15ULL * (stream_ + 1));
    return mix(key ^ (0xbf58476d1ce4e5b9ULL * ++counter_));
  }

  // Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  // Uniform in (0, 1].
  double uniform_open0() { return static_cast<double>((next() >> 11) + 1) * 0x1.0p-53; }

  double normal() {
    // Box-Muller; the second variate is dropped to keep draws stateless.
    const double u = uniform_open0();
    const double v = uniform();
    return std::sqrt(-2.0 * std::log(u)) * std::cos(2.0 * std::numbers::pi * v);
  }

  double phase() { return 2.0 * std::numbers::pi * uniform(); }

  std::uint64_t counter() const { return counter_; }

 private:
  static std::uint64_t mix(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t counter_ = 0;
};

}  // namespace sparsetrig
