#pragma once

#include <cmath>
#include <cstdint>

namespace lab {

// Counter-based deterministic random streams. Every draw is a pure function
// of (seed, stream a, stream b, counter), so particle updates can be split
// per particle index and per step and still agree bitwise with a serial run.
namespace rng {

inline std::uint64_t splitmix64(std::uint64_t z) {
  z += 0x9E3779B97F4A7C15ull;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

inline std::uint64_t mix(std::uint64_t seed, std::uint64_t a, std::uint64_t b,
                         std::uint64_t k) {
  std::uint64_t z = splitmix64(seed ^ 0x243F6A8885A308D3ull);
  z = splitmix64(z ^ (a * 0x9E3779B97F4A7C15ull));
  z = splitmix64(z ^ (b * 0xD1B54A32D192ED03ull));
  return splitmix64(z + k);
}

// in [0,1)
inline double to_unit(std::uint64_t bits) {
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

struct Stream {
  std::uint64_t seed = 0;
  std::uint64_t a = 0;
  std::uint64_t b = 0;
  std::uint64_t counter = 0;

  Stream() = default;
  Stream(std::uint64_t seed_, std::uint64_t a_ = 0, std::uint64_t b_ = 0)
      : seed(seed_), a(a_), b(b_) {}

  std::uint64_t next_bits() { return mix(seed, a, b, counter++); }
  double unit() { return to_unit(next_bits()); }

  // uniform on (0,1], safe as a log argument
  double unit_open() { return 1.0 - unit(); }

  // Box-Muller pair
  void gaussian_pair(double& g0, double& g1) {
    const double u1 = unit_open();
    const double u2 = unit();
    const double r = std::sqrt(-2.0 * std::log(u1));
    g0 = r * std::cos(6.283185307179586476925287 * u2);
    g1 = r * std::sin(6.283185307179586476925287 * u2);
  }

  double gaussian() {
    double g0, g1;
    gaussian_pair(g0, g1);
    return g0;
  }
};

}  // namespace rng
}  // namespace lab
