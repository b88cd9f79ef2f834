#pragma once

#include <cmath>
#include <cstdint>
#include <numbers>

#include <Eigen/Dense>

namespace hartree {

/// Counter-based generator: draw i of stream s is a pure function of (seed, s, i), so
/// results do not depend on evaluation order or thread count.
class CounterRng {
 public:
  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) : seed_(seed), stream_(stream) {}

  static std::uint64_t mix(std::uint64_t z) {
    z += 0x9e3779b97f4a7c15ULL;
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
  }

  std::uint64_t bits(std::uint64_t i) const { return mix(mix(mix(seed_) ^ stream_) ^ i); }

  /// Uniform on [0, 1) with 53 random bits.
  double uniform(std::uint64_t i) const { return static_cast<double>(bits(i) >> 11) * 0x1.0p-53; }

  /// Standard normal from draws 2i and 2i+1 (Box-Muller).
  double normal(std::uint64_t i) const {
    const double u1 = 1.0 - uniform(2 * i);
    const double u2 = uniform(2 * i + 1);
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
  }

  /// Uniform direction on S^{n-1}, consuming normals i*n .. i*n + n - 1.
  Eigen::VectorXd direction(int n, std::uint64_t i) const {
    Eigen::VectorXd v(n);
    for (int k = 0; k < n; ++k) v[k] = normal(i * n + k);
    const double len = v.norm();
    if (len == 0.0) {
      v.setZero();
      v[0] = 1.0;
      return v;
    }
    return v / len;
  }

  CounterRng substream(std::uint64_t s) const { return CounterRng(seed_, mix(stream_ ^ mix(s))); }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_;
};

}  // namespace hartree
