#pragma once

#include <complex>
#include <cstdint>
#include <random>

namespace ssm {

namespace detail {

inline std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

}  // namespace detail

/// A seeded random stream. Substreams are derived from the stream key and an
/// index only, so a tree of substreams is reproducible regardless of how
/// many draws were taken from the parent or in which order workers run.
class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : key_(detail::splitmix64(seed)), engine_(key_) {}

  RngStream substream(std::uint64_t index) const {
    RngStream child(0);
    child.key_ = detail::splitmix64(key_ ^ detail::splitmix64(index + 0x632be59bd9b4e019ULL));
    child.engine_.seed(child.key_);
    return child;
  }

  std::uint64_t key() const { return key_; }

  double normal() { return normal_(engine_); }

  /// Circularly-symmetric complex Gaussian with E|z|^2 = variance.
  std::complex<double> complex_normal(double variance = 1.0) {
    const double s = std::sqrt(variance / 2.0);
    const double re = normal();
    const double im = normal();
    return {s * re, s * im};
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::uint64_t key_;
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace ssm
