#pragma once

#include <cstdint>
#include <random>

namespace exposure {

/// splitmix64 finalizer. Used to derive stream seeds and keyed draws.
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

constexpr std::uint64_t hash_combine(std::uint64_t a, std::uint64_t b) noexcept {
  return mix64(a ^ mix64(b + 0x632be59bd9b4e019ULL));
}

/// A reproducible random stream identified by (seed, stream_id).
///
/// Sequential draws come from a 64-bit Mersenne twister seeded with
/// hash(seed, stream_id). Keyed draws (`keyed_uniform`) are a pure function
/// of (seed, stream_id, key) and consume no state; cascade models use them so
/// that runs with different parameters can share the same coin per edge.
class RngStream {
 public:
  using result_type = std::uint64_t;

  explicit RngStream(std::uint64_t seed = 0, std::uint64_t stream_id = 0)
      : seed_(seed), stream_id_(stream_id), engine_(hash_combine(seed, stream_id)) {}

  static constexpr result_type min() { return std::mt19937_64::min(); }
  static constexpr result_type max() { return std::mt19937_64::max(); }
  result_type operator()() { return engine_(); }

  std::uint64_t seed() const noexcept { return seed_; }
  std::uint64_t stream_id() const noexcept { return stream_id_; }

  /// Child stream; independent of this one and of siblings with other ids.
  RngStream derive(std::uint64_t child_id) const {
    return RngStream(hash_combine(seed_, stream_id_), child_id);
  }

  /// Uniform integer in [0, n). n must be positive.
  std::uint64_t index(std::uint64_t n) {
    return std::uniform_int_distribution<std::uint64_t>(0, n - 1)(engine_);
  }

  /// Uniform real in [0, 1).
  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

  bool bernoulli(double p) { return uniform() < p; }

  bool coin() { return (engine_() >> 63) != 0; }

  /// Stateless uniform in [0, 1) keyed by (a, b, c).
  double keyed_uniform(std::uint64_t a, std::uint64_t b, std::uint64_t c = 0) const noexcept {
    std::uint64_t h = hash_combine(hash_combine(hash_combine(seed_, stream_id_), a),
                                   hash_combine(b, c));
    return static_cast<double>(h >> 11) * 0x1.0p-53;
  }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

}  // namespace exposure
