// rng.hpp — seeded random sources and deterministic sub-seed derivation.
//
// Two kinds of randomness are used:
//   * Rng: a stateful mt19937_64 stream for bulk draws (panel simulation).
//   * counter-based draws: a single uniform derived from a (seed, key) pair
//     via splitmix64, used where draws must be independent of iteration
//     order (per-paper flags, per-author assignments).
#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace didsim {

// One splitmix64 step; also the finalizer used for key mixing.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Deterministic sub-seed from (seed, key). Used to derive per-replication
// and per-stream seeds from a master seed.
inline std::uint64_t mix_seed(std::uint64_t seed, std::uint64_t key) {
  std::uint64_t s = seed ^ (0x9e3779b97f4a7c15ULL + (key << 6) + (key >> 2));
  splitmix64(s);
  std::uint64_t t = s + key;
  return splitmix64(t);
}

// FNV-1a over bytes; stable across platforms, used to key draws on ids.
inline std::uint64_t fnv1a64(std::string_view bytes) {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

// Uniform in [0,1) from a single (seed, key) pair, order-independent.
inline double uniform_from_key(std::uint64_t seed, std::uint64_t key) {
  std::uint64_t s = mix_seed(seed, key);
  std::uint64_t bits = splitmix64(s);
  return static_cast<double>(bits >> 11) * 0x1.0p-53;
}

// Stateful stream for bulk sampling.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  double uniform() {
    return std::uniform_real_distribution<double>(0.0, 1.0)(engine_);
  }

  // Uniform integer in [lo, hi] inclusive.
  long long uniform_int(long long lo, long long hi) {
    return std::uniform_int_distribution<long long>(lo, hi)(engine_);
  }

  long long poisson(double mean) {
    return std::poisson_distribution<long long>(mean)(engine_);
  }

  double gamma(double shape, double scale) {
    return std::gamma_distribution<double>(shape, scale)(engine_);
  }

  double normal(double mean, double sd) {
    return std::normal_distribution<double>(mean, sd)(engine_);
  }

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
};

}  // namespace didsim
