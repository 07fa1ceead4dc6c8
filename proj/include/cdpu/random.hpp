#pragma once

#include <cstddef>
#include <cstdint>
#include <random>
#include <span>
#include <string_view>

namespace cdpu {

// splitmix64 finalizer
constexpr std::uint64_t mix64(std::uint64_t x) noexcept {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// FNV-1a, 64 bit
constexpr std::uint64_t hash_label(std::string_view s) noexcept {
  std::uint64_t h = 0xcbf29ce484222325ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 0x100000001b3ULL;
  }
  return h;
}

/// Seed for the substream owned by one (replication, agent, round) cell.
/// Depends only on its arguments, never on execution order.
constexpr std::uint64_t substream_seed(std::uint64_t master, std::uint64_t replication,
                                       std::string_view agent, std::uint64_t round) noexcept {
  std::uint64_t h = mix64(master);
  h = mix64(h ^ replication);
  h = mix64(h ^ hash_label(agent));
  return mix64(h ^ round);
}

/// Explicit random stream handle. Every stochastic operation takes one of these
/// by reference; there is no global generator.
class RandomStream {
 public:
  explicit RandomStream(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // 53-bit uniform in [0, 1)
  double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

  /// Uniform index in [0, n). n must be positive.
  std::size_t index(std::size_t n) {
    auto i = static_cast<std::size_t>(uniform() * static_cast<double>(n));
    return i < n ? i : n - 1;
  }

  /// Draws from a probability vector by inversion. Never returns a
  /// zero-probability index.
  std::size_t categorical(std::span<const double> p) {
    const double u = uniform();
    double cum = 0.0;
    std::size_t last_positive = 0;
    for (std::size_t i = 0; i < p.size(); ++i) {
      if (p[i] <= 0.0) continue;
      last_positive = i;
      cum += p[i];
      if (u < cum) return i;
    }
    return last_positive;
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace cdpu
