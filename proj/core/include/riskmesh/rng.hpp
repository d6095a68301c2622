#pragma once

#include <cstdint>
#include <initializer_list>
#include <random>
#include <vector>

namespace riskmesh {

// splitmix64 finalizer; good avalanche, cheap.
constexpr std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

// Folds a path of tags into a master seed. Used to give every simulation
// subsystem (and every per-agent, per-day event class) an isolated stream, so
// consuming randomness in one subsystem cannot shift another's draws.
inline std::uint64_t derive_seed(std::uint64_t master, std::initializer_list<std::uint64_t> path) {
  std::uint64_t h = mix64(master ^ 0x8f1bbcdcbfa53e0bull);
  for (std::uint64_t p : path) h = mix64(h ^ mix64(p));
  return h;
}

// Deterministic RNG with hand-rolled distributions. The standard library's
// distribution objects are implementation-defined, so identical seeds would
// not reproduce traces across toolchains; these do.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }

  // Uniform in [0, 1).
  double uniform() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }

  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

  // Uniform integer in [lo, hi] inclusive.
  std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);

  bool chance(double p) {
    if (p <= 0.0) return false;
    if (p >= 1.0) return true;
    return uniform() < p;
  }

  double normal(double mean, double sd);

  // Gaussian resampled until the draw is >= lo.
  double truncated_normal(double mean, double sd, double lo);

  int poisson(double mean);

  std::size_t pick_index(std::size_t n) {
    return static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(n) - 1));
  }

  template <typename T>
  void shuffle(std::vector<T>& v) {
    for (std::size_t i = v.size(); i > 1; --i) {
      std::size_t j = static_cast<std::size_t>(uniform_int(0, static_cast<std::int64_t>(i) - 1));
      std::swap(v[i - 1], v[j]);
    }
  }

 private:
  std::mt19937_64 engine_;
};

}  // namespace riskmesh
