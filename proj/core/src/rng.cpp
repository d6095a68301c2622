#include "riskmesh/rng.hpp"

#include <cmath>

namespace riskmesh {

std::int64_t Rng::uniform_int(std::int64_t lo, std::int64_t hi) {
  if (hi <= lo) return lo;
  std::uint64_t span = static_cast<std::uint64_t>(hi - lo) + 1;
  // Rejection sampling to avoid modulo bias.
  std::uint64_t limit = std::uint64_t(-1) - std::uint64_t(-1) % span;
  std::uint64_t x;
  do {
    x = next();
  } while (x >= limit);
  return lo + static_cast<std::int64_t>(x % span);
}

double Rng::normal(double mean, double sd) {
  // Box-Muller, discarding the second variate to keep the stream stateless.
  double u1 = uniform();
  double u2 = uniform();
  while (u1 <= 0.0) u1 = uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  return mean + sd * r * std::cos(2.0 * M_PI * u2);
}

double Rng::truncated_normal(double mean, double sd, double lo) {
  for (int i = 0; i < 256; ++i) {
    double x = normal(mean, sd);
    if (x >= lo) return x;
  }
  return lo;  // pathological parameters; clamp rather than spin
}

int Rng::poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 30.0) {
    // Knuth's product-of-uniforms method.
    double l = std::exp(-mean);
    int k = 0;
    double p = 1.0;
    do {
      ++k;
      p *= uniform();
    } while (p > l);
    return k - 1;
  }
  // Large means do not occur in practice; normal approximation is plenty.
  double x = normal(mean, std::sqrt(mean));
  return x < 0.0 ? 0 : static_cast<int>(x + 0.5);
}

}  // namespace riskmesh
