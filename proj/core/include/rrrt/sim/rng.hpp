#pragma once

#include <cstdint>
#include <random>

namespace rrrt::sim {

/// Per-node random stream. The same (seed, stream_id) pair always yields the
/// same draw sequence. Variates come straight from the raw engine output.
class RngStream {
 public:
  RngStream(std::uint64_t seed, std::uint64_t stream_id);

  std::uint64_t seed() const { return seed_; }
  std::uint64_t stream_id() const { return stream_id_; }

  /// Uniform in [0, 1).
  double uniform();
  /// Uniform in [lo, hi).
  double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }
  double exponential(double mean);
  bool bernoulli(double p) { return p > 0.0 && uniform() < p; }

 private:
  std::uint64_t seed_;
  std::uint64_t stream_id_;
  std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x);

}  // namespace rrrt::sim
