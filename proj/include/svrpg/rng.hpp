#ifndef SVRPG_RNG_HPP
#define SVRPG_RNG_HPP

#include <cstdint>
#include <random>
#include <span>

namespace svrpg {

// Purpose tags keep streams for different uses disjoint even when the
// remaining key components coincide.
enum class StreamDomain : std::uint64_t {
  Train = 1,
  Evaluation = 2,
  Initialization = 3,
  IteratePick = 4,
  Diagnostics = 5,
};

/// SplitMix64 finalizer.
std::uint64_t mix64(std::uint64_t x);

/// Hashes (domain, master seed, epoch, iteration, trajectory index) into a
/// single 64-bit seed. Every trajectory owns the stream for its key, so
/// results do not depend on the order in which trajectories are sampled.
std::uint64_t derive_seed(StreamDomain domain, std::uint64_t master, std::uint64_t epoch,
                          std::uint64_t iteration, std::uint64_t index);

class RngStream {
 public:
  explicit RngStream(std::uint64_t seed) : engine_(seed) {}
  RngStream(StreamDomain domain, std::uint64_t master, std::uint64_t epoch,
            std::uint64_t iteration, std::uint64_t index)
      : engine_(derive_seed(domain, master, epoch, iteration, index)) {}

  double uniform() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }
  double uniform(double lo, double hi) {
    return std::uniform_real_distribution<double>(lo, hi)(engine_);
  }
  double normal() { return normal_(engine_); }
  std::size_t uniform_index(std::size_t n) {
    return std::uniform_int_distribution<std::size_t>(0, n - 1)(engine_);
  }
  /// Draws an index with the given (normalized) probabilities.
  std::size_t categorical(std::span<const double> probabilities);

  std::mt19937_64& engine() { return engine_; }

 private:
  std::mt19937_64 engine_;
  std::normal_distribution<double> normal_{0.0, 1.0};
};

}  // namespace svrpg

#endif  // SVRPG_RNG_HPP
