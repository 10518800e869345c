#include "svrpg/rng.hpp"

namespace svrpg {

std::uint64_t mix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

std::uint64_t derive_seed(StreamDomain domain, std::uint64_t master, std::uint64_t epoch,
                          std::uint64_t iteration, std::uint64_t index) {
  std::uint64_t h = mix64(static_cast<std::uint64_t>(domain));
  h = mix64(h ^ master);
  h = mix64(h ^ epoch);
  h = mix64(h ^ iteration);
  h = mix64(h ^ index);
  return h;
}

std::size_t RngStream::categorical(std::span<const double> probabilities) {
  const double u = uniform();
  double cumulative = 0.0;
  for (std::size_t i = 0; i < probabilities.size(); ++i) {
    cumulative += probabilities[i];
    if (u < cumulative) return i;
  }
  // Rounding can leave the cumulative sum a hair below 1; return the last
  // action with nonzero mass.
  for (std::size_t i = probabilities.size(); i-- > 0;) {
    if (probabilities[i] > 0.0) return i;
  }
  return probabilities.size() - 1;
}

}  // namespace svrpg
