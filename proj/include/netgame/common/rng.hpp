#pragma once

#include <cstdint>
#include <random>
#include <sstream>
#include <string>

namespace netgame {

/// Single random stream type used by every environment and learner.
using Rng = std::mt19937_64;

/// Standard normal draw. A fresh distribution object is used on every call so
/// that no cached second variate survives between calls; the stream state is
/// then fully described by the engine alone, which keeps checkpoints exact.
inline double standard_normal(Rng& rng) {
  std::normal_distribution<double> dist(0.0, 1.0);
  return dist(rng);
}

inline double normal(Rng& rng, double mean, double stddev) {
  return mean + stddev * standard_normal(rng);
}

inline double uniform(Rng& rng, double low, double high) {
  std::uniform_real_distribution<double> dist(low, high);
  return dist(rng);
}

/// Uniform index in [0, n).
inline std::size_t uniform_index(Rng& rng, std::size_t n) {
  std::uniform_int_distribution<std::size_t> dist(0, n - 1);
  return dist(rng);
}

/// Derives an independent child stream from a seed and a stream tag.
inline Rng make_rng(std::uint64_t seed, std::uint64_t stream = 0) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return Rng(seq);
}

inline std::string rng_state(const Rng& rng) {
  std::ostringstream out;
  out << rng;
  return out.str();
}

inline void set_rng_state(Rng& rng, const std::string& state) {
  std::istringstream in(state);
  in >> rng;
}

}  // namespace netgame
