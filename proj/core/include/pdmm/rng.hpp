#pragma once

#include <cstdint>
#include <random>

namespace pdmm {

/// Deterministic random source. The engine is std::mt19937_64 (whose output
/// sequence is pinned by the standard) and every variate transform is done
/// in-house, so streams are reproducible across platforms and standard
/// library versions. Not thread-safe; use one instance per stream.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) with 53 random bits.
  double uniform();
  double uniform(double lo, double hi);

  /// Standard normal via Box-Muller.
  double normal();

  bool bernoulli(double p);

  /// Poisson-distributed count with the given mean. Inversion by sequential
  /// search below mean 30, transformed rejection (PTRS) above.
  std::uint64_t poisson(double mean);

  std::uint64_t next_u64() { return engine_(); }

  /// Stream seed derived by mixing (master, a, b); used to give every
  /// (trial, sweep point) its own independent substream.
  static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t a,
                                   std::uint64_t b = 0);

 private:
  std::mt19937_64 engine_;
  bool have_spare_normal_ = false;
  double spare_normal_ = 0.0;
};

}  // namespace pdmm
