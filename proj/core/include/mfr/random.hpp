#pragma once

#include <cstdint>
#include <initializer_list>
#include <limits>

namespace mfr {

/// Independent random stream domains. Each draw site derives its own stream
/// from (domain, seed, ...indices) so that changing one consumer never shifts
/// the numbers seen by another.
enum class StreamDomain : std::uint64_t {
  process_noise = 1,
  measurement_noise = 2,
  initial_guess = 3,
  selector = 4,
  range_coefficients = 5,
  test = 99,
};

/// Counter-based random stream keyed by a tuple of integers.
///
/// The key is hashed into a 64-bit state and values are produced with the
/// SplitMix64 output function. Streams with different keys are statistically
/// independent for simulation purposes; the same key always yields the same
/// sequence. Satisfies UniformRandomBitGenerator so it plugs into <random>
/// distributions.
class Substream {
 public:
  using result_type = std::uint64_t;

  Substream() : Substream({0}) {}
  Substream(std::initializer_list<std::uint64_t> key);
  Substream(StreamDomain domain, std::initializer_list<std::uint64_t> key);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }

  result_type operator()();

  /// Uniform in [0, 1).
  double uniform();
  /// Standard normal.
  double normal();
  bool bernoulli(double p);
  /// Uniform integer in [0, n).
  std::uint64_t below(std::uint64_t n);

 private:
  std::uint64_t state_;
};

std::uint64_t mix64(std::uint64_t x);

}  // namespace mfr
