#pragma once

// Reproducible random source for simulation and Monte Carlo replication.
//
// Generator: xoshiro256** (Blackman & Vigna), state seeded from a 64-bit seed
// through splitmix64. Independent streams are obtained with jump(), which
// advances the state by 2^128 draws; stream k of a seed is the base state
// jumped k times, so streams never overlap for any practical run length.
// Gaussian variates use the Marsaglia polar method, which is portable across
// standard libraries (std::normal_distribution is not).

#include <cstdint>
#include <limits>
#include <optional>
#include <string_view>

namespace fierisk {

inline constexpr std::string_view kRngName = "xoshiro256**/splitmix64/jump-2^128/marsaglia-polar";

struct SeedRecord {
  std::uint64_t seed = 0;
  std::uint64_t stream = 0;
};

class Rng {
 public:
  using result_type = std::uint64_t;

  explicit Rng(std::uint64_t seed);

  /// Generator for stream `stream` of `seed` (seed state jumped `stream` times).
  static Rng from_stream(std::uint64_t seed, std::uint64_t stream);

  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return std::numeric_limits<result_type>::max(); }
  result_type operator()() { return next(); }

  std::uint64_t next();
  /// Uniform on [0, 1) with 53 random bits.
  double uniform();
  double normal();

  /// Advance by 2^128 draws.
  void jump();
  /// Advance by 2^192 draws; used to separate experiment families.
  void long_jump();

  SeedRecord record() const { return record_; }

 private:
  std::uint64_t s_[4];
  std::optional<double> spare_;
  SeedRecord record_;
};

}  // namespace fierisk
