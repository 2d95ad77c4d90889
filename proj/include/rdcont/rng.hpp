// rng.hpp: counter-based Philox4x64-10 generator and seeded streams.
//
// Every random quantity in the library is a pure function of
// (seed, stream, draw index). Monte Carlo repetitions use the repetition
// number as the stream, so results do not depend on thread scheduling.
#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace rdcont {

using PhiloxCounter = std::array<std::uint64_t, 4>;
using PhiloxKey = std::array<std::uint64_t, 2>;

/// Philox4x64 with 10 rounds (Salmon et al. 2011), bijective in the counter.
PhiloxCounter philox4x64(PhiloxCounter counter, PhiloxKey key) noexcept;

/// Stream of 64-bit words from Philox keyed by `seed`; `stream` selects an
/// independent counter subspace. Satisfies UniformRandomBitGenerator.
class CounterRng {
 public:
  using result_type = std::uint64_t;

  explicit CounterRng(std::uint64_t seed, std::uint64_t stream = 0) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept {
    return std::numeric_limits<result_type>::max();
  }

  result_type operator()() noexcept;

  /// Uniform double in [0, 1) with 53 random bits.
  double uniform() noexcept;

  std::uint64_t seed() const noexcept { return key_[0]; }
  std::uint64_t stream() const noexcept { return counter_[1]; }

 private:
  PhiloxKey key_;
  PhiloxCounter counter_;
  PhiloxCounter buffer_{};
  int used_ = 4;
};

}  // namespace rdcont
