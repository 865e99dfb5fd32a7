#pragma once

#include <array>
#include <cstdint>
#include <limits>

namespace transq {

/// Philox4x32-10 block function (Salmon et al., SC'11): a keyed bijection on
/// 128-bit counters. Output for a given (counter, key) never changes.
struct Philox4x32 {
  using Counter = std::array<std::uint32_t, 4>;
  using Key = std::array<std::uint32_t, 2>;

  [[nodiscard]] static Counter block(Counter ctr, Key key) noexcept;
};

/// Counter-based random stream addressed by (seed, stream index).
///
/// The seed is the Philox key; the stream index fills the upper half of the
/// counter and the lower half counts blocks. Distinct indices therefore never
/// share a block, and a stream can be recreated anywhere from its two numbers.
class RngStream {
 public:
  using result_type = std::uint64_t;

  RngStream(std::uint64_t seed, std::uint64_t stream) noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  result_type operator()() noexcept;

  /// Uniform on the open interval (0, 1), 53-bit resolution.
  double uniform() noexcept;

  /// Exponential with the given rate (> 0).
  double exponential(double rate) noexcept;

  [[nodiscard]] std::uint64_t seed() const noexcept { return seed_; }
  [[nodiscard]] std::uint64_t stream() const noexcept { return stream_; }

 private:
  void refill() noexcept;

  std::uint64_t seed_;
  std::uint64_t stream_;
  std::uint64_t block_ = 0;
  Philox4x32::Counter buffer_{};
  unsigned used_ = 4;
};

}  // namespace transq
