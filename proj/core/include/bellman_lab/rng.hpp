#pragma once

#include <cstdint>
#include <limits>

namespace bellman_lab {

/// Purposes for which independent substreams are derived from a master seed.
enum class StreamPurpose : std::uint64_t {
  garnet = 1,
  features = 2,
  weights = 3,
  policy = 4,
};

/**
 * Splittable counter-based random stream.
 *
 * The n-th draw of a stream is a pure function of (key, n), so a stream can be
 * recreated anywhere from its key. Child streams are derived by hashing the
 * parent key with an identifier, which makes generation independent of the
 * order in which substreams are consumed.
 *
 * Satisfies UniformRandomBitGenerator so it can drive <random> utilities, but
 * the uniform helpers below are used for reproducible results across standard
 * library implementations.
 */
class RandomStream {
 public:
  using result_type = std::uint64_t;

  explicit RandomStream(std::uint64_t seed) noexcept;

  /// Independent child stream identified by `id`. Does not advance this stream.
  [[nodiscard]] RandomStream substream(std::uint64_t id) const noexcept;
  [[nodiscard]] RandomStream substream(StreamPurpose purpose) const noexcept {
    return substream(static_cast<std::uint64_t>(purpose));
  }

  result_type operator()() noexcept;

  static constexpr result_type min() noexcept { return 0; }
  static constexpr result_type max() noexcept { return std::numeric_limits<result_type>::max(); }

  /// Uniform double in the open interval (0, 1), 53-bit resolution.
  double uniform_open() noexcept;

  /// Uniform double in the open interval (low, high).
  double uniform_open(double low, double high) noexcept;

  /// Uniform integer in [0, n). Requires n > 0. Unbiased (rejection).
  std::uint64_t uniform_index(std::uint64_t n) noexcept;

  /// Standard normal draw (Box-Muller on two open uniforms).
  double normal() noexcept;

  [[nodiscard]] std::uint64_t key() const noexcept { return key_; }
  [[nodiscard]] std::uint64_t counter() const noexcept { return counter_; }

 private:
  RandomStream(std::uint64_t key, std::uint64_t counter) noexcept : key_(key), counter_(counter) {}

  std::uint64_t key_;
  std::uint64_t counter_ = 0;
};

/// SplitMix64 finalizer; a bijective 64-bit mixing function.
std::uint64_t mix64(std::uint64_t x) noexcept;

}  // namespace bellman_lab
