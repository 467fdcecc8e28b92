#include "bellman_lab/rng.hpp"

#include <cmath>
#include <numbers>

namespace bellman_lab {

namespace {
constexpr std::uint64_t kGolden = 0x9e3779b97f4a7c15ULL;
constexpr std::uint64_t kChildSalt = 0xd1b54a32d192ed03ULL;
}  // namespace

std::uint64_t mix64(std::uint64_t x) noexcept {
  x ^= x >> 30;
  x *= 0xbf58476d1ce4e5b9ULL;
  x ^= x >> 27;
  x *= 0x94d049bb133111ebULL;
  x ^= x >> 31;
  return x;
}

RandomStream::RandomStream(std::uint64_t seed) noexcept : key_(mix64(seed + kGolden)) {}

RandomStream RandomStream::substream(std::uint64_t id) const noexcept {
  return RandomStream(mix64(key_ ^ mix64(id * kChildSalt + kGolden)), 0);
}

RandomStream::result_type RandomStream::operator()() noexcept {
  ++counter_;
  return mix64(key_ + counter_ * kGolden);
}

double RandomStream::uniform_open() noexcept {
  for (;;) {
    const std::uint64_t bits = (*this)() >> 11;
    if (bits != 0) {
      return static_cast<double>(bits) * 0x1.0p-53;
    }
  }
}

double RandomStream::uniform_open(double low, double high) noexcept {
  for (;;) {
    const double x = low + (high - low) * uniform_open();
    if (x > low && x < high) {
      return x;
    }
  }
}

std::uint64_t RandomStream::uniform_index(std::uint64_t n) noexcept {
  // Reject the tail so every residue is equally likely.
  const std::uint64_t limit = max() - max() % n;
  for (;;) {
    const std::uint64_t x = (*this)();
    if (x < limit) {
      return x % n;
    }
  }
}

double RandomStream::normal() noexcept {
  const double u1 = uniform_open();
  const double u2 = uniform_open();
  return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

}  // namespace bellman_lab
