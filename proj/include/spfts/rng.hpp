#pragma once

#include <cmath>
#include <cstdint>

namespace spfts {

// Counter-based generator: SplitMix64 (Steele, Lea & Flood 2014) evaluated at an
// arbitrary index instead of sequentially. Output i of a stream keyed by `key` is
//   mix64(key + (i + 1) * kGolden64).
// Distinct keys give independent streams, so replicates can be generated in
// parallel and draws are reproducible bit-for-bit on any platform.
inline constexpr std::uint64_t kGolden64 = 0x9e3779b97f4a7c15ULL;

constexpr std::uint64_t mix64(std::uint64_t z) noexcept {
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// Subkey derivation for named substreams (loadings, innovations, replicate r, ...).
constexpr std::uint64_t derive_key(std::uint64_t key, std::uint64_t stream) noexcept {
  return mix64(key + mix64(stream + kGolden64));
}

class RandomStream {
 public:
  explicit RandomStream(std::uint64_t key) : key_(key) {}
  RandomStream(std::uint64_t key, std::uint64_t stream) : key_(derive_key(key, stream)) {}

  std::uint64_t next_u64() noexcept { return mix64(key_ + (++counter_) * kGolden64); }

  // Uniform on [0, 1) with 53 random bits.
  double next_uniform() noexcept { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Standard normal via Box-Muller; the paired draw is cached.
  double next_normal() noexcept {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    const double u1 = static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53;  // (0, 1]
    const double u2 = next_uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double theta = 2.0 * M_PI * u2;
    spare_ = r * std::sin(theta);
    has_spare_ = true;
    return r * std::cos(theta);
  }

  RandomStream substream(std::uint64_t stream) const { return RandomStream(derive_key(key_, stream)); }

 private:
  std::uint64_t key_;
  std::uint64_t counter_ = 0;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace spfts
