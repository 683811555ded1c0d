#pragma once

#include <array>
#include <cmath>
#include <cstdint>

#include "randpoly/types.hpp"

namespace randpoly {

/// Philox4x32-10 block function (Salmon et al., Random123).
inline std::array<std::uint32_t, 4> philox4x32(std::array<std::uint32_t, 4> ctr, std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kM0 = 0xD2511F53u, kM1 = 0xCD9E8D57u;
  constexpr std::uint32_t kW0 = 0x9E3779B9u, kW1 = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kM0) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kM1) * ctr[2];
    const auto hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const auto hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kW0;
    key[1] += kW1;
  }
  return ctr;
}

enum class StreamRole : std::uint32_t { Point = 1, Plane = 2, Aux = 3 };

/// Identifies one reproducible random stream. Distinct keys never share
/// counter space: the seed is the Philox key, (trial, role) fill the upper
/// counter words and the lower 64 bits count blocks.
struct StreamKey {
  std::uint64_t seed;
  std::uint64_t trial;
  StreamRole role;
};

class Stream {
 public:
  explicit Stream(const StreamKey& key)
      : key_{static_cast<std::uint32_t>(key.seed), static_cast<std::uint32_t>(key.seed >> 32)},
        trial_(static_cast<std::uint32_t>(key.trial)),
        role_(static_cast<std::uint32_t>(key.role)) {
    if (key.trial >> 32) throw Error(ErrorKind::ConfigError, "trial index exceeds 32 bits");
  }

  std::uint32_t next_u32() {
    if (pos_ == 4) refill();
    return buf_[pos_++];
  }

  std::uint64_t next_u64() {
    const std::uint64_t hi = next_u32();
    return (hi << 32) | next_u32();
  }

  /// Uniform on [0,1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  /// Uniform on the open interval (0,1).
  double uniform_open() { return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53; }

  std::uint64_t blocks_used() const { return block_; }

 private:
  void refill() {
    buf_ = philox4x32({static_cast<std::uint32_t>(block_), static_cast<std::uint32_t>(block_ >> 32), trial_, role_}, key_);
    ++block_;
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::uint32_t trial_;
  std::uint32_t role_;
  std::uint64_t block_ = 0;
  std::array<std::uint32_t, 4> buf_{};
  int pos_ = 4;
};

/// Uniform direction on S^{d-1}.
template <int D>
Vec<D> random_direction(Stream& s) {
  static_assert(D == 2 || D == 3);
  const double phi = 2.0 * M_PI * s.uniform();
  if constexpr (D == 2) {
    return Vec<2>(std::cos(phi), std::sin(phi));
  } else {
    const double z = 2.0 * s.uniform() - 1.0;
    const double r = std::sqrt(std::max(0.0, 1.0 - z * z));
    return Vec<3>(r * std::cos(phi), r * std::sin(phi), z);
  }
}

}  // namespace randpoly
