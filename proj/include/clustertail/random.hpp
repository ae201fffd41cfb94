#pragma once

#include <array>
#include <cstdint>

namespace clustertail {

// Philox4x32-10 block function (Salmon et al., SC'11). Pure function of
// (counter, key); everything else in this header is bookkeeping around it.
inline std::array<std::uint32_t, 4> philox4x32_10(std::array<std::uint32_t, 4> ctr,
                                                  std::array<std::uint32_t, 2> key) {
  constexpr std::uint32_t kMulA = 0xD2511F53u;
  constexpr std::uint32_t kMulB = 0xCD9E8D57u;
  constexpr std::uint32_t kWeylA = 0x9E3779B9u;
  constexpr std::uint32_t kWeylB = 0xBB67AE85u;
  for (int round = 0; round < 10; ++round) {
    const std::uint64_t p0 = static_cast<std::uint64_t>(kMulA) * ctr[0];
    const std::uint64_t p1 = static_cast<std::uint64_t>(kMulB) * ctr[2];
    const std::uint32_t hi0 = static_cast<std::uint32_t>(p0 >> 32), lo0 = static_cast<std::uint32_t>(p0);
    const std::uint32_t hi1 = static_cast<std::uint32_t>(p1 >> 32), lo1 = static_cast<std::uint32_t>(p1);
    ctr = {hi1 ^ ctr[1] ^ key[0], lo1, hi0 ^ ctr[3] ^ key[1], lo0};
    key[0] += kWeylA;
    key[1] += kWeylB;
  }
  return ctr;
}

// Identifies one independent random stream. Lane 0 is used for cluster
// topology; higher lanes for decomposition stages and auxiliary draws.
struct StreamKey {
  std::uint64_t master_seed = 0;
  std::uint64_t sample_index = 0;
  std::uint32_t lane = 0;
};

// Sequential reader over the Philox output for one StreamKey. The block
// counter occupies the first counter word, so a stream holds 2^32 blocks
// (2^33 64-bit outputs).
class Stream {
 public:
  explicit Stream(const StreamKey& key)
      : key_{static_cast<std::uint32_t>(key.master_seed),
             static_cast<std::uint32_t>(key.master_seed >> 32)},
        ctr_{0u, key.lane, static_cast<std::uint32_t>(key.sample_index),
             static_cast<std::uint32_t>(key.sample_index >> 32)} {}

  std::uint64_t next_u64() {
    if (pos_ == 2) refill();
    return buf_[pos_++];
  }

  // Uniform on [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  // Uniform on (0, 1].
  double uniform_pos() { return static_cast<double>((next_u64() >> 11) + 1) * 0x1.0p-53; }

 private:
  void refill() {
    const auto out = philox4x32_10(ctr_, key_);
    ++ctr_[0];
    buf_[0] = (static_cast<std::uint64_t>(out[1]) << 32) | out[0];
    buf_[1] = (static_cast<std::uint64_t>(out[3]) << 32) | out[2];
    pos_ = 0;
  }

  std::array<std::uint32_t, 2> key_;
  std::array<std::uint32_t, 4> ctr_;
  std::array<std::uint64_t, 2> buf_{};
  int pos_ = 2;
};

}  // namespace clustertail
