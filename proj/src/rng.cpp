#include "rng.hpp"

#include <cmath>

namespace wavekin {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void round_once(uint32_t& c0, uint32_t& c1, uint32_t& c2, uint32_t& c3,
                       uint32_t k0, uint32_t k1) {
  const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * c0;
  const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * c2;
  const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
  const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
  const uint32_t n0 = hi1 ^ c1 ^ k0;
  const uint32_t n1 = lo1;
  const uint32_t n2 = hi0 ^ c3 ^ k1;
  const uint32_t n3 = lo0;
  c0 = n0;
  c1 = n1;
  c2 = n2;
  c3 = n3;
}

constexpr double kInv53 = 1.0 / 9007199254740992.0;  // 2^-53

}  // namespace

std::array<uint32_t, 4> Philox4x32::block(uint32_t key0, uint32_t key1,
                                          const std::array<uint32_t, 4>& counter) {
  uint32_t c0 = counter[0], c1 = counter[1], c2 = counter[2], c3 = counter[3];
  uint32_t k0 = key0, k1 = key1;
  for (int r = 0; r < 10; ++r) {
    round_once(c0, c1, c2, c3, k0, k1);
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c0, c1, c2, c3};
}

std::array<uint32_t, 4> RngStream::raw(uint64_t idx) const {
  return Philox4x32::block(
      key0_, key1_,
      {member_ ^ (purpose_ << 28), purpose_, static_cast<uint32_t>(idx),
       static_cast<uint32_t>(idx >> 32)});
}

uint64_t RngStream::bits64(uint64_t idx) const {
  const auto r = raw(idx);
  return (static_cast<uint64_t>(r[0]) << 32) | r[1];
}

void RngStream::normal_pair(uint64_t idx, double& z0, double& z1) const {
  const auto r = raw(idx);
  const uint64_t a = (static_cast<uint64_t>(r[0]) << 32) | r[1];
  const uint64_t b = (static_cast<uint64_t>(r[2]) << 32) | r[3];
  // u1 in (0,1], u2 in [0,1)
  const double u1 = (static_cast<double>(a >> 11) + 1.0) * kInv53;
  const double u2 = static_cast<double>(b >> 11) * kInv53;
  const double rad = std::sqrt(-2.0 * std::log(u1));
  const double ang = 6.283185307179586476925286766559 * u2;
  z0 = rad * std::cos(ang);
  z1 = rad * std::sin(ang);
}

double RngStream::uniform01(uint64_t idx) const {
  return static_cast<double>(bits64(idx) >> 11) * kInv53;
}

uint32_t RngStream::uniform_index(uint64_t idx, uint32_t n) const {
  // Lemire's multiply-shift; bias is negligible for n << 2^64 but we keep
  // the exact rejection-free form on 64-bit lanes.
  const unsigned __int128 wide =
      static_cast<unsigned __int128>(bits64(idx)) * static_cast<unsigned __int128>(n);
  return static_cast<uint32_t>(wide >> 64);
}

}  // namespace wavekin
