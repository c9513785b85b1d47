#include "rng.hpp"

#include <cmath>

namespace daz {

namespace {

constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void philox_round(std::array<uint32_t, 4>& c, const std::array<uint32_t, 2>& k) {
  const uint64_t p0 = static_cast<uint64_t>(kPhiloxM0) * c[0];
  const uint64_t p1 = static_cast<uint64_t>(kPhiloxM1) * c[2];
  const uint32_t hi0 = static_cast<uint32_t>(p0 >> 32), lo0 = static_cast<uint32_t>(p0);
  const uint32_t hi1 = static_cast<uint32_t>(p1 >> 32), lo1 = static_cast<uint32_t>(p1);
  c = {hi1 ^ c[1] ^ k[0], lo1, hi0 ^ c[3] ^ k[1], lo0};
}

constexpr double kTwoPi = 6.28318530717958647692;

}  // namespace

std::array<uint32_t, 4> Philox4x32::block(const std::array<uint32_t, 4>& counter,
                                          const std::array<uint32_t, 2>& key) {
  std::array<uint32_t, 4> c = counter;
  std::array<uint32_t, 2> k = key;
  for (int round = 0; round < 10; ++round) {
    philox_round(c, k);
    k[0] += kWeyl0;
    k[1] += kWeyl1;
  }
  return c;
}

uint64_t splitmix64(uint64_t x) {
  x += 0x9E3779B97f4A7C15ull;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ull;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBull;
  return x ^ (x >> 31);
}

ChainRng::ChainRng(uint64_t base_seed, uint64_t chain_index) {
  const uint64_t k = splitmix64(splitmix64(base_seed) ^ (chain_index + 0x632BE59BD9B4E019ull));
  key_ = {static_cast<uint32_t>(k), static_cast<uint32_t>(k >> 32)};
}

void ChainRng::begin(Domain domain, uint64_t step) {
  domain_ = domain;
  step_ = step;
  tick_ = 0;
  buf_left_ = 0;
  has_pending_normal_ = false;
}

uint64_t ChainRng::next_u64() {
  if (buf_left_ == 0) {
    const std::array<uint32_t, 4> counter = {tick_++, static_cast<uint32_t>(step_),
                                             static_cast<uint32_t>(step_ >> 32), domain_};
    const auto r = Philox4x32::block(counter, key_);
    buf_[0] = (static_cast<uint64_t>(r[0]) << 32) | r[1];
    buf_[1] = (static_cast<uint64_t>(r[2]) << 32) | r[3];
    buf_left_ = 2;
  }
  return buf_[--buf_left_];
}

double ChainRng::uniform() {
  // 53-bit mantissa, strictly inside (0, 1).
  return (static_cast<double>(next_u64() >> 11) + 0.5) * 0x1.0p-53;
}

double ChainRng::normal() {
  if (has_pending_normal_) {
    has_pending_normal_ = false;
    return pending_normal_;
  }
  const double u1 = uniform();
  const double u2 = uniform();
  const double r = std::sqrt(-2.0 * std::log(u1));
  pending_normal_ = r * std::sin(kTwoPi * u2);
  has_pending_normal_ = true;
  return r * std::cos(kTwoPi * u2);
}

}  // namespace daz
