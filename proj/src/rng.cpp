#include "cbre/rng.hpp"

#include <cmath>

namespace cbre {

namespace {
constexpr uint32_t kPhiloxM0 = 0xD2511F53u;
constexpr uint32_t kPhiloxM1 = 0xCD9E8D57u;
constexpr uint32_t kWeyl0 = 0x9E3779B9u;
constexpr uint32_t kWeyl1 = 0xBB67AE85u;

inline void mulhilo(uint32_t a, uint32_t b, uint32_t& hi, uint32_t& lo) {
  uint64_t p = static_cast<uint64_t>(a) * b;
  hi = static_cast<uint32_t>(p >> 32);
  lo = static_cast<uint32_t>(p);
}
}  // namespace

PathRng::PathRng(uint64_t seed, uint64_t stream) : stream_(stream) {
  key_[0] = static_cast<uint32_t>(seed);
  key_[1] = static_cast<uint32_t>(seed >> 32);
}

std::array<uint32_t, 4> PathRng::block() {
  uint32_t c0 = static_cast<uint32_t>(counter_);
  uint32_t c1 = static_cast<uint32_t>(counter_ >> 32);
  uint32_t c2 = static_cast<uint32_t>(stream_);
  uint32_t c3 = static_cast<uint32_t>(stream_ >> 32);
  ++counter_;
  uint32_t k0 = key_[0], k1 = key_[1];
  for (int round = 0; round < 10; ++round) {
    uint32_t hi0, lo0, hi1, lo1;
    mulhilo(kPhiloxM0, c0, hi0, lo0);
    mulhilo(kPhiloxM1, c2, hi1, lo1);
    uint32_t n0 = hi1 ^ c1 ^ k0;
    uint32_t n1 = lo1;
    uint32_t n2 = hi0 ^ c3 ^ k1;
    uint32_t n3 = lo0;
    c0 = n0; c1 = n1; c2 = n2; c3 = n3;
    k0 += kWeyl0;
    k1 += kWeyl1;
  }
  return {c0, c1, c2, c3};
}

uint32_t PathRng::next_u32() {
  if (buf_pos_ >= 4) {
    buf_ = block();
    buf_pos_ = 0;
  }
  return buf_[buf_pos_++];
}

double PathRng::next_uniform() {
  uint64_t hi = next_u32();
  uint64_t lo = next_u32();
  uint64_t bits = (hi << 21) ^ lo;  // 53 effective bits
  bits &= (uint64_t(1) << 53) - 1;
  double u = (static_cast<double>(bits) + 0.5) * 0x1.0p-53;
  return u;
}

double PathRng::next_normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  double u1 = next_uniform();
  double u2 = next_uniform();
  double r = std::sqrt(-2.0 * std::log(u1));
  double a = 2.0 * M_PI * u2;
  spare_ = r * std::sin(a);
  has_spare_ = true;
  return r * std::cos(a);
}

long PathRng::next_poisson(double mean) {
  if (mean <= 0.0) return 0;
  if (mean < 30.0) {
    double limit = std::exp(-mean);
    double prod = next_uniform();
    long n = 0;
    while (prod > limit) {
      prod *= next_uniform();
      ++n;
    }
    return n;
  }
  // Gaussian approximation for the rare large-rate steps; rates this size
  // only appear just before the explosion guard trips.
  double v = mean + std::sqrt(mean) * next_normal();
  return v > 0.0 ? static_cast<long>(std::lround(v)) : 0;
}

}  // namespace cbre
