#pragma once

#include <array>
#include <cstdint>

namespace cbre {

// Philox4x32-10 counter-based generator. Streams are keyed by
// (seed, stream index), so path i always sees the same draw sequence no
// matter which thread runs it or in which order paths execute.
class PathRng {
 public:
  PathRng(uint64_t seed, uint64_t stream);

  uint32_t next_u32();
  double next_uniform();      // (0, 1)
  double next_normal();       // standard normal, Box-Muller with spare cache
  long next_poisson(double mean);

 private:
  std::array<uint32_t, 4> block();
  uint32_t key_[2];
  uint64_t stream_;
  uint64_t counter_ = 0;
  std::array<uint32_t, 4> buf_{};
  int buf_pos_ = 4;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

}  // namespace cbre
