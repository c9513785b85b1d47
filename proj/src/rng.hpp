#pragma once

#include <array>
#include <cstdint>

namespace daz {

/// Philox4x32-10 counter-based generator. A draw is addressed by
/// (key, counter), so independent streams never share state and parallel
/// execution order cannot change the values produced.
struct Philox4x32 {
  static std::array<uint32_t, 4> block(const std::array<uint32_t, 4>& counter,
                                       const std::array<uint32_t, 2>& key);
};

uint64_t splitmix64(uint64_t x);

/// Per-chain random stream. Values are a pure function of
/// (base_seed, chain_index, domain, step, intra-step position), which makes
/// ensembles reproducible under any thread schedule.
class ChainRng {
 public:
  // Domains keep draws for unrelated purposes on disjoint counters.
  enum Domain : uint32_t { kInit = 1, kStep = 2, kData = 3, kScalar = 4 };

  ChainRng(uint64_t base_seed, uint64_t chain_index);

  /// Positions the stream at the start of (domain, step) and empties buffers.
  void begin(Domain domain, uint64_t step);

  /// Standard normal draw (Box-Muller over two 53-bit uniforms).
  double normal();

  /// Uniform draw in (0, 1).
  double uniform();

 private:
  uint64_t next_u64();

  std::array<uint32_t, 2> key_{};
  uint32_t domain_ = 0;
  uint64_t step_ = 0;
  uint32_t tick_ = 0;
  std::array<uint64_t, 2> buf_{};
  int buf_left_ = 0;
  double pending_normal_ = 0.0;
  bool has_pending_normal_ = false;
};

}  // namespace daz
