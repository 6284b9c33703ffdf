#pragma once

// Seeded RNG with hand-rolled distributions. std::uniform_*_distribution is
// implementation-defined, which would break byte-identical outputs across
// standard libraries; these helpers are pinned to the mt19937_64 bitstream.

#include <cstdint>
#include <random>

namespace fyi {

class Rng {
  public:
    explicit Rng(uint64_t seed) : engine_(seed) {}

    uint64_t next_u64() { return engine_(); }

    // Uniform on [0, 1).
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    // Uniform integer on [0, n). Rejection-free modulo is fine here: n is
    // always tiny compared to 2^64, so the bias is far below observability.
    uint64_t below(uint64_t n) { return n == 0 ? 0 : engine_() % n; }

    // Child generator with a decorrelated seed, for per-scene streams.
    Rng fork(uint64_t stream) { return Rng(engine_() ^ (0x9e3779b97f4a7c15ULL * (stream + 1))); }

  private:
    std::mt19937_64 engine_;
};

} // namespace fyi
