#pragma once

#include <cstdint>

namespace shdimer {

// Counter-based splittable generator. Each (seed, streamIndex) pair yields an
// independent reproducible stream, so samples can be drawn in parallel with
// stable results regardless of scheduling. Core mix is SplitMix64's finalizer
// applied to a Weyl sequence keyed by seed and stream.
class SplitRng {
  public:
    SplitRng(uint64_t seed, uint64_t stream) {
        state_ = mix(seed ^ 0x9e3779b97f4a7c15ULL) ^ mix(stream ^ 0xbf58476d1ce4e5b9ULL);
        if (state_ == 0) state_ = 0x2545f4914f6cdd1dULL;
    }

    uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return mix(state_);
    }

    // uniform in [0,1)
    double next_double() {
        return (next_u64() >> 11) * 0x1.0p-53;
    }

    // uniform integer in [0, n)
    uint64_t next_below(uint64_t n) {
        // multiply-shift; bias is negligible for n << 2^64 but use rejection anyway
        uint64_t threshold = (0 - n) % n;
        for (;;) {
            uint64_t r = next_u64();
            if (r >= threshold) return r % n;
        }
    }

  private:
    static uint64_t mix(uint64_t z) {
        z ^= z >> 30; z *= 0xbf58476d1ce4e5b9ULL;
        z ^= z >> 27; z *= 0x94d049bb133111ebULL;
        z ^= z >> 31;
        return z;
    }
    uint64_t state_;
};

} // namespace shdimer
