#pragma once

#include <cstdint>

namespace ionscope {

/// SplitMix64 generator (Steele, Lea & Flood). Chosen because it is trivially
/// splittable: every Monte Carlo trial gets its own stream derived from
/// (master_seed, trial_index), so results do not depend on how trials are
/// distributed over workers.
class SplitMix64 {
  public:
    explicit SplitMix64(std::uint64_t seed) : state_(seed) {}

    std::uint64_t next() {
        std::uint64_t z = (state_ += 0x9e3779b97f4a7c15ULL);
        z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
        z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
        return z ^ (z >> 31);
    }

    /// Uniform double in [0, 1) with 53 random bits.
    double uniform() {
        return static_cast<double>(next() >> 11) * 0x1.0p-53;
    }

    /// Seed for an independent substream. Used as
    /// SplitMix64(derive_seed(master, trial)) per trial.
    static std::uint64_t derive_seed(std::uint64_t master, std::uint64_t index) {
        SplitMix64 g(master + (index + 1) * 0x9e3779b97f4a7c15ULL);
        return g.next();
    }

  private:
    std::uint64_t state_;
};

} // namespace ionscope
