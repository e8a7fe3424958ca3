// Deterministic, splittable RNG used by every stochastic operation.
//
// Streams are derived statelessly from (seed, purpose, index), so row-parallel
// and serial execution consume identical randomness, bit for bit. The core
// generator is SplitMix64 (Steele, Lea & Vigna 2014); substream seeds are
// produced by chaining its 64-bit finalizer.

#ifndef AMPUTE_RNG_HPP
#define AMPUTE_RNG_HPP

#include <cstdint>

namespace ampute {

namespace detail {
// SplitMix64 output scrambler (also the murmur-style 64-bit finalizer).
inline std::uint64_t mix64(std::uint64_t z) {
    z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
    z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
    return z ^ (z >> 31);
}
} // namespace detail

/// Purpose tags keep independent uses of the same (seed, index) pair from
/// colliding. Values are part of the reproducibility contract; do not reorder.
enum class StreamPurpose : std::uint64_t {
    RowSample = 1,        // one stream per sampled copula row
    GroupDraw = 2,        // cell-set group vector / monotone row-dependence draw
    MixtureSelector = 3,  // per-row two-point mixture selector
    CellFill = 4,         // per-row independent fills outside grouped cells
    Permutation = 5,      // scenario row shuffle
    ScenarioDecision = 6, // per-row pattern accept/reject
    Replication = 7,      // per-replication sub-seed in studies
    ImputeFill = 8,       // PMM initial fill
    ImputeCoef = 9,       // PMM coefficient randomisation
    ImputeDonor = 10,     // PMM donor pick
    McEstimate = 11,      // mc_cdf sampling
};

/// One substream: a SplitMix64 sequence seeded from (seed, purpose, index).
class RngStream {
public:
    RngStream(std::uint64_t seed, StreamPurpose purpose, std::uint64_t index)
        : state_(derive(seed, static_cast<std::uint64_t>(purpose), index)) {}

    std::uint64_t next_u64() {
        state_ += 0x9e3779b97f4a7c15ULL;
        return detail::mix64(state_);
    }

    /// Uniform double in the open interval, clamped to [1e-15, 1 - 1e-15].
    /// Thresholding against p in [0,1] is unaffected by the clamp.
    double uniform() {
        double u = static_cast<double>(next_u64() >> 11) * 0x1.0p-53;
        if (u < 1e-15) u = 1e-15;
        if (u > 1.0 - 1e-15) u = 1.0 - 1e-15;
        return u;
    }

    /// Uniform integer in [0, n).
    std::uint64_t below(std::uint64_t n) {
        // 128-bit multiply keeps the map unbiased enough for simulation use
        // and identical across platforms.
        return static_cast<std::uint64_t>(
            (static_cast<unsigned __int128>(next_u64()) * n) >> 64);
    }

    /// Derive a fresh 64-bit sub-seed (used for per-replication seeding).
    static std::uint64_t derive(std::uint64_t seed, std::uint64_t purpose,
                                std::uint64_t index) {
        return detail::mix64(detail::mix64(detail::mix64(seed) ^ purpose) ^ index);
    }

private:
    std::uint64_t state_;
};

} // namespace ampute

#endif // AMPUTE_RNG_HPP
