#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace gitseg {

/// Portable seeded generator. The engine is std::mt19937_64, whose output
/// sequence is fixed by the C++ standard; the real/integer mappings below are
/// implemented here rather than via <random> distributions, whose algorithms
/// are implementation-defined. Identical seeds give identical draws on every
/// platform.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next() { return engine_(); }
    /// Uniform on [0,1) with 53 bits of resolution.
    double uniform01() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform01(); }
    /// Uniform integer on the closed range [lo, hi], by rejection.
    std::int64_t uniform_int(std::int64_t lo, std::int64_t hi);
    /// True with probability p; p <= 0 never fires, p >= 1 always fires.
    bool bernoulli(double p) { return uniform01() < p; }

private:
    std::mt19937_64 engine_;
};

std::uint64_t splitmix64(std::uint64_t x) noexcept;
std::uint64_t fnv1a64(std::string_view text) noexcept;

/// Stream-split rule: every (seed, sample id, stage) triple gets its own
/// engine seeded with
///
///   splitmix64(splitmix64(splitmix64(seed) ^ fnv1a64(sample_id)) ^ stage)
///
/// so draws for one sample never depend on how many other samples were
/// processed before it, or on which thread processed them.
std::uint64_t derive_stream_seed(std::uint64_t seed, std::string_view sample_id,
                                 std::uint64_t stage) noexcept;

inline Rng make_stream(std::uint64_t seed, std::string_view sample_id, std::uint64_t stage) {
    return Rng(derive_stream_seed(seed, sample_id, stage));
}

}  // namespace gitseg
