#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace cornn {

/// Seedable random stream used everywhere in the suite.
///
/// The engine is std::mt19937_64, whose output sequence is fixed by the
/// standard. The distribution transforms below are implemented here rather
/// than taken from <random> because the standard distributions are
/// implementation-defined and would break cross-platform reproducibility.
class Rng {
public:
    explicit Rng(std::uint64_t seed) : engine_(seed) {}

    std::uint64_t next_u64() { return engine_(); }

    /// Uniform on [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(engine_() >> 11) * 0x1.0p-53; }

    /// Uniform on [lo, hi).
    double uniform(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Uniform integer on [0, n). Rejection sampling, no modulo bias.
    std::uint64_t below(std::uint64_t n);

    /// Standard normal via the Marsaglia polar method.
    double normal();

private:
    std::mt19937_64 engine_;
    double spare_ = 0.0;
    bool has_spare_ = false;
};

/// SplitMix64 finalizer; used to derive independent child seeds.
std::uint64_t mix_seed(std::uint64_t x) noexcept;

/// Derives a child seed from a parent seed and a purpose tag.
std::uint64_t derive_seed(std::uint64_t parent, std::string_view tag) noexcept;
std::uint64_t derive_seed(std::uint64_t parent, std::uint64_t tag) noexcept;

} // namespace cornn
