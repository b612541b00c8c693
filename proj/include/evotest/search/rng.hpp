#pragma once

#include <cstdint>
#include <random>
#include <string_view>

namespace evotest::search {

/// Mixes a base seed with a stream name. Distinct names give independent
/// streams, so adding a consumer never shifts another one's draws.
[[nodiscard]] std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) noexcept;

/// Seedable generator with platform-independent draws (the standard
/// distributions are implementation-defined, which would break byte-stable
/// output across toolchains).
class rng {
public:
    explicit rng(std::uint64_t seed) : engine_{seed} {}
    rng(std::uint64_t base, std::string_view stream) : engine_{derive_seed(base, stream)} {}

    std::uint64_t next() { return engine_(); }
    /// Uniform over the inclusive range [lo, hi].
    std::int64_t uniform(std::int64_t lo, std::int64_t hi);
    /// Uniform index in [0, n). Requires n > 0.
    std::size_t index(std::size_t n);
    /// Uniform double in [0, 1).
    double unit() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
    bool chance(double p) { return p >= 1.0 || unit() < p; }

private:
    std::mt19937_64 engine_;
};

}  // namespace evotest::search
