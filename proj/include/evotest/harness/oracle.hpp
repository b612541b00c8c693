#pragma once

#include <cstdint>
#include <stdexcept>
#include <vector>

#include "evotest/coverage/target.hpp"
#include "evotest/minilang/interpreter.hpp"

namespace evotest::harness {

inline constexpr std::uint64_t default_oracle_cap = 10'000'000;

class domain_too_large : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

struct oracle_result {
    std::vector<coverage::target> feasible;    // enumeration order
    std::vector<coverage::target> infeasible;
    std::uint64_t points = 0;                  // lattice points executed
};

/// Number of points in the box, saturating at UINT64_MAX.
[[nodiscard]] std::uint64_t domain_size(const std::vector<minilang::value_range>& ranges) noexcept;

/// Runs the program on every point of its input lattice (stopping early
/// once every target is covered). A target is feasible iff some point
/// covers it. Throws domain_too_large when the lattice exceeds `cap`.
[[nodiscard]] oracle_result brute_force_oracle(const minilang::program& prog, coverage::criterion c,
                                               std::uint64_t cap = default_oracle_cap,
                                               const minilang::execution_options& options = {});

/// Same over an explicit sub-box of the declared ranges.
[[nodiscard]] oracle_result brute_force_oracle(const minilang::program& prog, coverage::criterion c,
                                               const std::vector<minilang::value_range>& ranges,
                                               std::uint64_t cap = default_oracle_cap,
                                               const minilang::execution_options& options = {});

/// Calls `visit` on every lattice point in lexicographic order (last gene
/// fastest) until it returns false.
template <typename Visit>
void for_each_point(const std::vector<minilang::value_range>& ranges, Visit&& visit)
{
    std::vector<std::int64_t> x;
    x.reserve(ranges.size());
    for (const auto& r : ranges)
        x.push_back(r.lo);
    if (ranges.empty())
        return;
    while (true) {
        if (!visit(static_cast<const std::vector<std::int64_t>&>(x)))
            return;
        std::size_t i = ranges.size();
        while (i > 0) {
            --i;
            if (x[i] < ranges[i].hi) {
                ++x[i];
                break;
            }
            x[i] = ranges[i].lo;
            if (i == 0)
                return;
        }
    }
}

}  // namespace evotest::harness
