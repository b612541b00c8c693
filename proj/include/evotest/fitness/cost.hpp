#pragma once

#include <optional>
#include <span>
#include <string_view>
#include <vector>

#include "evotest/coverage/target.hpp"
#include "evotest/fitness/distance.hpp"
#include "evotest/minilang/dependence.hpp"

namespace evotest::fitness {

/// Minimizable cost of a trace with respect to one coverage target.
struct cost {
    std::uint32_t approach_level = 0;
    double normalized_distance = 0.0;  // in [0, 1)

    [[nodiscard]] double total() const noexcept { return approach_level + normalized_distance; }
};

/// Approach level plus normalized distance at the decision where the run
/// diverged from the target. The target's own node is level 0; each
/// enclosing decision edge adds one. Statement targets count the statement
/// itself as level 0, so an unexecuted statement costs at least 1.
///
/// Covered targets cost exactly 0, also in aborted runs. Otherwise an
/// aborted run, or one that reaches none of the target's decisions, gets
/// the worst cost: level chain length + 1 with distance just below 1.
[[nodiscard]] cost target_cost(const minilang::program& prog, const minilang::execution_trace& trace,
                               const coverage::target& target, const minilang::dependence_map& dependence,
                               double k = default_k);

/// Fraction of positions of `path` where the trace's decision outcomes
/// differ or are missing. Throws std::invalid_argument for an empty path.
[[nodiscard]] double path_hamming_cost(const minilang::execution_trace& trace, std::span<const minilang::branch> path);

/// Parses `D0:T,D1:F` into a path, checking each decision exists. Throws
/// std::invalid_argument on malformed or empty input.
[[nodiscard]] std::vector<minilang::branch> parse_path(const minilang::program& prog, std::string_view text);

}  // namespace evotest::fitness
