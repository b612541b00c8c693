#pragma once

#include <cstdint>
#include <optional>

#include "evotest/minilang/ast.hpp"
#include "evotest/minilang/interpreter.hpp"

namespace evotest::fitness {

/// Penalty added when a relational predicate fails at its boundary, and the
/// distance charged for a condition whose operands could not be sampled.
inline constexpr double default_k = 1.0;

/// Distance of `op(lhs, rhs)` from evaluating to `desired`; zero exactly when
/// it already does. Desired-false is the distance of the negated predicate.
[[nodiscard]] double branch_distance(minilang::compare_op op, std::int64_t lhs, std::int64_t rhs, bool desired,
                                     double k = default_k) noexcept;

/// d / (d + 1), kept strictly below 1 even where the quotient would round up.
[[nodiscard]] double normalize(double d) noexcept;

/// Distance of one recorded evaluation of a decision from `desired`: AND sums,
/// OR takes the minimum, NOT flips the desired outcome. Operands skipped by
/// short-circuiting use their probed values; unsampled ones cost `k`.
[[nodiscard]] double event_distance(const minilang::program& prog, const minilang::execution_trace& trace,
                                    const minilang::decision_event& event, bool desired, double k = default_k);

/// Minimum event_distance over every evaluation of `decision` in the trace,
/// or nullopt when the decision was never reached.
[[nodiscard]] std::optional<double> decision_distance(const minilang::program& prog,
                                                      const minilang::execution_trace& trace,
                                                      minilang::decision_id decision, bool desired,
                                                      double k = default_k);

/// Distance from evaluating `condition` with outcome `desired`: the cost of
/// steering the short-circuit operators above it so the condition is
/// evaluated, plus its own branch distance. Minimum over the evaluations of
/// its decision; nullopt when the decision was never reached.
[[nodiscard]] std::optional<double> condition_distance(const minilang::program& prog,
                                                       const minilang::execution_trace& trace,
                                                       minilang::condition_id condition, bool desired,
                                                       double k = default_k);

}  // namespace evotest::fitness
