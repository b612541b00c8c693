#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "evotest/minilang/ast.hpp"

namespace evotest::minilang {

/// An input vector laid out in gene order (arrays expanded).
struct test_case {
    std::vector<std::int64_t> values;

    friend bool operator==(const test_case&, const test_case&) = default;
};

enum class termination : std::uint8_t { normal, runtime_error, loop_cap_exceeded };

[[nodiscard]] const char* to_string(termination t) noexcept;

struct condition_event {
    condition_id condition;
    compare_op op = compare_op::truthy;
    std::int64_t lhs = 0;
    std::int64_t rhs = 0;
    bool outcome = false;
};

/// Operands of a condition skipped by short-circuiting. Recorded for fitness
/// only; they never count as coverage.
struct condition_probe {
    condition_id condition;
    compare_op op = compare_op::truthy;
    std::int64_t lhs = 0;
    std::int64_t rhs = 0;
};

/// One evaluation of a decision. Its condition events are the contiguous
/// range `[first_condition, first_condition + condition_count)` of
/// `execution_trace::conditions`, likewise for probes.
struct decision_event {
    decision_id decision;
    bool outcome = false;
    std::uint32_t first_condition = 0;
    std::uint32_t condition_count = 0;
    std::uint32_t first_probe = 0;
    std::uint32_t probe_count = 0;
};

struct execution_trace {
    std::uint64_t program_fingerprint = 0;
    std::vector<bool> executed;  // indexed by statement id
    std::vector<condition_event> conditions;
    std::vector<decision_event> decisions;
    std::vector<condition_probe> probes;
    termination status = termination::normal;
    std::optional<std::int64_t> return_value;
    std::string error;

    [[nodiscard]] bool was_executed(statement_id id) const { return id.value < executed.size() && executed[id.value]; }
    [[nodiscard]] bool normal() const noexcept { return status == termination::normal; }
    /// Decision outcomes in execution order.
    [[nodiscard]] std::vector<branch> path_signature() const;
};

struct execution_options {
    /// Iterations allowed per loop entry before the run is abandoned.
    std::uint64_t loop_cap = 10'000;
};

/// Runs the entry function on `input` and records the trace. Throws
/// std::invalid_argument when the input has the wrong length or a value
/// lies outside its declared range; runtime faults (division by zero,
/// overflow, bad index, loop cap) end the trace instead of throwing.
[[nodiscard]] execution_trace execute(const program& prog, std::span<const std::int64_t> input,
                                      const execution_options& options = {});

[[nodiscard]] inline execution_trace execute(const program& prog, const test_case& input,
                                             const execution_options& options = {})
{
    return execute(prog, std::span<const std::int64_t>{input.values}, options);
}

/// Throws std::invalid_argument unless `input` fits the program's genes.
void check_input(const program& prog, std::span<const std::int64_t> input);

}  // namespace evotest::minilang
