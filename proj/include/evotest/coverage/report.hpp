#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <nlohmann/json.hpp>

#include "evotest/coverage/target.hpp"

namespace evotest::coverage {

/// Raised when a criterion yields no targets, so no percentage exists.
class degenerate_coverage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

/// Covered/uncovered partition of one criterion's targets, with the test
/// that first covered each target. A value type: merge returns a new report.
class coverage_report {
public:
    /// All targets uncovered. Throws degenerate_coverage_error when the
    /// program has no targets under `c`.
    [[nodiscard]] static coverage_report empty(const minilang::program& prog, criterion c);

    [[nodiscard]] criterion kind() const noexcept { return kind_; }
    [[nodiscard]] std::size_t total() const noexcept { return hit_.size(); }
    [[nodiscard]] std::size_t covered_count() const noexcept { return covered_count_; }
    [[nodiscard]] std::size_t uncovered_count() const noexcept { return hit_.size() - covered_count_; }
    [[nodiscard]] double percent() const noexcept;
    [[nodiscard]] bool complete() const noexcept { return covered_count_ == hit_.size(); }

    [[nodiscard]] bool is_covered(const target& t) const;
    [[nodiscard]] std::vector<target> covered() const;
    [[nodiscard]] std::vector<target> uncovered() const;
    [[nodiscard]] std::vector<target> all_targets() const;

    /// Tests that first covered at least one target, in the order they did.
    [[nodiscard]] const std::vector<minilang::test_case>& tests() const noexcept { return tests_; }
    /// Index into tests() of the test that first covered `t`.
    [[nodiscard]] std::optional<std::size_t> attribution(const target& t) const;

    [[nodiscard]] std::uint64_t program_fingerprint() const noexcept { return fingerprint_; }

    /// Folds one execution into the report. Throws std::invalid_argument if
    /// the trace comes from a different program.
    friend coverage_report merge(coverage_report report, const minilang::execution_trace& trace,
                                 const minilang::test_case& test);
    /// Union of two reports; attribution prefers `a`. Throws
    /// std::invalid_argument on criterion or program mismatch.
    friend coverage_report merge(coverage_report a, const coverage_report& b);

private:
    coverage_report() = default;

    criterion kind_ = criterion::decision;
    std::uint64_t fingerprint_ = 0;
    std::vector<bool> hit_;
    std::vector<std::int64_t> first_test_;  // -1 when uncovered
    std::vector<minilang::test_case> tests_;
    std::size_t covered_count_ = 0;
};

coverage_report merge(coverage_report report, const minilang::execution_trace& trace,
                      const minilang::test_case& test);
coverage_report merge(coverage_report a, const coverage_report& b);

/// Replays `suite` from scratch. Throws degenerate_coverage_error for a
/// target-free criterion.
[[nodiscard]] coverage_report measure(const minilang::program& prog, std::span<const minilang::test_case> suite,
                                      criterion c, const minilang::execution_options& options = {});

/// Uncovered targets in id order, true outcome before false.
[[nodiscard]] std::vector<target> uncovered_targets(const coverage_report& report);

/// Percentage of `feasible` targets the report covers (100 when none).
[[nodiscard]] double feasible_percent(const coverage_report& report, std::span<const target> feasible);

[[nodiscard]] nlohmann::ordered_json to_json(const coverage_report& report, const minilang::program& prog,
                                             std::optional<std::span<const target>> feasible = std::nullopt);
[[nodiscard]] std::string to_text(const coverage_report& report, const minilang::program& prog,
                                  std::optional<std::span<const target>> feasible = std::nullopt);

}  // namespace evotest::coverage
