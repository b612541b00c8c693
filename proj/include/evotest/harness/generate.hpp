#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "evotest/coverage/report.hpp"
#include "evotest/minilang/ast.hpp"
#include "evotest/search/algorithms.hpp"

namespace evotest::harness {

enum class fitness_mode : std::uint8_t { branch, path };

[[nodiscard]] const char* to_string(fitness_mode m) noexcept;

struct generate_options {
    fitness_mode fitness = fitness_mode::branch;
    /// Desired decision outcomes for path mode.
    std::vector<minilang::branch> path;
    /// Targets not to search for, e.g. those an oracle proved infeasible.
    std::vector<coverage::target> skip;
    /// Drop tests whose coverage the rest of the suite already provides.
    bool minimize = true;
    minilang::execution_options execution;
};

/// One per-target search.
struct target_run {
    coverage::target target;
    std::uint64_t seed = 0;
    std::uint64_t evaluations = 0;
    bool success = false;
};

struct generation_stats {
    std::uint64_t evaluations = 0;
    double wall_seconds = 0.0;
    std::vector<target_run> runs;
    /// Targets skipped because earlier searches covered them.
    std::size_t collateral = 0;
    std::size_t skipped = 0;
    /// Cumulative evaluation count at which each target was first covered,
    /// in order of coverage.
    std::vector<std::pair<coverage::target, std::uint64_t>> first_covered;
};

struct generation_result {
    std::vector<minilang::test_case> suite;
    coverage::coverage_report report;
    generation_stats stats;
};

/// Walks the targets in enumeration order and runs one search per target
/// that is neither covered yet nor skipped. Every evaluated input is folded
/// into a coverage archive, so later targets may be covered collaterally.
/// The suite holds the archive's first-covering tests, optionally reduced,
/// and the report is re-measured from that suite.
///
/// Target `t` is searched with seed derive_seed(seed, label(t)), so
/// skipping a target never shifts the streams of the others. In path mode a
/// single search minimizes the Hamming distance to `options.path` instead.
/// Throws coverage::degenerate_coverage_error for a target-free criterion.
[[nodiscard]] generation_result generate_suite(const minilang::program& prog, coverage::criterion c,
                                               const search::algorithm_config& config, std::uint64_t budget,
                                               std::uint64_t seed, const generate_options& options = {});

/// Evaluation count at which every target in `feasible` was covered, or
/// nullopt if some never was.
[[nodiscard]] std::optional<std::uint64_t> evaluations_to_cover(const generation_stats& stats,
                                                                const std::vector<coverage::target>& feasible);

/// Greedy single pass: drops each test whose removal keeps the covered set.
/// Every remaining test is then needed by the final suite.
[[nodiscard]] std::vector<minilang::test_case> reduce_suite(const minilang::program& prog,
                                                            std::vector<minilang::test_case> suite,
                                                            coverage::criterion c,
                                                            const minilang::execution_options& options = {});

}  // namespace evotest::harness
