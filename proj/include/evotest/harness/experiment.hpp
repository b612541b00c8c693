#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include <nlohmann/json.hpp>

#include "evotest/harness/corpus.hpp"
#include "evotest/harness/generate.hpp"
#include "evotest/harness/oracle.hpp"

namespace evotest::harness {

struct algorithm_entry {
    std::string label;  // empty: the algorithm name
    search::algorithm_config config;
};

/// One comparison: every algorithm runs `repetitions` times on the same
/// program, run i of each using seed `seed + i`.
struct experiment_spec {
    std::filesystem::path program;
    coverage::criterion criterion = coverage::criterion::decision;
    std::vector<algorithm_entry> algorithms;
    std::uint64_t budget = 1000;  // evaluations per target
    std::uint64_t repetitions = 1;
    std::uint64_t seed = 1;
    /// Use the brute-force oracle (when the domain fits the cap) to skip
    /// infeasible targets instead of spending the budget on them.
    bool skip_infeasible = false;
    std::uint64_t oracle_cap = default_oracle_cap;
    fitness_mode fitness = fitness_mode::branch;
    std::vector<minilang::branch> path;

    /// Throws std::invalid_argument for an empty algorithm list, zero
    /// repetitions or zero budget.
    void validate() const;
};

/// Parses a spec. Relative program paths resolve against `base_dir`.
/// Throws std::invalid_argument with the offending key on bad input.
[[nodiscard]] experiment_spec spec_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir = {});
[[nodiscard]] nlohmann::ordered_json to_json(const experiment_spec& spec);

/// Labels as they appear in reports: the given label or algorithm name,
/// with `#2`, `#3`, ... appended to repeats.
[[nodiscard]] std::vector<std::string> unique_labels(const std::vector<algorithm_entry>& algorithms);

/// One generate_suite run.
struct comparison_row {
    std::string program;
    std::string ranges;
    std::string label;
    std::string algorithm;
    std::uint64_t seed = 0;
    double coverage_percent = 0.0;
    std::optional<double> feasible_percent;  // when the oracle was run
    std::uint64_t tests = 0;
    std::uint64_t evaluations = 0;
    /// Evaluations until every feasible target was covered; equals
    /// `evaluations` (censored) when that never happened.
    std::uint64_t evaluations_to_full = 0;
    bool full = false;
    double wall_seconds = 0.0;

    friend bool operator==(const comparison_row&, const comparison_row&) = default;
};

struct summary {
    double mean = 0.0;
    double median = 0.0;
    double min = 0.0;
    double max = 0.0;

    friend bool operator==(const summary&, const summary&) = default;
};

[[nodiscard]] summary summarize(std::vector<double> values);

struct comparison_aggregate {
    std::string program;
    std::string ranges;
    std::string label;
    std::string algorithm;
    std::uint64_t runs = 0;
    std::uint64_t full_runs = 0;
    summary coverage_percent;
    std::optional<summary> feasible_percent;
    summary tests;
    summary evaluations;
    summary evaluations_to_full;
    summary wall_seconds;

    friend bool operator==(const comparison_aggregate&, const comparison_aggregate&) = default;
};

struct comparison_report {
    nlohmann::ordered_json config;  // resolved experiment settings
    std::vector<comparison_row> rows;
    std::vector<comparison_aggregate> aggregates;
};

/// Groups rows by (program, label) in first-appearance order.
[[nodiscard]] std::vector<comparison_aggregate> aggregate(const std::vector<comparison_row>& rows);

/// Runs the experiment on `prog`. Rows are ordered by algorithm (spec
/// order) then seed, whatever `jobs` is.
[[nodiscard]] comparison_report compare(const minilang::program& prog, const experiment_spec& spec,
                                        unsigned jobs = 1);
/// Loads `spec.program` first.
[[nodiscard]] comparison_report compare(const experiment_spec& spec, unsigned jobs = 1);

/// The same experiment over every benchmark; rows grouped by benchmark.
[[nodiscard]] comparison_report run_benchmarks(const std::vector<benchmark>& corpus, const experiment_spec& spec,
                                               unsigned jobs = 1);

enum class report_format : std::uint8_t { csv, json, markdown };

[[nodiscard]] std::optional<report_format> parse_report_format(std::string_view text) noexcept;
[[nodiscard]] const char* to_string(report_format f) noexcept;

struct emit_options {
    /// Wall-clock columns make output differ between identical runs, so
    /// they are left out unless asked for.
    bool timing = false;
};

/// CSV: raw rows only. JSON: config, rows and aggregates. Markdown: one
/// table of aggregates. Byte-stable for a fixed report.
[[nodiscard]] std::string emit_report(const comparison_report& report, report_format format,
                                      const emit_options& options = {});
/// Throws std::invalid_argument for an unknown format name.
[[nodiscard]] std::string emit_report(const comparison_report& report, std::string_view format,
                                      const emit_options& options = {});

/// Parses CSV written by emit_report. Throws std::invalid_argument.
[[nodiscard]] std::vector<comparison_row> rows_from_csv(std::string_view text);
/// Parses JSON written by emit_report; aggregates are recomputed.
[[nodiscard]] comparison_report report_from_json(const nlohmann::json& j);

/// Shortest text that reads back as exactly `v`.
[[nodiscard]] std::string format_double(double v);

}  // namespace evotest::harness
