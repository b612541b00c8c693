#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "evotest/coverage/target.hpp"
#include "evotest/minilang/ast.hpp"

namespace evotest::harness {

/// A benchmark program plus the metadata in its header comments:
/// `// expect decisions N` and `// hard D2:T D3:T`.
struct benchmark {
    std::filesystem::path path;
    minilang::source_program source;
    std::optional<std::size_t> expected_decisions;
    std::vector<coverage::target> hard_targets;

    [[nodiscard]] const std::string& name() const noexcept { return source.name; }
};

/// Reads and parses one `.minic` file. Throws minilang::parse_error for bad
/// source or metadata and std::runtime_error for IO failures or a decision
/// count that disagrees with `expect decisions`.
[[nodiscard]] benchmark load_benchmark(const std::filesystem::path& path);

/// Every `.minic` file in `dir`, ordered by name.
[[nodiscard]] std::vector<benchmark> load_corpus(const std::filesystem::path& dir);

/// Directory searched when no corpus path is given: `EVOTEST_BENCHMARKS`
/// if set, else `benchmarks` under the working directory, else the source
/// tree the binary was built from.
[[nodiscard]] std::filesystem::path default_corpus_dir();

/// `inp1:[-100,100] inp2:[-100,100]`, with arrays written as `a[6]:[1,50]`.
[[nodiscard]] std::string describe_ranges(const std::vector<minilang::input_decl>& inputs);

}  // namespace evotest::harness
