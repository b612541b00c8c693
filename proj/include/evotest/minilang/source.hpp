#pragma once

#include <cstdint>
#include <filesystem>
#include <stdexcept>
#include <string>
#include <vector>

namespace evotest::minilang {

/// Inclusive integer interval.
struct value_range {
    std::int64_t lo = 0;
    std::int64_t hi = 0;

    [[nodiscard]] bool contains(std::int64_t v) const noexcept { return lo <= v && v <= hi; }
    /// Number of points, saturating at UINT64_MAX.
    [[nodiscard]] std::uint64_t size() const noexcept;

    friend bool operator==(const value_range&, const value_range&) = default;
};

/// One declared program input. Scalars have `length == 0`; arrays expand into
/// `length` consecutive genes that all share `range`.
struct input_decl {
    std::string name;
    value_range range;
    std::size_t length = 0;

    [[nodiscard]] std::size_t gene_count() const noexcept { return length == 0 ? 1 : length; }

    friend bool operator==(const input_decl&, const input_decl&) = default;
};

/// A MiniC translation unit together with its input declarations.
struct source_program {
    std::string name;
    std::string text;
    std::vector<input_decl> inputs;
};

/// Thrown for lexical, syntactic and semantic errors in MiniC text.
class parse_error : public std::runtime_error {
public:
    parse_error(const std::string& message, int line, int column);

    [[nodiscard]] int line() const noexcept { return line_; }
    [[nodiscard]] int column() const noexcept { return column_; }
    [[nodiscard]] const std::string& detail() const noexcept { return detail_; }

private:
    std::string detail_;
    int line_;
    int column_;
};

/// Scans `// input NAME in [LO, HI]` and `// input NAME[N] in [LO, HI]`
/// comment lines. Other comments are ignored.
[[nodiscard]] std::vector<input_decl> parse_input_header(const std::string& text);

/// Builds a source_program from text, reading inputs from the header block.
[[nodiscard]] source_program make_source(std::string name, std::string text);

/// Reads a `.minic` file. The program name is the file stem.
[[nodiscard]] source_program load_source(const std::filesystem::path& path);

/// Checks name uniqueness and range ordering; throws parse_error.
void validate_inputs(const std::vector<input_decl>& inputs);

}  // namespace evotest::minilang
