#pragma once

#include <compare>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "evotest/minilang/ast.hpp"
#include "evotest/minilang/interpreter.hpp"

namespace evotest::coverage {

enum class criterion : std::uint8_t { statement, decision, condition };

[[nodiscard]] const char* to_string(criterion c) noexcept;
/// Accepts "statement", "decision" (or "branch") and "condition".
[[nodiscard]] std::optional<criterion> parse_criterion(std::string_view text) noexcept;

/// One coverage requirement. Statement targets ignore `outcome`.
struct target {
    criterion kind = criterion::decision;
    std::uint32_t id = 0;
    bool outcome = true;

    /// Dense position among the targets of one criterion: statements by id,
    /// outcome targets as 2*id (true) and 2*id+1 (false).
    [[nodiscard]] std::size_t index() const noexcept
    {
        return kind == criterion::statement ? id : 2 * std::size_t{id} + (outcome ? 0 : 1);
    }

    friend bool operator==(const target&, const target&) = default;
    friend std::strong_ordering operator<=>(const target& a, const target& b) noexcept
    {
        if (auto c = a.kind <=> b.kind; c != 0)
            return c;
        return a.index() <=> b.index();
    }
};

[[nodiscard]] target statement_target(minilang::statement_id id) noexcept;
[[nodiscard]] target decision_target(minilang::decision_id id, bool outcome) noexcept;
[[nodiscard]] target condition_target(minilang::condition_id id, bool outcome) noexcept;

/// `S3`, `D1:T`, `C2:F`.
[[nodiscard]] std::string label(const target& t);
[[nodiscard]] std::optional<target> parse_label(std::string_view text) noexcept;

/// Source line of the statement, decision or condition a target refers to.
[[nodiscard]] int source_line(const minilang::program& prog, const target& t);
/// Human description such as `if (inp1 > 15)` or `assignment`.
[[nodiscard]] std::string describe(const minilang::program& prog, const target& t);

[[nodiscard]] std::size_t target_count(const minilang::program& prog, criterion c) noexcept;

/// All targets of a criterion, ordered by id with the true outcome first.
[[nodiscard]] std::vector<target> enumerate_targets(const minilang::program& prog, criterion c);

/// Whether a single trace satisfies `t`.
[[nodiscard]] bool covers(const minilang::execution_trace& trace, const target& t);

/// Marks `hit[t.index()]` for every target of `c` the trace satisfies.
void mark_covered(const minilang::execution_trace& trace, criterion c, std::vector<bool>& hit);

}  // namespace evotest::coverage
