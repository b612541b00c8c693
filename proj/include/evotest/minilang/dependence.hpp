#pragma once

#include <optional>
#include <span>
#include <vector>

#include "evotest/minilang/ast.hpp"

namespace evotest::minilang {

/// Control-dependence chains derived from statement nesting. For each
/// decision the chain lists the enclosing decision edges, innermost first;
/// a decision at function level has an empty chain (it depends on entry).
class dependence_map {
public:
    dependence_map() = default;
    explicit dependence_map(std::vector<std::vector<branch>> chains) : chains_{std::move(chains)} {}

    [[nodiscard]] std::span<const branch> chain(decision_id id) const { return chains_.at(id.value); }
    [[nodiscard]] std::size_t size() const noexcept { return chains_.size(); }
    [[nodiscard]] bool empty() const noexcept { return chains_.empty(); }

private:
    std::vector<std::vector<branch>> chains_;
};

[[nodiscard]] dependence_map control_dependence(const program& prog);

/// Chain for an arbitrary guard edge: the edge itself followed by the
/// chain of its decision.
[[nodiscard]] std::vector<branch> guard_chain(const program& prog, const std::optional<branch>& guard);

}  // namespace evotest::minilang
