#pragma once

#include <cstdint>
#include <functional>
#include <limits>
#include <optional>
#include <span>
#include <vector>

#include "evotest/minilang/source.hpp"

namespace evotest::search {

using minilang::value_range;
using genes = std::vector<std::int64_t>;

/// A minimization problem over fixed-length integer vectors. Success means
/// cost 0. The cost function must be reentrant when runs share it.
struct problem {
    std::vector<value_range> ranges;
    std::function<double(std::span<const std::int64_t>)> cost;

    [[nodiscard]] std::size_t dimension() const noexcept { return ranges.size(); }
    /// Throws std::invalid_argument for an empty or inverted range list or a
    /// missing cost function.
    void validate() const;
};

struct individual {
    genes values;
    double cost = std::numeric_limits<double>::infinity();
};

/// Optional hooks for watching a run from tests and tools.
struct search_observer {
    std::function<void(std::span<const std::int64_t>, double)> evaluated;
    /// GA: costs of the population after each generation (including the initial one).
    std::function<void(std::span<const double>)> generation;
    /// Tabu search: list length after each update.
    std::function<void(std::size_t)> tabu_size;
    /// Tabu search: a tabu move taken because its cost beat the previous best.
    std::function<void(std::span<const std::int64_t>, double cost, double previous_best)> aspiration;
    /// Local searches: the current point after each iteration.
    std::function<void(std::span<const std::int64_t>)> moved;
};

/// Central budget and range gate: every cost evaluation of a run goes
/// through here, so no algorithm can exceed its budget or step outside the
/// declared ranges.
class evaluator {
public:
    evaluator(const problem& p, std::uint64_t budget, const search_observer* observer = nullptr);

    /// Cost of `x`, or nullopt once the budget is spent. Throws
    /// std::logic_error if `x` has the wrong length or leaves its ranges.
    std::optional<double> operator()(std::span<const std::int64_t> x);

    [[nodiscard]] bool exhausted() const noexcept { return used_ >= budget_; }
    [[nodiscard]] bool solved() const noexcept { return best_.cost == 0.0; }
    /// Either solved or out of budget.
    [[nodiscard]] bool done() const noexcept { return solved() || exhausted(); }

    [[nodiscard]] std::uint64_t used() const noexcept { return used_; }
    [[nodiscard]] std::uint64_t budget() const noexcept { return budget_; }
    [[nodiscard]] const individual& best() const noexcept { return best_; }
    [[nodiscard]] const problem& target() const noexcept { return problem_; }

private:
    const problem& problem_;
    std::uint64_t budget_;
    const search_observer* observer_;
    std::uint64_t used_ = 0;
    individual best_;
};

struct search_result {
    individual best;
    std::uint64_t evaluations = 0;
    bool success = false;
    std::uint64_t seed = 0;
    double wall_seconds = 0.0;
    /// Incumbent cost per iteration: best so far for random search, the
    /// current point for the local searches, the population best for the GA.
    std::vector<double> history;
};

}  // namespace evotest::search
