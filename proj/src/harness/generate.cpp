#include "evotest/harness/generate.hpp"

#include <algorithm>
#include <chrono>
#include <stdexcept>

#include "evotest/fitness/cost.hpp"
#include "evotest/minilang/dependence.hpp"

namespace evotest::harness {

const char* to_string(fitness_mode m) noexcept
{
    switch (m) {
    case fitness_mode::branch: return "branch";
    case fitness_mode::path: return "path";
    }
    return "?";
}

namespace {

// Coverage archive shared by all searches of one generate_suite call.
class archive {
public:
    archive(const minilang::program& prog, coverage::criterion c, const minilang::execution_options& options,
            generation_stats& stats)
        : prog_{prog},
          kind_{c},
          options_{options},
          stats_{stats},
          report_{coverage::coverage_report::empty(prog, c)},
          targets_{coverage::enumerate_targets(prog, c)},
          scratch_(targets_.size())
    {
    }

    minilang::execution_trace run(std::span<const std::int64_t> x)
    {
        auto trace = minilang::execute(prog_, x, options_);
        ++evaluations_;
        scratch_.assign(targets_.size(), false);
        coverage::mark_covered(trace, kind_, scratch_);
        bool fresh = false;
        for (std::size_t i = 0; i < targets_.size(); ++i)
            if (scratch_[i] && !report_.is_covered(targets_[i])) {
                stats_.first_covered.emplace_back(targets_[i], evaluations_);
                fresh = true;
            }
        if (fresh)
            report_ = coverage::merge(std::move(report_), trace, minilang::test_case{{x.begin(), x.end()}});
        return trace;
    }

    [[nodiscard]] const coverage::coverage_report& report() const noexcept { return report_; }
    [[nodiscard]] const std::vector<coverage::target>& targets() const noexcept { return targets_; }
    [[nodiscard]] std::uint64_t evaluations() const noexcept { return evaluations_; }

private:
    const minilang::program& prog_;
    coverage::criterion kind_;
    const minilang::execution_options& options_;
    generation_stats& stats_;
    coverage::coverage_report report_;
    std::vector<coverage::target> targets_;
    std::vector<bool> scratch_;
    std::uint64_t evaluations_ = 0;
};

}  // namespace

generation_result generate_suite(const minilang::program& prog, coverage::criterion c,
                                 const search::algorithm_config& config, std::uint64_t budget, std::uint64_t seed,
                                 const generate_options& options)
{
    const auto start = std::chrono::steady_clock::now();
    if (budget == 0)
        throw std::invalid_argument("per-target budget must be at least 1");
    if (prog.gene_count() == 0)
        throw std::invalid_argument("program '" + prog.name() + "' declares no inputs to search over");
    config.validate();

    generation_stats stats;
    archive store{prog, c, options.execution, stats};
    const auto dependence = minilang::control_dependence(prog);
    const auto ranges = prog.gene_ranges();

    if (options.fitness == fitness_mode::path) {
        if (options.path.empty())
            throw std::invalid_argument("path fitness needs a non-empty path");
        const auto seed_path = search::derive_seed(seed, "path");
        search::problem p{ranges, [&](std::span<const std::int64_t> x) {
                              return fitness::path_hamming_cost(store.run(x), options.path);
                          }};
        const auto r = search::run_search(p, config, budget, seed_path);
        stats.runs.push_back({{}, seed_path, r.evaluations, r.success});
    } else {
        for (const auto& t : store.targets()) {
            if (store.report().is_covered(t)) {
                ++stats.collateral;
                continue;
            }
            if (std::find(options.skip.begin(), options.skip.end(), t) != options.skip.end()) {
                ++stats.skipped;
                continue;
            }
            const auto seed_t = search::derive_seed(seed, coverage::label(t));
            search::problem p{ranges, [&](std::span<const std::int64_t> x) {
                                  return fitness::target_cost(prog, store.run(x), t, dependence).total();
                              }};
            const auto r = search::run_search(p, config, budget, seed_t);
            stats.runs.push_back({t, seed_t, r.evaluations, r.success});
        }
    }
    stats.evaluations = store.evaluations();

    auto suite = store.report().tests();
    if (options.minimize)
        suite = reduce_suite(prog, std::move(suite), c, options.execution);
    auto report = coverage::measure(prog, suite, c, options.execution);
    if (report.covered() != store.report().covered())
        throw std::logic_error("re-running the suite does not reproduce the archived coverage");

    stats.wall_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    return {std::move(suite), std::move(report), std::move(stats)};
}

std::optional<std::uint64_t> evaluations_to_cover(const generation_stats& stats,
                                                  const std::vector<coverage::target>& feasible)
{
    std::uint64_t last = 0;
    for (const auto& t : feasible) {
        auto it = std::find_if(stats.first_covered.begin(), stats.first_covered.end(),
                               [&t](const auto& entry) { return entry.first == t; });
        if (it == stats.first_covered.end())
            return std::nullopt;
        last = std::max(last, it->second);
    }
    return last;
}

std::vector<minilang::test_case> reduce_suite(const minilang::program& prog, std::vector<minilang::test_case> suite,
                                              coverage::criterion c, const minilang::execution_options& options)
{
    const std::size_t total = coverage::target_count(prog, c);
    std::vector<std::vector<bool>> covers;
    covers.reserve(suite.size());
    std::vector<std::size_t> count(total, 0);
    for (const auto& t : suite) {
        std::vector<bool> hit(total, false);
        coverage::mark_covered(minilang::execute(prog, t, options), c, hit);
        for (std::size_t i = 0; i < total; ++i)
            count[i] += hit[i];
        covers.push_back(std::move(hit));
    }
    std::vector<minilang::test_case> kept;
    for (std::size_t j = 0; j < suite.size(); ++j) {
        bool needed = false;
        for (std::size_t i = 0; i < total && !needed; ++i)
            needed = covers[j][i] && count[i] == 1;
        if (needed) {
            kept.push_back(std::move(suite[j]));
        } else {
            for (std::size_t i = 0; i < total; ++i)
                count[i] -= covers[j][i];
        }
    }
    return kept;
}

}  // namespace evotest::harness
