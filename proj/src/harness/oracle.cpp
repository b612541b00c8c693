#include "evotest/harness/oracle.hpp"

#include <string>

namespace evotest::harness {

std::uint64_t domain_size(const std::vector<minilang::value_range>& ranges) noexcept
{
    std::uint64_t total = 1;
    for (const auto& r : ranges) {
        const auto n = r.size();
        if (n != 0 && total > UINT64_MAX / n)
            return UINT64_MAX;
        total *= n;
    }
    return total;
}

oracle_result brute_force_oracle(const minilang::program& prog, coverage::criterion c, std::uint64_t cap,
                                 const minilang::execution_options& options)
{
    return brute_force_oracle(prog, c, prog.gene_ranges(), cap, options);
}

oracle_result brute_force_oracle(const minilang::program& prog, coverage::criterion c,
                                 const std::vector<minilang::value_range>& ranges, std::uint64_t cap,
                                 const minilang::execution_options& options)
{
    const auto declared = prog.gene_ranges();
    if (ranges.size() != declared.size())
        throw std::invalid_argument("oracle ranges do not match the program's inputs");
    for (std::size_t i = 0; i < ranges.size(); ++i)
        if (ranges[i].lo > ranges[i].hi || ranges[i].lo < declared[i].lo || ranges[i].hi > declared[i].hi)
            throw std::invalid_argument("oracle range for gene " + std::to_string(i) + " leaves its declaration");
    const auto size = domain_size(ranges);
    if (size > cap)
        throw domain_too_large("input domain of '" + prog.name() + "' has " +
                               (size == UINT64_MAX ? std::string("more than 2^64") : std::to_string(size)) +
                               " points, above the oracle cap of " + std::to_string(cap));

    const std::size_t total = coverage::target_count(prog, c);
    std::vector<bool> hit(total, false);
    std::size_t hit_count = 0;
    std::vector<bool> now(total, false);
    oracle_result result;
    for_each_point(ranges, [&](const std::vector<std::int64_t>& x) {
        ++result.points;
        const auto trace = minilang::execute(prog, x, options);
        now.assign(total, false);
        coverage::mark_covered(trace, c, now);
        for (std::size_t i = 0; i < total; ++i)
            if (now[i] && !hit[i]) {
                hit[i] = true;
                ++hit_count;
            }
        return hit_count < total;
    });
    for (const auto& t : coverage::enumerate_targets(prog, c))
        (hit[t.index()] ? result.feasible : result.infeasible).push_back(t);
    return result;
}

}  // namespace evotest::harness
