#include "evotest/fitness/distance.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace evotest::fitness {

namespace {

using minilang::compare_op;

// Exact |a - b| converted once, so distinct operands never collapse to 0.
double gap(std::int64_t a, std::int64_t b) noexcept
{
    __extension__ typedef __int128 wide;
    const wide d = static_cast<wide>(a) - static_cast<wide>(b);
    return static_cast<double>(d < 0 ? -d : d);
}

double distance_true(compare_op op, std::int64_t l, std::int64_t r, double k) noexcept
{
    switch (op) {
    case compare_op::eq: return gap(l, r);
    case compare_op::ne: return l != r ? 0.0 : k;
    case compare_op::lt: return l < r ? 0.0 : gap(l, r) + k;
    case compare_op::le: return l <= r ? 0.0 : gap(l, r) + k;
    case compare_op::gt: return l > r ? 0.0 : gap(r, l) + k;
    case compare_op::ge: return l >= r ? 0.0 : gap(r, l) + k;
    case compare_op::truthy: return l != 0 ? 0.0 : k;
    }
    return k;
}

compare_op negated(compare_op op) noexcept
{
    switch (op) {
    case compare_op::eq: return compare_op::ne;
    case compare_op::ne: return compare_op::eq;
    case compare_op::lt: return compare_op::ge;
    case compare_op::le: return compare_op::gt;
    case compare_op::gt: return compare_op::le;
    case compare_op::ge: return compare_op::lt;
    case compare_op::truthy: return compare_op::truthy;  // handled by the caller
    }
    return op;
}

struct leaf_source {
    const minilang::execution_trace& trace;
    const minilang::decision_event& event;
    double k;

    double distance(minilang::condition_id id, bool desired) const
    {
        for (std::uint32_t i = 0; i < event.condition_count; ++i) {
            const auto& c = trace.conditions[event.first_condition + i];
            if (c.condition == id)
                return branch_distance(c.op, c.lhs, c.rhs, desired, k);
        }
        for (std::uint32_t i = 0; i < event.probe_count; ++i) {
            const auto& p = trace.probes[event.first_probe + i];
            if (p.condition == id)
                return branch_distance(p.op, p.lhs, p.rhs, desired, k);
        }
        return k;
    }
};

double tree_distance(const std::vector<minilang::logic_node>& logic, std::uint32_t node, bool desired,
                     const leaf_source& leaves)
{
    using kind = minilang::logic_node::kind;
    const auto& n = logic[node];
    switch (n.type) {
    case kind::leaf: return leaves.distance(n.leaf, desired);
    case kind::negation: return tree_distance(logic, n.lhs, !desired, leaves);
    case kind::all_of:
    case kind::any_of: {
        const double a = tree_distance(logic, n.lhs, desired, leaves);
        const double b = tree_distance(logic, n.rhs, desired, leaves);
        // AND wanted true and OR wanted false need both sides.
        const bool both = (n.type == kind::all_of) == desired;
        return both ? a + b : std::min(a, b);
    }
    }
    return leaves.k;
}

// Distance from evaluating leaf `target` with outcome `desired`, or nullopt
// when `target` is not below `node`.
std::optional<double> reach_distance(const std::vector<minilang::logic_node>& logic, std::uint32_t node,
                                     minilang::condition_id target, bool desired, const leaf_source& leaves)
{
    using kind = minilang::logic_node::kind;
    const auto& n = logic[node];
    switch (n.type) {
    case kind::leaf:
        if (n.leaf != target)
            return std::nullopt;
        return leaves.distance(target, desired);
    case kind::negation: return reach_distance(logic, n.lhs, target, desired, leaves);
    case kind::all_of:
    case kind::any_of: {
        if (auto d = reach_distance(logic, n.lhs, target, desired, leaves))
            return d;
        auto d = reach_distance(logic, n.rhs, target, desired, leaves);
        if (!d)
            return std::nullopt;
        // The right operand runs only if the left one does not decide.
        return tree_distance(logic, n.lhs, n.type == kind::all_of, leaves) + *d;
    }
    }
    return std::nullopt;
}

}  // namespace

double branch_distance(compare_op op, std::int64_t lhs, std::int64_t rhs, bool desired, double k) noexcept
{
    if (op == compare_op::truthy && !desired)
        return gap(lhs, 0);
    return distance_true(desired ? op : negated(op), lhs, rhs, k);
}

double normalize(double d) noexcept
{
    static const double below_one = std::nextafter(1.0, 0.0);
    if (!(d > 0.0))
        return 0.0;
    if (std::isinf(d))
        return below_one;
    return std::min(d / (d + 1.0), below_one);
}

double event_distance(const minilang::program& prog, const minilang::execution_trace& trace,
                      const minilang::decision_event& event, bool desired, double k)
{
    const auto& logic = prog.decision(event.decision).logic;
    const leaf_source leaves{trace, event, k};
    return tree_distance(logic, static_cast<std::uint32_t>(logic.size() - 1), desired, leaves);
}

std::optional<double> decision_distance(const minilang::program& prog, const minilang::execution_trace& trace,
                                        minilang::decision_id decision, bool desired, double k)
{
    std::optional<double> best;
    for (const auto& e : trace.decisions) {
        if (e.decision != decision)
            continue;
        const double d = event_distance(prog, trace, e, desired, k);
        if (!best || d < *best)
            best = d;
        if (*best == 0.0)
            break;
    }
    return best;
}

std::optional<double> condition_distance(const minilang::program& prog, const minilang::execution_trace& trace,
                                         minilang::condition_id condition, bool desired, double k)
{
    const auto decision = prog.condition(condition).decision;
    const auto& logic = prog.decision(decision).logic;
    std::optional<double> best;
    for (const auto& e : trace.decisions) {
        if (e.decision != decision)
            continue;
        const leaf_source leaves{trace, e, k};
        auto d = reach_distance(logic, static_cast<std::uint32_t>(logic.size() - 1), condition, desired, leaves);
        if (d && (!best || *d < *best))
            best = d;
        if (best && *best == 0.0)
            break;
    }
    return best;
}

}  // namespace evotest::fitness
