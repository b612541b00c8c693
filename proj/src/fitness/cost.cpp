#include "evotest/fitness/cost.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

namespace evotest::fitness {

namespace {

bool reached(const minilang::execution_trace& trace, minilang::decision_id d)
{
    for (const auto& e : trace.decisions)
        if (e.decision == d)
            return true;
    return false;
}

cost worst(std::size_t levels) { return {static_cast<std::uint32_t>(levels), std::nextafter(1.0, 0.0)}; }

}  // namespace

cost target_cost(const minilang::program& prog, const minilang::execution_trace& trace,
                 const coverage::target& target, const minilang::dependence_map& dependence, double k)
{
    if (trace.program_fingerprint != prog.fingerprint())
        throw std::invalid_argument("trace was produced by a different program");
    if (coverage::covers(trace, target))
        return {};

    // Level 0 is the target's own node; `chain` holds the enclosing edges.
    std::span<const minilang::branch> chain;
    std::vector<minilang::branch> statement_chain;
    switch (target.kind) {
    case coverage::criterion::statement:
        statement_chain = minilang::guard_chain(prog, prog.statement(minilang::statement_id{target.id}).guard);
        chain = statement_chain;
        break;
    case coverage::criterion::decision: chain = dependence.chain(minilang::decision_id{target.id}); break;
    case coverage::criterion::condition:
        chain = dependence.chain(prog.condition(minilang::condition_id{target.id}).decision);
        break;
    }
    if (!trace.normal())
        return worst(chain.size() + 1);

    if (target.kind == coverage::criterion::decision) {
        if (auto d = decision_distance(prog, trace, minilang::decision_id{target.id}, target.outcome, k))
            return {0, normalize(*d)};
    } else if (target.kind == coverage::criterion::condition) {
        if (auto d = condition_distance(prog, trace, minilang::condition_id{target.id}, target.outcome, k))
            return {0, normalize(*d)};
    }
    for (std::size_t i = 0; i < chain.size(); ++i) {
        if (!reached(trace, chain[i].decision))
            continue;
        const auto d = decision_distance(prog, trace, chain[i].decision, chain[i].outcome, k);
        return {static_cast<std::uint32_t>(i + 1), normalize(*d)};
    }
    return worst(chain.size() + 1);
}

double path_hamming_cost(const minilang::execution_trace& trace, std::span<const minilang::branch> path)
{
    if (path.empty())
        throw std::invalid_argument("path target must not be empty");
    const auto actual = trace.path_signature();
    std::size_t mismatches = 0;
    for (std::size_t i = 0; i < path.size(); ++i)
        if (i >= actual.size() || actual[i] != path[i])
            ++mismatches;
    return static_cast<double>(mismatches) / static_cast<double>(path.size());
}

std::vector<minilang::branch> parse_path(const minilang::program& prog, std::string_view text)
{
    std::vector<minilang::branch> path;
    while (!text.empty()) {
        const auto comma = text.find(',');
        auto item = text.substr(0, comma);
        while (!item.empty() && item.front() == ' ')
            item.remove_prefix(1);
        while (!item.empty() && item.back() == ' ')
            item.remove_suffix(1);
        auto t = coverage::parse_label(item);
        if (!t || t->kind != coverage::criterion::decision)
            throw std::invalid_argument("bad path element '" + std::string(item) + "' (expected e.g. D0:T)");
        if (t->id >= prog.decisions().size())
            throw std::invalid_argument("path refers to unknown decision D" + std::to_string(t->id));
        path.push_back({minilang::decision_id{t->id}, t->outcome});
        if (comma == std::string_view::npos)
            break;
        text.remove_prefix(comma + 1);
    }
    if (path.empty())
        throw std::invalid_argument("path target must not be empty");
    return path;
}

}  // namespace evotest::fitness
