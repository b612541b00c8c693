#include "evotest/coverage/target.hpp"

#include <charconv>
#include <stdexcept>

namespace evotest::coverage {

const char* to_string(criterion c) noexcept
{
    switch (c) {
    case criterion::statement: return "statement";
    case criterion::decision: return "decision";
    case criterion::condition: return "condition";
    }
    return "?";
}

std::optional<criterion> parse_criterion(std::string_view text) noexcept
{
    if (text == "statement")
        return criterion::statement;
    if (text == "decision" || text == "branch")
        return criterion::decision;
    if (text == "condition")
        return criterion::condition;
    return std::nullopt;
}

target statement_target(minilang::statement_id id) noexcept { return {criterion::statement, id.value, true}; }
target decision_target(minilang::decision_id id, bool outcome) noexcept { return {criterion::decision, id.value, outcome}; }
target condition_target(minilang::condition_id id, bool outcome) noexcept
{
    return {criterion::condition, id.value, outcome};
}

std::string label(const target& t)
{
    switch (t.kind) {
    case criterion::statement: return "S" + std::to_string(t.id);
    case criterion::decision: return "D" + std::to_string(t.id) + (t.outcome ? ":T" : ":F");
    case criterion::condition: return "C" + std::to_string(t.id) + (t.outcome ? ":T" : ":F");
    }
    return "?";
}

std::optional<target> parse_label(std::string_view text) noexcept
{
    if (text.size() < 2)
        return std::nullopt;
    target t;
    switch (text.front()) {
    case 'S': t.kind = criterion::statement; break;
    case 'D': t.kind = criterion::decision; break;
    case 'C': t.kind = criterion::condition; break;
    default: return std::nullopt;
    }
    const char* first = text.data() + 1;
    const char* last = text.data() + text.size();
    auto [ptr, ec] = std::from_chars(first, last, t.id);
    if (ec != std::errc{} || ptr == first)
        return std::nullopt;
    std::string_view rest(ptr, static_cast<std::size_t>(last - ptr));
    if (t.kind == criterion::statement)
        return rest.empty() ? std::optional{t} : std::nullopt;
    if (rest == ":T")
        t.outcome = true;
    else if (rest == ":F")
        t.outcome = false;
    else
        return std::nullopt;
    return t;
}

int source_line(const minilang::program& prog, const target& t)
{
    switch (t.kind) {
    case criterion::statement: return prog.statement(minilang::statement_id{t.id}).loc.line;
    case criterion::decision: return prog.decision(minilang::decision_id{t.id}).loc.line;
    case criterion::condition: return prog.condition(minilang::condition_id{t.id}).loc.line;
    }
    return 0;
}

std::string describe(const minilang::program& prog, const target& t)
{
    switch (t.kind) {
    case criterion::statement: return to_string(prog.statement(minilang::statement_id{t.id}).kind);
    case criterion::decision: {
        const auto& d = prog.decision(minilang::decision_id{t.id});
        if (d.kind == minilang::decision_kind::switch_case)
            return d.text;
        return std::string(to_string(d.kind)) + " (" + d.text + ")";
    }
    case criterion::condition: {
        const auto& c = prog.condition(minilang::condition_id{t.id});
        return c.text + " in D" + std::to_string(c.decision.value);
    }
    }
    return {};
}

std::size_t target_count(const minilang::program& prog, criterion c) noexcept
{
    switch (c) {
    case criterion::statement: return prog.statements().size();
    case criterion::decision: return 2 * prog.decisions().size();
    case criterion::condition: return 2 * prog.conditions().size();
    }
    return 0;
}

std::vector<target> enumerate_targets(const minilang::program& prog, criterion c)
{
    std::vector<target> out;
    out.reserve(target_count(prog, c));
    switch (c) {
    case criterion::statement:
        for (const auto& s : prog.statements())
            out.push_back(statement_target(s.id));
        break;
    case criterion::decision:
        for (const auto& d : prog.decisions()) {
            out.push_back(decision_target(d.id, true));
            out.push_back(decision_target(d.id, false));
        }
        break;
    case criterion::condition:
        for (const auto& k : prog.conditions()) {
            out.push_back(condition_target(k.id, true));
            out.push_back(condition_target(k.id, false));
        }
        break;
    }
    return out;
}

bool covers(const minilang::execution_trace& trace, const target& t)
{
    switch (t.kind) {
    case criterion::statement: return trace.was_executed(minilang::statement_id{t.id});
    case criterion::decision:
        for (const auto& e : trace.decisions)
            if (e.decision.value == t.id && e.outcome == t.outcome)
                return true;
        return false;
    case criterion::condition:
        for (const auto& e : trace.conditions)
            if (e.condition.value == t.id && e.outcome == t.outcome)
                return true;
        return false;
    }
    return false;
}

void mark_covered(const minilang::execution_trace& trace, criterion c, std::vector<bool>& hit)
{
    auto set = [&hit](std::size_t i) {
        if (i >= hit.size())
            throw std::invalid_argument("trace refers to a target outside the program");
        hit[i] = true;
    };
    switch (c) {
    case criterion::statement:
        for (std::size_t i = 0; i < trace.executed.size(); ++i)
            if (trace.executed[i])
                set(i);
        break;
    case criterion::decision:
        for (const auto& e : trace.decisions)
            set(decision_target(e.decision, e.outcome).index());
        break;
    case criterion::condition:
        for (const auto& e : trace.conditions)
            set(condition_target(e.condition, e.outcome).index());
        break;
    }
}

}  // namespace evotest::coverage
