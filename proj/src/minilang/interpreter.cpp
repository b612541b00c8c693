#include "evotest/minilang/interpreter.hpp"

#include <limits>
#include <stdexcept>

namespace evotest::minilang {

const char* to_string(termination t) noexcept
{
    switch (t) {
    case termination::normal: return "normal";
    case termination::runtime_error: return "runtime-error";
    case termination::loop_cap_exceeded: return "loop-cap-exceeded";
    }
    return "?";
}

std::vector<branch> execution_trace::path_signature() const
{
    std::vector<branch> path;
    path.reserve(decisions.size());
    for (const auto& d : decisions)
        path.push_back({d.decision, d.outcome});
    return path;
}

void check_input(const program& prog, std::span<const std::int64_t> input)
{
    const auto& genes = prog.genes();
    if (input.size() != genes.size())
        throw std::invalid_argument("program '" + prog.name() + "' expects " + std::to_string(genes.size()) +
                                    " input value(s), got " + std::to_string(input.size()));
    for (std::size_t i = 0; i < genes.size(); ++i) {
        if (!genes[i].range.contains(input[i]))
            throw std::invalid_argument("input " + genes[i].name + " = " + std::to_string(input[i]) +
                                        " is outside [" + std::to_string(genes[i].range.lo) + ", " +
                                        std::to_string(genes[i].range.hi) + "]");
    }
}

namespace {

struct abort_run {
    termination status;
    std::string message;
};

enum class flow : std::uint8_t { next, leave_loop, next_iteration, leave_function };

[[noreturn]] void runtime_fault(const std::string& message, const source_location& loc)
{
    throw abort_run{termination::runtime_error,
                    message + " at " + std::to_string(loc.line) + ":" + std::to_string(loc.column)};
}

std::int64_t arithmetic(arith_op op, std::int64_t a, std::int64_t b, const source_location& loc)
{
    std::int64_t r = 0;
    switch (op) {
    case arith_op::add:
        if (__builtin_add_overflow(a, b, &r))
            runtime_fault("integer overflow", loc);
        return r;
    case arith_op::sub:
        if (__builtin_sub_overflow(a, b, &r))
            runtime_fault("integer overflow", loc);
        return r;
    case arith_op::mul:
        if (__builtin_mul_overflow(a, b, &r))
            runtime_fault("integer overflow", loc);
        return r;
    case arith_op::div:
        if (b == 0)
            runtime_fault("division by zero", loc);
        if (a == std::numeric_limits<std::int64_t>::min() && b == -1)
            runtime_fault("integer overflow", loc);
        return a / b;
    case arith_op::mod:
        if (b == 0)
            runtime_fault("modulo by zero", loc);
        if (a == std::numeric_limits<std::int64_t>::min() && b == -1)
            runtime_fault("integer overflow", loc);
        return a % b;
    }
    return 0;
}

class machine {
public:
    machine(const program& prog, const execution_options& options, execution_trace& trace)
        : prog_{prog}, options_{options}, trace_{trace}
    {
    }

    void run(std::span<const std::int64_t> input)
    {
        globals_.assign(prog_.global_size(), 0);
        std::copy(input.begin(), input.end(), globals_.begin());
        for (const auto& g : prog_.global_inits())
            initialize(g.slot, g.init.get(), g.list);
        trace_.return_value = invoke(prog_.entry(), {});
    }

private:
    std::int64_t& slot(const storage_ref& ref, std::int64_t index, const source_location& loc)
    {
        if (ref.length != 0 && (index < 0 || index >= static_cast<std::int64_t>(ref.length)))
            runtime_fault("index " + std::to_string(index) + " out of bounds for array of length " +
                              std::to_string(ref.length),
                          loc);
        const auto at = ref.offset + static_cast<std::size_t>(index);
        return ref.global ? globals_[at] : (*frame_)[at];
    }

    void initialize(const storage_ref& ref, const expr* init, const std::vector<std::unique_ptr<expr>>& list)
    {
        if (ref.length == 0) {
            slot(ref, 0, {}) = init ? eval(*init) : 0;
            return;
        }
        for (std::uint32_t i = 0; i < ref.length; ++i)
            slot(ref, i, {}) = i < list.size() ? eval(*list[i]) : 0;
    }

    std::int64_t invoke(const function_def& fn, std::span<const std::int64_t> args)
    {
        std::vector<std::int64_t> locals(fn.frame_size, 0);
        for (std::size_t i = 0; i < fn.params.size(); ++i)
            locals[fn.params[i].offset] = args[i];
        auto* saved = frame_;
        frame_ = &locals;
        returned_ = 0;
        exec(*fn.body);
        frame_ = saved;
        const auto result = returned_;
        returned_ = 0;
        return result;
    }

    // ---------------------------------------------------------- expressions

    std::int64_t eval(const expr& e)
    {
        switch (e.kind) {
        case expr_kind::literal: return e.literal;
        case expr_kind::variable: return slot(e.var, 0, e.loc);
        case expr_kind::element: return slot(e.var, eval(*e.lhs), e.loc);
        case expr_kind::negate: {
            const auto v = eval(*e.lhs);
            if (v == std::numeric_limits<std::int64_t>::min())
                runtime_fault("integer overflow", e.loc);
            return -v;
        }
        case expr_kind::logical_not: return eval(*e.lhs) == 0 ? 1 : 0;
        case expr_kind::arith: {
            const auto a = eval(*e.lhs);
            const auto b = eval(*e.rhs);
            return arithmetic(e.arith, a, b, e.loc);
        }
        case expr_kind::compare: {
            const auto a = eval(*e.lhs);
            const auto b = eval(*e.rhs);
            return apply(e.cmp, a, b) ? 1 : 0;
        }
        case expr_kind::logical_and: return (eval(*e.lhs) != 0 && eval(*e.rhs) != 0) ? 1 : 0;
        case expr_kind::logical_or: return (eval(*e.lhs) != 0 || eval(*e.rhs) != 0) ? 1 : 0;
        case expr_kind::call: {
            std::vector<std::int64_t> args;
            args.reserve(e.args.size());
            for (const auto& a : e.args)
                args.push_back(eval(*a));
            return invoke(prog_.functions()[e.callee], args);
        }
        }
        return 0;
    }

    // ------------------------------------------------------------ decisions

    bool decide(decision_id id, const expr& root)
    {
        const auto first_condition = static_cast<std::uint32_t>(trace_.conditions.size());
        const auto first_probe = static_cast<std::uint32_t>(trace_.probes.size());
        bool outcome = false;
        try {
            outcome = evaluate_logic(root);
        } catch (const abort_run&) {
            // A decision that faults mid-evaluation has no outcome.
            trace_.conditions.resize(first_condition);
            trace_.probes.resize(first_probe);
            throw;
        }
        trace_.decisions.push_back({id, outcome, first_condition,
                                    static_cast<std::uint32_t>(trace_.conditions.size()) - first_condition,
                                    first_probe, static_cast<std::uint32_t>(trace_.probes.size()) - first_probe});
        return outcome;
    }

    bool evaluate_logic(const expr& e)
    {
        switch (e.kind) {
        case expr_kind::logical_and:
            if (!evaluate_logic(*e.lhs)) {
                probe(*e.rhs);
                return false;
            }
            return evaluate_logic(*e.rhs);
        case expr_kind::logical_or:
            if (evaluate_logic(*e.lhs)) {
                probe(*e.rhs);
                return true;
            }
            return evaluate_logic(*e.rhs);
        case expr_kind::logical_not: return !evaluate_logic(*e.lhs);
        default: {
            const auto [op, lhs, rhs] = operands(e);
            const bool outcome = apply(op, lhs, rhs);
            trace_.conditions.push_back({*e.condition, op, lhs, rhs, outcome});
            return outcome;
        }
        }
    }

    struct leaf_operands {
        compare_op op;
        std::int64_t lhs;
        std::int64_t rhs;
    };

    leaf_operands operands(const expr& e)
    {
        if (e.kind == expr_kind::compare) {
            const auto a = eval(*e.lhs);
            const auto b = eval(*e.rhs);
            return {e.cmp, a, b};
        }
        return {compare_op::truthy, eval(e), 0};
    }

    // Conditions are side-effect free (no calls), so skipped operands can be
    // sampled for distance without changing the run.
    void probe(const expr& e)
    {
        switch (e.kind) {
        case expr_kind::logical_and:
        case expr_kind::logical_or:
            probe(*e.lhs);
            probe(*e.rhs);
            return;
        case expr_kind::logical_not: probe(*e.lhs); return;
        default:
            try {
                const auto [op, lhs, rhs] = operands(e);
                trace_.probes.push_back({*e.condition, op, lhs, rhs});
            } catch (const abort_run&) {
                // Unsampled; fitness charges the default penalty.
            }
        }
    }

    void count_iteration(std::uint64_t& iterations, const stmt& loop)
    {
        if (++iterations > options_.loop_cap)
            throw abort_run{termination::loop_cap_exceeded,
                            "loop at " + std::to_string(loop.loc.line) + ":" + std::to_string(loop.loc.column) +
                                " exceeded " + std::to_string(options_.loop_cap) + " iterations"};
    }

    // ----------------------------------------------------------- statements

    flow exec(const stmt& s)
    {
        if (s.id)
            trace_.executed[s.id->value] = true;

        switch (s.kind) {
        case stmt_kind::empty: return flow::next;
        case stmt_kind::block:
            for (const auto& child : s.children) {
                const auto f = exec(*child);
                if (f != flow::next)
                    return f;
            }
            return flow::next;
        case stmt_kind::declare:
            for (const auto& d : s.declarators)
                initialize(d.slot, d.init.get(), d.list);
            return flow::next;
        case stmt_kind::assign: {
            const std::int64_t index = s.index ? eval(*s.index) : 0;
            const auto value = eval(*s.value);
            auto& target = slot(s.target, index, s.loc);
            target = s.compound ? arithmetic(*s.compound, target, value, s.loc) : value;
            return flow::next;
        }
        case stmt_kind::expression: eval(*s.value); return flow::next;
        case stmt_kind::if_else:
            if (decide(*s.decision, *s.cond))
                return exec(*s.then_branch);
            return s.else_branch ? exec(*s.else_branch) : flow::next;
        case stmt_kind::while_loop: {
            std::uint64_t iterations = 0;
            while (decide(*s.decision, *s.cond)) {
                count_iteration(iterations, s);
                const auto f = exec(*s.body);
                if (f == flow::leave_loop)
                    break;
                if (f == flow::leave_function)
                    return f;
            }
            return flow::next;
        }
        case stmt_kind::do_while: {
            std::uint64_t iterations = 0;
            do {
                count_iteration(iterations, s);
                const auto f = exec(*s.body);
                if (f == flow::leave_loop)
                    break;
                if (f == flow::leave_function)
                    return f;
            } while (decide(*s.decision, *s.cond));
            return flow::next;
        }
        case stmt_kind::for_loop: {
            if (s.init)
                exec(*s.init);
            std::uint64_t iterations = 0;
            while (!s.decision || decide(*s.decision, *s.cond)) {
                count_iteration(iterations, s);
                const auto f = exec(*s.body);
                if (f == flow::leave_loop)
                    break;
                if (f == flow::leave_function)
                    return f;
                if (s.step)
                    exec(*s.step);
            }
            return flow::next;
        }
        case stmt_kind::switch_case: return exec_switch(s);
        case stmt_kind::return_value:
            returned_ = s.value ? eval(*s.value) : 0;
            return flow::leave_function;
        case stmt_kind::break_loop: return flow::leave_loop;
        case stmt_kind::continue_loop: return flow::next_iteration;
        }
        return flow::next;
    }

    flow exec_switch(const stmt& s)
    {
        const auto value = eval(*s.value);
        std::optional<std::size_t> start;
        std::optional<std::size_t> fallback;
        for (std::size_t i = 0; i < s.cases.size(); ++i) {
            const auto& section = s.cases[i];
            if (!section.value) {
                fallback = i;
                continue;
            }
            const bool hit = value == *section.value;
            const auto first_condition = static_cast<std::uint32_t>(trace_.conditions.size());
            trace_.conditions.push_back(
                {prog_.decision(*section.decision).first_condition, compare_op::eq, value, *section.value, hit});
            trace_.decisions.push_back({*section.decision, hit, first_condition, 1,
                                        static_cast<std::uint32_t>(trace_.probes.size()), 0});
            if (hit) {
                start = i;
                break;
            }
        }
        if (!start)
            start = fallback;
        if (!start)
            return flow::next;
        for (std::size_t i = *start; i < s.cases.size(); ++i) {
            for (const auto& child : s.cases[i].body) {
                const auto f = exec(*child);
                if (f == flow::leave_loop)
                    return flow::next;
                if (f != flow::next)
                    return f;
            }
        }
        return flow::next;
    }

    const program& prog_;
    const execution_options& options_;
    execution_trace& trace_;
    std::vector<std::int64_t> globals_;
    std::vector<std::int64_t>* frame_ = nullptr;
    std::int64_t returned_ = 0;
};

}  // namespace

execution_trace execute(const program& prog, std::span<const std::int64_t> input, const execution_options& options)
{
    check_input(prog, input);
    execution_trace trace;
    trace.program_fingerprint = prog.fingerprint();
    trace.executed.assign(prog.statements().size(), false);
    try {
        machine{prog, options, trace}.run(input);
    } catch (const abort_run& a) {
        trace.status = a.status;
        trace.error = a.message;
        trace.return_value.reset();
    }
    return trace;
}

}  // namespace evotest::minilang
