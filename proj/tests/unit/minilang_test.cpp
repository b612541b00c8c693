#include <gtest/gtest.h>

#include <algorithm>
#include <functional>
#include <random>
#include <string>

#include "evotest/minilang/ast.hpp"
#include "evotest/minilang/dependence.hpp"
#include "evotest/minilang/interpreter.hpp"

using namespace evotest::minilang;

namespace {

const std::string sample_text = R"(// input inp1 in [-100, 100]
// input inp2 in [-100, 100]
int inp1, inp2; // Inputs
int test()
{
    int IVar = 0, retVal = 0;
    if (inp1 > 15)
        IVar = 1;
    if (IVar && inp2)
        retVal = 1;
    return retVal;
}
)";

program sample() { return parse_text("sample", sample_text); }

std::vector<branch> outcomes(const execution_trace& t) { return t.path_signature(); }

branch br(std::uint32_t d, bool outcome) { return {decision_id{d}, outcome}; }

}  // namespace

// ---------------------------------------------------------------- parsing

TEST(Parse, SampleProgramShape)
{
    const auto p = sample();
    ASSERT_EQ(p.decisions().size(), 2u);
    ASSERT_EQ(p.conditions().size(), 3u);
    EXPECT_EQ(p.statements().size(), 6u);  // decl, if, assign, if, assign, return
    EXPECT_EQ(p.decisions()[0].text, "inp1 > 15");
    EXPECT_EQ(p.decisions()[1].text, "IVar && inp2");
    EXPECT_EQ(p.conditions()[0].text, "inp1 > 15");
    EXPECT_EQ(p.conditions()[0].op, compare_op::gt);
    EXPECT_EQ(p.conditions()[1].text, "IVar");
    EXPECT_EQ(p.conditions()[1].op, compare_op::truthy);
    EXPECT_EQ(p.conditions()[2].text, "inp2");
    EXPECT_EQ(p.conditions()[2].decision, decision_id{1});
    EXPECT_EQ(p.decisions()[0].loc.line, 7);
    EXPECT_EQ(p.decisions()[1].loc.line, 9);
    EXPECT_EQ(p.gene_count(), 2u);
}

TEST(Parse, EmptyBodyHasOneStatement)
{
    const auto p = parse_text("t", "int test(){ return 0; }");
    EXPECT_EQ(p.decisions().size(), 0u);
    EXPECT_EQ(p.statements().size(), 1u);
    EXPECT_EQ(p.statements()[0].kind, stmt_kind::return_value);
}

TEST(Parse, ConjunctionSharesOneDecision)
{
    const auto p = parse_text("t", "// input a in [0, 5]\n// input b in [0, 5]\n"
                                   "int test(){ if (a > 1 && b < 2) return 1; return 0; }");
    ASSERT_EQ(p.decisions().size(), 1u);
    ASSERT_EQ(p.conditions().size(), 2u);
    EXPECT_EQ(p.conditions()[0].decision, decision_id{0});
    EXPECT_EQ(p.conditions()[1].decision, decision_id{0});

    // Hand-built expected logic tree: leaf(c0), leaf(c1), and(0, 1).
    const auto& logic = p.decisions()[0].logic;
    ASSERT_EQ(logic.size(), 3u);
    EXPECT_EQ(logic[0].type, logic_node::kind::leaf);
    EXPECT_EQ(logic[0].leaf, condition_id{0});
    EXPECT_EQ(logic[1].type, logic_node::kind::leaf);
    EXPECT_EQ(logic[1].leaf, condition_id{1});
    EXPECT_EQ(logic[2].type, logic_node::kind::all_of);
    EXPECT_EQ(logic[2].lhs, 0u);
    EXPECT_EQ(logic[2].rhs, 1u);
    EXPECT_EQ(p.conditions()[0].op, compare_op::gt);
    EXPECT_EQ(p.conditions()[1].op, compare_op::lt);
}

TEST(Parse, NegationAndNesting)
{
    const auto p = parse_text("t", "// input x in [0, 9]\nint test(){ if (!(x == 1 || x > 5)) return 1; return 0; }");
    const auto& logic = p.decisions()[0].logic;
    ASSERT_EQ(logic.size(), 4u);
    EXPECT_EQ(logic.back().type, logic_node::kind::negation);
    EXPECT_EQ(logic[logic.back().lhs].type, logic_node::kind::any_of);
}

TEST(Parse, DeterministicIds)
{
    const auto a = sample();
    const auto b = sample();
    ASSERT_EQ(a.statements().size(), b.statements().size());
    for (std::size_t i = 0; i < a.statements().size(); ++i) {
        EXPECT_EQ(a.statements()[i].loc, b.statements()[i].loc);
        EXPECT_EQ(a.statements()[i].kind, b.statements()[i].kind);
        EXPECT_EQ(a.statements()[i].guard, b.statements()[i].guard);
    }
    for (std::size_t i = 0; i < a.conditions().size(); ++i)
        EXPECT_EQ(a.conditions()[i].text, b.conditions()[i].text);
    EXPECT_EQ(a.fingerprint(), b.fingerprint());
}

TEST(Parse, SyntaxErrorCarriesPosition)
{
    try {
        (void)parse_text("t", "int test()\n{\n    int x = 1\n    return x;\n}\n");
        FAIL() << "expected parse_error";
    } catch (const parse_error& e) {
        EXPECT_EQ(e.line(), 4);
        EXPECT_EQ(e.column(), 5);
    }
}

TEST(Parse, DuplicateInputRejected)
{
    EXPECT_THROW((void)make_source("t", "// input x in [0, 1]\n// input x in [2, 3]\nint test(){ return x; }"),
                 parse_error);
    source_program src{"t", "int test(){ return 0; }", {{"x", {0, 1}, 0}, {"x", {0, 1}, 0}}};
    EXPECT_THROW((void)parse(src), parse_error);
}

TEST(Parse, InvertedRangeRejected)
{
    EXPECT_THROW((void)make_source("t", "// input x in [5, 1]\nint test(){ return x; }"), parse_error);
}

TEST(Parse, SemanticErrors)
{
    EXPECT_THROW((void)parse_text("t", ""), parse_error);
    EXPECT_THROW((void)parse_text("t", "int test(){ return y; }"), parse_error);
    EXPECT_THROW((void)parse_text("t", "int test(){ break; }"), parse_error);
    EXPECT_THROW((void)parse_text("t", "int test(){ return test(); }"), parse_error);
    EXPECT_THROW((void)parse_text("t", "int f(int a){ return a; } int test(){ if (f(1)) return 1; return 0; }"),
                 parse_error);
    EXPECT_THROW((void)parse_text("t", "int test(){ int a[3]; return a; }"), parse_error);
    EXPECT_THROW((void)parse_text("t", "int f(){ return 0; } int g(){ return 1; }"), parse_error);
}

TEST(Parse, ArrayInputsExpandIntoGenes)
{
    const auto p = parse_text("t", "// input a[3] in [1, 9]\n// input k in [0, 2]\nint test(){ return a[k]; }");
    ASSERT_EQ(p.gene_count(), 4u);
    EXPECT_EQ(p.genes()[0].name, "a[0]");
    EXPECT_EQ(p.genes()[3].name, "k");
    EXPECT_EQ(execute(p, test_case{{4, 5, 6, 2}}).return_value, 6);
}

// -------------------------------------------------------------- execution

TEST(Execute, SampleTrueTrue)
{
    const auto p = sample();
    const auto t = execute(p, test_case{{20, 1}});
    EXPECT_EQ(t.status, termination::normal);
    EXPECT_EQ(outcomes(t), (std::vector<branch>{br(0, true), br(1, true)}));
    EXPECT_EQ(t.return_value, 1);
}

TEST(Execute, SampleFalseFalse)
{
    const auto p = sample();
    const auto t = execute(p, test_case{{10, 1}});
    EXPECT_EQ(outcomes(t), (std::vector<branch>{br(0, false), br(1, false)}));
    EXPECT_EQ(t.return_value, 0);
}

TEST(Execute, StraightLine)
{
    const auto p = parse_text("t", "// input x in [0, 3]\nint test(){ return 0; }");
    for (std::int64_t x = 0; x <= 3; ++x) {
        const auto t = execute(p, test_case{{x}});
        EXPECT_EQ(t.status, termination::normal);
        EXPECT_EQ(std::count(t.executed.begin(), t.executed.end(), true), 1);
        EXPECT_TRUE(t.return_value.has_value());
    }
}

TEST(Execute, ShortCircuitOmitsRightOperandEvent)
{
    const auto p = sample();
    const auto t = execute(p, test_case{{10, 7}});
    // IVar is 0, so `inp2` is never evaluated.
    for (const auto& c : t.conditions)
        EXPECT_NE(c.condition, condition_id{2});
    // ...but its operand is still probed for fitness.
    ASSERT_EQ(t.probes.size(), 1u);
    EXPECT_EQ(t.probes[0].condition, condition_id{2});
    EXPECT_EQ(t.probes[0].lhs, 7);
}

TEST(Execute, OutOfRangeInputRejected)
{
    const auto p = sample();
    EXPECT_THROW((void)execute(p, test_case{{101, 0}}), std::invalid_argument);
    EXPECT_THROW((void)execute(p, test_case{{1}}), std::invalid_argument);
}

TEST(Execute, LoopCap)
{
    const auto p = parse_text("t", "int test(){ while (1) {} return 0; }");
    const auto t = execute(p, std::span<const std::int64_t>{}, {.loop_cap = 50});
    EXPECT_EQ(t.status, termination::loop_cap_exceeded);
    EXPECT_FALSE(t.return_value.has_value());
    EXPECT_EQ(t.decisions.size(), 51u);
}

TEST(Execute, RuntimeFaultsAbortTrace)
{
    const auto div = parse_text("t", "// input x in [-2, 2]\nint test(){ return 10 / x; }");
    EXPECT_EQ(execute(div, test_case{{0}}).status, termination::runtime_error);
    EXPECT_EQ(execute(div, test_case{{2}}).return_value, 5);

    const auto overflow = parse_text("t", "// input x in [0, 1]\nint test(){ int big = 9223372036854775807; "
                                          "return big + x; }");
    EXPECT_EQ(execute(overflow, test_case{{0}}).status, termination::normal);
    EXPECT_EQ(execute(overflow, test_case{{1}}).status, termination::runtime_error);

    const auto index = parse_text("t", "// input i in [0, 5]\nint test(){ int a[3]; return a[i]; }");
    EXPECT_EQ(execute(index, test_case{{3}}).status, termination::runtime_error);
}

TEST(Execute, FaultInsideConditionDropsDecision)
{
    const auto p = parse_text("t", "// input x in [0, 2]\nint test(){ if (x > 0 && 6 / (x - 1) > 2) return 1; "
                                   "return 0; }");
    const auto t = execute(p, test_case{{1}});
    EXPECT_EQ(t.status, termination::runtime_error);
    EXPECT_TRUE(t.decisions.empty());
    EXPECT_TRUE(t.conditions.empty());
}

TEST(Execute, SwitchFallThroughAndDefault)
{
    const auto p = parse_text("t", R"(// input x in [0, 5]
int test()
{
    int r = 0;
    switch (x) {
    case 1:
        r = r + 1;
    case 2:
        r = r + 10;
        break;
    default:
        r = 100;
    case 4:
        r = r + 1000;
    }
    return r;
}
)");
    ASSERT_EQ(p.decisions().size(), 3u);
    EXPECT_EQ(execute(p, test_case{{1}}).return_value, 11);
    EXPECT_EQ(execute(p, test_case{{2}}).return_value, 10);
    EXPECT_EQ(execute(p, test_case{{4}}).return_value, 1000);
    EXPECT_EQ(execute(p, test_case{{0}}).return_value, 1100);

    const auto t = execute(p, test_case{{2}});
    EXPECT_EQ(outcomes(t), (std::vector<branch>{br(0, false), br(1, true)}));
    // `case 4` is only tested after `case 1` and `case 2` fail.
    const auto deps = control_dependence(p);
    EXPECT_EQ(deps.chain(decision_id{2}).size(), 2u);
}

TEST(Execute, LoopsAndFunctions)
{
    const auto p = parse_text("t", R"(// input n in [0, 10]
int square(int v) { return v * v; }
int test()
{
    int sum = 0;
    int i;
    for (i = 0; i < n; i++) {
        if (i % 2 == 0)
            continue;
        sum += square(i);
    }
    do {
        sum = sum - 1;
    } while (sum > 100);
    return sum;
}
)");
    // odd squares below 7: 1 + 9 + 25 = 35, then one decrement.
    EXPECT_EQ(execute(p, test_case{{7}}).return_value, 34);
    // 1+9+25+49+81 = 165 -> decremented to 100
    EXPECT_EQ(execute(p, test_case{{10}}).return_value, 100);
    EXPECT_EQ(execute(p, test_case{{0}}).return_value, -1);
}

TEST(Execute, TraceSoundness)
{
    const auto p = sample();
    std::mt19937_64 gen{42};
    std::uniform_int_distribution<std::int64_t> dist{-100, 100};
    for (int i = 0; i < 500; ++i) {
        const auto t = execute(p, test_case{{dist(gen), dist(gen)}});
        EXPECT_EQ(t.executed.size(), p.statements().size());
        for (const auto& d : t.decisions) {
            ASSERT_LT(d.decision.value, p.decisions().size());
            ASSERT_LE(d.first_condition + d.condition_count, t.conditions.size());
            for (std::uint32_t c = d.first_condition; c < d.first_condition + d.condition_count; ++c)
                EXPECT_EQ(p.condition(t.conditions[c].condition).decision, d.decision);
        }
        EXPECT_TRUE(t.return_value.has_value());
    }
}

// Decision outcome must follow from the recorded condition outcomes.
TEST(Execute, DecisionOutcomesDerivableFromConditions)
{
    const auto p = parse_text("t", R"(// input a in [-3, 3]
// input b in [-3, 3]
// input c in [-3, 3]
int test()
{
    if ((a > 0 && b < 1) || !(c == 2)) return 1;
    if (a && !b || c >= a) return 2;
    return 0;
}
)");
    for (std::int64_t a = -3; a <= 3; ++a)
        for (std::int64_t b = -3; b <= 3; ++b)
            for (std::int64_t c = -3; c <= 3; ++c) {
                const auto t = execute(p, test_case{{a, b, c}});
                for (const auto& d : t.decisions) {
                    const auto& info = p.decision(d.decision);
                    std::vector<int> value(info.condition_count, -1);
                    for (std::uint32_t i = 0; i < d.condition_count; ++i) {
                        const auto& ev = t.conditions[d.first_condition + i];
                        value[ev.condition.value - info.first_condition.value] = ev.outcome ? 1 : 0;
                    }
                    // Short-circuit evaluation of the logic tree over the recorded outcomes.
                    std::function<bool(std::uint32_t)> eval = [&](std::uint32_t n) -> bool {
                        const auto& node = info.logic[n];
                        switch (node.type) {
                        case logic_node::kind::leaf: {
                            const int v = value[node.leaf.value - info.first_condition.value];
                            EXPECT_NE(v, -1) << "needed condition not recorded";
                            return v == 1;
                        }
                        case logic_node::kind::all_of: return eval(node.lhs) && eval(node.rhs);
                        case logic_node::kind::any_of: return eval(node.lhs) || eval(node.rhs);
                        case logic_node::kind::negation: return !eval(node.lhs);
                        }
                        return false;
                    };
                    EXPECT_EQ(eval(static_cast<std::uint32_t>(info.logic.size() - 1)), d.outcome);
                }
            }
}

// ------------------------------------------------------ control dependence

TEST(ControlDependence, SampleDecisionsDependOnEntry)
{
    const auto deps = control_dependence(sample());
    ASSERT_EQ(deps.size(), 2u);
    EXPECT_TRUE(deps.chain(decision_id{0}).empty());
    EXPECT_TRUE(deps.chain(decision_id{1}).empty());
}

TEST(ControlDependence, NestedChain)
{
    const auto p = parse_text("t", R"(// input x in [0, 9]
int test()
{
    if (x > 1) {
        if (x > 2) {
            if (x > 3) {
                if (x > 4)
                    return 1;
            } else {
                return 2;
            }
        }
    }
    return 0;
}
)");
    const auto deps = control_dependence(p);
    const auto chain = deps.chain(decision_id{3});
    ASSERT_EQ(chain.size(), 3u);
    EXPECT_EQ(chain[0], br(2, true));
    EXPECT_EQ(chain[1], br(1, true));
    EXPECT_EQ(chain[2], br(0, true));
}

TEST(ControlDependence, DecisionFreeProgram)
{
    const auto deps = control_dependence(parse_text("t", "int test(){ int a = 1; return a; }"));
    EXPECT_TRUE(deps.empty());
}

TEST(ControlDependence, LoopBodiesAndElse)
{
    const auto p = parse_text("t", R"(// input x in [0, 9]
int test()
{
    while (x < 5) {
        if (x == 3) x = x + 2; else x = x + 1;
    }
    do { if (x > 7) x = 0; } while (x > 100);
    return x;
}
)");
    const auto deps = control_dependence(p);
    EXPECT_EQ(deps.chain(decision_id{1}).size(), 1u);
    EXPECT_EQ(deps.chain(decision_id{1})[0], br(0, true));
    // do-while body executes unconditionally once.
    EXPECT_TRUE(deps.chain(decision_id{2}).empty());
    // the else-assignment statement hangs off the false edge
    bool found_else = false;
    for (const auto& s : p.statements())
        if (s.guard == br(1, false))
            found_else = true;
    EXPECT_TRUE(found_else);
}
