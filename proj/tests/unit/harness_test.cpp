#include <gtest/gtest.h>

#include <algorithm>
#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <set>
#include <string>
#include <vector>

#include "evotest/fitness/cost.hpp"
#include "evotest/harness/experiment.hpp"

using namespace evotest;
using namespace evotest::harness;
using coverage::criterion;

namespace {

std::filesystem::path bench_dir()
{
    return EVOTEST_BENCHMARK_DIR;
}

minilang::program load(const std::string& name)
{
    return minilang::parse(minilang::load_source(bench_dir() / (name + ".minic")));
}

search::algorithm_config algo(search::algorithm kind)
{
    search::algorithm_config c;
    c.kind = kind;
    return c;
}

// Independent feasibility: replay every lattice point through measure().
std::set<coverage::target> coverable(const minilang::program& prog, criterion c)
{
    std::vector<minilang::test_case> all;
    for_each_point(prog.gene_ranges(), [&](const std::vector<std::int64_t>& x) {
        all.push_back({x});
        return true;
    });
    const auto report = coverage::measure(prog, all, c);
    const auto covered = report.covered();
    return {covered.begin(), covered.end()};
}

std::set<coverage::target> as_set(const std::vector<coverage::target>& v)
{
    return {v.begin(), v.end()};
}

experiment_spec small_spec(const std::filesystem::path& program)
{
    experiment_spec s;
    s.program = program;
    s.algorithms = {{"", algo(search::algorithm::random)}, {"", algo(search::algorithm::genetic)}};
    s.budget = 300;
    s.repetitions = 3;
    s.seed = 11;
    return s;
}

}  // namespace

TEST(Corpus, LoadsAllBenchmarksSortedWithMetadata)
{
    const auto corpus = load_corpus(bench_dir());
    std::vector<std::string> names;
    for (const auto& b : corpus)
        names.push_back(b.name());
    EXPECT_EQ(names, (std::vector<std::string>{"binary_search", "bubble_sort", "gcd", "linear_search", "quadratic",
                                               "sample", "triangle"}));
    for (const auto& b : corpus) {
        ASSERT_TRUE(b.expected_decisions.has_value()) << b.name();
        EXPECT_EQ(*b.expected_decisions, minilang::parse(b.source).decisions().size());
    }
    const auto& sample = corpus[5];
    ASSERT_EQ(sample.hard_targets.size(), 1U);
    EXPECT_EQ(coverage::label(sample.hard_targets[0]), "D1:T");
}

TEST(Corpus, TableRanges)
{
    EXPECT_EQ(describe_ranges(load("triangle").inputs()), "a:[1,20] b:[1,20] c:[1,20]");
    EXPECT_EQ(describe_ranges(load("quadratic").inputs()), "a:[-10,10] b:[-10,10] c:[-10,10]");
    EXPECT_EQ(describe_ranges(load("gcd").inputs()), "a:[1,100] b:[1,100]");
    const auto linear = describe_ranges(load("linear_search").inputs());
    EXPECT_NE(linear.find("[6]:[1,50]"), std::string::npos) << linear;
    EXPECT_NE(describe_ranges(load("bubble_sort").inputs()).find("[6]:[1,40]"), std::string::npos);
    EXPECT_NE(describe_ranges(load("binary_search").inputs()).find("[6]:[1,35]"), std::string::npos);
}

TEST(Corpus, RejectsBadMetadata)
{
    const auto dir = std::filesystem::temp_directory_path() / "evotest_corpus_test";
    std::filesystem::create_directories(dir);
    {
        std::ofstream(dir / "bad_hard.minic") << "// input x in [0, 3]\n// hard D7:T\nint test() { if (x > 1) return 1; return 0; }\n";
        std::ofstream(dir / "bad_count.minic") << "// input x in [0, 3]\n// expect decisions 2\nint test() { if (x > 1) return 1; return 0; }\n";
    }
    EXPECT_THROW((void)load_benchmark(dir / "bad_hard.minic"), minilang::parse_error);
    EXPECT_THROW((void)load_benchmark(dir / "bad_count.minic"), std::runtime_error);
    EXPECT_THROW((void)load_corpus(dir / "missing"), std::runtime_error);
    std::filesystem::remove_all(dir);
}

TEST(Oracle, SampleSubBoxHasAllFourOutcomes)
{
    const auto prog = load("sample");
    const auto r = brute_force_oracle(prog, criterion::decision, {{1, 30}, {0, 1}});
    EXPECT_EQ(r.feasible.size(), 4U);
    EXPECT_TRUE(r.infeasible.empty());
    EXPECT_LE(r.points, 60U);
}

TEST(Oracle, ContradictionIsInfeasible)
{
    const auto prog = minilang::parse_text("contra", "// input x in [-20, 20]\nint test() { if (x > 10 && x < 5) return 1; return 0; }\n");
    const auto r = brute_force_oracle(prog, criterion::decision);
    ASSERT_EQ(r.infeasible.size(), 1U);
    EXPECT_EQ(coverage::label(r.infeasible[0]), "D0:T");
    EXPECT_EQ(r.points, 41U);
    const auto cond = brute_force_oracle(prog, criterion::condition);
    // The second leaf is only evaluated when x > 10, where x < 5 never holds.
    ASSERT_EQ(cond.infeasible.size(), 1U);
    EXPECT_EQ(coverage::label(cond.infeasible[0]), "C1:T");
}

TEST(Oracle, MatchesExhaustiveReplay)
{
    for (const char* name : {"sample", "triangle", "quadratic", "gcd"}) {
        const auto prog = load(name);
        for (auto c : {criterion::statement, criterion::decision, criterion::condition}) {
            const auto r = brute_force_oracle(prog, c);
            EXPECT_EQ(as_set(r.feasible), coverable(prog, c)) << name << " " << coverage::to_string(c);
            EXPECT_EQ(r.feasible.size() + r.infeasible.size(), coverage::target_count(prog, c));
        }
    }
}

TEST(Oracle, CapAndRanges)
{
    EXPECT_EQ(domain_size(load("triangle").gene_ranges()), 8000U);
    EXPECT_THROW((void)brute_force_oracle(load("linear_search"), criterion::decision), domain_too_large);
    EXPECT_THROW((void)brute_force_oracle(load("triangle"), criterion::decision, 7999), domain_too_large);
    EXPECT_THROW((void)brute_force_oracle(load("sample"), criterion::decision, {{-200, 0}, {0, 1}}),
                 std::invalid_argument);
}

TEST(Oracle, PointOrderIsLexicographic)
{
    std::vector<std::vector<std::int64_t>> seen;
    for_each_point({{0, 1}, {5, 7}}, [&](const std::vector<std::int64_t>& x) {
        seen.push_back(x);
        return seen.size() < 4;
    });
    EXPECT_EQ(seen, (std::vector<std::vector<std::int64_t>>{{0, 5}, {0, 6}, {0, 7}, {1, 5}}));
}

TEST(Generate, SampleRandomSearchCoversAllWithFewTests)
{
    const auto prog = load("sample");
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto g = generate_suite(prog, criterion::decision, algo(search::algorithm::random), 1000, seed);
        EXPECT_TRUE(g.report.complete()) << seed;
        EXPECT_LE(g.suite.size(), 4U);
        EXPECT_EQ(g.stats.first_covered.size(), 4U);
    }
}

TEST(Generate, AlwaysTrueDecisionLeavesFalseOutcome)
{
    const auto prog = minilang::parse_text("always", "// input x in [0, 10]\nint test() { int y = 0; if (x >= 0) y = 1; return y; }\n");
    const auto g = generate_suite(prog, criterion::decision, algo(search::algorithm::genetic), 200, 3);
    EXPECT_EQ(g.report.covered_count(), 1U);
    EXPECT_EQ(g.report.total(), 2U);
    const auto o = brute_force_oracle(prog, criterion::decision);
    ASSERT_EQ(o.infeasible.size(), 1U);
    EXPECT_EQ(coverage::label(o.infeasible[0]), "D0:F");
    EXPECT_EQ(g.stats.evaluations, g.stats.runs.back().evaluations + g.stats.runs.front().evaluations);
    EXPECT_EQ(g.stats.runs.back().evaluations, 200U);

    generate_options skip;
    skip.skip = o.infeasible;
    const auto s = generate_suite(prog, criterion::decision, algo(search::algorithm::genetic), 200, 3, skip);
    EXPECT_EQ(s.stats.skipped, 1U);
    EXPECT_LT(s.stats.evaluations, 200U);
}

TEST(Generate, TriangleGeneticReachesFeasibleCoverage)
{
    const auto prog = load("triangle");
    const auto feasible = brute_force_oracle(prog, criterion::decision).feasible;
    for (std::uint64_t seed = 1; seed <= 3; ++seed) {
        const auto g = generate_suite(prog, criterion::decision, algo(search::algorithm::genetic), 50000, seed);
        EXPECT_EQ(coverage::feasible_percent(g.report, feasible), 100.0) << seed;
        const auto to_full = evaluations_to_cover(g.stats, feasible);
        ASSERT_TRUE(to_full.has_value());
        EXPECT_LE(*to_full, g.stats.evaluations);
    }
}

TEST(Generate, NoTargetsIsAnError)
{
    const auto prog = minilang::parse_text("flat", "// input x in [0, 3]\nint test() { return x; }\n");
    EXPECT_THROW((void)generate_suite(prog, criterion::decision, algo(search::algorithm::random), 10, 1),
                 coverage::degenerate_coverage_error);
}

TEST(Generate, SuiteLawsAcrossBenchmarksAndAlgorithms)
{
    for (const auto& b : load_corpus(bench_dir())) {
        const auto prog = minilang::parse(b.source);
        std::optional<std::set<coverage::target>> feasible;
        if (domain_size(prog.gene_ranges()) <= default_oracle_cap)
            feasible = as_set(brute_force_oracle(prog, criterion::decision).feasible);
        for (auto kind : {search::algorithm::random, search::algorithm::hill_climb, search::algorithm::annealing,
                          search::algorithm::tabu, search::algorithm::genetic}) {
            const auto g = generate_suite(prog, criterion::decision, algo(kind), 400, 5);
            const auto covered = g.report.covered();
            // Archive soundness: the report is re-measured from the suite.
            EXPECT_EQ(coverage::measure(prog, g.suite, criterion::decision).covered(), covered);
            // Weak minimality.
            for (std::size_t i = 0; i < g.suite.size(); ++i) {
                auto fewer = g.suite;
                fewer.erase(fewer.begin() + static_cast<std::ptrdiff_t>(i));
                EXPECT_LT(coverage::measure(prog, fewer, criterion::decision).covered_count(), covered.size())
                    << b.name() << " " << search::to_string(kind) << " test " << i;
            }
            // Oracle dominance.
            if (feasible)
                for (const auto& t : covered)
                    EXPECT_TRUE(feasible->contains(t)) << b.name() << " " << coverage::label(t);
            std::uint64_t per_target = 0;
            for (const auto& r : g.stats.runs) {
                EXPECT_LE(r.evaluations, 400U);
                per_target += r.evaluations;
            }
            EXPECT_EQ(per_target, g.stats.evaluations);
            EXPECT_EQ(g.stats.runs.size() + g.stats.collateral, coverage::target_count(prog, criterion::decision));
        }
    }
}

TEST(Generate, UnminimizedSuiteKeepsEveryFirstCoverer)
{
    const auto prog = load("triangle");
    generate_options keep;
    keep.minimize = false;
    const auto raw = generate_suite(prog, criterion::decision, algo(search::algorithm::random), 2000, 9, keep);
    const auto reduced = generate_suite(prog, criterion::decision, algo(search::algorithm::random), 2000, 9);
    EXPECT_EQ(raw.report.covered(), reduced.report.covered());
    EXPECT_LE(reduced.suite.size(), raw.suite.size());
    EXPECT_EQ(reduce_suite(prog, raw.suite, criterion::decision), reduced.suite);
}

TEST(Generate, ReduceSuiteDropsRedundantTests)
{
    const auto prog = load("sample");
    std::vector<minilang::test_case> suite = {{{20, 1}}, {{20, 1}}, {{0, 0}}, {{20, 0}}};
    const auto reduced = reduce_suite(prog, suite, criterion::decision);
    // The first copy goes because the second still covers its outcomes; (20, 0) adds nothing to the rest.
    EXPECT_EQ(reduced, (std::vector<minilang::test_case>{{{20, 1}}, {{0, 0}}}));
}

TEST(Generate, PathFitnessFollowsRequestedPath)
{
    const auto prog = load("sample");
    generate_options o;
    o.fitness = fitness_mode::path;
    o.path = fitness::parse_path(prog, "D0:T,D1:T");
    const auto g = generate_suite(prog, criterion::decision, algo(search::algorithm::genetic), 5000, 2, o);
    ASSERT_EQ(g.stats.runs.size(), 1U);
    EXPECT_TRUE(g.stats.runs[0].success);
    EXPECT_TRUE(g.report.is_covered(coverage::decision_target(minilang::decision_id{1}, true)));
}

TEST(Generate, SameSeedSameSuite)
{
    const auto prog = load("quadratic");
    for (auto kind : {search::algorithm::annealing, search::algorithm::genetic}) {
        const auto a = generate_suite(prog, criterion::condition, algo(kind), 500, 4);
        const auto b = generate_suite(prog, criterion::condition, algo(kind), 500, 4);
        EXPECT_EQ(a.suite, b.suite);
        EXPECT_EQ(a.stats.evaluations, b.stats.evaluations);
        EXPECT_EQ(a.stats.first_covered, b.stats.first_covered);
    }
}

TEST(Compare, OneAlgorithmOneRepetition)
{
    experiment_spec s;
    s.program = bench_dir() / "sample.minic";
    s.algorithms = {{"", algo(search::algorithm::random)}};
    s.seed = 4;
    const auto r = compare(s);
    ASSERT_EQ(r.rows.size(), 1U);
    ASSERT_EQ(r.aggregates.size(), 1U);
    const auto& row = r.rows[0];
    const auto& agg = r.aggregates[0];
    EXPECT_EQ(row.seed, 4U);
    EXPECT_EQ(row.program, "sample");
    EXPECT_EQ(agg.coverage_percent, (summary{row.coverage_percent, row.coverage_percent, row.coverage_percent,
                                             row.coverage_percent}));
    EXPECT_EQ(agg.evaluations.mean, static_cast<double>(row.evaluations));
    EXPECT_EQ(agg.runs, 1U);
    ASSERT_TRUE(row.feasible_percent.has_value());
}

TEST(Compare, DuplicateAlgorithmsAreLabeledAndIdentical)
{
    experiment_spec s = small_spec(bench_dir() / "triangle.minic");
    s.algorithms = {{"", algo(search::algorithm::genetic)}, {"", algo(search::algorithm::genetic)}};
    const auto r = compare(s);
    ASSERT_EQ(r.rows.size(), 6U);
    ASSERT_EQ(r.aggregates.size(), 2U);
    EXPECT_EQ(r.aggregates[0].label, "ga");
    EXPECT_EQ(r.aggregates[1].label, "ga#2");
    for (std::size_t i = 0; i < 3; ++i) {
        auto twin = r.rows[i + 3];
        auto row = r.rows[i];
        twin.label = row.label;
        twin.wall_seconds = row.wall_seconds = 0.0;
        EXPECT_EQ(twin, row);
    }
}

TEST(Compare, PairedSeedsAndOrdering)
{
    const auto r = compare(small_spec(bench_dir() / "gcd.minic"));
    ASSERT_EQ(r.rows.size(), 6U);
    for (std::size_t i = 0; i < 6; ++i) {
        EXPECT_EQ(r.rows[i].seed, 11 + i % 3);
        EXPECT_EQ(r.rows[i].algorithm, i < 3 ? "random" : "ga");
        EXPECT_GE(r.rows[i].evaluations_to_full, 0U);
        EXPECT_LE(r.rows[i].evaluations_to_full, r.rows[i].evaluations);
        if (!r.rows[i].full)
            EXPECT_EQ(r.rows[i].evaluations_to_full, r.rows[i].evaluations);
    }
    EXPECT_EQ(aggregate(r.rows), r.aggregates);
}

TEST(Compare, LargeDomainSkipsOracle)
{
    auto s = small_spec(bench_dir() / "bubble_sort.minic");
    s.repetitions = 1;
    const auto r = compare(s);
    for (const auto& row : r.rows)
        EXPECT_FALSE(row.feasible_percent.has_value());
    EXPECT_FALSE(r.aggregates[0].feasible_percent.has_value());
}

TEST(Compare, JobsDoNotChangeOutput)
{
    const auto spec = small_spec(bench_dir() / "triangle.minic");
    const auto serial = compare(spec, 1);
    const auto parallel = compare(spec, 4);
    for (auto f : {report_format::csv, report_format::json, report_format::markdown})
        EXPECT_EQ(emit_report(serial, f), emit_report(parallel, f));
}

TEST(Compare, RunBenchmarksCoversCorpus)
{
    auto s = small_spec({});
    s.algorithms.resize(1);
    s.repetitions = 2;
    s.budget = 50;
    const auto corpus = load_corpus(bench_dir());
    const auto r = run_benchmarks(corpus, s, 2);
    EXPECT_EQ(r.rows.size(), corpus.size() * 2);
    EXPECT_EQ(r.aggregates.size(), corpus.size());
    EXPECT_EQ(r.config.at("programs").size(), corpus.size());
}

TEST(Summary, MeanMedianMinMax)
{
    EXPECT_EQ(summarize({3, 1, 2, 10}), (summary{4, 2.5, 1, 10}));
    EXPECT_EQ(summarize({5}), (summary{5, 5, 5, 5}));
    EXPECT_EQ(summarize({}), summary{});
}

TEST(Spec, JsonRoundTrip)
{
    const auto j = nlohmann::json::parse(R"({
        "program": "triangle.minic", "criterion": "condition", "budget": 77, "repetitions": 2, "seed": 5,
        "algorithms": ["random", {"algorithm": "ga", "pop": 30, "label": "big"}, {"algorithm": "tabu", "tenure": 4}],
        "skip_infeasible": true, "fitness": "branch"})");
    const auto s = spec_from_json(j, bench_dir());
    EXPECT_EQ(s.program, bench_dir() / "triangle.minic");
    EXPECT_EQ(s.criterion, criterion::condition);
    ASSERT_EQ(s.algorithms.size(), 3U);
    EXPECT_EQ(s.algorithms[1].label, "big");
    EXPECT_EQ(s.algorithms[1].config.ga.population, 30U);
    EXPECT_EQ(s.algorithms[2].config.tabu.tenure, 4U);
    const auto again = spec_from_json(nlohmann::json::parse(to_json(s).dump()));
    EXPECT_EQ(to_json(again), to_json(s));
    EXPECT_EQ(unique_labels(again.algorithms), (std::vector<std::string>{"random", "big", "tabu"}));
}

TEST(Spec, RejectsBadInput)
{
    EXPECT_THROW((void)spec_from_json(nlohmann::json::parse(R"({"algorithms": ["ga"], "bogus": 1})")),
                 std::invalid_argument);
    EXPECT_THROW((void)spec_from_json(nlohmann::json::parse(R"({"algorithms": []})")), std::invalid_argument);
    EXPECT_THROW((void)spec_from_json(nlohmann::json::parse(R"({"algorithms": ["ga"], "repetitions": 0})")),
                 std::invalid_argument);
    EXPECT_THROW((void)spec_from_json(nlohmann::json::parse(R"({"algorithms": ["nope"]})")), std::invalid_argument);
    EXPECT_THROW((void)spec_from_json(nlohmann::json::parse(R"({"algorithms": ["ga"], "path": "S1"})")),
                 std::invalid_argument);
    EXPECT_THROW((void)spec_from_json(nlohmann::json::parse(R"({"algorithms": ["ga"], "fitness": "path"})")),
                 std::invalid_argument);
}

TEST(Emit, EmptyReportIsHeaderOnlyCsv)
{
    const auto csv = emit_report(comparison_report{}, "csv");
    EXPECT_EQ(csv, "program,ranges,label,algorithm,seed,coverage_percent,feasible_percent,tests,evaluations,"
                   "evaluations_to_full,full\n");
    EXPECT_TRUE(rows_from_csv(csv).empty());
}

TEST(Emit, OneRowIsTwoLines)
{
    comparison_report r;
    r.rows.push_back({"triangle", "a:[1,20] b:[1,20]", "ga", "ga", 3, 87.5, 100.0, 4, 1234, 1000, true, 0.25});
    r.aggregates = aggregate(r.rows);
    const auto csv = emit_report(r, report_format::csv);
    EXPECT_EQ(std::count(csv.begin(), csv.end(), '\n'), 2);
    EXPECT_NE(csv.find("\"a:[1,20] b:[1,20]\""), std::string::npos);
    EXPECT_EQ(csv.find("0.25"), std::string::npos);
    EXPECT_NE(emit_report(r, report_format::csv, {true}).find(",0.25\n"), std::string::npos);
    EXPECT_EQ(rows_from_csv(emit_report(r, report_format::csv, {true})), r.rows);
}

TEST(Emit, JsonCsvRoundTripIsExact)
{
    comparison_report r;
    r.config = {{"seed", 1}};
    r.rows.push_back({"p", "x:[0,1]", "lab,el", "random", 1, 100.0 / 3.0, std::nullopt, 2, 10, 10, false, 0.0});
    r.rows.push_back({"p", "x:[0,1]", "q\"uote", "ga", 2, 0.1 + 0.2, 66.66666666666667, 3, 7, 5, true, 0.0});
    r.rows.push_back({"q", "", "ga", "ga", 18446744073709551615ULL, 1e-300, 5e-324, 0, 0, 0, true, 0.0});
    r.aggregates = aggregate(r.rows);
    const auto json = emit_report(r, "json");
    const auto back = report_from_json(nlohmann::json::parse(json));
    EXPECT_EQ(back.rows, r.rows);
    EXPECT_EQ(back.aggregates, r.aggregates);
    const auto csv = emit_report(back, "csv");
    EXPECT_EQ(rows_from_csv(csv), r.rows);
    EXPECT_EQ(emit_report(back, "json"), json);
}

TEST(Emit, UnknownFormatAndBadCsv)
{
    EXPECT_THROW((void)emit_report(comparison_report{}, "xml"), std::invalid_argument);
    EXPECT_THROW((void)rows_from_csv("a,b\n"), std::invalid_argument);
    EXPECT_THROW((void)rows_from_csv(""), std::invalid_argument);
    const auto header = emit_report(comparison_report{}, "csv");
    EXPECT_THROW((void)rows_from_csv(header + "p,r,l,a,1,x,,1,1,1,true\n"), std::invalid_argument);
    EXPECT_THROW((void)rows_from_csv(header + "p,r,l,a,1,1,,1,1,1,yes\n"), std::invalid_argument);
}

TEST(Emit, MarkdownTable)
{
    const auto r = compare(small_spec(bench_dir() / "sample.minic"));
    const auto md = emit_report(r, "markdown");
    EXPECT_EQ(std::count(md.begin(), md.end(), '\n'), 4);
    EXPECT_NE(md.find("| sample | random | 3 |"), std::string::npos) << md;
    EXPECT_EQ(md.find("wall"), std::string::npos);
}

TEST(Format, ShortestRoundTrip)
{
    for (double v : {0.1, 1.0 / 3.0, 100.0, 5e-324, 1.7976931348623157e308, -0.0, 87.5})
    {
        const auto text = format_double(v);
        double back = 1.0;
        std::from_chars(text.data(), text.data() + text.size(), back);
        EXPECT_EQ(back, v) << text;
        EXPECT_EQ(std::signbit(back), std::signbit(v));
    }
    EXPECT_EQ(format_double(87.5), "87.5");
    EXPECT_EQ(format_double(100.0), "100");
}
