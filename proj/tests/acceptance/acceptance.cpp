// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit if any fail.

#include <algorithm>
#include <chrono>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "evotest/cli/app.hpp"
#include "evotest/fitness/cost.hpp"
#include "evotest/fitness/distance.hpp"
#include "evotest/harness/experiment.hpp"
#include "evotest/minilang/dependence.hpp"

using namespace evotest;
namespace fs = std::filesystem;

namespace {

struct outcome {
    bool pass = true;
    std::string detail;
};

fs::path bench_path(const std::string& name)
{
    return fs::path(EVOTEST_BENCHMARK_DIR) / (name + ".minic");
}

minilang::program load(const std::string& name)
{
    return minilang::parse(minilang::load_source(bench_path(name)));
}

search::algorithm_config algo(search::algorithm kind)
{
    search::algorithm_config c;
    c.kind = kind;
    return c;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const auto n = v.size();
    return n % 2 ? v[n / 2] : (v[n / 2 - 1] + v[n / 2]) / 2.0;
}

std::string fmt(double v, int digits = 1)
{
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

// 1. The oracle's feasible set equals what replaying the whole lattice covers.
outcome oracle_equivalence()
{
    outcome o;
    for (const char* name : {"sample", "triangle"}) {
        const auto prog = load(name);
        const auto oracle = harness::brute_force_oracle(prog, coverage::criterion::decision);
        std::vector<minilang::test_case> lattice;
        harness::for_each_point(prog.gene_ranges(), [&](const std::vector<std::int64_t>& x) {
            lattice.push_back({x});
            return true;
        });
        const auto replay = coverage::measure(prog, lattice, coverage::criterion::decision).covered();
        const std::set<coverage::target> a(oracle.feasible.begin(), oracle.feasible.end());
        const std::set<coverage::target> b(replay.begin(), replay.end());
        const bool same = a == b;
        o.pass = o.pass && same;
        o.detail += std::string(o.detail.empty() ? "" : "; ") + name + " " + std::to_string(lattice.size()) +
                    " points, " + std::to_string(a.size()) + "/" +
                    std::to_string(coverage::target_count(prog, coverage::criterion::decision)) + " feasible" +
                    (same ? "" : " MISMATCH");
    }
    return o;
}

harness::comparison_report triangle_ga_vs_random(bool skip_infeasible)
{
    harness::experiment_spec spec;
    spec.program = bench_path("triangle");
    spec.algorithms = {{"", algo(search::algorithm::genetic)}, {"", algo(search::algorithm::random)}};
    spec.budget = 50000;
    spec.repetitions = 20;
    spec.seed = 1;
    spec.skip_infeasible = skip_infeasible;
    return harness::compare(spec);
}

// 2. GA needs fewer evaluations than random search to reach full feasible
// coverage of the triangle classifier, by a factor of at least 2.
outcome ga_vs_random()
{
    const auto report = triangle_ga_vs_random(true);
    const auto& ga = report.aggregates.at(0);
    const auto& rs = report.aggregates.at(1);
    outcome o;
    const double ratio = rs.evaluations_to_full.mean / std::max(ga.evaluations_to_full.mean, 1.0);
    o.pass = ga.full_runs == 20 && rs.full_runs == 20 && ratio >= 2.0;
    o.detail = "infeasible D0:T skipped; mean evaluations to full: ga " + fmt(ga.evaluations_to_full.mean) +
               ", random " + fmt(rs.evaluations_to_full.mean) + ", ratio " + fmt(ratio, 2) + " (need >= 2); full runs " +
               std::to_string(ga.full_runs) + "/" + std::to_string(rs.full_runs);
    const auto unskipped = triangle_ga_vs_random(false);
    o.detail += "; without skipping: ga " + fmt(unskipped.aggregates.at(0).evaluations_to_full.mean) + ", random " +
                fmt(unskipped.aggregates.at(1).evaluations_to_full.mean);
    return o;
}

// 3. Random search with budget 1000 reaches a 70% median decision coverage
// on each of the six reconstructed table benchmarks.
outcome random_band()
{
    outcome o;
    for (const char* name : {"linear_search", "quadratic", "bubble_sort", "triangle", "gcd", "binary_search"}) {
        harness::experiment_spec spec;
        spec.program = bench_path(name);
        spec.algorithms = {{"", algo(search::algorithm::random)}};
        spec.budget = 1000;
        spec.repetitions = 10;
        spec.seed = 1;
        const auto report = harness::compare(spec);
        const double med = report.aggregates.at(0).coverage_percent.median;
        o.pass = o.pass && med >= 70.0;
        o.detail += std::string(o.detail.empty() ? "" : ", ") + name + " " + fmt(med) + "%";
    }
    return o;
}

std::string slurp(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    return {std::istreambuf_iterator<char>(in), {}};
}

// 4. Repeated generate/compare/bench invocations write byte-identical files,
// whatever --jobs is.
outcome determinism()
{
    const auto dir = fs::temp_directory_path() / "evotest_acceptance";
    fs::remove_all(dir);
    fs::create_directories(dir);
    auto run = [](std::vector<std::string> args) {
        std::ostringstream out, err;
        return cli::run(args, out, err);
    };
    outcome o;
    std::size_t files = 0;
    auto check = [&](const std::string& what, const fs::path& a, const fs::path& b) {
        const auto x = slurp(a);
        ++files;
        if (x.empty() || x != slurp(b)) {
            o.pass = false;
            o.detail += " differs:" + what;
        }
    };

    for (const char* alg : {"random", "hill_climb", "annealing", "tabu", "ga"})
        for (const char* crit : {"statement", "decision", "condition"})
            for (const char* prog : {"sample", "triangle", "bubble_sort"}) {
                const std::string stem = std::string(alg) + "_" + crit + "_" + prog;
                for (int i = 0; i < 2; ++i) {
                    const auto n = std::to_string(i);
                    const int code = run({"generate", "-p", bench_path(prog).string(), "-a", alg, "--criterion", crit,
                                          "--budget", "300", "--seed", "7", "-o", (dir / (stem + n + ".json")).string(),
                                          "--report", (dir / (stem + n + ".txt")).string()});
                    if (code == 2) {
                        o.pass = false;
                        o.detail += " error:" + stem;
                    }
                }
                check(stem + ".json", dir / (stem + "0.json"), dir / (stem + "1.json"));
                check(stem + ".txt", dir / (stem + "0.txt"), dir / (stem + "1.txt"));
            }

    for (int round = 0; round < 3; ++round) {
        const std::string jobs = round == 2 ? "4" : "1";
        const auto n = std::to_string(round);
        run({"compare", "-p", bench_path("triangle").string(), "-a", "ga", "-a", "random", "-a", "tabu", "--reps", "5",
             "--budget", "2000", "-j", jobs, "-f", "csv", "-f", "json", "-f", "markdown", "-o",
             (dir / ("compare" + n)).string()});
        run({"bench", "--benchmarks", EVOTEST_BENCHMARK_DIR, "-a", "annealing", "-a", "ga", "--reps", "2", "--budget",
             "200", "-j", jobs, "-f", "csv", "-f", "json", "-o", (dir / ("bench" + n)).string()});
    }
    for (const std::string kind : {"compare", "bench"})
        for (const char* ext : {".csv", ".json", ".md"}) {
            if (kind == "bench" && std::string(ext) == ".md")
                continue;
            for (int r = 1; r < 3; ++r)
                check(kind + ext, dir / (kind + "0" + ext), dir / (kind + std::to_string(r) + ext));
        }
    fs::remove_all(dir);
    o.detail = std::to_string(files) + " file pairs compared (generate x2; compare and bench with jobs 1, 1, 4)" +
               o.detail;
    return o;
}

// 5. Branch distance and normalization laws.
outcome fitness_laws()
{
    using minilang::compare_op;
    const compare_op ops[] = {compare_op::eq, compare_op::ne, compare_op::lt, compare_op::le,
                              compare_op::gt, compare_op::ge, compare_op::truthy};
    std::size_t zero_violations = 0, monotone_violations = 0, range_violations = 0, checks = 0;
    auto check_norm = [&](double d) {
        const double n = fitness::normalize(d);
        ++checks;
        if (!(n >= 0.0 && n < 1.0))
            ++range_violations;
    };
    for (auto op : ops)
        for (std::int64_t l = -20; l <= 20; ++l)
            for (std::int64_t r = -20; r <= 20; ++r)
                for (bool desired : {true, false}) {
                    const double d = fitness::branch_distance(op, l, r, desired);
                    const bool holds = minilang::apply(op, l, r) == desired;
                    ++checks;
                    if ((d == 0.0) != holds || d < 0.0)
                        ++zero_violations;
                    check_norm(d);
                }

    // Moving one operand one step towards the nearest satisfying value never
    // increases the distance.
    for (auto op : {compare_op::gt, compare_op::ge, compare_op::eq})
        for (bool desired : {true, false})
            for (std::int64_t fixed = -20; fixed <= 20; ++fixed)
                for (bool sweep_lhs : {true, false}) {
                    auto dist = [&](std::int64_t v) {
                        return sweep_lhs ? fitness::branch_distance(op, v, fixed, desired)
                                         : fitness::branch_distance(op, fixed, v, desired);
                    };
                    auto sat = [&](std::int64_t v) {
                        return (sweep_lhs ? minilang::apply(op, v, fixed) : minilang::apply(op, fixed, v)) == desired;
                    };
                    for (std::int64_t v = -40; v <= 40; ++v) {
                        if (sat(v))
                            continue;
                        for (int dir : {-1, 1}) {
                            // Only step in a direction that leads to satisfaction within the sweep.
                            bool reaches = false;
                            for (std::int64_t w = v + dir; w >= -60 && w <= 60 && !reaches; w += dir)
                                reaches = sat(w);
                            if (!reaches)
                                continue;
                            ++checks;
                            if (dist(v + dir) > dist(v))
                                ++monotone_violations;
                        }
                    }
                }

    for (double d : {0.0, 1e-300, 0.5, 1.0, 1e6, 1e15, 1e17, 1e300, std::numeric_limits<double>::max(),
                     std::numeric_limits<double>::infinity()})
        check_norm(d);

    // Whole-program costs on random inputs stay in their documented ranges.
    std::mt19937_64 gen(5);
    for (const char* name : {"sample", "triangle", "quadratic", "gcd", "linear_search", "binary_search", "bubble_sort"}) {
        const auto prog = load(name);
        const auto dep = minilang::control_dependence(prog);
        const auto ranges = prog.gene_ranges();
        for (int i = 0; i < 200; ++i) {
            std::vector<std::int64_t> x;
            for (const auto& r : ranges)
                x.push_back(std::uniform_int_distribution<std::int64_t>(r.lo, r.hi)(gen));
            const auto trace = minilang::execute(prog, x);
            for (auto c : {coverage::criterion::statement, coverage::criterion::decision, coverage::criterion::condition})
                for (const auto& t : coverage::enumerate_targets(prog, c)) {
                    const auto cost = fitness::target_cost(prog, trace, t, dep);
                    ++checks;
                    if (!(cost.normalized_distance >= 0.0 && cost.normalized_distance < 1.0))
                        ++range_violations;
                    if ((cost.total() == 0.0) != coverage::covers(trace, t))
                        ++zero_violations;
                }
        }
    }

    outcome o;
    o.pass = zero_violations == 0 && monotone_violations == 0 && range_violations == 0;
    o.detail = std::to_string(checks) + " checks; zero-iff-satisfied violations " + std::to_string(zero_violations) +
               ", monotonicity violations " + std::to_string(monotone_violations) + ", [0,1) violations " +
               std::to_string(range_violations);
    return o;
}

// 6. Search laws over 100 randomized runs per algorithm.
outcome search_laws()
{
    std::mt19937_64 gen(2024);
    auto pick = [&](std::int64_t lo, std::int64_t hi) { return std::uniform_int_distribution<std::int64_t>(lo, hi)(gen); };
    std::size_t budget_violations = 0, range_violations = 0, elitism_violations = 0, tabu_violations = 0,
                anneal_violations = 0, runs = 0, generations = 0;

    for (auto kind : {search::algorithm::random, search::algorithm::hill_climb, search::algorithm::annealing,
                      search::algorithm::tabu, search::algorithm::genetic})
        for (int run = 0; run < 100; ++run) {
            const auto dim = static_cast<std::size_t>(pick(1, 6));
            std::vector<search::value_range> ranges;
            std::vector<std::int64_t> goal;
            for (std::size_t i = 0; i < dim; ++i) {
                const auto lo = pick(-500, 100);
                const auto hi = lo + pick(0, 600);
                ranges.push_back({lo, hi});
                goal.push_back(pick(lo, hi));
            }
            const auto salt = pick(1, 9);
            std::uint64_t calls = 0;
            bool outside = false;
            search::problem p{ranges, [&](std::span<const std::int64_t> x) {
                                  ++calls;
                                  double c = 0.0;
                                  for (std::size_t i = 0; i < x.size(); ++i) {
                                      outside = outside || !ranges[i].contains(x[i]);
                                      c += std::abs(static_cast<double>(x[i] - goal[i])) +
                                           ((x[i] * salt) % 7 == 0 ? 3.0 : 0.0);
                                  }
                                  return c;
                              }};
            auto config = algo(kind);
            config.tabu.tenure = static_cast<std::size_t>(pick(1, 15));
            config.ga.population = static_cast<std::size_t>(pick(2, 30));
            config.ga.elitism = static_cast<std::size_t>(pick(1, std::min<std::int64_t>(2, static_cast<std::int64_t>(config.ga.population) - 1)));
            config.annealing.initial_temperature = std::ldexp(1.0, static_cast<int>(pick(-4, 6)));
            const auto budget = static_cast<std::uint64_t>(pick(1, 3000));

            double last_best = std::numeric_limits<double>::infinity();
            search::search_observer watch;
            watch.generation = [&](std::span<const double> costs) {
                ++generations;
                const double best = *std::min_element(costs.begin(), costs.end());
                if (best > last_best)
                    ++elitism_violations;
                last_best = best;
            };
            watch.tabu_size = [&](std::size_t n) {
                if (n > config.tabu.tenure)
                    ++tabu_violations;
            };
            const auto result = search::run_search(p, config, budget, static_cast<std::uint64_t>(pick(0, 1 << 30)), &watch);
            ++runs;
            if (result.evaluations > budget || calls > budget || calls != result.evaluations)
                ++budget_violations;
            if (outside)
                ++range_violations;
        }

    // Acceptance of a worsening move never decreases as temperature rises.
    for (int i = 0; i < 100; ++i) {
        const double delta = std::ldexp(static_cast<double>(pick(1, 1000)), static_cast<int>(pick(-12, 4)));
        double previous = 0.0;
        for (int e = -30; e <= 30; ++e) {
            const double a = search::acceptance_probability(delta, std::ldexp(1.0, e));
            if (a < previous || a < 0.0 || a > 1.0)
                ++anneal_violations;
            previous = a;
        }
        if (search::acceptance_probability(-delta, 1e-9) != 1.0)
            ++anneal_violations;
    }

    outcome o;
    o.pass = budget_violations + range_violations + elitism_violations + tabu_violations + anneal_violations == 0;
    o.detail = std::to_string(runs) + " runs (" + std::to_string(generations) + " GA generations); budget " +
               std::to_string(budget_violations) + ", range " + std::to_string(range_violations) + ", elitism " +
               std::to_string(elitism_violations) + ", tabu tenure " + std::to_string(tabu_violations) +
               ", annealing monotonicity " + std::to_string(anneal_violations) + " violations";
    return o;
}

// 7. The flag-guarded decision's true outcome: GA median evaluations no worse
// than random search over 20 paired seeds.
outcome nested_target()
{
    const auto prog = load("sample");
    const auto dep = minilang::control_dependence(prog);
    const auto target = coverage::decision_target(minilang::decision_id{1}, true);
    search::problem p{prog.gene_ranges(), [&](std::span<const std::int64_t> x) {
                          return fitness::target_cost(prog, minilang::execute(prog, x), target, dep).total();
                      }};
    std::vector<double> ga, rs;
    bool all_success = true;
    for (std::uint64_t i = 0; i < 20; ++i) {
        const auto seed = search::derive_seed(1 + i, coverage::label(target));
        const auto g = search::run_search(p, algo(search::algorithm::genetic), 100000, seed);
        const auto r = search::run_search(p, algo(search::algorithm::random), 100000, seed);
        all_success = all_success && g.success && r.success;
        ga.push_back(static_cast<double>(g.evaluations));
        rs.push_back(static_cast<double>(r.evaluations));
    }
    outcome o;
    o.pass = all_success && median(ga) <= median(rs);
    o.detail = "D1:T median evaluations: ga " + fmt(median(ga)) + ", random " + fmt(median(rs)) +
               (all_success ? "" : "; some run failed");
    return o;
}

}  // namespace

int main()
{
    struct criterion {
        const char* name;
        std::function<outcome()> check;
        double limit_seconds;  // 0: no runtime bound
    };
    const std::vector<criterion> criteria = {
        {"oracle equivalence", oracle_equivalence, 120},
        {"GA vs random on triangle", ga_vs_random, 300},
        {"random search coverage band", random_band, 180},
        {"determinism", determinism, 0},
        {"fitness laws", fitness_laws, 0},
        {"search laws", search_laws, 60},
        {"nested target hardness", nested_target, 0},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        const auto start = std::chrono::steady_clock::now();
        outcome o;
        try {
            o = criteria[i].check();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        if (criteria[i].limit_seconds > 0 && seconds >= criteria[i].limit_seconds) {
            o.pass = false;
            o.detail += "; over the " + fmt(criteria[i].limit_seconds, 0) + " s limit";
        }
        failures += !o.pass;
        std::cout << (o.pass ? "PASS" : "FAIL") << " [" << i + 1 << "] " << criteria[i].name << ": " << o.detail
                  << " (" << fmt(seconds, 2) << " s)\n";
    }
    std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << '\n';
    return failures == 0 ? 0 : 1;
}
