#include "evotest/cli/app.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <iomanip>
#include <optional>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "evotest/fitness/cost.hpp"
#include "evotest/harness/experiment.hpp"

namespace evotest::cli {

namespace {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

// Flags that tune one algorithm. Unset flags leave config or defaults alone.
struct algorithm_flags {
    std::vector<std::string> algorithms;
    std::optional<std::vector<std::int64_t>> steps;
    std::optional<double> temp0;
    std::optional<double> cooling;
    std::optional<std::size_t> tenure;
    std::optional<std::size_t> pop;
    std::optional<std::uint64_t> generations;
    std::optional<double> pc;
    std::optional<double> pm;

    void add_to(CLI::App& app, bool repeatable)
    {
        auto* a = app.add_option("--algorithm,-a", algorithms,
                                 "random, hill_climb, annealing, tabu or ga" +
                                     std::string(repeatable ? " (repeat to compare several)" : ""));
        if (!repeatable)
            a->expected(1);
        app.add_option("--steps", steps, "neighborhood step sizes for hill_climb, annealing, tabu")->delimiter(',');
        app.add_option("--temp0", temp0, "initial annealing temperature");
        app.add_option("--cooling", cooling, "geometric cooling factor");
        app.add_option("--tenure", tenure, "tabu list length");
        app.add_option("--pop", pop, "GA population size");
        app.add_option("--generations", generations, "GA generation limit (0: budget only)");
        app.add_option("--pc", pc, "GA crossover probability");
        app.add_option("--pm", pm, "GA per-gene mutation probability (default 1/dimension)");
    }

    [[nodiscard]] bool tunes() const
    {
        return steps || temp0 || cooling || tenure || pop || generations || pc || pm;
    }

    void apply(json& config) const
    {
        if (steps)
            config["steps"] = *steps;
        if (temp0)
            config["temp0"] = *temp0;
        if (cooling)
            config["cooling"] = *cooling;
        if (tenure)
            config["tenure"] = *tenure;
        if (pop)
            config["pop"] = *pop;
        if (generations)
            config["generations"] = *generations;
        if (pc)
            config["pc"] = *pc;
        if (pm)
            config["pm"] = *pm;
    }
};

// Flags shared by the commands that run experiments.
struct run_flags {
    std::optional<std::string> program;
    std::optional<std::string> config;
    std::optional<std::string> criterion;
    std::optional<std::uint64_t> budget;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> fitness;
    std::optional<std::string> path;
    bool skip_infeasible = false;
    std::optional<std::uint64_t> oracle_cap;
    std::optional<std::string> output;
    std::vector<std::string> formats;
    bool timing = false;
    algorithm_flags algorithm;

    void add_common(CLI::App& app, bool repeatable_algorithm)
    {
        app.add_option("--program,-p", program, "MiniC file");
        app.add_option("--config,-c", config, "JSON config file; flags override its values");
        app.add_option("--criterion", criterion, "statement, decision (or branch) or condition");
        app.add_option("--budget,-b", budget, "fitness evaluations per target");
        app.add_option("--seed,-s", seed, "base seed (fallback: EVOTEST_SEED, then 1)");
        app.add_option("--fitness", fitness, "branch or path");
        app.add_option("--path", path, "decision outcomes for path fitness, e.g. D0:T,D1:F");
        app.add_flag("--skip-infeasible", skip_infeasible, "skip targets the brute-force oracle proves infeasible");
        app.add_option("--oracle-cap", oracle_cap, "largest input domain the oracle enumerates");
        app.add_flag("--timing", timing, "include wall-clock time in output files");
        algorithm.add_to(app, repeatable_algorithm);
    }
};

json read_json_file(const fs::path& path)
{
    std::ifstream in(path);
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    try {
        return json::parse(in);
    } catch (const json::parse_error& e) {
        throw std::runtime_error(path.string() + ": " + e.what());
    }
}

void write_file(const fs::path& path, const std::string& text)
{
    if (path.has_parent_path())
        fs::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write '" + path.string() + "'");
    out << text;
    if (!out.flush())
        throw std::runtime_error("failed writing '" + path.string() + "'");
}

std::optional<std::uint64_t> env_seed()
{
    const char* text = std::getenv("EVOTEST_SEED");
    if (!text || !*text)
        return std::nullopt;
    std::uint64_t v = 0;
    const std::string_view s{text};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
        throw usage_error("EVOTEST_SEED must be a non-negative integer, got '" + std::string(s) + "'");
    return v;
}

coverage::criterion criterion_or_throw(const std::string& text)
{
    auto c = coverage::parse_criterion(text);
    if (!c)
        throw usage_error("unknown criterion '" + text + "' (statement, decision, condition)");
    return *c;
}

minilang::program load_program(const fs::path& path)
{
    return minilang::parse(minilang::load_source(path));
}

void echo_config(std::ostream& err, const ordered_json& config)
{
    err << "config: " << config.dump() << '\n';
}

// Target feasibility from the oracle when the domain is small enough.
std::optional<std::vector<coverage::target>> feasible_targets(const minilang::program& prog, coverage::criterion c,
                                                             std::uint64_t cap)
{
    if (harness::domain_size(prog.gene_ranges()) > cap)
        return std::nullopt;
    return harness::brute_force_oracle(prog, c, cap).feasible;
}

int cmd_targets(const std::string& program, const std::string& criterion, std::ostream& out)
{
    const auto c = criterion_or_throw(criterion);
    const auto prog = load_program(program);
    const auto targets = coverage::enumerate_targets(prog, c);
    if (targets.empty()) {
        out << "0 targets\n";
        return exit_full;
    }
    std::size_t width = 0;
    for (const auto& t : targets)
        width = std::max(width, coverage::label(t).size());
    for (const auto& t : targets)
        out << std::left << std::setw(static_cast<int>(width)) << coverage::label(t) << "  line "
            << std::setw(4) << coverage::source_line(prog, t) << "  " << std::setw(9) << coverage::to_string(t.kind)
            << "  " << coverage::describe(prog, t) << '\n';
    return exit_full;
}

int cmd_oracle(const std::string& program, const std::string& criterion, std::uint64_t cap, std::ostream& out,
               std::ostream& err)
{
    const auto c = criterion_or_throw(criterion);
    const auto prog = load_program(program);
    if (coverage::target_count(prog, c) == 0) {
        out << "0 targets\n";
        return exit_full;
    }
    const auto r = harness::brute_force_oracle(prog, c, cap);
    for (const auto& t : coverage::enumerate_targets(prog, c)) {
        const bool ok = std::find(r.feasible.begin(), r.feasible.end(), t) != r.feasible.end();
        out << coverage::label(t) << ' ' << (ok ? "feasible" : "infeasible") << '\n';
    }
    err << r.points << " points, " << r.feasible.size() << " feasible, " << r.infeasible.size() << " infeasible\n";
    return r.infeasible.empty() ? exit_full : exit_partial;
}

int cmd_generate(const run_flags& f, const std::optional<std::string>& report_path,
                 const std::optional<std::string>& report_format, std::ostream& out, std::ostream& err)
{
    // Built-in defaults < config file < flags.
    json config = {{"criterion", "decision"}, {"algorithm", "ga"}, {"budget", 1000}, {"fitness", "branch"},
                   {"skip_infeasible", false}, {"oracle_cap", harness::default_oracle_cap}};
    fs::path base_dir;
    if (f.config) {
        auto file = read_json_file(*f.config);
        if (!file.is_object())
            throw usage_error("config file must hold a JSON object");
        // Accept the resolved config a previous run echoed.
        file.erase("command");
        if (file.contains("algorithm") && file["algorithm"].is_object()) {
            const auto nested = file["algorithm"];
            file.erase("algorithm");
            file.update(nested);
        }
        config.update(file);
        base_dir = fs::path(*f.config).parent_path();
    }
    if (!config.contains("seed"))
        if (auto s = env_seed())
            config["seed"] = *s;
    if (f.program)
        config["program"] = *f.program;
    else if (config.contains("program") && fs::path(config["program"].get<std::string>()).is_relative())
        config["program"] = (base_dir / config["program"].get<std::string>()).generic_string();
    if (f.criterion)
        config["criterion"] = *f.criterion;
    if (f.budget)
        config["budget"] = *f.budget;
    if (f.seed)
        config["seed"] = *f.seed;
    if (f.fitness)
        config["fitness"] = *f.fitness;
    if (f.path)
        config["path"] = *f.path;
    if (f.skip_infeasible)
        config["skip_infeasible"] = true;
    if (f.oracle_cap)
        config["oracle_cap"] = *f.oracle_cap;
    if (!f.algorithm.algorithms.empty())
        config["algorithm"] = f.algorithm.algorithms.front();
    f.algorithm.apply(config);
    if (!config.contains("seed"))
        config["seed"] = 1;
    if (!config.contains("program"))
        throw usage_error("generate needs --program or a config with \"program\"");

    json algorithm_json = config;
    for (const char* key : {"program", "criterion", "budget", "seed", "fitness", "path", "skip_infeasible", "oracle_cap"})
        algorithm_json.erase(key);
    const auto algorithm = search::algorithm_config_from_json(algorithm_json);
    const fs::path program_path = config["program"].get<std::string>();
    const auto c = criterion_or_throw(config["criterion"].get<std::string>());
    const auto budget = config["budget"].get<std::uint64_t>();
    const auto seed = config["seed"].get<std::uint64_t>();
    const auto cap = config["oracle_cap"].get<std::uint64_t>();

    const auto prog = load_program(program_path);
    harness::generate_options options;
    const auto fitness = config["fitness"].get<std::string>();
    if (fitness == "path") {
        if (!config.contains("path"))
            throw usage_error("path fitness needs --path");
        options.fitness = harness::fitness_mode::path;
        options.path = fitness::parse_path(prog, config["path"].get<std::string>());
    } else if (fitness != "branch") {
        throw usage_error("unknown fitness '" + fitness + "' (branch, path)");
    }

    ordered_json resolved;
    resolved["command"] = "generate";
    resolved["program"] = program_path.generic_string();
    resolved["criterion"] = coverage::to_string(c);
    resolved["algorithm"] = search::to_json(algorithm);
    resolved["budget"] = budget;
    resolved["seed"] = seed;
    resolved["fitness"] = fitness;
    resolved["path"] = config.contains("path") ? ordered_json(config["path"]) : ordered_json(nullptr);
    resolved["skip_infeasible"] = config["skip_infeasible"].get<bool>();
    resolved["oracle_cap"] = cap;
    echo_config(err, resolved);

    if (coverage::target_count(prog, c) == 0) {
        err << "0 targets: nothing to generate for " << coverage::to_string(c) << " coverage\n";
        return exit_error;
    }
    const auto feasible = feasible_targets(prog, c, cap);
    if (resolved["skip_infeasible"].get<bool>() && feasible)
        for (const auto& t : coverage::enumerate_targets(prog, c))
            if (std::find(feasible->begin(), feasible->end(), t) == feasible->end())
                options.skip.push_back(t);

    const auto g = harness::generate_suite(prog, c, algorithm, budget, seed, options);

    ordered_json suite;
    suite["config"] = resolved;
    suite["inputs"] = ordered_json::array();
    for (const auto& gene : prog.genes())
        suite["inputs"].push_back(gene.name);
    suite["tests"] = ordered_json::array();
    for (std::size_t i = 0; i < g.suite.size(); ++i) {
        ordered_json values;
        for (std::size_t k = 0; k < prog.genes().size(); ++k)
            values[prog.genes()[k].name] = g.suite[i].values[k];
        suite["tests"].push_back({{"name", "t" + std::to_string(i)}, {"values", std::move(values)}});
    }
    ordered_json stats;
    stats["evaluations"] = g.stats.evaluations;
    stats["searches"] = g.stats.runs.size();
    stats["successful_searches"] =
        std::count_if(g.stats.runs.begin(), g.stats.runs.end(), [](const auto& r) { return r.success; });
    stats["collateral"] = g.stats.collateral;
    stats["skipped"] = g.stats.skipped;
    if (f.timing)
        stats["wall_seconds"] = std::round(g.stats.wall_seconds * 1000.0) / 1000.0;
    suite["stats"] = std::move(stats);
    std::optional<std::span<const coverage::target>> feasible_span;
    if (feasible)
        feasible_span = std::span<const coverage::target>(*feasible);
    suite["coverage"] = coverage::to_json(g.report, prog, feasible_span);

    const auto suite_text = suite.dump(2) + '\n';
    if (f.output)
        write_file(*f.output, suite_text);
    else
        out << suite_text;

    const std::string format = report_format.value_or("text");
    std::string report_text;
    if (format == "json")
        report_text = coverage::to_json(g.report, prog, feasible_span).dump(2) + '\n';
    else if (format == "text")
        report_text = coverage::to_text(g.report, prog, feasible_span);
    else
        throw usage_error("unknown report format '" + format + "' (text, json)");
    if (report_path)
        write_file(*report_path, report_text);
    else
        err << report_text;

    const bool full = feasible ? coverage::feasible_percent(g.report, *feasible) == 100.0 : g.report.complete();
    return full ? exit_full : exit_partial;
}

// Shared by compare and bench: spec from config file and flags.
harness::experiment_spec resolve_spec(const run_flags& f, bool needs_program)
{
    json spec = json::object();
    fs::path base_dir;
    if (f.config) {
        spec = read_json_file(*f.config);
        if (!spec.is_object())
            throw usage_error("spec file must hold a JSON object");
        if (spec.contains("config") && spec.contains("rows"))
            spec = spec["config"];
        for (const char* key : {"command", "jobs", "benchmarks", "programs"})
            spec.erase(key);
        base_dir = fs::path(*f.config).parent_path();
    }
    if (!spec.contains("seed"))
        if (auto s = env_seed())
            spec["seed"] = *s;
    if (f.program) {
        spec["program"] = *f.program;
    } else if (spec.contains("program") && spec["program"].is_string()) {
        const fs::path p = spec["program"].get<std::string>();
        if (p.is_relative())
            spec["program"] = (base_dir / p).generic_string();
    }
    if (!needs_program)
        spec.erase("program");
    if (f.criterion)
        spec["criterion"] = *f.criterion;
    if (f.budget)
        spec["budget"] = *f.budget;
    if (f.seed)
        spec["seed"] = *f.seed;
    if (f.fitness)
        spec["fitness"] = *f.fitness;
    if (f.path)
        spec["path"] = *f.path;
    if (f.skip_infeasible)
        spec["skip_infeasible"] = true;
    if (f.oracle_cap)
        spec["oracle_cap"] = *f.oracle_cap;
    if (!f.algorithm.algorithms.empty()) {
        spec["algorithms"] = json::array();
        for (const auto& name : f.algorithm.algorithms)
            spec["algorithms"].push_back({{"algorithm", name}});
    } else if (!spec.contains("algorithms")) {
        spec["algorithms"] = {{{"algorithm", "random"}}, {{"algorithm", "ga"}}};
    }
    if (f.algorithm.tunes() && spec["algorithms"].is_array())
        for (auto& a : spec["algorithms"]) {
            if (a.is_string())
                a = json{{"algorithm", a.get<std::string>()}};
            f.algorithm.apply(a);
        }
    auto resolved = harness::spec_from_json(spec);
    if (needs_program && resolved.program.empty())
        throw usage_error("compare needs --program or a spec with \"program\"");
    return resolved;
}

struct report_flags {
    std::optional<std::uint64_t> repetitions;
    unsigned jobs = 1;
};

// Writes each requested format. One format: --output is the file name.
// Several: --output is a stem that gets .csv, .json or .md.
void write_reports(const harness::comparison_report& report, const run_flags& f)
{
    std::vector<harness::report_format> formats;
    for (const auto& name : f.formats) {
        auto fmt = harness::parse_report_format(name);
        if (!fmt)
            throw usage_error("unknown format '" + name + "' (csv, json, markdown)");
        formats.push_back(*fmt);
    }
    if (!f.output)
        return;
    const fs::path output = *f.output;
    if (formats.empty()) {
        const auto ext = output.extension().string();
        formats.push_back(ext == ".csv" ? harness::report_format::csv
                          : ext == ".md" ? harness::report_format::markdown
                                         : harness::report_format::json);
    }
    const harness::emit_options options{f.timing};
    if (formats.size() == 1) {
        write_file(output, harness::emit_report(report, formats.front(), options));
        return;
    }
    for (auto fmt : formats) {
        auto p = output;
        p.replace_extension(fmt == harness::report_format::markdown ? ".md" : "." + std::string(to_string(fmt)));
        write_file(p, harness::emit_report(report, fmt, options));
    }
}

int finish_comparison(const harness::comparison_report& report, const run_flags& f, std::ostream& out)
{
    write_reports(report, f);
    out << harness::emit_report(report, harness::report_format::markdown, {f.timing});
    const bool full = std::all_of(report.rows.begin(), report.rows.end(), [](const auto& r) { return r.full; });
    return full ? exit_full : exit_partial;
}

int cmd_compare(const run_flags& f, const report_flags& r, std::ostream& out, std::ostream& err)
{
    auto spec = resolve_spec(f, true);
    if (r.repetitions)
        spec.repetitions = *r.repetitions;
    spec.validate();
    auto shown = harness::to_json(spec);
    shown["command"] = "compare";
    shown["jobs"] = r.jobs;
    echo_config(err, shown);
    return finish_comparison(harness::compare(spec, r.jobs), f, out);
}

int cmd_bench(const run_flags& f, const report_flags& r, const std::optional<std::string>& dir, std::ostream& out,
              std::ostream& err)
{
    auto spec = resolve_spec(f, false);
    if (r.repetitions)
        spec.repetitions = *r.repetitions;
    spec.validate();
    const fs::path corpus_dir = dir ? fs::path(*dir) : harness::default_corpus_dir();
    const auto corpus = harness::load_corpus(corpus_dir);
    if (corpus.empty())
        throw usage_error("no .minic files in '" + corpus_dir.string() + "'");
    auto shown = harness::to_json(spec);
    shown.erase("program");
    shown["command"] = "bench";
    shown["benchmarks"] = corpus_dir.generic_string();
    shown["jobs"] = r.jobs;
    echo_config(err, shown);
    return finish_comparison(harness::run_benchmarks(corpus, spec, r.jobs), f, out);
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err)
{
    CLI::App app{"Search-based test data generation for MiniC programs", "evotest"};
    app.require_subcommand(1);
    app.set_help_all_flag("--help-all", "show help for every subcommand");

    std::string program;
    std::string criterion = "decision";
    auto* targets = app.add_subcommand("targets", "list coverage targets of a program");
    targets->add_option("--program,-p,program", program, "MiniC file")->required();
    targets->add_option("--criterion", criterion, "statement, decision or condition");

    std::uint64_t cap = harness::default_oracle_cap;
    auto* oracle = app.add_subcommand("oracle", "enumerate the input domain to label feasible targets");
    oracle->add_option("--program,-p,program", program, "MiniC file")->required();
    oracle->add_option("--criterion", criterion, "statement, decision or condition");
    oracle->add_option("--cap", cap, "largest domain to enumerate");

    run_flags gen_flags;
    std::optional<std::string> report_path;
    std::optional<std::string> report_format;
    auto* generate = app.add_subcommand("generate", "generate a test suite for one program");
    gen_flags.add_common(*generate, false);
    generate->add_option("--output,-o", gen_flags.output, "suite JSON file (default: stdout)");
    generate->add_option("--report", report_path, "coverage report file (default: stderr)");
    generate->add_option("--format", report_format, "coverage report format: text or json");

    run_flags cmp_flags;
    report_flags cmp_report;
    auto* compare = app.add_subcommand("compare", "compare algorithms on one program");
    cmp_flags.add_common(*compare, true);
    compare->add_option("spec", cmp_flags.config, "experiment spec JSON (same as --config)");
    compare->add_option("--reps,-r", cmp_report.repetitions, "repetitions per algorithm");
    compare->add_option("--jobs,-j", cmp_report.jobs, "parallel runs; output does not depend on it")
        ->check(CLI::PositiveNumber);
    compare->add_option("--format,-f", cmp_flags.formats, "csv, json or markdown (repeatable)");
    compare->add_option("--output,-o", cmp_flags.output, "report file, or file stem for several formats");

    run_flags bench_flags;
    report_flags bench_report;
    std::optional<std::string> bench_dir;
    auto* bench = app.add_subcommand("bench", "compare algorithms on every benchmark in a directory");
    bench_flags.add_common(*bench, true);
    bench->add_option("--benchmarks", bench_dir, "benchmark directory (default: EVOTEST_BENCHMARKS or ./benchmarks)");
    bench->add_option("--reps,-r", bench_report.repetitions, "repetitions per algorithm");
    bench->add_option("--jobs,-j", bench_report.jobs, "parallel runs; output does not depend on it")
        ->check(CLI::PositiveNumber);
    bench->add_option("--format,-f", bench_flags.formats, "csv, json or markdown (repeatable)");
    bench->add_option("--output,-o", bench_flags.output, "report file, or file stem for several formats");

    std::vector<std::string> reversed(args.rbegin(), args.rend());
    try {
        app.parse(reversed);
    } catch (const CLI::CallForHelp&) {
        out << (app.get_subcommands().empty() ? app.help() : app.get_subcommands().front()->help());
        return exit_full;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return exit_full;
    } catch (const CLI::ParseError& e) {
        err << "evotest: " << e.what() << "\nRun with --help for usage.\n";
        return exit_error;
    }

    try {
        if (targets->parsed())
            return cmd_targets(program, criterion, out);
        if (oracle->parsed())
            return cmd_oracle(program, criterion, cap, out, err);
        if (generate->parsed())
            return cmd_generate(gen_flags, report_path, report_format, out, err);
        if (compare->parsed())
            return cmd_compare(cmp_flags, cmp_report, out, err);
        if (bench->parsed())
            return cmd_bench(bench_flags, bench_report, bench_dir, out, err);
    } catch (const minilang::parse_error& e) {
        err << "evotest: " << e.what() << '\n';
        return exit_error;
    } catch (const std::exception& e) {
        err << "evotest: " << e.what() << '\n';
        return exit_error;
    }
    return exit_error;
}

}  // namespace evotest::cli
