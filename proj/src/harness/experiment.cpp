#include "evotest/harness/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <charconv>
#include <cmath>
#include <exception>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace evotest::harness {

namespace {

std::string path_text(const std::vector<minilang::branch>& path)
{
    std::string out;
    for (const auto& b : path) {
        if (!out.empty())
            out += ',';
        out += coverage::label(coverage::decision_target(b.decision, b.outcome));
    }
    return out;
}

std::vector<minilang::branch> parse_path_labels(std::string_view text)
{
    std::vector<minilang::branch> out;
    std::size_t pos = 0;
    while (pos <= text.size()) {
        const auto comma = std::min(text.find(',', pos), text.size());
        const auto word = text.substr(pos, comma - pos);
        const auto t = coverage::parse_label(word);
        if (!t || t->kind != coverage::criterion::decision)
            throw std::invalid_argument("path: '" + std::string(word) + "' is not a decision outcome like D0:T");
        out.push_back({minilang::decision_id{t->id}, t->outcome});
        pos = comma + 1;
    }
    return out;
}

}  // namespace

void experiment_spec::validate() const
{
    if (algorithms.empty())
        throw std::invalid_argument("experiment lists no algorithms");
    if (repetitions == 0)
        throw std::invalid_argument("repetitions must be at least 1");
    if (budget == 0)
        throw std::invalid_argument("budget must be at least 1");
    if (fitness == fitness_mode::path && path.empty())
        throw std::invalid_argument("path fitness needs a path");
    for (const auto& a : algorithms)
        a.config.validate();
}

experiment_spec spec_from_json(const nlohmann::json& j, const std::filesystem::path& base_dir)
{
    static const std::vector<std::string> known = {"program",  "criterion",       "algorithms", "budget",
                                                   "repetitions", "seed",         "skip_infeasible",
                                                   "oracle_cap", "fitness",       "path"};
    if (!j.is_object())
        throw std::invalid_argument("experiment spec must be a JSON object");
    for (const auto& [key, value] : j.items())
        if (std::find(known.begin(), known.end(), key) == known.end())
            throw std::invalid_argument("unknown experiment key '" + key + "'");

    experiment_spec s;
    std::string key;
    try {
        key = "program";
        if (j.contains(key)) {
            std::filesystem::path p = j.at(key).get<std::string>();
            s.program = p.is_relative() && !base_dir.empty() ? base_dir / p : p;
        }
        key = "criterion";
        if (j.contains(key)) {
            auto c = coverage::parse_criterion(j.at(key).get<std::string>());
            if (!c)
                throw std::invalid_argument("unknown criterion");
            s.criterion = *c;
        }
        key = "algorithms";
        if (j.contains(key)) {
            for (const auto& a : j.at(key)) {
                algorithm_entry e;
                if (a.is_string()) {
                    e.config = search::algorithm_config_from_json({{"algorithm", a.get<std::string>()}});
                } else {
                    e.config = search::algorithm_config_from_json(a);
                    if (a.contains("label"))
                        e.label = a.at("label").get<std::string>();
                }
                s.algorithms.push_back(std::move(e));
            }
        }
        key = "budget";
        if (j.contains(key))
            s.budget = j.at(key).get<std::uint64_t>();
        key = "repetitions";
        if (j.contains(key))
            s.repetitions = j.at(key).get<std::uint64_t>();
        key = "seed";
        if (j.contains(key))
            s.seed = j.at(key).get<std::uint64_t>();
        key = "skip_infeasible";
        if (j.contains(key))
            s.skip_infeasible = j.at(key).get<bool>();
        key = "oracle_cap";
        if (j.contains(key))
            s.oracle_cap = j.at(key).get<std::uint64_t>();
        key = "fitness";
        if (j.contains(key)) {
            const auto f = j.at(key).get<std::string>();
            if (f == "branch")
                s.fitness = fitness_mode::branch;
            else if (f == "path")
                s.fitness = fitness_mode::path;
            else
                throw std::invalid_argument("expected branch or path");
        }
        key = "path";
        if (j.contains(key) && !j.at(key).is_null())
            s.path = parse_path_labels(j.at(key).get<std::string>());
    } catch (const std::exception& e) {
        throw std::invalid_argument("experiment key '" + key + "': " + e.what());
    }
    s.validate();
    return s;
}

nlohmann::ordered_json to_json(const experiment_spec& spec)
{
    nlohmann::ordered_json j;
    j["program"] = spec.program.generic_string();
    j["criterion"] = coverage::to_string(spec.criterion);
    const auto labels = unique_labels(spec.algorithms);
    j["algorithms"] = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < spec.algorithms.size(); ++i) {
        auto a = search::to_json(spec.algorithms[i].config);
        a["label"] = labels[i];
        j["algorithms"].push_back(std::move(a));
    }
    j["budget"] = spec.budget;
    j["repetitions"] = spec.repetitions;
    j["seed"] = spec.seed;
    j["skip_infeasible"] = spec.skip_infeasible;
    j["oracle_cap"] = spec.oracle_cap;
    j["fitness"] = to_string(spec.fitness);
    j["path"] = spec.path.empty() ? nlohmann::ordered_json(nullptr) : nlohmann::ordered_json(path_text(spec.path));
    return j;
}

std::vector<std::string> unique_labels(const std::vector<algorithm_entry>& algorithms)
{
    std::vector<std::string> out;
    std::map<std::string, int> seen;
    for (const auto& a : algorithms) {
        std::string base = a.label.empty() ? search::to_string(a.config.kind) : a.label;
        const int n = ++seen[base];
        out.push_back(n == 1 ? base : base + "#" + std::to_string(n));
    }
    return out;
}

summary summarize(std::vector<double> values)
{
    summary s;
    if (values.empty())
        return s;
    std::sort(values.begin(), values.end());
    double sum = 0.0;
    for (double v : values)
        sum += v;
    const std::size_t n = values.size();
    s.mean = sum / static_cast<double>(n);
    s.median = n % 2 == 1 ? values[n / 2] : (values[n / 2 - 1] + values[n / 2]) / 2.0;
    s.min = values.front();
    s.max = values.back();
    return s;
}

std::vector<comparison_aggregate> aggregate(const std::vector<comparison_row>& rows)
{
    std::vector<comparison_aggregate> out;
    std::vector<std::vector<const comparison_row*>> groups;
    for (const auto& r : rows) {
        auto it = std::find_if(out.begin(), out.end(),
                               [&r](const auto& a) { return a.program == r.program && a.label == r.label; });
        if (it == out.end()) {
            comparison_aggregate a;
            a.program = r.program;
            a.ranges = r.ranges;
            a.label = r.label;
            a.algorithm = r.algorithm;
            out.push_back(std::move(a));
            groups.emplace_back();
            it = out.end() - 1;
        }
        groups[static_cast<std::size_t>(it - out.begin())].push_back(&r);
    }
    for (std::size_t g = 0; g < out.size(); ++g) {
        auto pick = [&](auto field) {
            std::vector<double> v;
            for (const auto* r : groups[g])
                v.push_back(field(*r));
            return summarize(std::move(v));
        };
        auto& a = out[g];
        a.runs = groups[g].size();
        a.full_runs = static_cast<std::uint64_t>(
            std::count_if(groups[g].begin(), groups[g].end(), [](const auto* r) { return r->full; }));
        a.coverage_percent = pick([](const comparison_row& r) { return r.coverage_percent; });
        if (std::all_of(groups[g].begin(), groups[g].end(), [](const auto* r) { return r->feasible_percent.has_value(); }))
            a.feasible_percent = pick([](const comparison_row& r) { return *r.feasible_percent; });
        a.tests = pick([](const comparison_row& r) { return static_cast<double>(r.tests); });
        a.evaluations = pick([](const comparison_row& r) { return static_cast<double>(r.evaluations); });
        a.evaluations_to_full = pick([](const comparison_row& r) { return static_cast<double>(r.evaluations_to_full); });
        a.wall_seconds = pick([](const comparison_row& r) { return r.wall_seconds; });
    }
    return out;
}

comparison_report compare(const minilang::program& prog, const experiment_spec& spec, unsigned jobs)
{
    spec.validate();
    std::vector<coverage::target> feasible = coverage::enumerate_targets(prog, spec.criterion);
    std::vector<coverage::target> infeasible;
    bool oracle_ran = false;
    if (domain_size(prog.gene_ranges()) <= spec.oracle_cap) {
        auto o = brute_force_oracle(prog, spec.criterion, spec.oracle_cap);
        feasible = std::move(o.feasible);
        infeasible = std::move(o.infeasible);
        oracle_ran = true;
    }

    generate_options options;
    options.fitness = spec.fitness;
    options.path = spec.path;
    if (spec.skip_infeasible)
        options.skip = infeasible;

    const auto labels = unique_labels(spec.algorithms);
    const auto ranges = describe_ranges(prog.inputs());
    const std::size_t total = spec.algorithms.size() * spec.repetitions;
    std::vector<comparison_row> rows(total);
    std::vector<std::exception_ptr> errors(total);
    std::atomic<std::size_t> next{0};

    auto worker = [&] {
        for (std::size_t i = next++; i < total; i = next++) {
            try {
                const auto& entry = spec.algorithms[i / spec.repetitions];
                const std::uint64_t seed = spec.seed + i % spec.repetitions;
                const auto g = generate_suite(prog, spec.criterion, entry.config, spec.budget, seed, options);
                auto& row = rows[i];
                row.program = prog.name();
                row.ranges = ranges;
                row.label = labels[i / spec.repetitions];
                row.algorithm = search::to_string(entry.config.kind);
                row.seed = seed;
                row.coverage_percent = g.report.percent();
                if (oracle_ran)
                    row.feasible_percent = coverage::feasible_percent(g.report, feasible);
                row.tests = g.suite.size();
                row.evaluations = g.stats.evaluations;
                const auto to_full = evaluations_to_cover(g.stats, feasible);
                row.full = to_full.has_value();
                row.evaluations_to_full = to_full.value_or(g.stats.evaluations);
                row.wall_seconds = std::round(g.stats.wall_seconds * 1000.0) / 1000.0;
            } catch (...) {
                errors[i] = std::current_exception();
            }
        }
    };

    const unsigned threads = std::max(1U, std::min<unsigned>(jobs, static_cast<unsigned>(total)));
    if (threads == 1) {
        worker();
    } else {
        std::vector<std::jthread> pool;
        for (unsigned t = 0; t < threads; ++t)
            pool.emplace_back(worker);
    }
    for (const auto& e : errors)
        if (e)
            std::rethrow_exception(e);

    comparison_report report;
    report.config = to_json(spec);
    report.aggregates = aggregate(rows);
    report.rows = std::move(rows);
    return report;
}

comparison_report compare(const experiment_spec& spec, unsigned jobs)
{
    if (spec.program.empty())
        throw std::invalid_argument("experiment names no program");
    const auto prog = minilang::parse(minilang::load_source(spec.program));
    return compare(prog, spec, jobs);
}

comparison_report run_benchmarks(const std::vector<benchmark>& corpus, const experiment_spec& spec, unsigned jobs)
{
    spec.validate();
    comparison_report report;
    report.config = to_json(spec);
    report.config.erase("program");
    auto names = nlohmann::ordered_json::array();
    for (const auto& b : corpus) {
        names.push_back(b.name());
        const auto prog = minilang::parse(b.source);
        auto part = compare(prog, spec, jobs);
        for (auto& r : part.rows)
            report.rows.push_back(std::move(r));
    }
    report.config["programs"] = std::move(names);
    report.aggregates = aggregate(report.rows);
    return report;
}

std::optional<report_format> parse_report_format(std::string_view text) noexcept
{
    if (text == "csv")
        return report_format::csv;
    if (text == "json")
        return report_format::json;
    if (text == "markdown" || text == "md")
        return report_format::markdown;
    return std::nullopt;
}

const char* to_string(report_format f) noexcept
{
    switch (f) {
    case report_format::csv: return "csv";
    case report_format::json: return "json";
    case report_format::markdown: return "markdown";
    }
    return "?";
}

std::string format_double(double v)
{
    char buf[64];
    const auto r = std::to_chars(buf, buf + sizeof buf, v);
    return {buf, r.ptr};
}

namespace {

const std::vector<std::string> csv_columns = {"program",  "ranges",      "label",
                                              "algorithm", "seed",       "coverage_percent",
                                              "feasible_percent", "tests", "evaluations",
                                              "evaluations_to_full", "full"};

std::string csv_field(const std::string& s)
{
    if (s.find_first_of(",\"\n") == std::string::npos)
        return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"')
            out += '"';
        out += ch;
    }
    return out + '"';
}

std::vector<std::vector<std::string>> split_csv(std::string_view text)
{
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool quoted = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        any = true;
        if (quoted) {
            if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            record.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            record.push_back(std::move(field));
            field.clear();
            records.push_back(std::move(record));
            record.clear();
            any = false;
        } else if (ch != '\r') {
            field += ch;
        }
    }
    if (quoted)
        throw std::invalid_argument("csv: unterminated quoted field");
    if (any) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    return records;
}

template <class T>
T parse_number(const std::string& s, const char* column)
{
    T v{};
    const auto r = std::from_chars(s.data(), s.data() + s.size(), v);
    if (r.ec != std::errc{} || r.ptr != s.data() + s.size())
        throw std::invalid_argument(std::string("csv: bad ") + column + " value '" + s + "'");
    return v;
}

nlohmann::ordered_json summary_json(const summary& s)
{
    return {{"mean", s.mean}, {"median", s.median}, {"min", s.min}, {"max", s.max}};
}

nlohmann::ordered_json row_json(const comparison_row& r, bool timing)
{
    nlohmann::ordered_json j;
    j["program"] = r.program;
    j["ranges"] = r.ranges;
    j["label"] = r.label;
    j["algorithm"] = r.algorithm;
    j["seed"] = r.seed;
    j["coverage_percent"] = r.coverage_percent;
    j["feasible_percent"] = r.feasible_percent ? nlohmann::ordered_json(*r.feasible_percent) : nlohmann::ordered_json(nullptr);
    j["tests"] = r.tests;
    j["evaluations"] = r.evaluations;
    j["evaluations_to_full"] = r.evaluations_to_full;
    j["full"] = r.full;
    if (timing)
        j["wall_seconds"] = r.wall_seconds;
    return j;
}

nlohmann::ordered_json aggregate_json(const comparison_aggregate& a, bool timing)
{
    nlohmann::ordered_json j;
    j["program"] = a.program;
    j["ranges"] = a.ranges;
    j["label"] = a.label;
    j["algorithm"] = a.algorithm;
    j["runs"] = a.runs;
    j["full_runs"] = a.full_runs;
    j["coverage_percent"] = summary_json(a.coverage_percent);
    j["feasible_percent"] = a.feasible_percent ? summary_json(*a.feasible_percent) : nlohmann::ordered_json(nullptr);
    j["tests"] = summary_json(a.tests);
    j["evaluations"] = summary_json(a.evaluations);
    j["evaluations_to_full"] = summary_json(a.evaluations_to_full);
    if (timing)
        j["wall_seconds"] = summary_json(a.wall_seconds);
    return j;
}

std::string emit_csv(const comparison_report& report, bool timing)
{
    std::string out;
    for (std::size_t i = 0; i < csv_columns.size(); ++i)
        out += (i ? "," : "") + csv_columns[i];
    if (timing)
        out += ",wall_seconds";
    out += '\n';
    for (const auto& r : report.rows) {
        out += csv_field(r.program) + ',' + csv_field(r.ranges) + ',' + csv_field(r.label) + ',' +
               csv_field(r.algorithm) + ',' + std::to_string(r.seed) + ',' + format_double(r.coverage_percent) +
               ',' + (r.feasible_percent ? format_double(*r.feasible_percent) : "") + ',' +
               std::to_string(r.tests) + ',' + std::to_string(r.evaluations) + ',' +
               std::to_string(r.evaluations_to_full) + ',' + (r.full ? "true" : "false");
        if (timing)
            out += ',' + format_double(r.wall_seconds);
        out += '\n';
    }
    return out;
}

std::string emit_json(const comparison_report& report, bool timing)
{
    nlohmann::ordered_json j;
    j["config"] = report.config;
    j["rows"] = nlohmann::ordered_json::array();
    for (const auto& r : report.rows)
        j["rows"].push_back(row_json(r, timing));
    j["aggregates"] = nlohmann::ordered_json::array();
    for (const auto& a : report.aggregates)
        j["aggregates"].push_back(aggregate_json(a, timing));
    return j.dump(2) + '\n';
}

std::string fixed(double v, int digits = 1)
{
    std::ostringstream s;
    s.setf(std::ios::fixed);
    s.precision(digits);
    s << v;
    return s.str();
}

std::string emit_markdown(const comparison_report& report, bool timing)
{
    std::string out = "| program | label | runs | full | coverage % (mean / median) | feasible % (mean) | tests "
                      "(mean) | evaluations (mean) | evaluations to full (mean / median) |";
    std::string rule = "|---|---|---:|---:|---:|---:|---:|---:|---:|";
    if (timing) {
        out += " wall s (mean) |";
        rule += "---:|";
    }
    out += '\n' + rule + '\n';
    for (const auto& a : report.aggregates) {
        out += "| " + a.program + " | " + a.label + " | " + std::to_string(a.runs) + " | " +
               std::to_string(a.full_runs) + " | " + fixed(a.coverage_percent.mean) + " / " +
               fixed(a.coverage_percent.median) + " | " +
               (a.feasible_percent ? fixed(a.feasible_percent->mean) : std::string("n/a")) + " | " +
               fixed(a.tests.mean) + " | " + fixed(a.evaluations.mean) + " | " +
               fixed(a.evaluations_to_full.mean) + " / " + fixed(a.evaluations_to_full.median) + " |";
        if (timing)
            out += " " + fixed(a.wall_seconds.mean, 3) + " |";
        out += '\n';
    }
    return out;
}

}  // namespace

std::string emit_report(const comparison_report& report, report_format format, const emit_options& options)
{
    switch (format) {
    case report_format::csv: return emit_csv(report, options.timing);
    case report_format::json: return emit_json(report, options.timing);
    case report_format::markdown: return emit_markdown(report, options.timing);
    }
    throw std::invalid_argument("unknown report format");
}

std::string emit_report(const comparison_report& report, std::string_view format, const emit_options& options)
{
    const auto f = parse_report_format(format);
    if (!f)
        throw std::invalid_argument("unknown report format '" + std::string(format) + "' (csv, json, markdown)");
    return emit_report(report, *f, options);
}

std::vector<comparison_row> rows_from_csv(std::string_view text)
{
    const auto records = split_csv(text);
    if (records.empty())
        throw std::invalid_argument("csv: missing header");
    const auto& header = records.front();
    const bool timing = header.size() == csv_columns.size() + 1;
    if (header.size() < csv_columns.size() || !std::equal(csv_columns.begin(), csv_columns.end(), header.begin()) ||
        (timing && header.back() != "wall_seconds") || header.size() > csv_columns.size() + 1)
        throw std::invalid_argument("csv: unexpected header");
    std::vector<comparison_row> rows;
    for (std::size_t i = 1; i < records.size(); ++i) {
        const auto& f = records[i];
        if (f.size() != header.size())
            throw std::invalid_argument("csv: record " + std::to_string(i) + " has " + std::to_string(f.size()) +
                                        " fields, expected " + std::to_string(header.size()));
        comparison_row r;
        r.program = f[0];
        r.ranges = f[1];
        r.label = f[2];
        r.algorithm = f[3];
        r.seed = parse_number<std::uint64_t>(f[4], "seed");
        r.coverage_percent = parse_number<double>(f[5], "coverage_percent");
        if (!f[6].empty())
            r.feasible_percent = parse_number<double>(f[6], "feasible_percent");
        r.tests = parse_number<std::uint64_t>(f[7], "tests");
        r.evaluations = parse_number<std::uint64_t>(f[8], "evaluations");
        r.evaluations_to_full = parse_number<std::uint64_t>(f[9], "evaluations_to_full");
        if (f[10] != "true" && f[10] != "false")
            throw std::invalid_argument("csv: bad full value '" + f[10] + "'");
        r.full = f[10] == "true";
        if (timing)
            r.wall_seconds = parse_number<double>(f[11], "wall_seconds");
        rows.push_back(std::move(r));
    }
    return rows;
}

comparison_report report_from_json(const nlohmann::json& j)
{
    comparison_report report;
    try {
        report.config = nlohmann::ordered_json::parse(j.at("config").dump());
        for (const auto& r : j.at("rows")) {
            comparison_row row;
            row.program = r.at("program").get<std::string>();
            row.ranges = r.at("ranges").get<std::string>();
            row.label = r.at("label").get<std::string>();
            row.algorithm = r.at("algorithm").get<std::string>();
            row.seed = r.at("seed").get<std::uint64_t>();
            row.coverage_percent = r.at("coverage_percent").get<double>();
            if (!r.at("feasible_percent").is_null())
                row.feasible_percent = r.at("feasible_percent").get<double>();
            row.tests = r.at("tests").get<std::uint64_t>();
            row.evaluations = r.at("evaluations").get<std::uint64_t>();
            row.evaluations_to_full = r.at("evaluations_to_full").get<std::uint64_t>();
            row.full = r.at("full").get<bool>();
            if (r.contains("wall_seconds"))
                row.wall_seconds = r.at("wall_seconds").get<double>();
            report.rows.push_back(std::move(row));
        }
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad report JSON: ") + e.what());
    }
    report.aggregates = aggregate(report.rows);
    return report;
}

}  // namespace evotest::harness
