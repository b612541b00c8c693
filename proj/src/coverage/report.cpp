#include "evotest/coverage/report.hpp"

#include <algorithm>
#include <iomanip>
#include <sstream>

namespace evotest::coverage {

coverage_report coverage_report::empty(const minilang::program& prog, criterion c)
{
    const std::size_t n = target_count(prog, c);
    if (n == 0)
        throw degenerate_coverage_error("program '" + prog.name() + "' has no " + to_string(c) +
                                        " targets; coverage is undefined");
    coverage_report r;
    r.kind_ = c;
    r.fingerprint_ = prog.fingerprint();
    r.hit_.assign(n, false);
    r.first_test_.assign(n, -1);
    return r;
}

double coverage_report::percent() const noexcept
{
    return hit_.empty() ? 0.0 : 100.0 * static_cast<double>(covered_count_) / static_cast<double>(hit_.size());
}

namespace {

target target_at(criterion c, std::size_t index)
{
    if (c == criterion::statement)
        return {c, static_cast<std::uint32_t>(index), true};
    return {c, static_cast<std::uint32_t>(index / 2), index % 2 == 0};
}

}  // namespace

bool coverage_report::is_covered(const target& t) const
{
    if (t.kind != kind_)
        throw std::invalid_argument(std::string("target kind ") + to_string(t.kind) + " does not match a " +
                                    to_string(kind_) + " report");
    return hit_.at(t.index());
}

std::vector<target> coverage_report::covered() const
{
    std::vector<target> out;
    for (std::size_t i = 0; i < hit_.size(); ++i)
        if (hit_[i])
            out.push_back(target_at(kind_, i));
    return out;
}

std::vector<target> coverage_report::uncovered() const
{
    std::vector<target> out;
    for (std::size_t i = 0; i < hit_.size(); ++i)
        if (!hit_[i])
            out.push_back(target_at(kind_, i));
    return out;
}

std::vector<target> coverage_report::all_targets() const
{
    std::vector<target> out;
    out.reserve(hit_.size());
    for (std::size_t i = 0; i < hit_.size(); ++i)
        out.push_back(target_at(kind_, i));
    return out;
}

std::optional<std::size_t> coverage_report::attribution(const target& t) const
{
    if (!is_covered(t))
        return std::nullopt;
    return static_cast<std::size_t>(first_test_[t.index()]);
}

coverage_report merge(coverage_report report, const minilang::execution_trace& trace, const minilang::test_case& test)
{
    if (trace.program_fingerprint != report.fingerprint_)
        throw std::invalid_argument("trace was produced by a different program than the report");
    std::vector<bool> now(report.hit_.size(), false);
    mark_covered(trace, report.kind_, now);

    const auto next = static_cast<std::int64_t>(report.tests_.size());
    bool fresh = false;
    for (std::size_t i = 0; i < now.size(); ++i) {
        if (now[i] && !report.hit_[i]) {
            report.hit_[i] = true;
            report.first_test_[i] = next;
            ++report.covered_count_;
            fresh = true;
        }
    }
    if (fresh)
        report.tests_.push_back(test);
    return report;
}

coverage_report merge(coverage_report a, const coverage_report& b)
{
    if (a.kind_ != b.kind_)
        throw std::invalid_argument(std::string("cannot merge a ") + to_string(b.kind_) + " report into a " +
                                    to_string(a.kind_) + " report");
    if (a.fingerprint_ != b.fingerprint_ || a.hit_.size() != b.hit_.size())
        throw std::invalid_argument("cannot merge reports of different programs");

    // Tests from `b` keep their relative order and are appended only when
    // they first-cover something `a` lacks.
    std::vector<std::int64_t> remap(b.tests_.size(), -1);
    for (std::size_t i = 0; i < b.hit_.size(); ++i) {
        if (!b.hit_[i] || a.hit_[i])
            continue;
        auto src = static_cast<std::size_t>(b.first_test_[i]);
        if (remap[src] < 0) {
            remap[src] = static_cast<std::int64_t>(a.tests_.size());
            a.tests_.push_back(b.tests_[src]);
        }
        a.hit_[i] = true;
        a.first_test_[i] = remap[src];
        ++a.covered_count_;
    }
    return a;
}

coverage_report measure(const minilang::program& prog, std::span<const minilang::test_case> suite, criterion c,
                        const minilang::execution_options& options)
{
    auto report = coverage_report::empty(prog, c);
    for (const auto& test : suite)
        report = merge(std::move(report), minilang::execute(prog, test, options), test);
    return report;
}

std::vector<target> uncovered_targets(const coverage_report& report) { return report.uncovered(); }

double feasible_percent(const coverage_report& report, std::span<const target> feasible)
{
    if (feasible.empty())
        return 100.0;
    std::size_t hit = 0;
    for (const auto& t : feasible)
        if (report.is_covered(t))
            ++hit;
    return 100.0 * static_cast<double>(hit) / static_cast<double>(feasible.size());
}

nlohmann::ordered_json to_json(const coverage_report& report, const minilang::program& prog,
                               std::optional<std::span<const target>> feasible)
{
    nlohmann::ordered_json j;
    j["program"] = prog.name();
    j["criterion"] = to_string(report.kind());
    j["total_targets"] = report.total();
    j["covered_count"] = report.covered_count();
    j["percent"] = report.percent();
    if (feasible) {
        j["feasible_targets"] = feasible->size();
        j["feasible_percent"] = feasible_percent(report, *feasible);
    }
    auto targets = nlohmann::ordered_json::array();
    for (const auto& t : report.all_targets()) {
        nlohmann::ordered_json row;
        row["target"] = label(t);
        row["line"] = source_line(prog, t);
        row["description"] = describe(prog, t);
        row["covered"] = report.is_covered(t);
        if (auto a = report.attribution(t))
            row["test"] = *a;
        else
            row["test"] = nullptr;
        if (feasible)
            row["feasible"] = std::find(feasible->begin(), feasible->end(), t) != feasible->end();
        targets.push_back(std::move(row));
    }
    j["targets"] = std::move(targets);
    auto tests = nlohmann::ordered_json::array();
    for (const auto& t : report.tests())
        tests.push_back(t.values);
    j["tests"] = std::move(tests);
    return j;
}

std::string to_text(const coverage_report& report, const minilang::program& prog,
                    std::optional<std::span<const target>> feasible)
{
    std::ostringstream out;
    out << prog.name() << ": " << to_string(report.kind()) << " coverage " << report.covered_count() << "/"
        << report.total() << " (" << std::fixed << std::setprecision(2) << report.percent() << "%)";
    if (feasible)
        out << ", feasible " << feasible_percent(report, *feasible) << "% of " << feasible->size();
    out << '\n';

    struct row {
        std::string label, line, status, test, what;
    };
    std::vector<row> rows;
    for (const auto& t : report.all_targets()) {
        row r{label(t), std::to_string(source_line(prog, t)), report.is_covered(t) ? "covered" : "uncovered", "-",
              describe(prog, t)};
        if (auto a = report.attribution(t))
            r.test = "#" + std::to_string(*a);
        if (feasible && std::find(feasible->begin(), feasible->end(), t) == feasible->end())
            r.status = "infeasible";
        rows.push_back(std::move(r));
    }
    std::size_t w0 = 6, w1 = 4, w2 = 6, w3 = 4;
    for (const auto& r : rows) {
        w0 = std::max(w0, r.label.size());
        w1 = std::max(w1, r.line.size());
        w2 = std::max(w2, r.status.size());
        w3 = std::max(w3, r.test.size());
    }
    auto line = [&](const std::string& a, const std::string& b, const std::string& c, const std::string& d,
                    const std::string& e) {
        out << std::left << std::setw(static_cast<int>(w0)) << a << "  " << std::right
            << std::setw(static_cast<int>(w1)) << b << "  " << std::left << std::setw(static_cast<int>(w2)) << c
            << "  " << std::setw(static_cast<int>(w3)) << d << "  " << e << '\n';
    };
    line("target", "line", "status", "test", "description");
    for (const auto& r : rows)
        line(r.label, r.line, r.status, r.test, r.what);
    return out.str();
}

}  // namespace evotest::coverage
