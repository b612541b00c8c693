#include "evotest/harness/corpus.hpp"

#include <algorithm>
#include <cstdlib>
#include <regex>
#include <sstream>
#include <stdexcept>

#ifndef EVOTEST_BENCHMARK_DIR
#define EVOTEST_BENCHMARK_DIR "benchmarks"
#endif

namespace evotest::harness {

namespace fs = std::filesystem;

benchmark load_benchmark(const fs::path& path)
{
    benchmark b;
    b.path = path;
    b.source = minilang::load_source(path);
    const auto prog = minilang::parse(b.source);

    static const std::regex expect_re(R"(^\s*//\s*expect\s+decisions\s+(\d+)\s*$)");
    static const std::regex hard_re(R"(^\s*//\s*hard\s+(.*)$)");
    std::istringstream lines(b.source.text);
    std::string line;
    int number = 0;
    while (std::getline(lines, line)) {
        ++number;
        std::smatch m;
        if (std::regex_match(line, m, expect_re)) {
            b.expected_decisions = std::stoul(m[1].str());
        } else if (std::regex_match(line, m, hard_re)) {
            std::istringstream words(m[1].str());
            std::string word;
            while (words >> word) {
                auto t = coverage::parse_label(word);
                if (!t || t->index() >= coverage::target_count(prog, t->kind))
                    throw minilang::parse_error("bad hard target '" + word + "'", number, 1);
                b.hard_targets.push_back(*t);
            }
        }
    }
    if (b.expected_decisions && *b.expected_decisions != prog.decisions().size())
        throw std::runtime_error(path.string() + ": header expects " + std::to_string(*b.expected_decisions) +
                                 " decisions, program has " + std::to_string(prog.decisions().size()));
    return b;
}

std::vector<benchmark> load_corpus(const fs::path& dir)
{
    if (!fs::is_directory(dir))
        throw std::runtime_error("benchmark directory '" + dir.string() + "' does not exist");
    std::vector<fs::path> files;
    for (const auto& entry : fs::directory_iterator(dir))
        if (entry.is_regular_file() && entry.path().extension() == ".minic")
            files.push_back(entry.path());
    std::sort(files.begin(), files.end());
    std::vector<benchmark> out;
    out.reserve(files.size());
    for (const auto& f : files)
        out.push_back(load_benchmark(f));
    return out;
}

fs::path default_corpus_dir()
{
    if (const char* env = std::getenv("EVOTEST_BENCHMARKS"); env && *env)
        return env;
    if (fs::is_directory("benchmarks"))
        return "benchmarks";
    return EVOTEST_BENCHMARK_DIR;
}

std::string describe_ranges(const std::vector<minilang::input_decl>& inputs)
{
    std::string out;
    for (const auto& in : inputs) {
        if (!out.empty())
            out += ' ';
        out += in.name;
        if (in.length > 0)
            out += "[" + std::to_string(in.length) + "]";
        out += ":[" + std::to_string(in.range.lo) + "," + std::to_string(in.range.hi) + "]";
    }
    return out;
}

}  // namespace evotest::harness
