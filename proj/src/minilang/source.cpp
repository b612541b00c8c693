#include "evotest/minilang/source.hpp"

#include <fstream>
#include <limits>
#include <regex>
#include <set>
#include <sstream>

namespace evotest::minilang {

std::uint64_t value_range::size() const noexcept
{
    if (hi < lo)
        return 0;
    const auto span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    return span == std::numeric_limits<std::uint64_t>::max() ? span : span + 1;
}

namespace {

std::string located(const std::string& message, int line, int column)
{
    if (line <= 0)
        return message;
    return std::to_string(line) + ":" + std::to_string(column) + ": " + message;
}

}  // namespace

parse_error::parse_error(const std::string& message, int line, int column)
    : std::runtime_error(located(message, line, column)), detail_{message}, line_{line}, column_{column}
{
}

std::vector<input_decl> parse_input_header(const std::string& text)
{
    static const std::regex marker{R"(^\s*//\s*input\b)"};
    static const std::regex declaration{
        R"(^\s*//\s*input\s+([A-Za-z_]\w*)\s*(?:\[\s*(\d+)\s*\])?\s+in\s+\[\s*([-+]?\d+)\s*,\s*([-+]?\d+)\s*\]\s*$)"};

    std::vector<input_decl> inputs;
    std::set<std::string> seen;
    std::istringstream lines{text};
    std::string line;
    int number = 0;
    while (std::getline(lines, line)) {
        ++number;
        if (!line.empty() && line.back() == '\r')
            line.pop_back();
        if (!std::regex_search(line, marker))
            continue;
        std::smatch m;
        if (!std::regex_match(line, m, declaration))
            throw parse_error("malformed input declaration (expected `// input NAME in [LO, HI]`)", number, 1);
        input_decl decl;
        decl.name = m[1].str();
        try {
            decl.range = {std::stoll(m[3].str()), std::stoll(m[4].str())};
            if (m[2].matched)
                decl.length = static_cast<std::size_t>(std::stoul(m[2].str()));
        } catch (const std::out_of_range&) {
            throw parse_error("input declaration value out of range", number, 1);
        }
        if (m[2].matched && decl.length == 0)
            throw parse_error("input array '" + decl.name + "' must have positive length", number, 1);
        if (decl.range.lo > decl.range.hi)
            throw parse_error("input '" + decl.name + "' has lower bound above upper bound", number, 1);
        if (!seen.insert(decl.name).second)
            throw parse_error("duplicate input declaration '" + decl.name + "'", number, 1);
        inputs.push_back(std::move(decl));
    }
    return inputs;
}

source_program make_source(std::string name, std::string text)
{
    auto inputs = parse_input_header(text);
    return {std::move(name), std::move(text), std::move(inputs)};
}

source_program load_source(const std::filesystem::path& path)
{
    std::ifstream in{path, std::ios::binary};
    if (!in)
        throw std::runtime_error("cannot open '" + path.string() + "'");
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return make_source(path.stem().string(), buffer.str());
}

void validate_inputs(const std::vector<input_decl>& inputs)
{
    std::set<std::string> seen;
    for (const auto& in : inputs) {
        if (in.name.empty())
            throw parse_error("input with empty name", 0, 0);
        if (in.range.lo > in.range.hi)
            throw parse_error("input '" + in.name + "' has lower bound above upper bound", 0, 0);
        if (!seen.insert(in.name).second)
            throw parse_error("duplicate input declaration '" + in.name + "'", 0, 0);
    }
}

}  // namespace evotest::minilang
