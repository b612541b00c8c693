#include "evotest/minilang/dependence.hpp"

#include <stdexcept>

namespace evotest::minilang {

std::vector<branch> guard_chain(const program& prog, const std::optional<branch>& guard)
{
    std::vector<branch> chain;
    for (auto edge = guard; edge; edge = prog.decision(edge->decision).guard) {
        if (chain.size() > prog.decisions().size())
            throw std::logic_error("cyclic control dependence");
        chain.push_back(*edge);
    }
    return chain;
}

dependence_map control_dependence(const program& prog)
{
    std::vector<std::vector<branch>> chains;
    chains.reserve(prog.decisions().size());
    for (const auto& d : prog.decisions())
        chains.push_back(guard_chain(prog, d.guard));
    return dependence_map{std::move(chains)};
}

}  // namespace evotest::minilang
