#include <cmath>
#include <stdexcept>
#include <string>

#include "evotest/search/algorithms.hpp"

namespace evotest::search {

namespace {

std::uint64_t splitmix64(std::uint64_t x) noexcept
{
    x += 0x9e3779b97f4a7c15ULL;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
    return x ^ (x >> 31);
}

}  // namespace

std::uint64_t derive_seed(std::uint64_t base, std::string_view stream) noexcept
{
    std::uint64_t h = 0xcbf29ce484222325ULL;
    for (unsigned char c : stream) {
        h ^= c;
        h *= 0x100000001b3ULL;
    }
    return splitmix64(splitmix64(base) ^ h);
}

std::int64_t rng::uniform(std::int64_t lo, std::int64_t hi)
{
    if (lo > hi)
        throw std::invalid_argument("rng::uniform: empty range");
    const std::uint64_t span = static_cast<std::uint64_t>(hi) - static_cast<std::uint64_t>(lo);
    if (span == UINT64_MAX)
        return static_cast<std::int64_t>(next());
    const std::uint64_t n = span + 1;
    const std::uint64_t reject_below = (0 - n) % n;  // 2^64 mod n
    std::uint64_t x = next();
    while (x < reject_below)
        x = next();
    return static_cast<std::int64_t>(static_cast<std::uint64_t>(lo) + x % n);
}

std::size_t rng::index(std::size_t n)
{
    if (n == 0)
        throw std::invalid_argument("rng::index: n must be positive");
    return static_cast<std::size_t>(uniform(0, static_cast<std::int64_t>(n - 1)));
}

void problem::validate() const
{
    if (ranges.empty())
        throw std::invalid_argument("problem dimension must be at least 1");
    for (std::size_t i = 0; i < ranges.size(); ++i)
        if (ranges[i].lo > ranges[i].hi)
            throw std::invalid_argument("gene " + std::to_string(i) + " has an inverted range");
    if (!cost)
        throw std::invalid_argument("problem has no cost function");
}

evaluator::evaluator(const problem& p, std::uint64_t budget, const search_observer* observer)
    : problem_{p}, budget_{budget}, observer_{observer}
{
}

std::optional<double> evaluator::operator()(std::span<const std::int64_t> x)
{
    if (exhausted())
        return std::nullopt;
    if (x.size() != problem_.ranges.size())
        throw std::logic_error("candidate has " + std::to_string(x.size()) + " genes, expected " +
                               std::to_string(problem_.ranges.size()));
    for (std::size_t i = 0; i < x.size(); ++i)
        if (!problem_.ranges[i].contains(x[i]))
            throw std::logic_error("gene " + std::to_string(i) + " = " + std::to_string(x[i]) + " is out of range");
    ++used_;
    const double c = problem_.cost(x);
    if (!(c >= 0.0))
        throw std::logic_error("cost function returned a negative or NaN value");
    if (c < best_.cost) {
        best_.values.assign(x.begin(), x.end());
        best_.cost = c;
    }
    if (observer_ && observer_->evaluated)
        observer_->evaluated(x, c);
    return c;
}

double acceptance_probability(double delta, double temperature) noexcept
{
    if (delta <= 0.0)
        return 1.0;
    if (!(temperature > 0.0))
        return 0.0;
    return std::exp(-delta / temperature);
}

std::pair<genes, genes> crossover(std::span<const std::int64_t> a, std::span<const std::int64_t> b, std::size_t cut)
{
    if (a.size() != b.size())
        throw std::invalid_argument("crossover parents differ in length");
    if (cut < 1 || cut >= a.size())
        throw std::invalid_argument("crossover cut " + std::to_string(cut) + " outside [1, " +
                                    std::to_string(a.size()) + ")");
    genes x(a.begin(), a.end());
    genes y(b.begin(), b.end());
    for (std::size_t i = cut; i < a.size(); ++i)
        std::swap(x[i], y[i]);
    return {std::move(x), std::move(y)};
}

genes mutate(std::span<const std::int64_t> x, std::span<const value_range> ranges, double pm, rng& r)
{
    if (!(pm >= 0.0 && pm <= 1.0))
        throw std::invalid_argument("mutation probability must lie in [0, 1]");
    if (x.size() != ranges.size())
        throw std::invalid_argument("individual and ranges differ in length");
    genes out(x.begin(), x.end());
    for (std::size_t i = 0; i < out.size(); ++i)
        if (r.chance(pm))
            out[i] = r.uniform(ranges[i].lo, ranges[i].hi);
    return out;
}

genes mutate(std::span<const std::int64_t> x, std::span<const value_range> ranges, double pm, std::uint64_t seed)
{
    rng r{seed, "mutate"};
    return mutate(x, ranges, pm, r);
}

genes sample(std::span<const value_range> ranges, rng& r)
{
    genes out;
    out.reserve(ranges.size());
    for (const auto& range : ranges)
        out.push_back(r.uniform(range.lo, range.hi));
    return out;
}

}  // namespace evotest::search
