#include "evotest/search/algorithms.hpp"

#include <algorithm>
#include <chrono>
#include <deque>
#include <numeric>
#include <stdexcept>

namespace evotest::search {

namespace {

using clock_type = std::chrono::steady_clock;

// Every algorithm draws its starting point(s) from this stream, so paired
// runs of different algorithms start from the same sample.
constexpr std::string_view init_stream = "init";

void check_start(const problem& p, std::uint64_t budget)
{
    p.validate();
    if (budget == 0)
        throw std::invalid_argument("search budget must be at least 1");
}

search_result finish(const evaluator& ev, std::uint64_t seed, clock_type::time_point start, std::vector<double> history)
{
    search_result r;
    r.best = ev.best();
    r.evaluations = ev.used();
    r.success = ev.solved();
    r.seed = seed;
    r.wall_seconds = std::chrono::duration<double>(clock_type::now() - start).count();
    r.history = std::move(history);
    return r;
}

// x[i] + delta clamped to the gene's range, without overflow.
std::int64_t shifted(std::int64_t v, std::int64_t delta, const value_range& range)
{
    __extension__ typedef __int128 wide;
    const wide t = static_cast<wide>(v) + delta;
    if (t < range.lo)
        return range.lo;
    if (t > range.hi)
        return range.hi;
    return static_cast<std::int64_t>(t);
}

// Neighbors in probe order: for each step size, each gene, +step then -step.
// Moves clamped back onto the current value are dropped.
std::vector<genes> neighborhood(const genes& x, std::span<const value_range> ranges,
                                std::span<const std::int64_t> steps)
{
    std::vector<genes> out;
    for (auto step : steps)
        for (std::size_t i = 0; i < x.size(); ++i)
            for (std::int64_t sign : {1, -1}) {
                const auto v = shifted(x[i], sign * step, ranges[i]);
                if (v == x[i])
                    continue;
                genes y = x;
                y[i] = v;
                out.push_back(std::move(y));
            }
    return out;
}

bool has_neighbors(std::span<const value_range> ranges)
{
    return std::any_of(ranges.begin(), ranges.end(), [](const value_range& r) { return r.lo < r.hi; });
}

void report_move(const search_observer* observer, const genes& x)
{
    if (observer && observer->moved)
        observer->moved(x);
}

void check_steps(const std::vector<std::int64_t>& steps, const char* who)
{
    if (steps.empty())
        throw std::invalid_argument(std::string(who) + ": step list must not be empty");
    for (auto s : steps)
        if (s <= 0)
            throw std::invalid_argument(std::string(who) + ": steps must be positive");
}

}  // namespace

const char* to_string(algorithm a) noexcept
{
    switch (a) {
    case algorithm::random: return "random";
    case algorithm::hill_climb: return "hill_climb";
    case algorithm::annealing: return "annealing";
    case algorithm::tabu: return "tabu";
    case algorithm::genetic: return "ga";
    }
    return "?";
}

std::optional<algorithm> parse_algorithm(std::string_view text) noexcept
{
    if (text == "random" || text == "rs")
        return algorithm::random;
    if (text == "hill_climb" || text == "hc" || text == "hill-climb")
        return algorithm::hill_climb;
    if (text == "annealing" || text == "sa" || text == "simulated_annealing")
        return algorithm::annealing;
    if (text == "tabu" || text == "ts" || text == "tabu_search")
        return algorithm::tabu;
    if (text == "ga" || text == "genetic")
        return algorithm::genetic;
    return std::nullopt;
}

void algorithm_config::validate() const
{
    check_steps(hill_climb.steps, "hill_climb");
    check_steps(annealing.steps, "annealing");
    check_steps(tabu.steps, "tabu");
    if (!(annealing.initial_temperature > 0.0))
        throw std::invalid_argument("annealing: initial temperature must be positive");
    if (!(annealing.cooling > 0.0 && annealing.cooling < 1.0))
        throw std::invalid_argument("annealing: cooling factor must lie in (0, 1)");
    if (!(annealing.min_temperature > 0.0))
        throw std::invalid_argument("annealing: minimum temperature must be positive");
    if (tabu.tenure < 1)
        throw std::invalid_argument("tabu: tenure must be at least 1");
    if (ga.population < 2)
        throw std::invalid_argument("ga: population must be at least 2");
    if (ga.elitism >= ga.population)
        throw std::invalid_argument("ga: elitism must be smaller than the population");
    if (ga.tournament < 1)
        throw std::invalid_argument("ga: tournament size must be at least 1");
    if (!(ga.crossover >= 0.0 && ga.crossover <= 1.0))
        throw std::invalid_argument("ga: crossover probability must lie in [0, 1]");
    if (ga.mutation && !(*ga.mutation >= 0.0 && *ga.mutation <= 1.0))
        throw std::invalid_argument("ga: mutation probability must lie in [0, 1]");
}

search_result random_search(const problem& p, std::uint64_t budget, std::uint64_t seed,
                            const search_observer* observer)
{
    check_start(p, budget);
    const auto start = clock_type::now();
    evaluator ev{p, budget, observer};
    rng init{seed, init_stream};
    std::vector<double> history;
    while (!ev.done()) {
        (void)ev(sample(p.ranges, init));
        history.push_back(ev.best().cost);
    }
    return finish(ev, seed, start, std::move(history));
}

search_result hill_climb(const problem& p, const hill_climb_config& config, std::uint64_t budget,
                         std::uint64_t seed, const search_observer* observer)
{
    check_start(p, budget);
    check_steps(config.steps, "hill_climb");
    const auto start = clock_type::now();
    evaluator ev{p, budget, observer};
    rng init{seed, init_stream};
    rng own{seed, "hill_climb"};
    std::vector<double> history;

    genes x = sample(p.ranges, init);
    double cx = *ev(x);
    history.push_back(cx);
    while (!ev.done()) {
        bool improved = false;
        for (auto& y : neighborhood(x, p.ranges, config.steps)) {
            auto cy = ev(y);
            if (!cy)
                break;
            if (*cy < cx) {
                x = std::move(y);
                cx = *cy;
                improved = true;
                break;
            }
        }
        if (!improved && !ev.done()) {
            // Local optimum: restart from a fresh random point.
            x = sample(p.ranges, own);
            cx = *ev(x);
        }
        report_move(observer, x);
        history.push_back(cx);
    }
    return finish(ev, seed, start, std::move(history));
}

search_result simulated_annealing(const problem& p, const annealing_config& schedule, std::uint64_t budget,
                                  std::uint64_t seed, const search_observer* observer)
{
    check_start(p, budget);
    algorithm_config check;
    check.annealing = schedule;
    check.validate();
    const auto start = clock_type::now();
    evaluator ev{p, budget, observer};
    rng init{seed, init_stream};
    rng own{seed, "annealing"};
    std::vector<double> history;

    genes x = sample(p.ranges, init);
    double cx = *ev(x);
    history.push_back(cx);
    if (!has_neighbors(p.ranges))
        return finish(ev, seed, start, std::move(history));

    double temperature = schedule.initial_temperature;
    while (!ev.done()) {
        const auto i = own.index(x.size());
        const auto step = schedule.steps[own.index(schedule.steps.size())];
        const std::int64_t sign = own.chance(0.5) ? 1 : -1;
        const auto v = shifted(x[i], sign * step, p.ranges[i]);
        if (v == x[i])
            continue;
        genes y = x;
        y[i] = v;
        const double cy = *ev(y);
        const double delta = cy - cx;
        if (delta <= 0.0 || own.unit() < acceptance_probability(delta, temperature)) {
            x = std::move(y);
            cx = cy;
        }
        temperature = std::max(temperature * schedule.cooling, schedule.min_temperature);
        report_move(observer, x);
        history.push_back(cx);
    }
    return finish(ev, seed, start, std::move(history));
}

search_result tabu_search(const problem& p, const tabu_config& config, std::uint64_t budget, std::uint64_t seed,
                          const search_observer* observer)
{
    check_start(p, budget);
    check_steps(config.steps, "tabu");
    if (config.tenure < 1)
        throw std::invalid_argument("tabu: tenure must be at least 1");
    const auto start = clock_type::now();
    evaluator ev{p, budget, observer};
    rng init{seed, init_stream};
    rng own{seed, "tabu"};
    std::vector<double> history;
    // A move that set gene `first` away from value `second` makes setting it
    // back tabu. Oldest entry first.
    std::deque<std::pair<std::size_t, std::int64_t>> tabu;

    genes x = sample(p.ranges, init);
    double cx = *ev(x);
    history.push_back(cx);
    if (!has_neighbors(p.ranges))
        return finish(ev, seed, start, std::move(history));

    auto changed_gene = [&x](const genes& y) {
        std::size_t i = 0;
        while (y[i] == x[i])
            ++i;
        return i;
    };

    while (!ev.done()) {
        const double global_best = ev.best().cost;
        std::optional<std::size_t> chosen;
        double chosen_cost = 0.0;
        bool chosen_tabu = false;
        auto candidates = neighborhood(x, p.ranges, config.steps);
        for (std::size_t k = 0; k < candidates.size(); ++k) {
            auto cy = ev(candidates[k]);
            if (!cy)
                break;
            const std::size_t i = changed_gene(candidates[k]);
            const bool is_tabu =
                std::find(tabu.begin(), tabu.end(), std::pair{i, candidates[k][i]}) != tabu.end();
            const bool admissible = !is_tabu || *cy < global_best;
            if (admissible && (!chosen || *cy < chosen_cost)) {
                chosen = k;
                chosen_cost = *cy;
                chosen_tabu = is_tabu;
            }
            if (ev.solved())
                break;
        }
        if (ev.done())
            break;
        if (chosen) {
            const std::size_t i = changed_gene(candidates[*chosen]);
            tabu.emplace_back(i, x[i]);
            if (tabu.size() > config.tenure)
                tabu.pop_front();
            if (observer && observer->tabu_size)
                observer->tabu_size(tabu.size());
            if (chosen_tabu && observer && observer->aspiration)
                observer->aspiration(candidates[*chosen], chosen_cost, global_best);
            x = std::move(candidates[*chosen]);
            cx = chosen_cost;
        } else {
            // Every neighbor is tabu and none beats the best: jump elsewhere.
            x = sample(p.ranges, own);
            cx = *ev(x);
        }
        report_move(observer, x);
        history.push_back(cx);
    }
    return finish(ev, seed, start, std::move(history));
}

search_result genetic_algorithm(const problem& p, const ga_config& config, std::uint64_t budget, std::uint64_t seed,
                                const search_observer* observer)
{
    check_start(p, budget);
    algorithm_config check;
    check.ga = config;
    check.validate();
    const auto start = clock_type::now();
    evaluator ev{p, budget, observer};
    rng init{seed, init_stream};
    rng own{seed, "genetic"};
    const std::size_t dim = p.dimension();
    const double pm = config.mutation.value_or(1.0 / static_cast<double>(dim));
    std::vector<double> history;

    std::vector<individual> pop;
    pop.reserve(config.population);
    while (pop.size() < config.population && !ev.done()) {
        genes x = sample(p.ranges, init);
        const double c = *ev(x);
        pop.push_back({std::move(x), c});
    }
    auto report = [&] {
        std::vector<double> costs(pop.size());
        std::transform(pop.begin(), pop.end(), costs.begin(), [](const individual& i) { return i.cost; });
        history.push_back(*std::min_element(costs.begin(), costs.end()));
        if (observer && observer->generation)
            observer->generation(costs);
    };
    if (pop.size() < config.population)
        return finish(ev, seed, start, std::move(history));
    report();

    auto tournament = [&]() {
        std::size_t winner = own.index(pop.size());
        for (std::size_t k = 1; k < config.tournament; ++k) {
            const std::size_t rival = own.index(pop.size());
            if (pop[rival].cost < pop[winner].cost || (pop[rival].cost == pop[winner].cost && rival < winner))
                winner = rival;
        }
        return winner;
    };

    std::vector<std::size_t> order(pop.size());
    for (std::uint64_t gen = 0; !ev.done() && (config.max_generations == 0 || gen < config.max_generations); ++gen) {
        std::iota(order.begin(), order.end(), std::size_t{0});
        std::stable_sort(order.begin(), order.end(),
                         [&](std::size_t a, std::size_t b) { return pop[a].cost < pop[b].cost; });
        std::vector<individual> next;
        next.reserve(pop.size());
        for (std::size_t e = 0; e < config.elitism; ++e)
            next.push_back(pop[order[e]]);

        while (next.size() < pop.size() && !ev.done()) {
            const auto& a = pop[tournament()].values;
            const auto& b = pop[tournament()].values;
            genes c1 = a, c2 = b;
            if (dim > 1 && own.chance(config.crossover))
                std::tie(c1, c2) = crossover(a, b, 1 + own.index(dim - 1));
            for (genes* child : {&c1, &c2}) {
                if (next.size() == pop.size() || ev.done())
                    break;
                genes m = mutate(*child, p.ranges, pm, own);
                const double c = *ev(m);
                next.push_back({std::move(m), c});
            }
        }
        if (next.size() < pop.size())
            break;  // stopped mid-generation; the evaluator keeps the best
        pop = std::move(next);
        report();
    }
    return finish(ev, seed, start, std::move(history));
}

search_result run_search(const problem& p, const algorithm_config& config, std::uint64_t budget, std::uint64_t seed,
                         const search_observer* observer)
{
    config.validate();
    switch (config.kind) {
    case algorithm::random: return random_search(p, budget, seed, observer);
    case algorithm::hill_climb: return hill_climb(p, config.hill_climb, budget, seed, observer);
    case algorithm::annealing: return simulated_annealing(p, config.annealing, budget, seed, observer);
    case algorithm::tabu: return tabu_search(p, config.tabu, budget, seed, observer);
    case algorithm::genetic: return genetic_algorithm(p, config.ga, budget, seed, observer);
    }
    throw std::invalid_argument("unknown algorithm");
}

}  // namespace evotest::search
