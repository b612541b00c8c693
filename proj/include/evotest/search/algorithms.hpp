#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "evotest/search/problem.hpp"
#include "evotest/search/rng.hpp"

namespace evotest::search {

enum class algorithm : std::uint8_t { random, hill_climb, annealing, tabu, genetic };

[[nodiscard]] const char* to_string(algorithm a) noexcept;
/// Accepts the canonical names plus `hc`, `sa`, `ga`, `rs`.
[[nodiscard]] std::optional<algorithm> parse_algorithm(std::string_view text) noexcept;

struct hill_climb_config {
    std::vector<std::int64_t> steps{1, 10, 100};
};

struct annealing_config {
    double initial_temperature = 1.0;
    double cooling = 0.995;
    double min_temperature = 1e-9;
    std::vector<std::int64_t> steps{1, 10, 100};
};

struct tabu_config {
    std::size_t tenure = 10;
    std::vector<std::int64_t> steps{1, 10, 100};
};

struct ga_config {
    std::size_t population = 20;
    std::uint64_t max_generations = 0;  // 0: bounded by the budget only
    double crossover = 0.9;
    std::optional<double> mutation;     // per gene; empty means 1 / dimension
    std::size_t tournament = 2;
    std::size_t elitism = 1;
};

/// Algorithm choice plus the parameters of every algorithm; only the block
/// for `kind` is used.
struct algorithm_config {
    algorithm kind = algorithm::genetic;
    hill_climb_config hill_climb;
    annealing_config annealing;
    tabu_config tabu;
    ga_config ga;

    /// Throws std::invalid_argument for out-of-domain parameters.
    void validate() const;
};

/// Parameters of the selected algorithm only, plus `"algorithm"`.
[[nodiscard]] nlohmann::ordered_json to_json(const algorithm_config& config);
/// Reads `"algorithm"` and any parameter keys; missing keys keep defaults.
/// Throws std::invalid_argument for unknown algorithms or keys.
[[nodiscard]] algorithm_config algorithm_config_from_json(const nlohmann::json& j);

[[nodiscard]] search_result random_search(const problem& p, std::uint64_t budget, std::uint64_t seed,
                                          const search_observer* observer = nullptr);
[[nodiscard]] search_result hill_climb(const problem& p, const hill_climb_config& config, std::uint64_t budget,
                                       std::uint64_t seed, const search_observer* observer = nullptr);
[[nodiscard]] search_result simulated_annealing(const problem& p, const annealing_config& schedule,
                                                std::uint64_t budget, std::uint64_t seed,
                                                const search_observer* observer = nullptr);
[[nodiscard]] search_result tabu_search(const problem& p, const tabu_config& config, std::uint64_t budget,
                                        std::uint64_t seed, const search_observer* observer = nullptr);
[[nodiscard]] search_result genetic_algorithm(const problem& p, const ga_config& config, std::uint64_t budget,
                                              std::uint64_t seed, const search_observer* observer = nullptr);

/// Dispatches on `config.kind`. Throws std::invalid_argument for budget 0
/// or an invalid problem or config.
[[nodiscard]] search_result run_search(const problem& p, const algorithm_config& config, std::uint64_t budget,
                                       std::uint64_t seed, const search_observer* observer = nullptr);

/// exp(-delta / temperature) for worsening moves, 1 otherwise.
[[nodiscard]] double acceptance_probability(double delta, double temperature) noexcept;

/// Single-point crossover: genes before `cut` stay, the rest swap.
/// Requires equal lengths and 1 <= cut < length; throws std::invalid_argument.
[[nodiscard]] std::pair<genes, genes> crossover(std::span<const std::int64_t> a, std::span<const std::int64_t> b,
                                                std::size_t cut);

/// Redraws each gene uniformly from its range with probability `pm`.
[[nodiscard]] genes mutate(std::span<const std::int64_t> x, std::span<const value_range> ranges, double pm, rng& r);
[[nodiscard]] genes mutate(std::span<const std::int64_t> x, std::span<const value_range> ranges, double pm,
                           std::uint64_t seed);

/// Uniform point of the box.
[[nodiscard]] genes sample(std::span<const value_range> ranges, rng& r);

}  // namespace evotest::search
