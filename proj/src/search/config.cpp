#include <set>
#include <stdexcept>
#include <string>

#include "evotest/search/algorithms.hpp"

namespace evotest::search {

nlohmann::ordered_json to_json(const algorithm_config& config)
{
    nlohmann::ordered_json j;
    j["algorithm"] = to_string(config.kind);
    switch (config.kind) {
    case algorithm::random: break;
    case algorithm::hill_climb: j["steps"] = config.hill_climb.steps; break;
    case algorithm::annealing:
        j["temp0"] = config.annealing.initial_temperature;
        j["cooling"] = config.annealing.cooling;
        j["min_temperature"] = config.annealing.min_temperature;
        j["steps"] = config.annealing.steps;
        break;
    case algorithm::tabu:
        j["tenure"] = config.tabu.tenure;
        j["steps"] = config.tabu.steps;
        break;
    case algorithm::genetic:
        j["pop"] = config.ga.population;
        j["generations"] = config.ga.max_generations;
        j["pc"] = config.ga.crossover;
        if (config.ga.mutation)
            j["pm"] = *config.ga.mutation;
        else
            j["pm"] = nullptr;
        j["tournament"] = config.ga.tournament;
        j["elitism"] = config.ga.elitism;
        break;
    }
    return j;
}

algorithm_config algorithm_config_from_json(const nlohmann::json& j)
{
    if (!j.is_object())
        throw std::invalid_argument("algorithm config must be a JSON object");
    static const std::set<std::string> known{"algorithm", "steps", "temp0", "cooling",    "min_temperature",
                                             "tenure",    "pop",   "generations", "pc", "pm",
                                             "tournament", "elitism", "label"};
    for (const auto& [key, value] : j.items())
        if (!known.count(key))
            throw std::invalid_argument("unknown algorithm config key '" + key + "'");

    algorithm_config c;
    try {
        if (j.contains("algorithm")) {
            const auto name = j.at("algorithm").get<std::string>();
            auto kind = parse_algorithm(name);
            if (!kind)
                throw std::invalid_argument("unknown algorithm '" + name + "'");
            c.kind = *kind;
        }
        if (j.contains("steps")) {
            auto steps = j.at("steps").get<std::vector<std::int64_t>>();
            c.hill_climb.steps = c.annealing.steps = c.tabu.steps = steps;
        }
        if (j.contains("temp0"))
            c.annealing.initial_temperature = j.at("temp0").get<double>();
        if (j.contains("cooling"))
            c.annealing.cooling = j.at("cooling").get<double>();
        if (j.contains("min_temperature"))
            c.annealing.min_temperature = j.at("min_temperature").get<double>();
        if (j.contains("tenure"))
            c.tabu.tenure = j.at("tenure").get<std::size_t>();
        if (j.contains("pop"))
            c.ga.population = j.at("pop").get<std::size_t>();
        if (j.contains("generations"))
            c.ga.max_generations = j.at("generations").get<std::uint64_t>();
        if (j.contains("pc"))
            c.ga.crossover = j.at("pc").get<double>();
        if (j.contains("pm") && !j.at("pm").is_null())
            c.ga.mutation = j.at("pm").get<double>();
        if (j.contains("tournament"))
            c.ga.tournament = j.at("tournament").get<std::size_t>();
        if (j.contains("elitism"))
            c.ga.elitism = j.at("elitism").get<std::size_t>();
    } catch (const nlohmann::json::exception& e) {
        throw std::invalid_argument(std::string("bad algorithm config: ") + e.what());
    }
    c.validate();
    return c;
}

}  // namespace evotest::search
