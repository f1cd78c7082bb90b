#pragma once

#include "orchard_duo/analytics.hpp"
#include "orchard_duo/integrator.hpp"
#include "orchard_duo/model.hpp"
#include "orchard_duo/rng.hpp"

#include <array>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

namespace orchard_duo {

using Genes = std::array<double, 4>;

struct GaConfig {
    std::size_t population_size = 100; ///< M
    std::size_t mating_pool_size = 20; ///< N
    double mutation_prob = 0.1;
    std::size_t max_generations = 30;
    double r_obj = 2000.0;
    std::optional<double> r1_target;
    std::optional<double> r2_target;
    /// Band on the total |r1 + r2 - r_obj|. Unset means 1% of r_obj. Each
    /// per-orchard target gets the same relative band, tol * target / r_obj.
    std::optional<double> feasibility_tol;
    double penalty_scale = 1e3;
    StrategyKind strategy = StrategyKind::Mechanical;
    std::uint64_t seed = 0;
    CostWeights weights;
    std::size_t stall_generations = 5;
    double stall_tol = 1e-9;
    unsigned threads = 1;
    IntegratorOptions integrator;

    double resolved_feasibility_tol() const { return feasibility_tol.value_or(0.01 * r_obj); }
    /// penalty_scale * max(w1, |w2|), falling back to penalty_scale when both weights vanish.
    double penalty() const;
    /// Throws ConfigInvalid naming the field.
    void validate() const;

    friend bool operator==(const GaConfig&, const GaConfig&) = default;
};

struct Individual {
    Genes genes{};
    double r1_final = 0.0;
    double r2_final = 0.0;
    double cost = 0.0;
    double ef1 = 0.0;
    double ef2 = 0.0;
    double objective_j = 0.0;
    double fitness = 0.0; ///< lower is better
    bool feasible = false;
    /// False when the epidemic did not settle before the horizon (or blew
    /// up); such an individual carries the worst possible fitness.
    bool converged = true;

    friend bool operator==(const Individual&, const Individual&) = default;
};

struct GaResult {
    std::vector<Individual> best_per_generation; ///< elite of generations 0, 1, ...
    Individual final_best;
    std::optional<std::size_t> generations_to_target; ///< first generation with a feasible elite
    std::size_t generations_run = 0;
    bool stalled = false; ///< stopped by the stall rule rather than max_generations
};

/// Genes are stored as 16-bit fixed point: value k / 65536, k in [0, 65535].
std::uint16_t encode_gene(double gene);
double decode_gene(std::uint16_t bits);
/// Gene 1 occupies the most significant 16 bits.
std::uint64_t encode_chromosome(const Genes& genes);
Genes decode_chromosome(std::uint64_t chromosome);

/// Installs the genes, integrates to steady state, and fills in finals, cost,
/// effectiveness, J and fitness.
Individual evaluate(const Genes& genes, const Scenario& scenario_template, const GaConfig& config);

/// Penalty on the total and per-orchard roguing targets plus J. Sets
/// `individual.feasible` and returns the fitness (also stored).
double fitness(Individual& individual, const GaConfig& config);

/// Two-point crossover on the 64-bit chromosomes with cut points
/// 0 <= first < second <= 64 counted from the most significant bit.
std::pair<Genes, Genes> crossover(const Genes& father, const Genes& mother, std::size_t first_cut,
                                  std::size_t second_cut);

/// Draws two distinct cuts from {0, ..., 64} and crosses.
std::pair<Genes, Genes> crossover(const Genes& father, const Genes& mother, Rng& rng);

/// Each gene is redrawn on the 16-bit grid with probability mutation_prob.
Genes mutate(const Genes& genes, const GaConfig& config, Rng& rng);

/// Total order used for selection: fitness, then J, then genes.
bool better(const Individual& a, const Individual& b);

GaResult run(const Scenario& scenario_template, const GaConfig& config);

} // namespace orchard_duo
