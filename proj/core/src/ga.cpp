#include "orchard_duo/ga.hpp"

#include "orchard_duo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <string>
#include <thread>

namespace orchard_duo {

namespace {

constexpr double kWorst = std::numeric_limits<double>::max();
constexpr double kGeneScale = 65536.0;

void config_error(const std::string& field, const std::string& what)
{
    throw Error(ErrorCode::ConfigInvalid, field + " " + what, field);
}

std::uint64_t segment_mask(std::size_t first, std::size_t second)
{
    const std::size_t width = second - first;
    if (width == 0) {
        return 0;
    }
    if (width == 64) {
        return ~std::uint64_t{0};
    }
    return ((std::uint64_t{1} << width) - 1) << (64 - second);
}

Genes random_genes(Rng& rng)
{
    Genes g;
    for (double& v : g) {
        v = decode_gene(static_cast<std::uint16_t>(rng.below(65536)));
    }
    return g;
}

void evaluate_all(std::vector<Individual>& batch, const Scenario& scenario_template, const GaConfig& config)
{
    const std::size_t n = batch.size();
    const unsigned threads = std::max(1u, std::min<unsigned>(config.threads, static_cast<unsigned>(n)));
    if (threads <= 1) {
        for (Individual& ind : batch) {
            ind = evaluate(ind.genes, scenario_template, config);
        }
        return;
    }
    std::vector<std::thread> pool;
    std::vector<std::exception_ptr> errors(threads);
    for (unsigned w = 0; w < threads; ++w) {
        pool.emplace_back([&, w] {
            try {
                // Strided assignment; each slot is written by exactly one worker.
                for (std::size_t k = w; k < n; k += threads) {
                    batch[k] = evaluate(batch[k].genes, scenario_template, config);
                }
            } catch (...) {
                errors[w] = std::current_exception();
            }
        });
    }
    for (auto& t : pool) {
        t.join();
    }
    for (const auto& e : errors) {
        if (e) {
            std::rethrow_exception(e);
        }
    }
}

} // namespace

double GaConfig::penalty() const
{
    const double w_scale = std::max(weights.w1, std::abs(weights.w2));
    return penalty_scale * (w_scale > 0.0 ? w_scale : 1.0);
}

void GaConfig::validate() const
{
    if (mating_pool_size < 2) {
        config_error("ga.mating_pool_size", "must be >= 2");
    }
    if (population_size <= mating_pool_size) {
        config_error("ga.population_size", "must exceed ga.mating_pool_size");
    }
    if (!(mutation_prob >= 0.0 && mutation_prob <= 1.0)) {
        config_error("ga.mutation_prob", "must lie in [0,1]");
    }
    if (!(r_obj > 0.0) || !std::isfinite(r_obj)) {
        config_error("ga.r_obj", "must be finite and > 0");
    }
    if (r1_target.has_value() != r2_target.has_value()) {
        config_error("ga.r1_target", "and ga.r2_target must be given together");
    }
    if (r1_target) {
        if (*r1_target < 0.0 || *r2_target < 0.0) {
            config_error("ga.r1_target", "targets must be >= 0");
        }
        if (std::abs(*r1_target + *r2_target - r_obj) > 1e-9 * r_obj) {
            config_error("ga.r1_target", "targets must sum to ga.r_obj");
        }
    }
    if (!(resolved_feasibility_tol() > 0.0)) {
        config_error("ga.feasibility_tol", "must be > 0");
    }
    if (!(penalty_scale > 0.0) || !std::isfinite(penalty_scale)) {
        config_error("ga.penalty_scale", "must be finite and > 0");
    }
    if (stall_generations == 0) {
        config_error("ga.stall_generations", "must be >= 1");
    }
    if (!(stall_tol >= 0.0)) {
        config_error("ga.stall_tol", "must be >= 0");
    }
    weights.validate();
}

std::uint16_t encode_gene(double gene)
{
    const double k = std::floor(gene * kGeneScale);
    return static_cast<std::uint16_t>(std::clamp(k, 0.0, kGeneScale - 1.0));
}

double decode_gene(std::uint16_t bits)
{
    return static_cast<double>(bits) / kGeneScale;
}

std::uint64_t encode_chromosome(const Genes& genes)
{
    std::uint64_t c = 0;
    for (double g : genes) {
        c = (c << 16) | encode_gene(g);
    }
    return c;
}

Genes decode_chromosome(std::uint64_t chromosome)
{
    Genes g;
    for (std::size_t k = 0; k < 4; ++k) {
        g[k] = decode_gene(static_cast<std::uint16_t>(chromosome >> (48 - 16 * k)));
    }
    return g;
}

Individual evaluate(const Genes& genes, const Scenario& scenario_template, const GaConfig& config)
{
    Individual ind;
    ind.genes = genes;
    Scenario s = scenario_template;
    s.strategy = config.strategy;
    install_controls(s, genes);

    IntegratorOptions opts = config.integrator;
    opts.require_termination = true;
    try {
        const EpidemicSummary summary = summarize(integrate(s, opts), s);
        const ObjectiveValue obj = objective(s, config.weights, summary);
        ind.r1_final = summary.orchard(1).r_final;
        ind.r2_final = summary.orchard(2).r_final;
        ind.cost = obj.cost.reduced();
        ind.ef1 = obj.ef1;
        ind.ef2 = obj.ef2;
        ind.objective_j = obj.j;
    } catch (const Error& e) {
        if (e.code() != ErrorCode::NonConvergence && e.code() != ErrorCode::NonFiniteState) {
            throw;
        }
        ind.converged = false;
        ind.cost = kWorst;
        ind.objective_j = kWorst;
        ind.fitness = kWorst;
        ind.feasible = false;
        return ind;
    }
    fitness(ind, config);
    return ind;
}

double fitness(Individual& ind, const GaConfig& config)
{
    if (!ind.converged) {
        ind.feasible = false;
        ind.fitness = kWorst;
        return ind.fitness;
    }
    const double p = config.penalty();
    const double tol = config.resolved_feasibility_tol();
    double penalty = std::max(0.0, std::abs(ind.r1_final + ind.r2_final - config.r_obj) - tol);
    if (config.r1_target && config.r2_target) {
        const double tol1 = tol * *config.r1_target / config.r_obj;
        const double tol2 = tol * *config.r2_target / config.r_obj;
        penalty += std::max(0.0, std::abs(ind.r1_final - *config.r1_target) - tol1);
        penalty += std::max(0.0, std::abs(ind.r2_final - *config.r2_target) - tol2);
    }
    ind.feasible = penalty == 0.0;
    ind.fitness = p * penalty + ind.objective_j;
    return ind.fitness;
}

std::pair<Genes, Genes> crossover(const Genes& father, const Genes& mother, std::size_t first_cut,
                                  std::size_t second_cut)
{
    if (first_cut > second_cut) {
        std::swap(first_cut, second_cut);
    }
    if (second_cut > 64) {
        throw Error(ErrorCode::InvalidRange, "crossover cut beyond bit 64");
    }
    const std::uint64_t mask = segment_mask(first_cut, second_cut);
    const std::uint64_t f = encode_chromosome(father);
    const std::uint64_t m = encode_chromosome(mother);
    return {decode_chromosome((f & ~mask) | (m & mask)), decode_chromosome((m & ~mask) | (f & mask))};
}

std::pair<Genes, Genes> crossover(const Genes& father, const Genes& mother, Rng& rng)
{
    const auto a = static_cast<std::size_t>(rng.below(65));
    auto b = static_cast<std::size_t>(rng.below(65));
    while (b == a) {
        b = static_cast<std::size_t>(rng.below(65));
    }
    return crossover(father, mother, std::min(a, b), std::max(a, b));
}

Genes mutate(const Genes& genes, const GaConfig& config, Rng& rng)
{
    Genes out = genes;
    for (double& g : out) {
        if (rng.uniform() < config.mutation_prob) {
            g = decode_gene(static_cast<std::uint16_t>(rng.below(65536)));
        }
    }
    return out;
}

bool better(const Individual& a, const Individual& b)
{
    if (a.fitness != b.fitness) {
        return a.fitness < b.fitness;
    }
    if (a.objective_j != b.objective_j) {
        return a.objective_j < b.objective_j;
    }
    return a.genes < b.genes;
}

GaResult run(const Scenario& scenario_template, const GaConfig& config)
{
    config.validate();
    Scenario tmpl = scenario_template;
    tmpl.strategy = config.strategy;
    install_controls(tmpl, {0.0, 0.0, 0.0, 0.0});
    tmpl.validate();

    Rng rng(config.seed);
    const std::size_t m = config.population_size;
    const std::size_t pool = config.mating_pool_size;

    std::vector<Individual> population(m);
    for (Individual& ind : population) {
        ind.genes = random_genes(rng);
    }
    evaluate_all(population, tmpl, config);

    GaResult result;
    std::size_t stall = 0;
    double best_so_far = kWorst;
    for (std::size_t gen = 0;; ++gen) {
        std::sort(population.begin(), population.end(), better);
        const Individual& elite = population.front();
        result.best_per_generation.push_back(elite);
        if (elite.feasible && !result.generations_to_target) {
            result.generations_to_target = gen;
        }
        if (gen > 0 && !(elite.fitness < best_so_far - config.stall_tol)) {
            ++stall;
        } else {
            stall = 0;
        }
        best_so_far = std::min(best_so_far, elite.fitness);
        result.generations_run = gen;
        if (elite.feasible && stall >= config.stall_generations) {
            result.stalled = true;
            break;
        }
        if (gen >= config.max_generations) {
            break;
        }

        // Mating pool: the N best after the elite, each crossed with the elite.
        std::vector<Individual> children;
        children.reserve(m);
        auto push = [&](const Genes& g) {
            if (children.size() < m - 1) {
                Individual c;
                c.genes = mutate(g, config, rng);
                children.push_back(c);
            }
        };
        for (std::size_t k = 1; k <= pool && k < m; ++k) {
            const auto [c1, c2] = crossover(elite.genes, population[k].genes, rng);
            push(c1);
            push(c2);
        }
        // Survival: random pairs drawn from everyone but the elite.
        while (children.size() < m - 1) {
            const std::size_t a = 1 + static_cast<std::size_t>(rng.below(m - 1));
            std::size_t b = 1 + static_cast<std::size_t>(rng.below(m - 1));
            while (b == a) {
                b = 1 + static_cast<std::size_t>(rng.below(m - 1));
            }
            const auto [c1, c2] = crossover(population[a].genes, population[b].genes, rng);
            push(c1);
            push(c2);
        }
        evaluate_all(children, tmpl, config);

        std::vector<Individual> next;
        next.reserve(m);
        next.push_back(elite);
        next.insert(next.end(), children.begin(), children.end());
        population = std::move(next);
    }
    result.final_best = result.best_per_generation.back();
    return result;
}

} // namespace orchard_duo
