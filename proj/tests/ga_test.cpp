#include "orchard_duo/errors.hpp"
#include "orchard_duo/ga.hpp"

#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <limits>

namespace od = orchard_duo;

namespace {

od::Genes grid(std::uint16_t a, std::uint16_t b, std::uint16_t c, std::uint16_t d)
{
    return {od::decode_gene(a), od::decode_gene(b), od::decode_gene(c), od::decode_gene(d)};
}

od::Scenario quick_template()
{
    od::Scenario s = od::baseline_scenario();
    s.horizon_months = 6000.0;
    s.dt_months = 0.05;
    return s;
}

od::GaConfig small_config(std::uint64_t seed)
{
    od::GaConfig c;
    c.population_size = 10;
    c.mating_pool_size = 3;
    c.max_generations = 3;
    c.seed = seed;
    c.integrator.stride = 50;
    return c;
}

} // namespace

TEST(Chromosome, GeneGridRoundTrip)
{
    EXPECT_EQ(od::encode_gene(0.0), 0);
    EXPECT_EQ(od::encode_gene(std::nextafter(1.0, 0.0)), 65535);
    EXPECT_EQ(od::decode_gene(65535), 65535.0 / 65536.0);
    for (std::uint32_t k = 0; k < 65536; k += 257) {
        EXPECT_EQ(od::encode_gene(od::decode_gene(static_cast<std::uint16_t>(k))), k);
    }
}

TEST(Chromosome, FirstGeneInHighBits)
{
    const od::Genes g = grid(0x1234, 0x5678, 0x9abc, 0xdef0);
    EXPECT_EQ(od::encode_chromosome(g), 0x123456789abcdef0ULL);
    EXPECT_EQ(od::decode_chromosome(0x123456789abcdef0ULL), g);
}

TEST(Crossover, CutsOnGeneBoundarySwapSecondGene)
{
    const od::Genes f = grid(1, 2, 3, 4);
    const od::Genes m = grid(10, 20, 30, 40);
    const auto [a, b] = od::crossover(f, m, 16, 32);
    EXPECT_EQ(a, grid(1, 20, 3, 4));
    EXPECT_EQ(b, grid(10, 2, 30, 40));
}

TEST(Crossover, FullWidthSwapsParents)
{
    const od::Genes f = grid(1, 2, 3, 4);
    const od::Genes m = grid(10, 20, 30, 40);
    const auto [a, b] = od::crossover(f, m, 0, 64);
    EXPECT_EQ(a, m);
    EXPECT_EQ(b, f);
}

TEST(Crossover, InsideAGene)
{
    const od::Genes f = grid(0x0000, 0, 0, 0);
    const od::Genes m = grid(0xffff, 0, 0, 0);
    const auto [a, b] = od::crossover(f, m, 4, 8);
    EXPECT_EQ(a, grid(0x0f00, 0, 0, 0));
    EXPECT_EQ(b, grid(0xf0ff, 0, 0, 0));
}

TEST(Crossover, IdenticalParentsAndBitConservation)
{
    od::Rng rng(3);
    for (int trial = 0; trial < 1000; ++trial) {
        const od::Genes f = grid(static_cast<std::uint16_t>(rng.below(65536)), 7, 9, 11);
        const auto [a, b] = od::crossover(f, f, rng);
        ASSERT_EQ(a, f);
        ASSERT_EQ(b, f);

        const od::Genes m = grid(5, static_cast<std::uint16_t>(rng.below(65536)), 0xffff, 1);
        const auto [c, d] = od::crossover(f, m, rng);
        const std::uint64_t fx = od::encode_chromosome(f), mx = od::encode_chromosome(m);
        const std::uint64_t cx = od::encode_chromosome(c), dx = od::encode_chromosome(d);
        ASSERT_EQ(cx ^ dx, fx ^ mx);
        ASSERT_EQ(cx & dx, fx & mx);
    }
}

TEST(Mutation, ProbabilityExtremesAndFrequency)
{
    od::GaConfig c;
    od::Rng rng(17);
    const od::Genes g = grid(100, 200, 300, 400);
    c.mutation_prob = 0.0;
    for (int k = 0; k < 100; ++k) {
        ASSERT_EQ(od::mutate(g, c, rng), g);
    }

    c.mutation_prob = 1.0;
    int changed = 0;
    for (int k = 0; k < 1000; ++k) {
        const od::Genes out = od::mutate(g, c, rng);
        for (std::size_t j = 0; j < 4; ++j) {
            changed += out[j] != g[j];
            ASSERT_EQ(od::decode_gene(od::encode_gene(out[j])), out[j]);
        }
    }
    EXPECT_GT(changed, 3990); // a redraw lands on the old value with p = 2^-16

    c.mutation_prob = 0.1;
    int hits = 0;
    const int trials = 25000;
    for (int k = 0; k < trials; ++k) {
        const od::Genes out = od::mutate(g, c, rng);
        for (std::size_t j = 0; j < 4; ++j) {
            hits += out[j] != g[j];
        }
    }
    const double freq = static_cast<double>(hits) / (4.0 * trials);
    EXPECT_GT(freq, 0.09);
    EXPECT_LT(freq, 0.11);
}

TEST(Fitness, FeasibleBeatsInfeasibleAndPenaltyScales)
{
    od::GaConfig c;
    c.r_obj = 2000.0;
    od::Individual in_band{.r1_final = 1000.0, .r2_final = 1010.0, .objective_j = 5e4};
    od::Individual off{.r1_final = 1000.0, .r2_final = 1100.0, .objective_j = 1e3};
    od::fitness(in_band, c);
    od::fitness(off, c);
    EXPECT_TRUE(in_band.feasible);
    EXPECT_FALSE(off.feasible);
    EXPECT_DOUBLE_EQ(in_band.fitness, 5e4);
    EXPECT_DOUBLE_EQ(off.fitness, 1e3 + c.penalty() * 80.0);
    EXPECT_TRUE(od::better(in_band, off));

    c.r1_target = 1500.0;
    c.r2_target = 500.0;
    od::fitness(in_band, c);
    EXPECT_FALSE(in_band.feasible);
    // total band 20, orchard bands 15 and 5
    EXPECT_DOUBLE_EQ(in_band.fitness, 5e4 + c.penalty() * ((500.0 - 15.0) + (510.0 - 5.0)));

    od::Individual split{.r1_final = 1510.0, .r2_final = 496.0, .objective_j = 7.0};
    od::fitness(split, c);
    EXPECT_TRUE(split.feasible);
}

TEST(Fitness, PenaltyFollowsWeights)
{
    od::GaConfig c;
    c.weights.w1 = 0.5;
    c.weights.w2 = -4.0;
    EXPECT_DOUBLE_EQ(c.penalty(), 4e3);
    c.weights.w2 = 0.0;
    c.weights.w1 = 0.0;
    EXPECT_DOUBLE_EQ(c.penalty(), 1e3);
}

TEST(Fitness, UnconvergedIsWorst)
{
    od::GaConfig c = small_config(1);
    od::Scenario s = quick_template();
    s.horizon_months = 5.0;
    const od::Individual ind = od::evaluate({0.1, 0.1, 0.1, 0.1}, s, c);
    EXPECT_FALSE(ind.converged);
    EXPECT_FALSE(ind.feasible);
    EXPECT_EQ(ind.fitness, std::numeric_limits<double>::max());
}

TEST(Evaluate, MatchesDirectPipeline)
{
    const od::GaConfig c = small_config(1);
    const od::Scenario tmpl = quick_template();
    const od::Genes g = grid(60000, 30000, 65000, 20000);
    const od::Individual ind = od::evaluate(g, tmpl, c);

    od::Scenario s = tmpl;
    od::install_controls(s, g);
    od::IntegratorOptions opts = c.integrator;
    opts.require_termination = true;
    const od::EpidemicSummary sum = od::summarize(od::integrate(s, opts), s);
    const od::ObjectiveValue obj = od::objective(s, c.weights, sum);
    EXPECT_EQ(ind.r1_final, sum.orchard(1).r_final);
    EXPECT_EQ(ind.cost, obj.cost.reduced());
    EXPECT_EQ(ind.objective_j, obj.j);
    EXPECT_TRUE(ind.converged);
}

TEST(Run, DeterministicPerSeedAndThreadCount)
{
    const od::Scenario tmpl = quick_template();
    od::GaConfig c = small_config(42);
    const od::GaResult a = od::run(tmpl, c);
    const od::GaResult b = od::run(tmpl, c);
    c.threads = 4;
    const od::GaResult t = od::run(tmpl, c);
    ASSERT_EQ(a.best_per_generation.size(), b.best_per_generation.size());
    EXPECT_EQ(a.best_per_generation, b.best_per_generation);
    EXPECT_EQ(a.best_per_generation, t.best_per_generation);

    c.threads = 1;
    c.seed = 43;
    const od::GaResult other = od::run(tmpl, c);
    EXPECT_NE(other.best_per_generation.front().genes, a.best_per_generation.front().genes);
}

TEST(Run, ElitismNeverRegresses)
{
    od::GaConfig c = small_config(7);
    c.max_generations = 5;
    const od::GaResult r = od::run(quick_template(), c);
    ASSERT_EQ(r.best_per_generation.size(), r.generations_run + 1);
    for (std::size_t g = 1; g < r.best_per_generation.size(); ++g) {
        EXPECT_LE(r.best_per_generation[g].fitness, r.best_per_generation[g - 1].fitness);
    }
    EXPECT_EQ(r.final_best, r.best_per_generation.back());
}

TEST(Run, StopsAtGenerationCap)
{
    od::GaConfig c = small_config(9);
    c.max_generations = 2;
    const od::GaResult r = od::run(quick_template(), c);
    EXPECT_EQ(r.generations_run, 2u);
    EXPECT_EQ(r.best_per_generation.size(), 3u);
}

TEST(Config, RejectsBadSettings)
{
    od::GaConfig c;
    c.mating_pool_size = c.population_size;
    EXPECT_THROW(c.validate(), od::Error);
    c = {};
    c.r1_target = 100.0;
    EXPECT_THROW(c.validate(), od::Error);
    c.r2_target = 1900.0;
    EXPECT_NO_THROW(c.validate());
    c.r2_target = 100.0;
    try {
        c.validate();
        FAIL();
    } catch (const od::Error& e) {
        EXPECT_EQ(e.code(), od::ErrorCode::ConfigInvalid);
    }
}
