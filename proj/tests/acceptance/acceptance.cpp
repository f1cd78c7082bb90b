// Acceptance suite. `acceptance N` checks criterion N, `acceptance` runs all.
// Each criterion prints its measurements followed by one
// "criterion N: PASS|FAIL" line.

#include "orchard_duo/analytics.hpp"
#include "orchard_duo/config.hpp"
#include "orchard_duo/dispatch.hpp"
#include "orchard_duo/errors.hpp"
#include "orchard_duo/ga.hpp"
#include "orchard_duo/integrator.hpp"
#include "orchard_duo/reproduction.hpp"
#include "orchard_duo/rng.hpp"
#include "orchard_duo/sensitivity.hpp"

#include <algorithm>
#include <array>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace od = orchard_duo;
namespace fs = std::filesystem;

namespace {

const fs::path kConfigDir = ORCHARD_DUO_CONFIG_DIR;

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

unsigned worker_count()
{
    return std::max(1u, std::thread::hardware_concurrency());
}

od::Scenario scenario_from_row(const od::Scenario& base, const od::SampleMatrix& s, std::size_t row)
{
    od::Scenario sc = base;
    for (std::size_t col = 0; col < s.n_params(); ++col) {
        od::apply_parameter(sc, s.names[col], s.at(row, col));
    }
    return sc;
}

od::Scenario random_scenario(od::Rng& rng)
{
    od::Scenario s = od::baseline_scenario(rng.uniform() < 0.5 ? od::StrategyKind::Mechanical
                                                               : od::StrategyKind::Chemical);
    od::install_controls(s, {rng.uniform(), rng.uniform(), rng.uniform(), rng.uniform()});
    s.orchard1.lambda_v *= 0.5 + rng.uniform();
    s.orchard2.lambda_v *= 0.5 + rng.uniform();
    s.orchard1.sigma *= 0.5 + rng.uniform();
    s.orchard2.mu_v *= 0.5 + rng.uniform();
    s.phi12 = rng.uniform();
    s.initial = od::default_initial_state(s);
    return s;
}

double median(std::vector<double> v)
{
    std::sort(v.begin(), v.end());
    const std::size_t n = v.size();
    return n % 2 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

std::string slurp(const fs::path& p)
{
    std::ifstream f(p, std::ios::binary);
    std::ostringstream s;
    s << f.rdbuf();
    return s.str();
}

bool report(int n, bool pass, const std::string& detail)
{
    std::printf("criterion %d: %s (%s)\n", n, pass ? "PASS" : "FAIL", detail.c_str());
    std::fflush(stdout);
    return pass;
}

std::string fmt(const char* f, double a)
{
    char buf[128];
    std::snprintf(buf, sizeof buf, f, a);
    return buf;
}

// 1. Closed form against the spectral radius over LHS scenarios.
bool criterion1()
{
    const auto start = Clock::now();
    double worst = 0.0;
    std::size_t count = 0;
    for (od::StrategyKind kind : {od::StrategyKind::Mechanical, od::StrategyKind::Chemical}) {
        const od::SampleMatrix s = od::lhs_sample(od::default_ranges(kind), 500, 101);
        const od::Scenario base = od::baseline_scenario(kind);
        for (std::size_t row = 0; row < s.n_samples; ++row) {
            const od::Scenario sc = scenario_from_row(base, s, row);
            const double spectral = od::global_r0_spectral(sc);
            const double closed = od::global_r0_closed_unchecked(sc);
            worst = std::max(worst, std::abs(closed - spectral) / (1.0 + spectral));
            ++count;
        }
    }
    const double elapsed = seconds_since(start);
    std::printf("  scenarios %zu, max |closed - spectral| / (1 + value) = %.3e, %.2f s\n", count, worst, elapsed);
    return report(1, count == 1000 && worst <= 1e-8 && elapsed < 10.0,
                  fmt("max scaled gap %.3e", worst) + fmt(", %.2f s", elapsed));
}

// 2. No dispersal: rho(K) is the larger local R0.
bool criterion2()
{
    od::Rng rng(202);
    double worst = 0.0;
    for (int k = 0; k < 100; ++k) {
        od::Scenario s = random_scenario(rng);
        s.phi12 = 0.0;
        const double want = std::max(od::local_r0(s, 1), od::local_r0(s, 2));
        worst = std::max(worst, std::abs(od::global_r0_spectral(s) - want));
        worst = std::max(worst, std::abs(od::global_r0_closed(s) - want));
    }
    std::printf("  100 scenarios, max |rho(K) - max(R10, R20)| = %.3e\n", worst);
    return report(2, worst <= 1e-10, fmt("max gap %.3e", worst));
}

// 3. Closed-form infection integral against trajectory quadrature.
bool criterion3()
{
    const auto start = Clock::now();
    od::Rng rng(303);
    double worst_total = 0.0;
    double worst_infection = 0.0;
    int terminated = 0;
    for (int k = 0; k < 20; ++k) {
        od::Scenario s = od::baseline_scenario(k % 2 ? od::StrategyKind::Chemical : od::StrategyKind::Mechanical);
        od::install_controls(s, {0.8 * rng.uniform(), 0.8 * rng.uniform(), 0.8 * rng.uniform(), 0.8 * rng.uniform()});
        s.phi12 = rng.uniform();
        s.horizon_months = 6000.0;
        od::IntegratorOptions opts;
        opts.require_termination = true;
        const od::EpidemicSummary sum = od::summarize(od::integrate(s, opts), s);
        terminated += sum.terminated;
        const od::CostBreakdown c = od::strategy_cost(s, od::CostWeights{}, sum);
        worst_total = std::max(worst_total, std::abs(c.reduced() - c.direct()) / c.direct());
        worst_infection = std::max(worst_infection,
                                   std::abs(c.infection_reduced - c.infection_direct) / c.infection_direct);
    }
    const double elapsed = seconds_since(start);
    std::printf("  %d/20 terminated; max relative gap: total cost %.3e, infection part %.3e; %.2f s\n", terminated,
                worst_total, worst_infection, elapsed);
    return report(3, terminated == 20 && worst_total <= 5e-3 && elapsed < 30.0,
                  fmt("max relative gap %.3e", worst_total) + fmt(", %.2f s", elapsed));
}

// 4. Analytic final susceptibles against simulation on a ladder of shrinking
// epidemics (probing control pushed toward the threshold in both orchards).
bool criterion4()
{
    const std::vector<double> ladder = {0.993, 0.996, 0.9975};
    std::vector<double> errors;
    double last_attack = 1.0;
    for (double m : ladder) {
        od::Scenario s = od::baseline_scenario();
        od::install_controls(s, {m, 0.0, m, 0.0});
        s.horizon_months = 20000.0;
        s.dt_months = 0.05;
        od::IntegratorOptions opts;
        opts.stride = 100;
        opts.require_termination = true;
        const od::EpidemicSummary sum = od::summarize(od::integrate(s, opts), s);
        double err = 0.0;
        double attack = 0.0;
        for (int i : {1, 2}) {
            const double ef = od::effectiveness(s, i, sum).value;
            const double sim = sum.orchard(i).s_final;
            err = std::max(err, std::abs(ef - sim) / sim);
            attack = std::max(attack, 1.0 - sim / sum.orchard(i).tree_total);
        }
        std::printf("  m1 = m2 = %.4f: R0 = %.4f, attack rate %.3f, max relative error of Ef %.4f\n", m,
                    od::global_r0_closed(s), attack, err);
        errors.push_back(err);
        last_attack = attack;
    }
    const bool monotone = errors[0] > errors[1] && errors[1] > errors[2];
    return report(4, monotone && errors.back() <= 0.10 && last_attack <= 0.20,
                  std::string(monotone ? "monotone" : "not monotone") + fmt(", smallest-epidemic error %.4f", errors.back())
                      + fmt(", attack %.3f", last_attack));
}

// 5. PRCC signs at 1e4 samples.
bool criterion5()
{
    const auto start = Clock::now();
    bool pass = true;
    for (od::StrategyKind kind : {od::StrategyKind::Mechanical, od::StrategyKind::Chemical}) {
        const od::PrccResult r = od::sensitivity_run(od::baseline_scenario(kind), od::default_ranges(kind), 10000,
                                                     2024, 50, worker_count());
        const bool mech = kind == od::StrategyKind::Mechanical;
        const std::string neg = mech ? "m" : "p";
        const std::string pos = mech ? "n" : "q";
        std::printf("  %s:", std::string(od::to_string(kind)).c_str());
        for (std::size_t k = 0; k < r.names.size(); ++k) {
            std::printf(" %s=%+.4f", r.names[k].c_str(), r.coefficients[k]);
        }
        std::printf("\n");
        for (const char* i : {"1", "2"}) {
            const double a = r.coefficient(neg + i);
            const double b = r.coefficient(pos + i);
            if (!(a < -0.1)) {
                std::printf("  expected PRCC(%s%s) < -0.1, got %+.4f\n", neg.c_str(), i, a);
                pass = false;
            }
            if (!(b > 0.1)) {
                std::printf("  expected PRCC(%s%s) > +0.1, got %+.4f\n", pos.c_str(), i, b);
                pass = false;
            }
        }
    }
    const double elapsed = seconds_since(start);
    return report(5, pass && elapsed < 60.0, fmt("%.2f s", elapsed));
}

od::RunConfig example(const std::string& name)
{
    return od::load_config(kConfigDir / (name + ".json"));
}

od::GaResult run_example(const od::RunConfig& cfg, std::uint64_t seed, std::size_t max_generations)
{
    od::GaConfig ga = cfg.ga;
    ga.seed = seed;
    ga.max_generations = max_generations;
    ga.threads = worker_count();
    return od::run(cfg.scenario, ga);
}

// 6. Example 2 reaches feasibility within 30 generations for 4 of 5 seeds.
bool criterion6()
{
    const od::RunConfig cfg = example("example2_mechanical");
    int hits = 0;
    double slowest = 0.0;
    for (std::uint64_t seed = 1; seed <= 5; ++seed) {
        const auto start = Clock::now();
        const od::GaResult r = run_example(cfg, seed, 30);
        const double elapsed = seconds_since(start);
        slowest = std::max(slowest, elapsed);
        const od::Individual& b = r.final_best;
        const bool hit = r.generations_to_target && *r.generations_to_target <= 30;
        hits += hit;
        std::printf("  seed %llu: generations to feasibility %s, elite r1 %.1f r2 %.1f, %.1f s\n",
                    static_cast<unsigned long long>(seed),
                    r.generations_to_target ? std::to_string(*r.generations_to_target).c_str() : "none",
                    b.r1_final, b.r2_final, elapsed);
    }
    return report(6, hits >= 4 && slowest < 300.0,
                  std::to_string(hits) + "/5 seeds feasible within 30 generations" + fmt(", slowest run %.1f s", slowest));
}

// 7. Median final-elite cost over five seeds for Examples 1, 2 and 3B.
bool criterion7()
{
    struct Case {
        const char* config;
        double reference;
    };
    bool pass = true;
    std::string detail;
    for (const Case& c : {Case{"example1_mechanical", 19388.0}, Case{"example2_mechanical", 12397.0},
                          Case{"example3b_chemical", 7109.0}}) {
        const od::RunConfig cfg = example(c.config);
        std::vector<double> costs;
        for (std::uint64_t seed = 1; seed <= 5; ++seed) {
            const od::GaResult r = run_example(cfg, seed, cfg.ga.max_generations);
            const od::Individual& b = r.final_best;
            costs.push_back(b.cost);
            std::printf("  %s seed %llu: cost %.1f, r1 %.1f r2 %.1f, feasible %d, genes %.4f %.4f %.4f %.4f, "
                        "%zu generations\n",
                        c.config, static_cast<unsigned long long>(seed), b.cost, b.r1_final, b.r2_final, b.feasible,
                        b.genes[0], b.genes[1], b.genes[2], b.genes[3], r.generations_run);
            std::fflush(stdout);
        }
        const double med = median(costs);
        const double rel = med / c.reference - 1.0;
        std::printf("  %s: median cost %.1f against %.0f (%+.1f%%)\n", c.config, med, c.reference, 100.0 * rel);
        pass = pass && std::abs(rel) <= 0.10;
        detail += std::string(detail.empty() ? "" : ", ") + c.config + fmt(" %+.1f%%", 100.0 * rel);
    }
    return report(7, pass, detail);
}

// 8. Peaks of the mechanical run. The control values quoted in the text are
// tried first, then the ones in the figure caption.
bool criterion8()
{
    struct Controls {
        const char* label;
        std::array<double, 4> genes;
    };
    bool pass = false;
    std::string detail;
    for (const Controls& c : {Controls{"text", {0.29, 0.395, 0.07, 0.67}}, Controls{"caption", {0.2, 0.6, 0.47, 0.6}}}) {
        od::Scenario s = od::baseline_scenario();
        od::install_controls(s, c.genes);
        const od::Trajectory t = od::integrate(s);
        const od::EpidemicSummary sum = od::summarize(t, s);
        const double a1 = sum.orchard(1).a_peak;
        const double a2 = sum.orchard(2).a_peak;
        // The epidemic starts with the seeded tree at t = 0.
        const double lag = sum.orchard(2).a_peak_time;
        // Informational: first time orchard 2 carries one asymptomatic tree.
        double onset2 = -1.0;
        for (std::size_t k = 0; k < t.size(); ++k) {
            if (t.states[k][od::Compartment::A2t] >= 1.0) {
                onset2 = t.times[k];
                break;
            }
        }
        std::printf("  %s controls: A1 peak %.1f at %.2f months, A2 peak %.1f at %.2f months\n", c.label, a1,
                    sum.orchard(1).a_peak_time, a2, lag);
        std::printf("  %s controls: orchard-2 peak %.2f months after seeding, %.2f after orchard-2 onset\n", c.label,
                    lag, lag - onset2);
        const bool p1 = std::abs(a1 / 1027.0 - 1.0) <= 0.15;
        const bool p2 = std::abs(a2 / 1294.0 - 1.0) <= 0.15;
        const bool pl = lag >= 10.0 && lag <= 12.0;
        detail += std::string(detail.empty() ? "" : "; ") + c.label + fmt(": A1 %+.1f%%", 100.0 * (a1 / 1027.0 - 1.0))
                  + fmt(", A2 %+.1f%%", 100.0 * (a2 / 1294.0 - 1.0)) + fmt(", orchard-2 peak at %.2f months", lag);
        if (p1 && p2 && pl) {
            pass = true;
            break;
        }
    }
    return report(8, pass, detail);
}

// 9. Invariants and determinism.
bool criterion9()
{
    std::vector<std::string> failures;
    auto check = [&](bool ok, const std::string& what) {
        std::printf("  %-58s %s\n", what.c_str(), ok ? "ok" : "FAILED");
        if (!ok) {
            failures.push_back(what);
        }
    };

    // Tree conservation along trajectories.
    {
        od::Rng rng(909);
        std::vector<od::Scenario> cases = {od::baseline_scenario(), od::baseline_scenario(od::StrategyKind::Chemical)};
        od::install_controls(cases[0], {0.29, 0.395, 0.07, 0.67});
        od::install_controls(cases[1], {0.3, 0.4, 0.5, 0.2});
        for (int k = 0; k < 8; ++k) {
            cases.push_back(random_scenario(rng));
        }
        double worst = 0.0;
        for (od::Scenario& s : cases) {
            s.horizon_months = 600.0;
            const od::Trajectory t = od::integrate(s);
            for (int i : {1, 2}) {
                const double n0 = t.states.front().tree_total(i);
                for (const od::SystemState& x : t.states) {
                    worst = std::max(worst, std::abs(x.tree_total(i) - n0) / n0);
                }
            }
        }
        check(worst <= 1e-8, fmt("tree conservation, max relative drift %.2e", worst));
    }

    // Boundary positivity.
    {
        od::Rng rng(910);
        bool ok = true;
        for (int trial = 0; trial < 2000 && ok; ++trial) {
            const od::Scenario s = random_scenario(rng);
            od::SystemState x;
            for (double& v : x.values) {
                v = 5000.0 * rng.uniform();
            }
            const std::size_t j = static_cast<std::size_t>(rng.below(od::kStateSize));
            x.values[j] = 0.0;
            ok = od::rhs(x, s).values[j] >= 0.0;
        }
        check(ok, "boundary positivity on 2000 random boundary states");
    }

    // LHS stratification.
    {
        const auto ranges = od::default_ranges(od::StrategyKind::Mechanical);
        const od::SampleMatrix s = od::lhs_sample(ranges, 10000, 2024);
        bool ok = true;
        for (std::size_t col = 0; col < s.n_params(); ++col) {
            const double low = ranges[col].low;
            const double width = (ranges[col].high - low) / 10000.0;
            std::set<std::size_t> strata;
            for (double v : s.column(col)) {
                strata.insert(static_cast<std::size_t>((v - low) / width));
            }
            ok = ok && strata.size() == 10000 && *strata.rbegin() == 9999;
        }
        check(ok, "LHS stratification exact at n = 10000");
        check(od::lhs_sample(ranges, 10000, 2024) == s, "LHS same-seed determinism");
        const od::Scenario base = od::baseline_scenario();
        check(od::sensitivity_run(base, ranges, 2000, 7, 50, 1) == od::sensitivity_run(base, ranges, 2000, 7, 50, 4),
              "sensitivity result independent of thread count");
    }

    // GA: Example 2 with seed 42 twice through the dispatcher, plus elitism.
    {
        const od::RunConfig cfg = example("example2_mechanical");
        const fs::path root = fs::temp_directory_path() / "orchard_duo_acceptance";
        fs::remove_all(root);
        od::DispatchOptions opts;
        opts.seed = 42;
        opts.threads = worker_count();
        od::dispatch("optimize", cfg, root / "a", opts);
        od::dispatch("optimize", cfg, root / "b", opts);
        const bool same = slurp(root / "a" / "ga_trace.csv") == slurp(root / "b" / "ga_trace.csv")
                          && slurp(root / "a" / "best.json") == slurp(root / "b" / "best.json");
        check(same, "optimize example 2, seed 42, byte-identical outputs");

        bool monotone = true;
        std::ifstream trace(root / "a" / "ga_trace.csv");
        std::string line;
        std::getline(trace, line);
        double prev = HUGE_VAL;
        while (std::getline(trace, line)) {
            std::vector<std::string> cells;
            std::stringstream ss(line);
            for (std::string cell; std::getline(ss, cell, ',');) {
                cells.push_back(cell);
            }
            const double fit = std::stod(cells[cells.size() - 2]);
            monotone = monotone && fit <= prev;
            prev = fit;
        }
        for (std::uint64_t seed : {3, 4}) {
            od::GaConfig ga = cfg.ga;
            ga.seed = seed;
            ga.max_generations = 10;
            ga.threads = worker_count();
            const od::GaResult r = od::run(cfg.scenario, ga);
            for (std::size_t g = 1; g < r.best_per_generation.size(); ++g) {
                monotone = monotone && r.best_per_generation[g].fitness <= r.best_per_generation[g - 1].fitness;
            }
        }
        check(monotone, "elite fitness never increases across generations");
    }

    std::string detail = failures.empty() ? "all invariants hold" : std::to_string(failures.size()) + " failed";
    return report(9, failures.empty(), detail);
}

} // namespace

int main(int argc, char** argv)
{
    const std::vector<std::function<bool()>> criteria = {criterion1, criterion2, criterion3, criterion4, criterion5,
                                                         criterion6, criterion7, criterion8, criterion9};
    std::vector<int> selected;
    if (argc > 1) {
        for (int a = 1; a < argc; ++a) {
            const int n = std::atoi(argv[a]);
            if (n < 1 || n > static_cast<int>(criteria.size())) {
                std::fprintf(stderr, "unknown criterion %s\n", argv[a]);
                return 2;
            }
            selected.push_back(n);
        }
    } else {
        for (int n = 1; n <= static_cast<int>(criteria.size()); ++n) {
            selected.push_back(n);
        }
    }

    bool all = true;
    for (int n : selected) {
        try {
            all = criteria[static_cast<std::size_t>(n - 1)]() && all;
        } catch (const std::exception& e) {
            std::printf("  error: %s\n", e.what());
            all = report(n, false, "exception") && all;
        }
    }
    return all ? 0 : 1;
}
