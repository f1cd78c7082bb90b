#include "orchard_duo/dispatch.hpp"

#include "orchard_duo/analytics.hpp"
#include "orchard_duo/errors.hpp"
#include "orchard_duo/ga.hpp"
#include "orchard_duo/integrator.hpp"
#include "orchard_duo/reproduction.hpp"
#include "orchard_duo/sensitivity.hpp"

#include <charconv>
#include <chrono>
#include <fstream>
#include <sstream>
#include <system_error>

#ifndef ORCHARD_DUO_VERSION
#define ORCHARD_DUO_VERSION "0.0.0"
#endif

namespace orchard_duo {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

json matrix_json(const Matrix6& m)
{
    json rows = json::array();
    for (const auto& row : m) {
        rows.push_back(row);
    }
    return rows;
}

json orchard_json(const OrchardOutcome& o)
{
    return {
        {"r_final", o.r_final},
        {"s_final", o.s_final},
        {"a_peak", o.a_peak},
        {"a_peak_time", o.a_peak_time},
        {"i_peak", o.i_peak},
        {"i_peak_time", o.i_peak_time},
        {"cumulative_infectious", o.cumulative_infectious},
        {"peak_vector_prevalence", o.peak_vector_prevalence},
        {"tree_total", o.tree_total},
    };
}

json individual_json(const Individual& ind, StrategyKind strategy)
{
    const auto names = gene_names(strategy);
    json genes = json::object();
    for (std::size_t k = 0; k < 4; ++k) {
        genes[std::string(names[k])] = ind.genes[k];
    }
    return {
        {"genes", genes},         {"r1_final", ind.r1_final}, {"r2_final", ind.r2_final},
        {"cost", ind.cost},       {"ef1", ind.ef1},           {"ef2", ind.ef2},
        {"objective_j", ind.objective_j}, {"fitness", ind.fitness}, {"feasible", ind.feasible},
        {"converged", ind.converged},
    };
}

std::string dump(const json& j)
{
    return j.dump(2) + "\n";
}

std::vector<std::string> run_simulate(const RunConfig& cfg, const fs::path& out)
{
    const Scenario& s = cfg.scenario;
    const Trajectory traj = integrate(s, cfg.integrator);
    const EpidemicSummary summary = summarize(traj, s);

    std::string csv = "t";
    for (std::string_view name : kCompartmentNames) {
        csv += ',';
        csv += name;
    }
    csv += '\n';
    for (std::size_t k = 0; k < traj.size(); ++k) {
        csv += format_double(traj.times[k]);
        for (double v : traj.states[k].values) {
            csv += ',';
            csv += format_double(v);
        }
        csv += '\n';
    }
    write_file_atomic(out / "trajectory.csv", csv);

    const ObjectiveValue obj = objective(s, cfg.weights, summary);
    json doc = {
        {"orchard1", orchard_json(summary.orchard(1))},
        {"orchard2", orchard_json(summary.orchard(2))},
        {"final_time", summary.final_time},
        {"terminated", summary.terminated},
        {"cost", {{"reduced", obj.cost.reduced()},
                  {"direct", obj.cost.direct()},
                  {"infection_reduced", obj.cost.infection_reduced},
                  {"infection_direct", obj.cost.infection_direct},
                  {"control", obj.cost.control},
                  {"window", obj.cost.window}}},
        {"ef1", obj.ef1},
        {"ef2", obj.ef2},
        {"objective_j", obj.j},
        {"final_size_approximation_warning", obj.approximation_warning},
    };
    write_file_atomic(out / "summary.json", dump(doc));
    return {"trajectory.csv", "summary.json"};
}

std::vector<std::string> run_r0(const RunConfig& cfg, const fs::path& out)
{
    const Scenario& s = cfg.scenario;
    s.validate();
    const NgmMatrices ngm = build_ngm(s);
    const CharPolyCoeffs c = char_poly_coeffs(s);
    const DerivedQuantities d = derived_quantities(s);
    json doc = {
        {"r10", local_r0(s, 1)},
        {"r20", local_r0(s, 2)},
        {"r_g0_closed", global_r0_closed(s)},
        {"r_g0_spectral", global_r0_spectral(s)},
        {"b_coeff", c.b_coeff},
        {"c_coeff", c.c_coeff},
        {"c_signed", c.c_signed()},
        {"discriminant", c.discriminant},
        {"derived", {{"n_v0_1", d.n_v0_1},
                     {"n_v0_2", d.n_v0_2},
                     {"growth_ratio_1", d.growth_ratio_1},
                     {"growth_ratio_2", d.growth_ratio_2},
                     {"delta", d.delta},
                     {"theta12", d.theta12}}},
        {"order", {"A1t", "I1t", "I1v", "A2t", "I2t", "I2v"}},
        {"f_matrix", matrix_json(ngm.f_matrix)},
        {"v_matrix", matrix_json(ngm.v_matrix)},
        {"k_matrix", matrix_json(ngm.k_matrix)},
    };
    write_file_atomic(out / "r0.json", dump(doc));
    return {"r0.json"};
}

std::vector<std::string> run_sensitivity(const RunConfig& cfg, const fs::path& out, unsigned threads)
{
    const std::vector<ParameterRange> ranges = cfg.resolved_ranges();
    const PrccResult r = sensitivity_run(cfg.scenario, ranges, cfg.sensitivity.n_samples, *cfg.sensitivity.seed,
                                         cfg.sensitivity.n_bins, threads);
    std::string prcc_csv = "parameter,prcc\n";
    for (std::size_t k = 0; k < r.names.size(); ++k) {
        prcc_csv += r.names[k] + "," + format_double(r.coefficients[k]) + "\n";
    }
    write_file_atomic(out / "prcc.csv", prcc_csv);

    std::string hist = "bin,lower,upper,count\n";
    for (std::size_t b = 0; b < r.histogram.counts.size(); ++b) {
        hist += std::to_string(b) + "," + format_double(r.histogram.edges[b]) + ","
                + format_double(r.histogram.edges[b + 1]) + "," + std::to_string(r.histogram.counts[b]) + "\n";
    }
    write_file_atomic(out / "histogram.csv", hist);
    return {"prcc.csv", "histogram.csv"};
}

std::vector<std::string> run_optimize(const RunConfig& cfg, const fs::path& out, unsigned threads)
{
    GaConfig ga = cfg.ga;
    ga.threads = threads;
    const GaResult result = run(cfg.scenario, ga);
    const auto names = gene_names(ga.strategy);

    std::string csv = "generation";
    for (std::string_view n : names) {
        csv += ',';
        csv += n;
    }
    csv += ",r1_final,r2_final,cost,ef1,ef2,objective_j,fitness,feasible\n";
    for (std::size_t g = 0; g < result.best_per_generation.size(); ++g) {
        const Individual& ind = result.best_per_generation[g];
        csv += std::to_string(g);
        for (double v : ind.genes) {
            csv += ',' + format_double(v);
        }
        for (double v : {ind.r1_final, ind.r2_final, ind.cost, ind.ef1, ind.ef2, ind.objective_j, ind.fitness}) {
            csv += ',' + format_double(v);
        }
        csv += ind.feasible ? ",1\n" : ",0\n";
    }
    write_file_atomic(out / "ga_trace.csv", csv);

    json doc = {
        {"strategy", std::string(to_string(ga.strategy))},
        {"final_best", individual_json(result.final_best, ga.strategy)},
        {"generations_run", result.generations_run},
        {"generations_to_target",
         result.generations_to_target ? json(*result.generations_to_target) : json(nullptr)},
        {"stalled", result.stalled},
    };
    write_file_atomic(out / "best.json", dump(doc));
    return {"ga_trace.csv", "best.json"};
}

} // namespace

std::string_view tool_version() noexcept
{
    return ORCHARD_DUO_VERSION;
}

json RunManifest::to_json() const
{
    return {
        {"command", command},
        {"config", resolved_config},
        {"seed", seed ? json(*seed) : json(nullptr)},
        {"tool_version", version},
        {"wall_clock_seconds", wall_clock_seconds},
        {"outputs", outputs},
    };
}

std::string format_double(double value)
{
    char buf[64];
    const auto [end, ec] = std::to_chars(buf, buf + sizeof buf, value);
    if (ec != std::errc{}) {
        throw Error(ErrorCode::IoError, "cannot format number");
    }
    return std::string(buf, end);
}

void write_file_atomic(const fs::path& path, const std::string& contents)
{
    fs::path tmp = path;
    tmp += ".tmp";
    {
        std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
        if (!f) {
            throw Error(ErrorCode::IoError, "cannot write " + tmp.string());
        }
        f << contents;
        f.flush();
        if (!f) {
            throw Error(ErrorCode::IoError, "short write on " + tmp.string());
        }
    }
    std::error_code ec;
    fs::rename(tmp, path, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot rename " + tmp.string() + ": " + ec.message());
    }
}

json error_json(const std::exception& error)
{
    if (const auto* e = dynamic_cast<const Error*>(&error)) {
        return {
            {"error", std::string(to_string(e->code()))},
            {"message", e->what()},
            {"field", e->field().empty() ? json(nullptr) : json(e->field())},
        };
    }
    return {{"error", "InternalError"}, {"message", error.what()}, {"field", nullptr}};
}

RunManifest dispatch(std::string_view command, RunConfig cfg, const fs::path& out_dir, const DispatchOptions& options)
{
    const auto start = std::chrono::steady_clock::now();
    if (command != "simulate" && command != "r0" && command != "sensitivity" && command != "optimize") {
        throw Error(ErrorCode::ConfigInvalid, "unknown command \"" + std::string(command) + "\"", "command");
    }

    RunManifest manifest;
    manifest.command = std::string(command);
    manifest.version = std::string(tool_version());

    if (options.seed) {
        cfg.ga_seed = options.seed;
        cfg.ga.seed = *options.seed;
        cfg.sensitivity.seed = options.seed;
    }
    if (command == "optimize") {
        if (!cfg.ga_seed) {
            throw Error(ErrorCode::ConfigInvalid, "optimize needs a seed: pass --seed or set ga.seed", "ga.seed");
        }
        manifest.seed = cfg.ga_seed;
    } else if (command == "sensitivity") {
        if (!cfg.sensitivity.seed) {
            throw Error(ErrorCode::ConfigInvalid, "sensitivity needs a seed: pass --seed or set sensitivity.seed",
                        "sensitivity.seed");
        }
        manifest.seed = cfg.sensitivity.seed;
    }

    std::error_code ec;
    fs::create_directories(out_dir, ec);
    if (ec) {
        throw Error(ErrorCode::IoError, "cannot create " + out_dir.string() + ": " + ec.message());
    }

    const unsigned threads = std::max(1u, options.threads);
    if (command == "simulate") {
        manifest.outputs = run_simulate(cfg, out_dir);
    } else if (command == "r0") {
        manifest.outputs = run_r0(cfg, out_dir);
    } else if (command == "sensitivity") {
        manifest.outputs = run_sensitivity(cfg, out_dir, threads);
    } else {
        manifest.outputs = run_optimize(cfg, out_dir, threads);
    }

    manifest.resolved_config = config_to_json(cfg);
    manifest.wall_clock_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_file_atomic(out_dir / "manifest.json", dump(manifest.to_json()));
    return manifest;
}

} // namespace orchard_duo
