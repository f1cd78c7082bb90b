#include "orchard_duo/config.hpp"

#include "orchard_duo/errors.hpp"

#include <fstream>
#include <limits>
#include <set>
#include <sstream>

namespace orchard_duo {

using nlohmann::json;

namespace {

[[noreturn]] void invalid(const std::string& field, const std::string& what)
{
    throw Error(ErrorCode::ValidationError, field + ": " + what, field);
}

const char* type_name(const json& j)
{
    return j.type_name();
}

/// Reads one JSON object, remembering which keys were consumed so leftovers
/// can be reported as unknown.
class Section {
public:
    Section(const json& doc, std::string path) : doc_(doc), path_(std::move(path))
    {
        if (!doc_.is_object()) {
            invalid(path_, std::string("expected an object, got ") + type_name(doc_));
        }
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    const json* get(const std::string& key)
    {
        seen_.insert(key);
        const auto it = doc_.find(key);
        return it == doc_.end() ? nullptr : &*it;
    }

    double number(const std::string& key, double fallback)
    {
        const json* j = get(key);
        if (!j) {
            return fallback;
        }
        if (!j->is_number()) {
            invalid(field(key), std::string("expected a number, got ") + type_name(*j));
        }
        return j->get<double>();
    }

    std::optional<double> optional_number(const std::string& key, std::optional<double> fallback)
    {
        const json* j = get(key);
        if (!j) {
            return fallback;
        }
        if (j->is_null()) {
            return std::nullopt;
        }
        if (!j->is_number()) {
            invalid(field(key), std::string("expected a number or null, got ") + type_name(*j));
        }
        return j->get<double>();
    }

    std::uint64_t unsigned_integer(const std::string& key, std::uint64_t fallback)
    {
        const json* j = get(key);
        if (!j) {
            return fallback;
        }
        if (!j->is_number_unsigned()) {
            invalid(field(key), std::string("expected a non-negative integer, got ") + j->dump());
        }
        return j->get<std::uint64_t>();
    }

    std::optional<std::uint64_t> optional_unsigned(const std::string& key, std::optional<std::uint64_t> fallback)
    {
        const json* j = get(key);
        if (!j) {
            return fallback;
        }
        if (j->is_null()) {
            return std::nullopt;
        }
        if (!j->is_number_unsigned()) {
            invalid(field(key), std::string("expected a non-negative integer or null, got ") + j->dump());
        }
        return j->get<std::uint64_t>();
    }

    bool boolean(const std::string& key, bool fallback)
    {
        const json* j = get(key);
        if (!j) {
            return fallback;
        }
        if (!j->is_boolean()) {
            invalid(field(key), std::string("expected true or false, got ") + type_name(*j));
        }
        return j->get<bool>();
    }

    std::string string(const std::string& key, const std::string& fallback)
    {
        const json* j = get(key);
        if (!j) {
            return fallback;
        }
        if (!j->is_string()) {
            invalid(field(key), std::string("expected a string, got ") + type_name(*j));
        }
        return j->get<std::string>();
    }

    std::array<double, 4> quad(const std::string& key, const std::array<double, 4>& fallback)
    {
        const json* j = get(key);
        if (!j) {
            return fallback;
        }
        if (!j->is_array() || j->size() != 4) {
            invalid(field(key), "expected an array of 4 numbers");
        }
        std::array<double, 4> out{};
        for (std::size_t k = 0; k < 4; ++k) {
            if (!(*j)[k].is_number()) {
                invalid(field(key) + "[" + std::to_string(k) + "]", "expected a number");
            }
            out[k] = (*j)[k].get<double>();
        }
        return out;
    }

    void finish() const
    {
        for (const auto& [key, value] : doc_.items()) {
            if (!seen_.count(key)) {
                invalid(field(key), "unknown key");
            }
        }
    }

private:
    const json& doc_;
    std::string path_;
    std::set<std::string> seen_;
};

OrchardParams read_orchard(const json* doc, const std::string& name)
{
    OrchardParams o;
    if (!doc) {
        return o;
    }
    Section s(*doc, name);
    o.n_tau = s.number("n_tau", o.n_tau);
    o.mu_tau = s.number("mu_tau", o.mu_tau);
    o.mu_v = s.number("mu_v", o.mu_v);
    o.sigma = s.number("sigma", o.sigma);
    o.omega = s.number("omega", o.omega);
    o.lambda_v = s.number("lambda_v", o.lambda_v);
    o.b = s.number("b", o.b);
    o.pi_tau = s.number("pi_tau", o.pi_tau);
    o.pi_v = s.number("pi_v", o.pi_v);
    s.finish();
    return o;
}

json write_orchard(const OrchardParams& o)
{
    return {{"n_tau", o.n_tau}, {"mu_tau", o.mu_tau}, {"mu_v", o.mu_v},   {"sigma", o.sigma},   {"omega", o.omega},
            {"lambda_v", o.lambda_v}, {"b", o.b}, {"pi_tau", o.pi_tau}, {"pi_v", o.pi_v}};
}

std::string_view seeding_name(InitialSeeding s)
{
    return s == InitialSeeding::AsWritten ? "as_written" : "from_susceptibles";
}

InitialSeeding seeding_from(const std::string& name, const std::string& field)
{
    if (name == "as_written") {
        return InitialSeeding::AsWritten;
    }
    if (name == "from_susceptibles") {
        return InitialSeeding::FromSusceptibles;
    }
    invalid(field, "expected \"as_written\" or \"from_susceptibles\", got \"" + name + "\"");
}

void read_config(const json& doc, RunConfig& cfg)
{
    Section root(doc, "");
    Scenario& sc = cfg.scenario;
    sc.orchard1 = read_orchard(root.get("orchard1"), "orchard1");
    sc.orchard2 = read_orchard(root.get("orchard2"), "orchard2");

    if (const json* j = root.get("coupling")) {
        Section s(*j, "coupling");
        sc.phi12 = s.number("phi12", sc.phi12);
        s.finish();
    }

    if (const json* j = root.get("controls")) {
        Section s(*j, "controls");
        try {
            sc.strategy = strategy_from_string(s.string("strategy", "mechanical"));
        } catch (const Error& e) {
            invalid("controls.strategy", e.what());
        }
        sc.controls1.m = s.number("m1", 0.0);
        sc.controls1.n = s.number("n1", 0.0);
        sc.controls1.p = s.number("p1", 0.0);
        sc.controls1.q = s.number("q1", 0.0);
        sc.controls2.m = s.number("m2", 0.0);
        sc.controls2.n = s.number("n2", 0.0);
        sc.controls2.p = s.number("p2", 0.0);
        sc.controls2.q = s.number("q2", 0.0);
        s.finish();
    }

    CostWeights& w = cfg.weights;
    if (const json* j = root.get("weights")) {
        Section s(*j, "weights");
        w.m1_w = s.number("m1_w", w.m1_w);
        w.m2_w = s.number("m2_w", w.m2_w);
        w.c1_w = s.number("c1_w", w.c1_w);
        w.c2_w = s.number("c2_w", w.c2_w);
        w.x = s.quad("x", w.x);
        w.y = s.quad("y", w.y);
        w.w1 = s.number("w1", w.w1);
        w.w2 = s.number("w2", w.w2);
        w.t_i = s.number("t_i", w.t_i);
        w.t_f = s.optional_number("t_f", w.t_f);
        s.finish();
    }

    IntegratorOptions& io = cfg.integrator;
    if (const json* j = root.get("integrator")) {
        Section s(*j, "integrator");
        sc.dt_months = s.number("dt", sc.dt_months);
        sc.horizon_months = s.number("horizon", sc.horizon_months);
        io.eps_inf = s.optional_number("eps_inf", io.eps_inf);
        io.clamp_tol = s.number("clamp_tol", io.clamp_tol);
        io.stride = s.unsigned_integer("stride", io.stride);
        io.stop_at_steady_state = s.boolean("stop_at_steady_state", io.stop_at_steady_state);
        io.require_termination = s.boolean("require_termination", io.require_termination);
        cfg.seeding = seeding_from(s.string("seeding", std::string(seeding_name(cfg.seeding))), "integrator.seeding");
        s.finish();
    }
    if (io.eps_inf && !(*io.eps_inf > 0.0)) {
        invalid("integrator.eps_inf", "must be > 0");
    }
    if (!(io.clamp_tol >= 0.0)) {
        invalid("integrator.clamp_tol", "must be >= 0");
    }
    if (io.stride == 0) {
        invalid("integrator.stride", "must be >= 1");
    }

    sc.initial = default_initial_state(sc, cfg.seeding);
    if (const json* j = root.get("initial")) {
        Section s(*j, "initial");
        cfg.explicit_initial = true;
        for (std::size_t k = 0; k < kStateSize; ++k) {
            const std::string key(kCompartmentNames[k]);
            sc.initial.values[k] = s.number(key, sc.initial.values[k]);
        }
        s.finish();
    }

    GaConfig& ga = cfg.ga;
    if (const json* j = root.get("ga")) {
        Section s(*j, "ga");
        ga.population_size = s.unsigned_integer("population_size", ga.population_size);
        ga.mating_pool_size = s.unsigned_integer("mating_pool_size", ga.mating_pool_size);
        ga.mutation_prob = s.number("mutation_prob", ga.mutation_prob);
        ga.max_generations = s.unsigned_integer("max_generations", ga.max_generations);
        ga.r_obj = s.number("r_obj", ga.r_obj);
        ga.r1_target = s.optional_number("r1_target", ga.r1_target);
        ga.r2_target = s.optional_number("r2_target", ga.r2_target);
        ga.feasibility_tol = s.optional_number("feasibility_tol", ga.feasibility_tol);
        ga.penalty_scale = s.number("penalty_scale", ga.penalty_scale);
        ga.stall_generations = s.unsigned_integer("stall_generations", ga.stall_generations);
        ga.stall_tol = s.number("stall_tol", ga.stall_tol);
        cfg.ga_seed = s.optional_unsigned("seed", cfg.ga_seed);
        s.finish();
    }
    ga.strategy = sc.strategy;
    ga.weights = w;
    ga.integrator = io;
    ga.seed = cfg.ga_seed.value_or(0);

    SensitivityConfig& sens = cfg.sensitivity;
    if (const json* j = root.get("sensitivity")) {
        Section s(*j, "sensitivity");
        sens.n_samples = s.unsigned_integer("n_samples", sens.n_samples);
        sens.n_bins = s.unsigned_integer("n_bins", sens.n_bins);
        sens.seed = s.optional_unsigned("seed", sens.seed);
        if (const json* r = s.get("ranges")) {
            if (!r->is_array()) {
                invalid("sensitivity.ranges", "expected an array");
            }
            for (std::size_t k = 0; k < r->size(); ++k) {
                Section rs((*r)[k], "sensitivity.ranges[" + std::to_string(k) + "]");
                ParameterRange pr;
                pr.name = rs.string("name", "");
                pr.low = rs.number("low", pr.low);
                pr.high = rs.number("high", pr.high);
                rs.finish();
                sens.ranges.push_back(pr);
            }
        }
        s.finish();
    }
    root.finish();

    if (sens.n_samples < 2) {
        invalid("sensitivity.n_samples", "must be >= 2");
    }
    if (sens.n_bins < 1) {
        invalid("sensitivity.n_bins", "must be >= 1");
    }
    if (!sens.ranges.empty()) {
        validate_ranges(sens.ranges);
    }
    sc.validate();
    w.validate();
    ga.validate();
}

} // namespace

std::vector<ParameterRange> RunConfig::resolved_ranges() const
{
    return sensitivity.ranges.empty() ? default_ranges(scenario.strategy) : sensitivity.ranges;
}

std::array<std::string_view, 4> gene_names(StrategyKind strategy)
{
    if (strategy == StrategyKind::Mechanical) {
        return {"m1", "n1", "m2", "n2"};
    }
    return {"p1", "q1", "p2", "q2"};
}

RunConfig config_from_json(const json& doc)
{
    RunConfig cfg;
    try {
        read_config(doc, cfg);
    } catch (const Error& e) {
        if (e.code() == ErrorCode::ValidationError || e.code() == ErrorCode::ParseError) {
            throw;
        }
        // Every config problem surfaces as a validation error naming the field.
        throw Error(ErrorCode::ValidationError, e.what(), e.field());
    }
    return cfg;
}

RunConfig load_config(const std::filesystem::path& path)
{
    std::ifstream in(path);
    if (!in) {
        throw Error(ErrorCode::ParseError, "cannot open config " + path.string());
    }
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw Error(ErrorCode::ParseError, path.string() + ": " + e.what());
    }
    return config_from_json(doc);
}

Scenario load_scenario(const std::filesystem::path& path)
{
    return load_config(path).scenario;
}

json config_to_json(const RunConfig& cfg)
{
    const Scenario& sc = cfg.scenario;
    json doc;
    doc["orchard1"] = write_orchard(sc.orchard1);
    doc["orchard2"] = write_orchard(sc.orchard2);
    doc["coupling"] = {{"phi12", sc.phi12}};
    doc["controls"] = {
        {"strategy", std::string(to_string(sc.strategy))},
        {"m1", sc.controls1.m}, {"n1", sc.controls1.n}, {"p1", sc.controls1.p}, {"q1", sc.controls1.q},
        {"m2", sc.controls2.m}, {"n2", sc.controls2.n}, {"p2", sc.controls2.p}, {"q2", sc.controls2.q},
    };
    const CostWeights& w = cfg.weights;
    doc["weights"] = {
        {"m1_w", w.m1_w}, {"m2_w", w.m2_w}, {"c1_w", w.c1_w}, {"c2_w", w.c2_w}, {"x", w.x}, {"y", w.y},
        {"w1", w.w1},     {"w2", w.w2},     {"t_i", w.t_i},
        {"t_f", w.t_f ? json(*w.t_f) : json(nullptr)},
    };
    const IntegratorOptions& io = cfg.integrator;
    doc["integrator"] = {
        {"dt", sc.dt_months},
        {"horizon", sc.horizon_months},
        {"eps_inf", io.eps_inf ? json(*io.eps_inf) : json(nullptr)},
        {"clamp_tol", io.clamp_tol},
        {"stride", io.stride},
        {"stop_at_steady_state", io.stop_at_steady_state},
        {"require_termination", io.require_termination},
        {"seeding", std::string(seeding_name(cfg.seeding))},
    };
    if (cfg.explicit_initial) {
        json init = json::object();
        for (std::size_t k = 0; k < kStateSize; ++k) {
            init[std::string(kCompartmentNames[k])] = sc.initial.values[k];
        }
        doc["initial"] = init;
    }
    const GaConfig& ga = cfg.ga;
    auto opt = [](const std::optional<double>& v) { return v ? json(*v) : json(nullptr); };
    doc["ga"] = {
        {"population_size", ga.population_size},
        {"mating_pool_size", ga.mating_pool_size},
        {"mutation_prob", ga.mutation_prob},
        {"max_generations", ga.max_generations},
        {"r_obj", ga.r_obj},
        {"r1_target", opt(ga.r1_target)},
        {"r2_target", opt(ga.r2_target)},
        {"feasibility_tol", opt(ga.feasibility_tol)},
        {"penalty_scale", ga.penalty_scale},
        {"stall_generations", ga.stall_generations},
        {"stall_tol", ga.stall_tol},
        {"seed", cfg.ga_seed ? json(*cfg.ga_seed) : json(nullptr)},
    };
    json ranges = json::array();
    for (const ParameterRange& r : cfg.sensitivity.ranges) {
        ranges.push_back({{"name", r.name}, {"low", r.low}, {"high", r.high}});
    }
    doc["sensitivity"] = {
        {"n_samples", cfg.sensitivity.n_samples},
        {"n_bins", cfg.sensitivity.n_bins},
        {"seed", cfg.sensitivity.seed ? json(*cfg.sensitivity.seed) : json(nullptr)},
        {"ranges", ranges},
    };
    return doc;
}

} // namespace orchard_duo
