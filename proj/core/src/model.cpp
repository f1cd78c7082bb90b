#include "orchard_duo/model.hpp"

#include "orchard_duo/errors.hpp"

#include <cmath>
#include <string>

namespace orchard_duo {

namespace {

void require_positive(double value, std::string_view prefix, const char* name)
{
    if (!(value > 0.0) || !std::isfinite(value)) {
        std::string field = std::string(prefix) + name;
        throw Error(ErrorCode::ValidationError,
                    field + " must be finite and > 0, got " + std::to_string(value), field);
    }
}

void require_probability(double value, std::string_view prefix, const char* name)
{
    if (!(value >= 0.0 && value <= 1.0)) {
        std::string field = std::string(prefix) + name;
        throw Error(ErrorCode::ValidationError,
                    field + " must lie in [0,1], got " + std::to_string(value), field);
    }
}

void require_control(double value, std::string_view prefix, const char* name, std::string_view suffix)
{
    if (!(value >= 0.0 && value < 1.0)) {
        std::string field = std::string(prefix) + name + std::string(suffix);
        throw Error(ErrorCode::ControlOutOfRange,
                    field + " must lie in [0,1), got " + std::to_string(value), field);
    }
}

} // namespace

void OrchardParams::validate(std::string_view prefix) const
{
    require_positive(n_tau, prefix, "n_tau");
    if (n_tau < 1.0) {
        std::string field = std::string(prefix) + "n_tau";
        throw Error(ErrorCode::ValidationError, field + " must be >= 1", field);
    }
    require_positive(mu_tau, prefix, "mu_tau");
    require_positive(mu_v, prefix, "mu_v");
    require_positive(sigma, prefix, "sigma");
    require_positive(omega, prefix, "omega");
    require_positive(lambda_v, prefix, "lambda_v");
    require_positive(b, prefix, "b");
    require_probability(pi_tau, prefix, "pi_tau");
    require_probability(pi_v, prefix, "pi_v");
}

std::string_view to_string(StrategyKind kind) noexcept
{
    return kind == StrategyKind::Mechanical ? "mechanical" : "chemical";
}

StrategyKind strategy_from_string(std::string_view name)
{
    if (name == "mechanical") {
        return StrategyKind::Mechanical;
    }
    if (name == "chemical") {
        return StrategyKind::Chemical;
    }
    throw Error(ErrorCode::ValidationError,
                "strategy must be \"mechanical\" or \"chemical\", got \"" + std::string(name) + "\"",
                "controls.strategy");
}

void ControlSet::validate(std::string_view prefix, std::string_view suffix) const
{
    require_control(m, prefix, "m", suffix);
    require_control(n, prefix, "n", suffix);
    require_control(p, prefix, "p", suffix);
    require_control(q, prefix, "q", suffix);
}

EffectiveRates effective_rates(const OrchardParams& params, const ControlSet& controls)
{
    controls.validate();
    return EffectiveRates{
        .beta_tau_hat = (1.0 - controls.m) * params.b * params.pi_tau,
        .r_tau_hat = 1.0 - controls.n,
        .beta_v_hat = (1.0 - controls.p) * params.omega * params.pi_v,
        .mu_v_hat = (1.0 + controls.q) * params.mu_v,
    };
}

OrchardSlots slots_of(int orchard)
{
    using C = Compartment;
    if (orchard == 1) {
        return {C::S1t, C::A1t, C::I1t, C::R1t, C::S1v, C::I1v};
    }
    return {C::S2t, C::A2t, C::I2t, C::R2t, C::S2v, C::I2v};
}

double SystemState::tree_total(int orchard) const
{
    const auto c = slots_of(orchard);
    return (*this)[c.s] + (*this)[c.a] + (*this)[c.i] + (*this)[c.r];
}

double SystemState::vector_total(int orchard) const
{
    const auto c = slots_of(orchard);
    return (*this)[c.sv] + (*this)[c.iv];
}

void Scenario::validate() const
{
    orchard1.validate("orchard1.");
    orchard2.validate("orchard2.");
    if (!(phi12 >= 0.0 && phi12 <= 1.0)) {
        throw Error(ErrorCode::ValidationError,
                    "coupling.phi12 must lie in [0,1], got " + std::to_string(phi12), "coupling.phi12");
    }
    controls1.validate("controls.", "1");
    controls2.validate("controls.", "2");
    if (strategy == StrategyKind::Mechanical) {
        if (controls1.p != 0.0 || controls1.q != 0.0 || controls2.p != 0.0 || controls2.q != 0.0) {
            throw Error(ErrorCode::StrategyMismatch,
                        "mechanical strategy requires p = q = 0 in both orchards", "controls");
        }
    } else if (controls1.m != 0.0 || controls1.n != 0.0 || controls2.m != 0.0 || controls2.n != 0.0) {
        throw Error(ErrorCode::StrategyMismatch,
                    "chemical strategy requires m = n = 0 in both orchards", "controls");
    }
    if (!(dt_months > 0.0) || !std::isfinite(dt_months)) {
        throw Error(ErrorCode::ValidationError, "integrator.dt must be > 0", "integrator.dt");
    }
    if (!(horizon_months >= dt_months) || !std::isfinite(horizon_months)) {
        throw Error(ErrorCode::ValidationError, "integrator.horizon must be >= dt", "integrator.horizon");
    }
    for (std::size_t k = 0; k < kStateSize; ++k) {
        const double v = initial.values[k];
        if (!(v >= 0.0) || !std::isfinite(v)) {
            std::string field = "initial." + std::string(kCompartmentNames[k]);
            throw Error(ErrorCode::ValidationError, field + " must be finite and >= 0", field);
        }
    }
    for (int orchard : {1, 2}) {
        const double n = params(orchard).n_tau;
        const double total = initial.tree_total(orchard);
        if (std::abs(total - n) > 1.0 + 1e-9 * n) {
            std::string field = "initial.orchard" + std::to_string(orchard);
            throw Error(ErrorCode::ValidationError,
                        field + " tree total " + std::to_string(total) + " is inconsistent with n_tau "
                            + std::to_string(n),
                        field);
        }
    }
}

SystemState rhs(const SystemState& state, const Scenario& scenario)
{
    return rhs(state, scenario, scenario.rates(1), scenario.rates(2));
}

SystemState rhs(const SystemState& x, const Scenario& scenario,
                const EffectiveRates& h1, const EffectiveRates& h2)
{
    for (double v : x.values) {
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::NonFiniteState, "state has a non-finite component");
        }
    }
    using C = Compartment;
    const OrchardParams& o1 = scenario.orchard1;
    const OrchardParams& o2 = scenario.orchard2;
    const double phi12 = scenario.phi12;
    const double phi11 = scenario.phi11();

    const double infected1 = x[C::A1t] + x[C::I1t];
    const double infected2 = x[C::A2t] + x[C::I2t];

    // Orchard 1 trees are bitten only by the resident fraction of its psyllids.
    const double force_tree1 = h1.beta_tau_hat * x[C::S1t] * (phi11 * x[C::I1v]) / o1.n_tau;
    // Orchard 1 psyllids feed at home (phi11) and in orchard 2 (phi12).
    const double force_vec1 = h1.beta_v_hat * phi11 * x[C::S1v] * infected1 / o1.n_tau
                            + h2.beta_v_hat * phi12 * x[C::S1v] * infected2 / o2.n_tau;
    const double force_tree2 = h2.beta_tau_hat * x[C::S2t] * x[C::I2v] / o2.n_tau
                             + h2.beta_tau_hat * x[C::S2t] * (phi12 * x[C::I1v]) / o2.n_tau;
    const double force_vec2 = h2.beta_v_hat * x[C::S2v] * infected2 / o2.n_tau;

    SystemState d;
    d[C::S1t] = -force_tree1;
    d[C::A1t] = force_tree1 - (o1.sigma + o1.mu_tau) * x[C::A1t];
    d[C::I1t] = o1.sigma * x[C::A1t] - h1.r_tau_hat * x[C::I1t];
    d[C::R1t] = o1.mu_tau * x[C::A1t] + h1.r_tau_hat * x[C::I1t];
    d[C::S1v] = o1.lambda_v - force_vec1 - h1.mu_v_hat * x[C::S1v];
    d[C::I1v] = force_vec1 - h1.mu_v_hat * x[C::I1v];

    d[C::S2t] = -force_tree2;
    d[C::A2t] = force_tree2 - (o2.sigma + o2.mu_tau) * x[C::A2t];
    d[C::I2t] = o2.sigma * x[C::A2t] - h2.r_tau_hat * x[C::I2t];
    d[C::R2t] = o2.mu_tau * x[C::A2t] + h2.r_tau_hat * x[C::I2t];
    d[C::S2v] = o2.lambda_v - force_vec2 - h2.mu_v_hat * x[C::S2v];
    d[C::I2v] = force_vec2 - h2.mu_v_hat * x[C::I2v];
    return d;
}

SystemState disease_free_equilibrium(const Scenario& scenario)
{
    SystemState p;
    for (int orchard : {1, 2}) {
        const auto c = slots_of(orchard);
        p[c.s] = scenario.params(orchard).n_tau;
        p[c.sv] = scenario.params(orchard).lambda_v / scenario.rates(orchard).mu_v_hat;
    }
    return p;
}

SystemState default_initial_state(const Scenario& scenario, InitialSeeding seeding)
{
    SystemState x;
    for (int orchard : {1, 2}) {
        const auto c = slots_of(orchard);
        const OrchardParams& o = scenario.params(orchard);
        x[c.s] = o.n_tau;
        x[c.sv] = o.lambda_v / o.mu_v;
    }
    x[Compartment::A1t] = 1.0;
    if (seeding == InitialSeeding::FromSusceptibles) {
        x[Compartment::S1t] -= 1.0;
    }
    return x;
}

Scenario baseline_scenario(StrategyKind strategy)
{
    Scenario s;
    s.strategy = strategy;
    s.initial = default_initial_state(s);
    return s;
}

void install_controls(Scenario& scenario, const std::array<double, 4>& genes)
{
    if (scenario.strategy == StrategyKind::Mechanical) {
        scenario.controls1 = ControlSet{.m = genes[0], .n = genes[1]};
        scenario.controls2 = ControlSet{.m = genes[2], .n = genes[3]};
    } else {
        scenario.controls1 = ControlSet{.p = genes[0], .q = genes[1]};
        scenario.controls2 = ControlSet{.p = genes[2], .q = genes[3]};
    }
}

std::array<double, 4> active_controls(const Scenario& scenario)
{
    const ControlSet& c1 = scenario.controls1;
    const ControlSet& c2 = scenario.controls2;
    if (scenario.strategy == StrategyKind::Mechanical) {
        return {c1.m, c1.n, c2.m, c2.n};
    }
    return {c1.p, c1.q, c2.p, c2.q};
}

} // namespace orchard_duo
