#pragma once

#include "orchard_duo/model.hpp"

#include <array>
#include <cstddef>
#include <optional>
#include <vector>

namespace orchard_duo {

struct IntegratorOptions {
    /// Steady-state threshold on A, I and I_v of both orchards. Unset means
    /// 1e-6 * max(n_tau of orchard 1, n_tau of orchard 2).
    std::optional<double> eps_inf;
    /// Negative components in (-clamp_tol, 0) are reset to 0; anything more
    /// negative is reported as NonFiniteState.
    double clamp_tol = 1e-9;
    /// Keep every stride-th step (the first and last states are always kept).
    std::size_t stride = 1;
    bool stop_at_steady_state = true;
    /// Throw NonConvergence if the horizon is reached before steady state.
    bool require_termination = false;

    friend bool operator==(const IntegratorOptions&, const IntegratorOptions&) = default;
};

double resolved_eps_inf(const Scenario& scenario, const IntegratorOptions& options);

struct Trajectory {
    std::vector<double> times;
    std::vector<SystemState> states;
    bool terminated_at_steady_state = false;

    std::size_t size() const { return times.size(); }
    const SystemState& back() const { return states.back(); }
};

/// Classical fixed-step RK4 from t = 0 to the scenario horizon, stopping early
/// once every infectious compartment drops below eps_inf.
Trajectory integrate(const Scenario& scenario, const IntegratorOptions& options = {});

struct OrchardOutcome {
    double r_final = 0.0;
    double s_final = 0.0;
    double a_peak = 0.0;
    double a_peak_time = 0.0;
    double i_peak = 0.0;
    double i_peak_time = 0.0;
    /// Integral of A + I over [0, inf): trapezoid on the stored grid plus an
    /// exponential tail beyond the last state.
    double cumulative_infectious = 0.0;
    /// max over time of I_v / (S_v + I_v).
    double peak_vector_prevalence = 0.0;
    /// Conserved tree total S + A + I + R taken from the first state.
    double tree_total = 0.0;
};

struct EpidemicSummary {
    std::array<OrchardOutcome, 2> orchards;
    double final_time = 0.0;
    bool terminated = false;

    const OrchardOutcome& orchard(int index) const { return orchards[static_cast<std::size_t>(index - 1)]; }
};

EpidemicSummary summarize(const Trajectory& trajectory, const Scenario& scenario);

} // namespace orchard_duo
