#include "orchard_duo/integrator.hpp"

#include "orchard_duo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace orchard_duo {

namespace {

constexpr std::array<Compartment, 6> kInfectious = {
    Compartment::A1t, Compartment::I1t, Compartment::I1v,
    Compartment::A2t, Compartment::I2t, Compartment::I2v,
};

SystemState axpy(const SystemState& x, double h, const SystemState& k)
{
    SystemState out;
    for (std::size_t j = 0; j < kStateSize; ++j) {
        out.values[j] = x.values[j] + h * k.values[j];
    }
    return out;
}

void clamp_or_throw(SystemState& x, double clamp_tol, double t)
{
    for (std::size_t j = 0; j < kStateSize; ++j) {
        double& v = x.values[j];
        if (!std::isfinite(v)) {
            throw Error(ErrorCode::NonFiniteState,
                        std::string(kCompartmentNames[j]) + " became non-finite at t=" + std::to_string(t));
        }
        if (v < 0.0) {
            if (v > -clamp_tol) {
                v = 0.0;
            } else {
                throw Error(ErrorCode::NonFiniteState,
                            std::string(kCompartmentNames[j]) + " undershot zero by " + std::to_string(-v)
                                + " at t=" + std::to_string(t));
            }
        }
    }
}

bool below_threshold(const SystemState& x, double eps)
{
    return std::all_of(kInfectious.begin(), kInfectious.end(), [&](Compartment c) { return x[c] < eps; });
}

} // namespace

double resolved_eps_inf(const Scenario& scenario, const IntegratorOptions& options)
{
    if (options.eps_inf) {
        return *options.eps_inf;
    }
    return 1e-6 * std::max(scenario.orchard1.n_tau, scenario.orchard2.n_tau);
}

Trajectory integrate(const Scenario& scenario, const IntegratorOptions& options)
{
    scenario.validate();
    if (options.stride == 0) {
        throw Error(ErrorCode::ValidationError, "integrator.stride must be >= 1", "integrator.stride");
    }
    const EffectiveRates h1 = scenario.rates(1);
    const EffectiveRates h2 = scenario.rates(2);
    const double eps = resolved_eps_inf(scenario, options);
    const double dt = scenario.dt_months;
    const double horizon = scenario.horizon_months;
    const auto n_steps = static_cast<std::size_t>(std::ceil(horizon / dt - 1e-9));

    Trajectory traj;
    // Long horizons usually stop early at steady state; cap the up-front reservation.
    const std::size_t expected = std::min<std::size_t>(n_steps / options.stride + 2, std::size_t{1} << 16);
    traj.times.reserve(expected);
    traj.states.reserve(expected);
    traj.times.push_back(0.0);
    traj.states.push_back(scenario.initial);

    SystemState x = scenario.initial;
    double t = 0.0;
    for (std::size_t k = 1; k <= n_steps; ++k) {
        const double t_next = std::min(static_cast<double>(k) * dt, horizon);
        const double h = t_next - t;
        const SystemState k1 = rhs(x, scenario, h1, h2);
        const SystemState k2 = rhs(axpy(x, 0.5 * h, k1), scenario, h1, h2);
        const SystemState k3 = rhs(axpy(x, 0.5 * h, k2), scenario, h1, h2);
        const SystemState k4 = rhs(axpy(x, h, k3), scenario, h1, h2);
        for (std::size_t j = 0; j < kStateSize; ++j) {
            x.values[j] += h / 6.0 * (k1.values[j] + 2.0 * k2.values[j] + 2.0 * k3.values[j] + k4.values[j]);
        }
        t = t_next;
        clamp_or_throw(x, options.clamp_tol, t);

        const bool done = options.stop_at_steady_state && below_threshold(x, eps);
        if (k % options.stride == 0 || k == n_steps || done) {
            traj.times.push_back(t);
            traj.states.push_back(x);
        }
        if (done) {
            traj.terminated_at_steady_state = true;
            break;
        }
    }
    if (options.require_termination && !traj.terminated_at_steady_state) {
        throw Error(ErrorCode::NonConvergence,
                    "infectious compartments still above " + std::to_string(eps) + " at horizon "
                        + std::to_string(horizon) + " months");
    }
    return traj;
}

EpidemicSummary summarize(const Trajectory& trajectory, const Scenario& /*scenario*/)
{
    EpidemicSummary summary;
    if (trajectory.size() == 0) {
        return summary;
    }
    const std::size_t n = trajectory.size();
    summary.final_time = trajectory.times.back();
    summary.terminated = trajectory.terminated_at_steady_state;

    for (int orchard : {1, 2}) {
        const OrchardSlots c = slots_of(orchard);
        OrchardOutcome& out = summary.orchards[static_cast<std::size_t>(orchard - 1)];
        const SystemState& last = trajectory.states.back();
        out.r_final = last[c.r];
        out.s_final = last[c.s];
        out.tree_total = trajectory.states.front().tree_total(orchard);

        double integral = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
            const SystemState& x = trajectory.states[k];
            const double t = trajectory.times[k];
            if (x[c.a] > out.a_peak) {
                out.a_peak = x[c.a];
                out.a_peak_time = t;
            }
            if (x[c.i] > out.i_peak) {
                out.i_peak = x[c.i];
                out.i_peak_time = t;
            }
            const double nv = x.vector_total(orchard);
            if (nv > 0.0) {
                out.peak_vector_prevalence = std::max(out.peak_vector_prevalence, x[c.iv] / nv);
            }
            if (k > 0) {
                const SystemState& prev = trajectory.states[k - 1];
                const double dt = t - trajectory.times[k - 1];
                integral += 0.5 * dt * (prev[c.a] + prev[c.i] + x[c.a] + x[c.i]);
            }
        }
        // Beyond the last state A + I decays exponentially; estimate the rate
        // from the last stored interval.
        if (n >= 2) {
            const SystemState& prev = trajectory.states[n - 2];
            const double y_prev = prev[c.a] + prev[c.i];
            const double y_last = last[c.a] + last[c.i];
            const double span = trajectory.times[n - 1] - trajectory.times[n - 2];
            if (y_last > 0.0 && y_prev > y_last && span > 0.0) {
                const double rate = std::log(y_prev / y_last) / span;
                integral += y_last / rate;
            }
        }
        out.cumulative_infectious = integral;
    }
    return summary;
}

} // namespace orchard_duo
