#pragma once

#include <array>
#include <cstddef>
#include <string_view>

namespace orchard_duo {

/// Biological and epidemiological constants of one orchard. Rates are per
/// month. Defaults are the baseline column of the parameter table.
struct OrchardParams {
    double n_tau = 2000.0;    ///< tree count
    double mu_tau = 0.0033;   ///< natural tree mortality
    double mu_v = 0.266;      ///< baseline psyllid mortality
    double sigma = 0.2;       ///< asymptomatic -> symptomatic progression
    double omega = 100.0;     ///< max psyllid abundance per tree
    double lambda_v = 25000.; ///< psyllid recruitment
    double b = 1.15;          ///< probing rate
    double pi_tau = 0.025;    ///< transmission probability, psyllid -> tree
    double pi_v = 0.13;       ///< transmission probability, tree -> psyllid

    /// Throws ValidationError naming the offending field. `prefix` is
    /// prepended to field names (e.g. "orchard1.").
    void validate(std::string_view prefix = {}) const;

    friend bool operator==(const OrchardParams&, const OrchardParams&) = default;
};

enum class StrategyKind { Mechanical, Chemical };

std::string_view to_string(StrategyKind kind) noexcept;
StrategyKind strategy_from_string(std::string_view name);

/// The four control knobs of one orchard, each in [0, 1).
///   m: probing reduction, n: vigilance reduction (r_hat = 1 - n),
///   p: abundance reduction, q: psyllid mortality boost.
struct ControlSet {
    double m = 0.0;
    double n = 0.0;
    double p = 0.0;
    double q = 0.0;

    /// Throws ControlOutOfRange for any knob outside [0, 1). The reported
    /// field is prefix + knob + suffix, e.g. "controls." "m" "1".
    void validate(std::string_view prefix = {}, std::string_view suffix = {}) const;

    friend bool operator==(const ControlSet&, const ControlSet&) = default;
};

/// Controlled ("hatted") rates induced by a ControlSet.
struct EffectiveRates {
    double beta_tau_hat; ///< (1-m) b pi_tau
    double r_tau_hat;    ///< 1 - n
    double beta_v_hat;   ///< (1-p) omega pi_v
    double mu_v_hat;     ///< (1+q) mu_v
};

EffectiveRates effective_rates(const OrchardParams& params, const ControlSet& controls);

enum class Compartment : std::size_t {
    S1t, A1t, I1t, R1t, S1v, I1v,
    S2t, A2t, I2t, R2t, S2v, I2v,
};

inline constexpr std::size_t kStateSize = 12;

/// Column names in compartment order, used for CSV headers.
inline constexpr std::array<std::string_view, kStateSize> kCompartmentNames = {
    "S1t", "A1t", "I1t", "R1t", "S1v", "I1v",
    "S2t", "A2t", "I2t", "R2t", "S2v", "I2v",
};

/// The twelve state variables. Also used for time derivatives.
struct SystemState {
    std::array<double, kStateSize> values{};

    double& operator[](Compartment c) { return values[static_cast<std::size_t>(c)]; }
    double operator[](Compartment c) const { return values[static_cast<std::size_t>(c)]; }

    /// S + A + I + R of orchard 1 or 2.
    double tree_total(int orchard) const;
    /// S_v + I_v of orchard 1 or 2.
    double vector_total(int orchard) const;

    friend bool operator==(const SystemState&, const SystemState&) = default;
};

/// Compartment slots of one orchard, so per-orchard code can be written once.
struct OrchardSlots {
    Compartment s, a, i, r, sv, iv;
};

OrchardSlots slots_of(int orchard);

/// Full description of one two-orchard run. Dispersal is one-directional,
/// orchard 1 -> orchard 2; the retained fraction phi11 = 1 - phi12 is derived.
struct Scenario {
    OrchardParams orchard1;
    OrchardParams orchard2;
    double phi12 = 0.35;
    StrategyKind strategy = StrategyKind::Mechanical;
    ControlSet controls1;
    ControlSet controls2;
    SystemState initial;
    double horizon_months = 240.0;
    double dt_months = 0.01;

    double phi11() const { return 1.0 - phi12; }
    const OrchardParams& params(int orchard) const { return orchard == 1 ? orchard1 : orchard2; }
    const ControlSet& controls(int orchard) const { return orchard == 1 ? controls1 : controls2; }
    EffectiveRates rates(int orchard) const { return effective_rates(params(orchard), controls(orchard)); }

    /// Checks every invariant, throwing ValidationError, ControlOutOfRange or
    /// StrategyMismatch. The initial tree total of each orchard may exceed
    /// n_tau by at most one tree (the seeded asymptomatic tree).
    void validate() const;

    friend bool operator==(const Scenario&, const Scenario&) = default;
};

enum class InitialSeeding {
    /// S = N and A = 1, so the orchard-1 tree total is N + 1.
    AsWritten,
    /// S = N - 1 and A = 1, conserving N exactly.
    FromSusceptibles,
};

/// Right-hand side of the two-orchard SAIR-SI system.
SystemState rhs(const SystemState& state, const Scenario& scenario);

/// Same, with the controlled rates of both orchards already resolved.
SystemState rhs(const SystemState& state, const Scenario& scenario,
                const EffectiveRates& rates1, const EffectiveRates& rates2);

/// Disease-free equilibrium. Susceptible psyllids sit at lambda_v / mu_v_hat,
/// which equals lambda_v / mu_v when q = 0.
SystemState disease_free_equilibrium(const Scenario& scenario);

/// One asymptomatic tree in orchard 1, everything else disease free, with
/// psyllids at their uncontrolled equilibrium lambda_v / mu_v.
SystemState default_initial_state(const Scenario& scenario,
                                  InitialSeeding seeding = InitialSeeding::AsWritten);

/// Baseline scenario: both orchards at table defaults, phi12 = 0.35, zero
/// controls, default initial state.
Scenario baseline_scenario(StrategyKind strategy = StrategyKind::Mechanical);

/// Writes the four genes (m1, n1, m2, n2) or (p1, q1, p2, q2) into the control
/// slots of `scenario` according to its strategy; the other pair is zeroed.
void install_controls(Scenario& scenario, const std::array<double, 4>& genes);

/// The four strategy-relevant knobs, in gene order.
std::array<double, 4> active_controls(const Scenario& scenario);

} // namespace orchard_duo
