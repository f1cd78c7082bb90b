#pragma once

#include "orchard_duo/integrator.hpp"
#include "orchard_duo/model.hpp"

#include <array>
#include <optional>

namespace orchard_duo {

/// Weights of the cost functionals and of the objective J.
struct CostWeights {
    double m1_w = 1.0; ///< infection weight, orchard 1, mechanical
    double m2_w = 1.0; ///< infection weight, orchard 2, mechanical
    double c1_w = 1.0; ///< infection weight, orchard 1, chemical
    double c2_w = 1.0; ///< infection weight, orchard 2, chemical
    std::array<double, 4> x{1.0, 1.0, 1.0, 1.0}; ///< control weights on m1, n1, m2, n2
    std::array<double, 4> y{1.0, 1.0, 1.0, 1.0}; ///< control weights on p1, q1, p2, q2
    double w1 = 1.0; ///< weight on cost in J
    double w2 = 1.0; ///< weight on effectiveness in J; may be negative
    double t_i = 0.0;
    /// End of the control window. Unset means the time the simulation
    /// stopped (steady state or horizon).
    std::optional<double> t_f;

    /// Throws ValidationError naming the field ("weights.x3", ...).
    void validate() const;

    friend bool operator==(const CostWeights&, const CostWeights&) = default;
};

struct AnalyticConstants {
    double gamma_1 = 0.0; ///< (sigma1 + r1) / (r1 (sigma1 + mu1))
    double gamma_2 = 0.0;
    double symptomatic_seed_correction_1 = 0.0; ///< (mu1 - r1) / (sigma1 + r1)
    double symptomatic_seed_correction_2 = 0.0;

    double gamma(int orchard) const { return orchard == 1 ? gamma_1 : gamma_2; }
    double seed_correction(int orchard) const
    {
        return orchard == 1 ? symptomatic_seed_correction_1 : symptomatic_seed_correction_2;
    }
};

/// Throws DivisionByZero when r_tau_hat = 0 in either orchard.
AnalyticConstants analytic_constants(const Scenario& scenario);

/// Integral of A + I over [0, inf) from the final rogued count, exact for the
/// tree equations when R(0) = 0:
///   R(inf) (sigma + r) / (r (sigma + mu)) - (r - mu) I(0) / (r (sigma + mu)).
double cumulative_infectious_analytic(const Scenario& scenario, int orchard_index, double r_final,
                                      double i_tau_0);

struct CostBreakdown {
    double infection_reduced = 0.0; ///< sum_i M_i * (closed-form integral from R_i(inf))
    double infection_direct = 0.0;  ///< sum_i M_i * (quadrature integral from the trajectory)
    double control = 0.0;           ///< (t_f - t_i) * sum weight * control^2
    double window = 0.0;            ///< t_f - t_i

    double reduced() const { return infection_reduced + control; }
    double direct() const { return infection_direct + control; }
};

/// C_X (mechanical) or C_Y (chemical) according to the scenario strategy.
/// Controls are constant in time, so the control integral is closed form.
/// Throws StrategyMismatch if the active controls disagree with the strategy.
CostBreakdown strategy_cost(const Scenario& scenario, const CostWeights& weights, const EpidemicSummary& summary);

struct EffectivenessValue {
    double value = 0.0;
    /// Set when the orchard's peak I_v / N_v reached 0.5, where the series
    /// truncation behind the final-size formula is unreliable.
    bool approximation_warning = false;
};

/// Analytic final susceptible count of orchard 1 or 2, in the general form
/// with the symptomatic seed corrections (they vanish when I(0) = 0).
EffectivenessValue effectiveness(const Scenario& scenario, int orchard_index, const EpidemicSummary& summary);

/// Same formula from explicit final rogued counts; no warning flag.
double effectiveness_from_finals(const Scenario& scenario, int orchard_index, double r1_final, double r2_final);

struct ObjectiveValue {
    CostBreakdown cost;
    double ef1 = 0.0;
    double ef2 = 0.0;
    double j = 0.0; ///< w1 * reduced cost + w2 * (ef1 + ef2)
    bool approximation_warning = false;
};

ObjectiveValue objective(const Scenario& scenario, const CostWeights& weights, const EpidemicSummary& summary);

} // namespace orchard_duo
