#include "orchard_duo/analytics.hpp"

#include "orchard_duo/errors.hpp"
#include "orchard_duo/reproduction.hpp"

#include <cmath>
#include <string>

namespace orchard_duo {

namespace {

void require_weight(double value, const std::string& field)
{
    if (!(value > 0.0 && value <= 1.0)) {
        throw Error(ErrorCode::ValidationError, field + " must lie in (0,1], got " + std::to_string(value), field);
    }
}

} // namespace

void CostWeights::validate() const
{
    require_weight(m1_w, "weights.m1_w");
    require_weight(m2_w, "weights.m2_w");
    require_weight(c1_w, "weights.c1_w");
    require_weight(c2_w, "weights.c2_w");
    for (std::size_t k = 0; k < 4; ++k) {
        require_weight(x[k], "weights.x" + std::to_string(k + 1));
        require_weight(y[k], "weights.y" + std::to_string(k + 1));
    }
    if (!(w1 >= 0.0) || !std::isfinite(w1)) {
        throw Error(ErrorCode::ValidationError, "weights.w1 must be finite and >= 0", "weights.w1");
    }
    if (!std::isfinite(w2)) {
        throw Error(ErrorCode::ValidationError, "weights.w2 must be finite", "weights.w2");
    }
    if (!(t_i >= 0.0) || !std::isfinite(t_i)) {
        throw Error(ErrorCode::ValidationError, "weights.t_i must be finite and >= 0", "weights.t_i");
    }
    if (t_f && !(*t_f > t_i && std::isfinite(*t_f))) {
        throw Error(ErrorCode::ValidationError, "weights.t_f must be finite and > t_i", "weights.t_f");
    }
}

AnalyticConstants analytic_constants(const Scenario& scenario)
{
    AnalyticConstants c;
    for (int i : {1, 2}) {
        const OrchardParams& o = scenario.params(i);
        const double r = scenario.rates(i).r_tau_hat;
        if (r == 0.0) {
            throw Error(ErrorCode::DivisionByZero, "r_tau_hat is zero in orchard " + std::to_string(i));
        }
        const double gamma = (o.sigma + r) / (r * (o.sigma + o.mu_tau));
        const double seed = (o.mu_tau - r) / (o.sigma + r);
        (i == 1 ? c.gamma_1 : c.gamma_2) = gamma;
        (i == 1 ? c.symptomatic_seed_correction_1 : c.symptomatic_seed_correction_2) = seed;
    }
    return c;
}

double cumulative_infectious_analytic(const Scenario& scenario, int orchard_index, double r_final, double i_tau_0)
{
    const OrchardParams& o = scenario.params(orchard_index);
    const double r = scenario.rates(orchard_index).r_tau_hat;
    if (r == 0.0) {
        throw Error(ErrorCode::DivisionByZero, "r_tau_hat is zero");
    }
    const double denom = r * (o.sigma + o.mu_tau);
    return r_final * (o.sigma + r) / denom - (r - o.mu_tau) * i_tau_0 / denom;
}

CostBreakdown strategy_cost(const Scenario& scenario, const CostWeights& weights, const EpidemicSummary& summary)
{
    scenario.validate();
    const bool mechanical = scenario.strategy == StrategyKind::Mechanical;
    const std::array<double, 4> u = active_controls(scenario);
    const std::array<double, 4>& cw = mechanical ? weights.x : weights.y;
    const std::array<double, 2> infection_w = mechanical ? std::array{weights.m1_w, weights.m2_w}
                                                         : std::array{weights.c1_w, weights.c2_w};

    CostBreakdown out;
    for (int i : {1, 2}) {
        const OrchardOutcome& o = summary.orchard(i);
        const Compartment i0 = slots_of(i).i;
        const double w = infection_w[static_cast<std::size_t>(i - 1)];
        out.infection_reduced += w * cumulative_infectious_analytic(scenario, i, o.r_final, scenario.initial[i0]);
        out.infection_direct += w * o.cumulative_infectious;
    }
    const double t_f = weights.t_f.value_or(summary.final_time);
    out.window = std::max(0.0, t_f - weights.t_i);
    double sq = 0.0;
    for (std::size_t k = 0; k < 4; ++k) {
        sq += cw[k] * u[k] * u[k];
    }
    out.control = out.window * sq;
    return out;
}

double effectiveness_from_finals(const Scenario& scenario, int orchard_index, double r1_final, double r2_final)
{
    const double r10 = local_r0(scenario, 1);
    const double r20 = local_r0(scenario, 2);
    const AnalyticConstants ac = analytic_constants(scenario);
    const double theta = derived_quantities(scenario).theta12;
    const double phi11 = scenario.phi11();
    const double phi12 = scenario.phi12;
    const double beta1 = scenario.rates(1).beta_tau_hat;
    const double beta2 = scenario.rates(2).beta_tau_hat;
    const double n1 = scenario.orchard1.n_tau;
    const double n2 = scenario.orchard2.n_tau;

    // Seeded removals R(inf) + delta I(0).
    const double x1 = r1_final + ac.symptomatic_seed_correction_1 * scenario.initial[Compartment::I1t];
    const double x2 = r2_final + ac.symptomatic_seed_correction_2 * scenario.initial[Compartment::I2t];

    if (orchard_index == 1) {
        double exponent = -r10 * r10 * phi11 * phi11 / n1 * x1;
        if (phi12 != 0.0) {
            exponent -= theta * r20 * r20 * beta1 / (n1 * beta2) * phi11 * phi12 * x2;
        }
        return scenario.initial[Compartment::S1t] * std::exp(exponent);
    }
    double exponent = -r20 * r20 / n2 * x2 * (1.0 + theta * phi12 * phi12);
    if (phi12 != 0.0) {
        exponent -= r10 * r10 * beta2 / (n2 * beta1) * phi11 * phi12 * x1;
    }
    return scenario.initial[Compartment::S2t] * std::exp(exponent);
}

EffectivenessValue effectiveness(const Scenario& scenario, int orchard_index, const EpidemicSummary& summary)
{
    if (orchard_index != 1 && orchard_index != 2) {
        throw Error(ErrorCode::ValidationError, "orchard index must be 1 or 2");
    }
    EffectivenessValue ev;
    ev.value = effectiveness_from_finals(scenario, orchard_index, summary.orchard(1).r_final,
                                         summary.orchard(2).r_final);
    ev.approximation_warning = summary.orchard(orchard_index).peak_vector_prevalence >= 0.5;
    return ev;
}

ObjectiveValue objective(const Scenario& scenario, const CostWeights& weights, const EpidemicSummary& summary)
{
    ObjectiveValue out;
    out.cost = strategy_cost(scenario, weights, summary);
    const EffectivenessValue e1 = effectiveness(scenario, 1, summary);
    const EffectivenessValue e2 = effectiveness(scenario, 2, summary);
    out.ef1 = e1.value;
    out.ef2 = e2.value;
    out.approximation_warning = e1.approximation_warning || e2.approximation_warning;
    out.j = weights.w1 * out.cost.reduced() + weights.w2 * (out.ef1 + out.ef2);
    return out;
}

} // namespace orchard_duo
