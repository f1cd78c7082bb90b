#include "orchard_duo/reproduction.hpp"

#include "orchard_duo/errors.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace orchard_duo {

namespace {

enum : std::size_t { kA1 = 0, kI1 = 1, kV1 = 2, kA2 = 3, kI2 = 4, kV2 = 5 };

constexpr int kSquarings = 64;
constexpr int kMaxIterations = 100000;
constexpr double kPowerTol = 1e-12;

Matrix6 multiply(const Matrix6& a, const Matrix6& b)
{
    Matrix6 out{};
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t k = 0; k < 6; ++k) {
            if (a[i][k] == 0.0) {
                continue;
            }
            for (std::size_t j = 0; j < 6; ++j) {
                out[i][j] += a[i][k] * b[k][j];
            }
        }
    }
    return out;
}

double max_abs(const Matrix6& m)
{
    double best = 0.0;
    for (const auto& row : m) {
        for (double v : row) {
            best = std::max(best, std::abs(v));
        }
    }
    return best;
}

/// Gauss-Jordan with partial pivoting.
Matrix6 invert(Matrix6 a)
{
    Matrix6 inv{};
    for (std::size_t i = 0; i < 6; ++i) {
        inv[i][i] = 1.0;
    }
    const double scale = std::max(max_abs(a), 1.0);
    for (std::size_t col = 0; col < 6; ++col) {
        std::size_t pivot = col;
        for (std::size_t r = col + 1; r < 6; ++r) {
            if (std::abs(a[r][col]) > std::abs(a[pivot][col])) {
                pivot = r;
            }
        }
        if (std::abs(a[pivot][col]) <= 1e-300 * scale) {
            throw Error(ErrorCode::SingularTransition, "transition matrix V is singular");
        }
        std::swap(a[col], a[pivot]);
        std::swap(inv[col], inv[pivot]);
        const double d = a[col][col];
        for (std::size_t j = 0; j < 6; ++j) {
            a[col][j] /= d;
            inv[col][j] /= d;
        }
        for (std::size_t r = 0; r < 6; ++r) {
            if (r == col || a[r][col] == 0.0) {
                continue;
            }
            const double f = a[r][col];
            for (std::size_t j = 0; j < 6; ++j) {
                a[r][j] -= f * a[col][j];
                inv[r][j] -= f * inv[col][j];
            }
        }
    }
    return inv;
}

std::array<double, 6> mat_vec(const Matrix6& m, const std::array<double, 6>& v)
{
    std::array<double, 6> out{};
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            out[i] += m[i][j] * v[j];
        }
    }
    return out;
}

double max_abs(const std::array<double, 6>& v)
{
    double best = 0.0;
    for (double x : v) {
        best = std::max(best, std::abs(x));
    }
    return best;
}

void check_orchard(int orchard_index)
{
    if (orchard_index != 1 && orchard_index != 2) {
        throw Error(ErrorCode::ValidationError, "orchard index must be 1 or 2, got " + std::to_string(orchard_index));
    }
}

} // namespace

DerivedQuantities derived_quantities(const Scenario& scenario)
{
    const EffectiveRates h1 = scenario.rates(1);
    const EffectiveRates h2 = scenario.rates(2);
    DerivedQuantities d;
    d.n_v0_1 = scenario.orchard1.lambda_v / h1.mu_v_hat;
    d.n_v0_2 = scenario.orchard2.lambda_v / h2.mu_v_hat;
    d.growth_ratio_1 = d.n_v0_1 / h1.mu_v_hat;
    d.growth_ratio_2 = d.n_v0_2 / h2.mu_v_hat;
    d.delta = d.growth_ratio_1 / d.growth_ratio_2;
    d.theta12 = d.n_v0_1 * h2.mu_v_hat / (d.n_v0_2 * h1.mu_v_hat);
    return d;
}

double local_r0(const Scenario& scenario, int orchard_index)
{
    check_orchard(orchard_index);
    const OrchardParams& o = scenario.params(orchard_index);
    const EffectiveRates h = scenario.rates(orchard_index);
    if (h.r_tau_hat == 0.0) {
        throw Error(ErrorCode::DivisionByZero, "r_tau_hat is zero (n = 1)");
    }
    const double n_v0 = o.lambda_v / h.mu_v_hat;
    const double tree_to_vector = h.beta_tau_hat / (o.sigma + o.mu_tau);
    const double vector_to_tree = h.beta_v_hat / h.mu_v_hat;
    return std::sqrt(tree_to_vector * vector_to_tree * n_v0 / o.n_tau * (o.sigma / h.r_tau_hat + 1.0));
}

NgmMatrices build_ngm(const Scenario& scenario)
{
    const OrchardParams& o1 = scenario.orchard1;
    const OrchardParams& o2 = scenario.orchard2;
    const EffectiveRates h1 = scenario.rates(1);
    const EffectiveRates h2 = scenario.rates(2);
    const DerivedQuantities d = derived_quantities(scenario);
    const double phi12 = scenario.phi12;
    const double phi11 = scenario.phi11();

    NgmMatrices ngm;
    Matrix6& f = ngm.f_matrix;
    f[kA1][kV1] = h1.beta_tau_hat * phi11;
    // Row I1v follows the displayed F: phi11 multiplies the A1t column only.
    f[kV1][kA1] = h1.beta_v_hat * phi11 * d.n_v0_1 / o1.n_tau;
    f[kV1][kI1] = h1.beta_v_hat * d.n_v0_1 / o1.n_tau;
    f[kV1][kA2] = h2.beta_v_hat * phi12 * d.n_v0_1 / o2.n_tau;
    f[kV1][kI2] = h2.beta_v_hat * phi12 * d.n_v0_1 / o2.n_tau;
    f[kA2][kV1] = h2.beta_tau_hat * phi12;
    f[kA2][kV2] = h2.beta_tau_hat;
    f[kV2][kA2] = h2.beta_v_hat * d.n_v0_2 / o2.n_tau;
    f[kV2][kI2] = h2.beta_v_hat * d.n_v0_2 / o2.n_tau;

    Matrix6& v = ngm.v_matrix;
    v[kA1][kA1] = -(o1.sigma + o1.mu_tau);
    v[kI1][kA1] = o1.sigma;
    v[kI1][kI1] = -h1.r_tau_hat;
    v[kV1][kV1] = -h1.mu_v_hat;
    v[kA2][kA2] = -(o2.sigma + o2.mu_tau);
    v[kI2][kA2] = o2.sigma;
    v[kI2][kI2] = -h2.r_tau_hat;
    v[kV2][kV2] = -h2.mu_v_hat;

    const Matrix6 fv = multiply(f, invert(v));
    for (std::size_t i = 0; i < 6; ++i) {
        for (std::size_t j = 0; j < 6; ++j) {
            // + 0.0 folds -0.0 into 0.0
            ngm.k_matrix[i][j] = -fv[i][j] + 0.0;
        }
    }
    return ngm;
}

double CharPolyCoeffs::evaluate(double lambda) const
{
    const double l2 = lambda * lambda;
    return l2 * l2 * l2 - b_coeff * l2 * l2 - c_signed() * l2;
}

CharPolyCoeffs char_poly_coeffs(const Scenario& scenario)
{
    const OrchardParams& o1 = scenario.orchard1;
    const EffectiveRates h1 = scenario.rates(1);
    const double phi11 = scenario.phi11();
    const double phi12 = scenario.phi12;
    const double r10 = local_r0(scenario, 1);
    const double r20 = local_r0(scenario, 2);
    const double delta = derived_quantities(scenario).delta;

    // Orchard-1 loop: only the A1t column of the I1v row carries phi11, so the
    // loop is phi11 R10^2 (sigma + phi11 r) / (sigma + r) rather than phi11^2 R10^2.
    const double p1 = phi11 * r10 * r10 * (o1.sigma + phi11 * h1.r_tau_hat) / (o1.sigma + h1.r_tau_hat);
    const double p2 = r20 * r20;
    const double cross = phi12 * phi12 * delta * p2;

    CharPolyCoeffs c;
    c.b_coeff = p1 + p2 + cross;
    c.c_coeff = p1 * p2;
    c.c_sign = -1.0;
    c.discriminant = (p1 - p2) * (p1 - p2) + cross * cross + 2.0 * cross * (p1 + p2);
    return c;
}

double global_r0_spectral(const Scenario& scenario)
{
    const Matrix6 k = build_ngm(scenario).k_matrix;
    // K only has eigenvalue pairs +-lambda, so iterate on K^2 where the Perron
    // root rho^2 is the unique dominant value up to multiplicity.
    const Matrix6 k2 = multiply(k, k);
    const double scale = max_abs(k2);
    if (scale == 0.0) {
        return 0.0;
    }

    // Power iteration by repeated squaring: after s squarings the iterate is
    // proportional to (K^2)^(2^s).
    Matrix6 m = k2;
    for (auto& row : m) {
        for (double& x : row) {
            x /= scale;
        }
    }
    for (int s = 0; s < kSquarings; ++s) {
        m = multiply(m, m);
        const double mx = max_abs(m);
        if (mx == 0.0) {
            return 0.0;
        }
        for (auto& row : m) {
            for (double& x : row) {
                x /= mx;
            }
        }
    }

    std::array<double, 6> v = mat_vec(m, {1, 1, 1, 1, 1, 1});
    double norm = max_abs(v);
    if (norm == 0.0) {
        return 0.0;
    }
    for (double& x : v) {
        x /= norm;
    }
    double lambda_sq = 0.0;
    for (int it = 0; it < kMaxIterations; ++it) {
        std::array<double, 6> w = mat_vec(k2, v);
        const double next = max_abs(w);
        if (next == 0.0) {
            return 0.0;
        }
        for (double& x : w) {
            x /= next;
        }
        v = w;
        if (std::abs(next - lambda_sq) <= kPowerTol * next) {
            return std::sqrt(next);
        }
        lambda_sq = next;
    }
    throw Error(ErrorCode::EigenNonConvergence, "power iteration did not converge on the NGM");
}

double global_r0_closed_unchecked(const Scenario& scenario)
{
    const CharPolyCoeffs c = char_poly_coeffs(scenario);
    return std::sqrt(0.5 * (c.b_coeff + std::sqrt(c.discriminant)));
}

double global_r0_closed(const Scenario& scenario)
{
    const double closed = global_r0_closed_unchecked(scenario);
    const double spectral = global_r0_spectral(scenario);
    if (std::abs(closed - spectral) > 1e-6 * (1.0 + spectral)) {
        throw Error(ErrorCode::InconsistentClosedForm,
                    "closed-form R0 " + std::to_string(closed) + " disagrees with spectral radius "
                        + std::to_string(spectral));
    }
    return closed;
}

} // namespace orchard_duo
