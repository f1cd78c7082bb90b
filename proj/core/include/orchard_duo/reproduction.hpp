#pragma once

#include "orchard_duo/model.hpp"

#include <array>

namespace orchard_duo {

/// Dense 6x6 matrix over the infected sub-system
/// x = (A1t, I1t, I1v, A2t, I2t, I2v).
using Matrix6 = std::array<std::array<double, 6>, 6>;

struct DerivedQuantities {
    double n_v0_1 = 0.0;         ///< lambda_1 / mu_v_hat_1
    double n_v0_2 = 0.0;         ///< lambda_2 / mu_v_hat_2
    double growth_ratio_1 = 0.0; ///< n_v0_1 / mu_v_hat_1
    double growth_ratio_2 = 0.0; ///< n_v0_2 / mu_v_hat_2
    double delta = 0.0;          ///< growth_ratio_1 / growth_ratio_2
    double theta12 = 0.0;        ///< n_v0_1 mu_v_hat_2 / (n_v0_2 mu_v_hat_1)
};

DerivedQuantities derived_quantities(const Scenario& scenario);

/// Reproduction number of orchard 1 or 2 in isolation (no dispersal).
double local_r0(const Scenario& scenario, int orchard_index);

struct NgmMatrices {
    Matrix6 f_matrix{}; ///< new-infection Jacobian at the DFE
    Matrix6 v_matrix{}; ///< transition Jacobian at the DFE
    Matrix6 k_matrix{}; ///< next generation matrix -F V^{-1}
};

NgmMatrices build_ngm(const Scenario& scenario);

/// Coefficients of det(K - lambda I) = lambda^6 - b lambda^4 - c_signed lambda^2.
///
/// Rows I1t and I2t of K are zero, so two roots vanish and the rest come from
/// the tridiagonal 4x4 block on (A1t, I1v, A2t, I2v):
///   b = P1 + P2 + X,  c_signed = -P1 P2,
/// with P1 = K[A1,I1v] K[I1v,A1] (orchard-1 loop), P2 = K[A2,I2v] K[I2v,A2]
/// (orchard-2 loop, equal to R20^2) and X = K[I1v,A2] K[A2,I1v]
/// (= phi12^2 delta R20^2, the cross-orchard loop).
struct CharPolyCoeffs {
    double b_coeff = 0.0;
    double c_coeff = 0.0; ///< magnitude P1 P2, always >= 0
    double c_sign = -1.0; ///< c_signed = c_sign * c_coeff
    /// (b^2 + 4 c_signed) evaluated as (P1 - P2)^2 + X^2 + 2 X (P1 + P2),
    /// which is cancellation free.
    double discriminant = 0.0;

    double c_signed() const { return c_sign * c_coeff; }
    /// p(lambda) = lambda^6 - b lambda^4 - c_signed lambda^2.
    double evaluate(double lambda) const;
};

CharPolyCoeffs char_poly_coeffs(const Scenario& scenario);

/// Spectral radius of K by power iteration on K^2 (K has +-lambda pairs),
/// accelerated by repeated squaring and finished with plain iterations to a
/// relative tolerance of 1e-12. Throws EigenNonConvergence after 1e5 steps.
double global_r0_spectral(const Scenario& scenario);

/// (1/sqrt 2) sqrt(b + sqrt(b^2 + 4 c_signed)). Cross-checked against the
/// spectral radius; throws InconsistentClosedForm if they differ by more than
/// 1e-6 (1 + value).
double global_r0_closed(const Scenario& scenario);

/// Closed form without the spectral cross-check.
double global_r0_closed_unchecked(const Scenario& scenario);

} // namespace orchard_duo
