"""Closed-form value functions and optimal feedback controls.

The auxiliary control problem (production constraint relaxed) is linear
quadratic, so its value function is an explicit quadratic form in the
state,

    v(t, x, y, d) = A (d-x)^2 + B y^2 + F (d-x) y + G (d-x) + H y + K,

with time-to-go dependent coefficients solving a Riccati system.  This
module evaluates those coefficients from their closed forms, assembles the
value functions (plain, jump-corrected and pure-trader variants) and the
optimal feedback trading rates.  Numerical ODE integration of the same
Riccati systems lives in :mod:`intraday.oracle` and is used only for
cross-verification, never in the production path.

All common denominators ``(r + nu) tau + 2 gamma`` are factored before
combining terms so that the near-degenerate regime ``nu = gamma = 1e-10``
stays accurate in double precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .model import JumpParams, MarketState, ModelParams, reduced_cost_coefficient


@dataclass(frozen=True)
class CoefficientSet:
    """Riccati coefficient values at a fixed time-to-go.

    Units follow the quadratic form
    ``v = a (d-x)^2 + b y^2 + f (d-x) y + g (d-x) + h y + k``.
    """

    a: float
    b: float
    f: float
    g: float
    h: float
    k: float

    def assemble(self, spread, y):
        """Evaluate the quadratic form at spread d - x and price y."""
        return (self.a * spread**2 + self.b * y**2 + self.f * spread * y
                + self.g * spread + self.h * y + self.k)


@dataclass(frozen=True)
class JumpCoefficientSet:
    """Jump-corrected coefficients; the quadratic part is unchanged."""

    base: CoefficientSet
    g_lambda: float
    h_lambda: float
    k_lambda: float

    def assemble(self, spread, y):
        b = self.base
        return (b.a * spread**2 + b.b * y**2 + b.f * spread * y
                + self.g_lambda * spread + self.h_lambda * y + self.k_lambda)


def _coefficients_for_r(tau: float, r: float, params: ModelParams) -> CoefficientSet:
    """Closed-form coefficients with an explicit reduced cost coefficient.

    Used with r = r(eta, beta) for the auxiliary problem and r = eta for
    the pure-trader limit.
    """
    if tau < 0:
        raise ValueError("time-to-go must be nonnegative")
    s0, sd = params.sigma0, params.sigma_d
    mu, nu, gamma, rho = params.mu, params.nu, params.gamma, params.rho
    den = (r + nu) * tau + 2.0 * gamma
    a = r * (0.5 * nu * tau + gamma) / den
    b = -0.5 * tau / den
    f = r * tau / den
    g = 2.0 * mu * tau * a
    h = -2.0 * r * mu * tau * b
    log_term = math.log1p((r + nu) * tau / (2.0 * gamma))
    k = (gamma * (s0**2 + sd**2 * r**2 - 2.0 * rho * s0 * sd * r) / (r + nu) ** 2
         * log_term
         + (sd**2 * r * nu + 2.0 * rho * s0 * sd * r - s0**2) / (2.0 * (r + nu))
         * tau
         + r * mu**2 * tau**2 * (0.5 * nu * tau + gamma) / den)
    return CoefficientSet(a, b, f, g, h, k)


def riccati_coefficients(tau: float, params: ModelParams) -> CoefficientSet:
    """Coefficients A..K of the auxiliary value function at time-to-go tau."""
    return _coefficients_for_r(tau, reduced_cost_coefficient(params), params)


def value_aux(state: MarketState, params: ModelParams) -> float:
    """Auxiliary (unconstrained-production) value function at a state.

    Depends on inventory and demand only through the spread d - x; at the
    delivery time it reduces to the post-production terminal cost
    ``(1/2) r(eta, beta) (d - x)^2``.
    """
    tau = params.horizon - state.t
    coeffs = riccati_coefficients(tau, params)
    return float(coeffs.assemble(state.spread, state.y))


def feedback_rate(tau, spread, y, params: ModelParams):
    """Optimal trading rate q(tau, spread, y) in feedback form, MW/s.

    ``q = (r (mu tau + spread) - y) / ((r + nu) tau + 2 gamma)``; accepts
    scalars or arrays in (spread, y).
    """
    r = reduced_cost_coefficient(params)
    return (r * (params.mu * tau + spread) - y) / ((r + params.nu) * tau
                                                   + 2.0 * params.gamma)


def value_pure_trader(state: MarketState, params: ModelParams) -> float:
    """Value function of the pure trader (beta -> infinity, r -> eta)."""
    tau = params.horizon - state.t
    coeffs = _coefficients_for_r(tau, params.eta, params)
    return float(coeffs.assemble(state.spread, state.y))


def feedback_rate_pure_trader(tau, spread, y, params: ModelParams):
    """Pure-trader feedback rate: q with r replaced by eta."""
    return (params.eta * (params.mu * tau + spread) - y) / (
        (params.eta + params.nu) * tau + 2.0 * params.gamma)


def forecast_equilibrium(tau, state: MarketState, params: ModelParams):
    """Forecast marginal-price / marginal-cost equilibrium of the optimum.

    At the optimum the forecast purchase price of a marginal MW equals the
    forecast marginal cost of production:

        Y + nu q tau + 2 gamma q = beta xi_s,
        xi_s = (eta/(eta+beta)) (D + mu tau - X - q tau).

    Returns
    -------
    (lhs, rhs, forecast_production)
        Both sides of the identity (equal to machine precision) and the
        forecast production quantity xi_s.
    """
    if params.pure_trader:
        raise ValueError("equilibrium identity requires finite beta")
    q = feedback_rate(tau, state.spread, state.y, params)
    lhs = state.y + params.nu * q * tau + 2.0 * params.gamma * q
    xi_s = params.eta / (params.eta + params.beta) * (
        state.d + params.mu * tau - state.x - q * tau)
    rhs = params.beta * xi_s
    return lhs, rhs, xi_s


def jump_riccati_coefficients(tau: float, params: ModelParams,
                              jumps: JumpParams | None) -> JumpCoefficientSet:
    """Jump-corrected coefficients G_l, H_l, K_l (A, B, F are unchanged)."""
    base = riccati_coefficients(tau, params)
    if jumps is None or jumps.lam == 0.0:
        return JumpCoefficientSet(base, base.g, base.h, base.k)

    r = reduced_cost_coefficient(params)
    mu, nu, gamma = params.mu, params.nu, params.gamma
    lam = jumps.lam
    pp, pm = jumps.p_plus, jumps.p_minus
    dp, dm = jumps.delta_plus, jumps.delta_minus
    pip, pim = jumps.pi_plus, jumps.pi_minus
    delta, pi = jumps.delta, jumps.pi
    den = (r + nu) * tau + 2.0 * gamma
    log_term = math.log1p((r + nu) * tau / (2.0 * gamma))

    g_l = base.g + 0.5 * lam * r * tau * (
        pi * tau + 2.0 * delta * (nu * tau + 2.0 * gamma)) / den
    h_l = base.h - 0.5 * lam * tau**2 * (pi - 2.0 * r * delta) / den
    k_l = base.k
    k_l += (lam * gamma * (pp * (pip - r * dp) ** 2 + pm * (pim - r * dm) ** 2)
            / (r + nu) ** 2 * log_term)
    k_l += (-0.5 * lam * (pp * (pip**2 - r * dp * (2.0 * pip + nu * dp))
                          + pm * (pim**2 - r * dm * (2.0 * pim + nu * dm)))
            / (r + nu) * tau)
    k_l += (0.5 * lam * r * (2.0 * nu * mu * delta
                             + lam * (pp**2 * dp * (pip + nu * dp)
                                      + pm**2 * dm * (pim + nu * dm)))
            / (r + nu) * tau**2)
    k_l += (lam**2 * gamma * r * (r * delta**2 + 2.0 * nu * pp * pm * dp * dm
                                  - (pp**2 * dp * pip + pm**2 * dm * pim))
            / ((r + nu) * den) * tau**2)
    k_l += 2.0 * lam * gamma * r**2 * mu * delta / ((r + nu) * den) * tau**2
    k_l += -lam**2 * pi**2 / (48.0 * gamma) * tau**3
    k_l += (0.5 * lam**2 * pp * pm * r * (2.0 * nu * dp * dm + dm * pip + dp * pim)
            / den * tau**3)
    k_l += (4.0 * r * mu * lam * pi - lam**2 * pi**2) / (8.0 * den) * tau**3
    return JumpCoefficientSet(base, g_l, h_l, k_l)


def value_aux_jump(state: MarketState, params: ModelParams,
                   jumps: JumpParams | None) -> float:
    """Auxiliary value function with the compound-Poisson jump component."""
    tau = params.horizon - state.t
    coeffs = jump_riccati_coefficients(tau, params, jumps)
    return float(coeffs.assemble(state.spread, state.y))


def feedback_rate_jump(tau, spread, y, params: ModelParams,
                       jumps: JumpParams | None):
    """Optimal feedback rate in the jump model.

    Two equivalent algebraic forms exist: an additive correction to the
    no-jump rate, and the no-jump rate at jump-shifted arguments plus
    ``lam pi tau / (4 gamma)``.  The additive form is evaluated; in debug
    runs the shifted form is cross-asserted against it.
    """
    if jumps is None or jumps.lam == 0.0:
        return feedback_rate(tau, spread, y, params)
    r = reduced_cost_coefficient(params)
    nu, gamma = params.nu, params.gamma
    lam, delta, pi = jumps.lam, jumps.delta, jumps.pi
    den = (r + nu) * tau + 2.0 * gamma
    base = feedback_rate(tau, spread, y, params)
    q = (base
         + lam * tau * (r * delta - 0.5 * pi) / den
         + lam * pi * tau / (4.0 * gamma))
    if __debug__:
        shifted = (feedback_rate(tau, spread + lam * delta * tau,
                                 y + 0.5 * lam * pi * tau, params)
                   + lam * pi * tau / (4.0 * gamma))
        # The forms cancel to near zero when the rate changes sign, so the
        # comparison is scaled by the size of the summands, not the result.
        scale = np.abs(base) + abs(lam * tau * (r * delta - 0.5 * pi) / den) \
            + abs(lam * pi * tau / (4.0 * gamma)) + 1e-12
        assert np.all(np.abs(q - shifted) <= 1e-9 * scale), \
            "jump feedback-rate forms disagree"
    return q


#: Classification labels for the mean inventory trajectory (jump model).
INCREASING = "increasing throughout"
DECREASING = "decreasing throughout"
CONCAVE = "concave (increase then decrease)"
CONVEX = "convex (decrease then increase)"


def expected_rate_turning_time(state: MarketState, params: ModelParams,
                               jumps: JumpParams) -> tuple[float, str]:
    """Time at which the expected optimal trading rate crosses zero.

    The expected rate drifts linearly at ``-lam pi / (2 gamma)``, so it
    crosses zero at ``s_bar = (2 gamma / (lam pi)) q(T, d - x, y)``, which
    may fall outside [0, T].  Returns the crossing time and a
    classification of the mean inventory trajectory.
    """
    if jumps is None or jumps.lam == 0.0 or jumps.pi == 0.0:
        raise ValueError("turning time requires lam * pi != 0")
    tau = params.horizon - state.t
    q0 = feedback_rate_jump(tau, state.spread, state.y, params, jumps)
    s_bar = 2.0 * params.gamma / (jumps.lam * jumps.pi) * q0
    horizon = tau
    if s_bar <= 0.0:
        label = DECREASING if jumps.pi > 0 else INCREASING
    elif s_bar >= horizon:
        label = INCREASING if jumps.pi > 0 else DECREASING
    else:
        label = CONCAVE if jumps.pi > 0 else CONVEX
    return float(s_bar), label
