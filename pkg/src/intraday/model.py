"""Market model primitives: parameters, terminal costs, production rules.

A producer/trader accumulates an inventory ``X`` on the intraday market at a
controlled rate ``q`` (MW/s), pays a temporary price impact ``gamma`` and a
permanent impact ``nu``, and at delivery time ``T`` must match a residual
demand forecast ``D`` using the inventory plus an in-house production
quantity ``xi``.  Production costs ``(beta/2) xi^2`` and any residual imbalance is
penalised at ``(eta/2) (D - X - xi)^2``.

Everything in this package works in one canonical unit system: seconds, MW
and EUR.  Hour- or day-denominated quantities are converted at the I/O
boundary (see :func:`load_param_file`).
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass
from pathlib import Path

import numpy as np

HOUR = 3600.0
DAY = 86400.0

#: Keys accepted in a parameter file (top level).
_PARAM_KEYS = {
    "sigma0", "sigma_d", "beta", "eta", "mu", "nu", "gamma", "rho",
    "horizon_hours", "jump", "delay_hours",
}
#: Keys accepted inside the optional "jump" block.
_JUMP_KEYS = {
    "lambda_per_day", "p_plus", "delta_plus", "delta_minus",
    "pi_plus", "pi_minus",
}


@dataclass(frozen=True)
class ModelParams:
    """Model constants in the canonical unit system (seconds, MW, EUR).

    Attributes
    ----------
    sigma0 : float
        Quoted-price volatility, EUR * MW^-1 * s^-1/2.
    sigma_d : float
        Demand-forecast volatility, MW * s^-1/2.
    beta : float or None
        Marginal production cost slope, EUR * MW^-2.  ``None`` marks the
        pure-trader limit (no production; formally beta -> infinity).
    eta : float
        Terminal imbalance penalty, EUR * MW^-2.
    mu : float
        Demand drift, MW * s^-1.
    nu : float
        Permanent price impact, EUR * MW^-2.
    gamma : float
        Temporary price impact, EUR * s * MW^-2.
    rho : float
        Correlation between price and demand Brownian drivers.
    horizon : float
        Delivery time T, seconds.
    """

    sigma0: float
    sigma_d: float
    beta: float | None
    eta: float
    mu: float
    nu: float
    gamma: float
    rho: float
    horizon: float

    def __post_init__(self) -> None:
        # Normalise an explicit infinity into the pure-trader flag so that
        # downstream arithmetic never sees a non-finite beta.
        if self.beta is not None and math.isinf(self.beta):
            object.__setattr__(self, "beta", None)
        if self.beta is not None and not self.beta > 0:
            raise ValueError("beta must be positive (or None for pure trader)")
        if not self.gamma > 0:
            raise ValueError("gamma must be strictly positive")
        if not self.eta > 0:
            raise ValueError("eta must be strictly positive")
        if not self.sigma0 > 0:
            raise ValueError("sigma0 must be strictly positive")
        if not self.sigma_d > 0:
            raise ValueError("sigma_d must be strictly positive")
        if self.nu < 0:
            raise ValueError("nu must be nonnegative")
        if not -1.0 <= self.rho <= 1.0:
            raise ValueError("rho must lie in [-1, 1]")
        if not self.horizon > 0:
            raise ValueError("horizon must be strictly positive")

    @property
    def pure_trader(self) -> bool:
        """True when the agent has no production plant (beta = infinity)."""
        return self.beta is None

    @property
    def r(self) -> float:
        """Reduced quadratic cost coefficient r(eta, beta)."""
        return reduced_cost_coefficient(self)


@dataclass(frozen=True)
class JumpParams:
    """Compound-Poisson jump component shared by demand and price.

    A jump at time ``t`` moves the demand forecast by ``delta_plus`` or
    ``delta_minus`` and simultaneously the quoted price by ``pi_plus`` or
    ``pi_minus``; positive jumps occur with probability ``p_plus``.
    """

    lam: float              # jump intensity, s^-1
    p_plus: float           # probability that a jump is positive
    delta_plus: float       # MW
    delta_minus: float      # MW
    pi_plus: float          # EUR * MW^-1
    pi_minus: float         # EUR * MW^-1

    def __post_init__(self) -> None:
        if self.lam < 0:
            raise ValueError("jump intensity must be nonnegative")
        if not 0.0 <= self.p_plus <= 1.0:
            raise ValueError("p_plus must lie in [0, 1]")
        if self.delta_plus < 0 or self.pi_plus < 0:
            raise ValueError("positive-jump sizes must be nonnegative")
        if self.delta_minus > 0 or self.pi_minus > 0:
            raise ValueError("negative-jump sizes must be nonpositive")

    @property
    def p_minus(self) -> float:
        return 1.0 - self.p_plus

    @property
    def delta(self) -> float:
        """Mean demand jump size p+ d+ + p- d-."""
        return self.p_plus * self.delta_plus + self.p_minus * self.delta_minus

    @property
    def pi(self) -> float:
        """Mean price jump size p+ pi+ + p- pi-."""
        return self.p_plus * self.pi_plus + self.p_minus * self.pi_minus


@dataclass(frozen=True)
class MarketState:
    """Controlled state at a point in time.

    Attributes
    ----------
    t : float
        Time since the start of trading, seconds.
    x : float
        Accumulated inventory X_t, MW.
    y : float
        Quoted price Y_t, EUR * MW^-1.
    d : float
        Residual demand forecast D_t, MW.
    """

    t: float
    x: float
    y: float
    d: float

    def __post_init__(self) -> None:
        if self.t < 0:
            raise ValueError("time must be nonnegative")

    @property
    def spread(self) -> float:
        """Demand-inventory spread D_t - X_t, MW."""
        return self.d - self.x


def reduced_cost_coefficient(params: ModelParams) -> float:
    """Reduced cost coefficient r(eta, beta) = eta beta / (eta + beta).

    Harmonic composition of the production cost slope and the imbalance
    penalty; equals ``eta`` in the pure-trader limit beta -> infinity.
    """
    if params.pure_trader:
        return params.eta
    return params.eta * params.beta / (params.eta + params.beta)


def terminal_cost(spread, xi, params: ModelParams):
    """Terminal cost C(d - x, xi) = (beta/2) xi^2 + (eta/2) (d - x - xi)^2.

    Parameters
    ----------
    spread : array_like
        Demand-inventory spread D_T - X_T at delivery, MW.
    xi : array_like
        Production quantity, MW.  Must be zero for a pure trader.
    """
    spread = np.asarray(spread, dtype=float)
    xi = np.asarray(xi, dtype=float)
    if params.pure_trader:
        if np.any(xi != 0.0):
            raise ValueError("pure trader cannot produce (xi must be 0)")
        return 0.5 * params.eta * spread**2
    cost = 0.5 * params.beta * xi**2 + 0.5 * params.eta * (spread - xi) ** 2
    return cost if cost.ndim else float(cost)


def optimal_production_unconstrained(spread, params: ModelParams):
    """Unconstrained optimal production xi(d) = (eta/(eta+beta)) d."""
    if params.pure_trader:
        raise ValueError("pure trader has no production rule")
    return params.eta / (params.eta + params.beta) * np.asarray(spread, dtype=float)


def optimal_production_constrained(spread, params: ModelParams):
    """Nonnegative optimal production xi+(d) = (eta/(eta+beta)) d 1_{d >= 0}."""
    xi = optimal_production_unconstrained(spread, params)
    out = np.where(np.asarray(spread, dtype=float) >= 0.0, xi, 0.0)
    return out if out.ndim else float(out)


def cost_after_production(spread, params: ModelParams, constrained: bool = True):
    """Terminal cost after optimal production.

    Unconstrained: (1/2) r(eta, beta) d^2.  Constrained: same for d >= 0,
    but the full imbalance penalty (eta/2) d^2 when d < 0 (no production
    can be sold back).
    """
    spread = np.asarray(spread, dtype=float)
    r = reduced_cost_coefficient(params)
    reduced = 0.5 * r * spread**2
    if not constrained:
        return reduced if reduced.ndim else float(reduced)
    out = np.where(spread >= 0.0, reduced, 0.5 * params.eta * spread**2)
    return out if out.ndim else float(out)


def _as_number(value, key: str) -> float:
    if isinstance(value, bool) or not isinstance(value, (int, float)):
        raise ValueError(f"parameter {key!r} must be a number, got {value!r}")
    return float(value)


def load_param_file(path) -> tuple[ModelParams, JumpParams | None, float | None]:
    """Load a flat JSON parameter file.

    Required keys: sigma0, sigma_d, beta, eta, mu, nu, gamma, rho,
    horizon_hours.  Optional: a "jump" block with keys lambda_per_day,
    p_plus, delta_plus, delta_minus, pi_plus, pi_minus, and a scalar
    "delay_hours".  ``beta`` may be JSON ``null`` (pure trader).  Unknown
    keys raise ``ValueError``.

    Returns
    -------
    (ModelParams, JumpParams | None, float | None)
        Parameters, optional jump component, optional delay in seconds.
    """
    raw = json.loads(Path(path).read_text())
    if not isinstance(raw, dict):
        raise ValueError(f"{path}: parameter file must be a JSON object")
    unknown = set(raw) - _PARAM_KEYS
    if unknown:
        raise ValueError(f"{path}: unknown parameter keys {sorted(unknown)}")
    missing = _PARAM_KEYS - {"jump", "delay_hours"} - set(raw)
    if missing:
        raise ValueError(f"{path}: missing parameter keys {sorted(missing)}")

    beta = raw["beta"]
    if beta is not None:
        beta = _as_number(beta, "beta")
    params = ModelParams(
        sigma0=_as_number(raw["sigma0"], "sigma0"),
        sigma_d=_as_number(raw["sigma_d"], "sigma_d"),
        beta=beta,
        eta=_as_number(raw["eta"], "eta"),
        mu=_as_number(raw["mu"], "mu"),
        nu=_as_number(raw["nu"], "nu"),
        gamma=_as_number(raw["gamma"], "gamma"),
        rho=_as_number(raw["rho"], "rho"),
        horizon=_as_number(raw["horizon_hours"], "horizon_hours") * HOUR,
    )

    jumps = None
    if "jump" in raw:
        block = raw["jump"]
        if not isinstance(block, dict):
            raise ValueError(f"{path}: 'jump' must be an object")
        unknown = set(block) - _JUMP_KEYS
        if unknown:
            raise ValueError(f"{path}: unknown jump keys {sorted(unknown)}")
        missing = _JUMP_KEYS - set(block)
        if missing:
            raise ValueError(f"{path}: missing jump keys {sorted(missing)}")
        jumps = JumpParams(
            lam=_as_number(block["lambda_per_day"], "lambda_per_day") / DAY,
            p_plus=_as_number(block["p_plus"], "p_plus"),
            delta_plus=_as_number(block["delta_plus"], "delta_plus"),
            delta_minus=_as_number(block["delta_minus"], "delta_minus"),
            pi_plus=_as_number(block["pi_plus"], "pi_plus"),
            pi_minus=_as_number(block["pi_minus"], "pi_minus"),
        )

    delay = None
    if "delay_hours" in raw:
        delay = _as_number(raw["delay_hours"], "delay_hours") * HOUR
        if not 0.0 <= delay <= params.horizon:
            raise ValueError(f"{path}: delay_hours must lie in [0, horizon]")

    return params, jumps, delay
