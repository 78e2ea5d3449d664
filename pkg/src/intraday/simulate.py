"""Euler Monte Carlo simulation of the controlled market under a policy.

State dynamics on a uniform grid of step ``dt``:

    X_{k+1} = X_k + q_k dt                         (inventory)
    Y_{k+1} = Y_k + nu q_k dt + sigma0 dW_k + dJ^Y (quoted price)
    D_{k+1} = D_k + mu dt + sigma_d dB_k + dJ^D    (demand forecast)
    P_{k+1} = P_k + sigma0 dW_k + dJ^Y             (unaffected price)

with ``B = rho W + sqrt(1 - rho^2) W_perp`` and a compound-Poisson jump
component hitting demand and price simultaneously.  Jumps are drawn at
their exact exponential times and applied at the next grid node; the rate
rule sees the post-jump state from that node onward.

Randomness comes from a counter-based generator (Philox) keyed by
``(seed, path_id, stream_id)`` with separate streams for W, W_perp, jump
times and jump signs, so results are bit-identical for a fixed seed
regardless of how paths are chunked across workers.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass
from pathlib import Path
from typing import Callable, Optional

import numpy as np

from . import closed_form, model
from .model import JumpParams, ModelParams

#: Paths are processed in fixed-size blocks regardless of worker count so
#: that parallel execution cannot change the result.
_CHUNK = 2048

#: Streams per path in the counter-based RNG keying.
_STREAM_W, _STREAM_W_PERP, _STREAM_JUMP_TIMES, _STREAM_JUMP_SIGNS = range(4)

#: Coarsest grid allowed in the presence of jumps (jump placement error).
MAX_JUMP_DT = 60.0


@dataclass(frozen=True)
class Policy:
    """Feedback trading policy plus a one-shot production decision.

    ``rate_rule(s, x, y, d)`` maps the time and the (vectorised) state to
    a trading rate in MW/s; after the production time the inventory ``x``
    passed in includes the produced quantity.  ``production_rule(spread, y)``
    is invoked exactly once per path at the grid node nearest the
    production time from below.
    """

    rate_rule: Callable
    production_time: float
    production_rule: Callable


@dataclass(frozen=True)
class PathSet:
    """Simulated trajectories on (a thinning of) the time grid.

    ``x, y, d, p_hat, q`` have shape (n_paths, n_recorded); ``jump_flag``
    counts signed jumps applied at each recorded node; ``xi`` and
    ``running_cost`` (the left-Riemann trading cost integral, accumulated
    at full resolution) have shape (n_paths,).
    """

    times: np.ndarray
    x: np.ndarray
    y: np.ndarray
    d: np.ndarray
    p_hat: np.ndarray
    q: np.ndarray
    jump_flag: np.ndarray
    xi: np.ndarray
    running_cost: np.ndarray
    production_index: int
    dt: float
    seed: int

    @property
    def n_paths(self) -> int:
        return self.x.shape[0]

    @property
    def terminal_spread(self) -> np.ndarray:
        return self.d[:, -1] - self.x[:, -1]


@dataclass(frozen=True)
class CostEstimate:
    """Monte Carlo estimate of the cost functional J."""

    mean: float
    stderr: float
    n_paths: int


@dataclass(frozen=True)
class DriftEstimate:
    """Regression slope of the mean trading rate against time."""

    slope: float
    stderr: float
    expected: float

    def contains_expected(self, n_sigma: float = 3.0) -> bool:
        return abs(self.slope - self.expected) <= n_sigma * self.stderr


def optimal_policy(params: ModelParams, jumps: JumpParams | None = None,
                   constrained: bool = True) -> Policy:
    """Optimal feedback policy: rate from the closed form, production at T."""

    def rate_rule(s, x, y, d):
        tau = params.horizon - s
        return closed_form.feedback_rate_jump(tau, d - x, y, params, jumps)

    if constrained:
        def production_rule(spread, y):
            return model.optimal_production_constrained(spread, params)
    else:
        def production_rule(spread, y):
            return model.optimal_production_unconstrained(spread, params)

    return Policy(rate_rule=rate_rule, production_time=params.horizon,
                  production_rule=production_rule)


def pure_trader_policy(params: ModelParams) -> Policy:
    """Pure-trader policy: no production, rate with r replaced by eta."""

    def rate_rule(s, x, y, d):
        tau = params.horizon - s
        return closed_form.feedback_rate_pure_trader(tau, d - x, y, params)

    return Policy(rate_rule=rate_rule, production_time=params.horizon,
                  production_rule=lambda spread, y: np.zeros_like(
                      np.asarray(spread, dtype=float)))


def zero_policy(params: ModelParams) -> Policy:
    """No trading, no production; useful for analytic cross-checks."""
    return Policy(rate_rule=lambda s, x, y, d: np.zeros_like(np.asarray(x, dtype=float)),
                  production_time=params.horizon,
                  production_rule=lambda spread, y: np.zeros_like(
                      np.asarray(spread, dtype=float)))


def perturbed_policy(base: Policy, epsilon: float, profile: Callable) -> Policy:
    """Add a deterministic rate bump ``epsilon * profile(s)`` to a policy."""

    def rate_rule(s, x, y, d):
        return base.rate_rule(s, x, y, d) + epsilon * profile(s)

    return Policy(rate_rule=rate_rule, production_time=base.production_time,
                  production_rule=base.production_rule)


def _stream(seed: int, path_id: int, stream_id: int) -> np.random.Generator:
    key = np.array([np.uint64(seed), np.uint64((path_id << 3) + stream_id)],
                   dtype=np.uint64)
    return np.random.Generator(np.random.Philox(key=key))


def _draw_jumps(seed: int, path_id: int, jumps: JumpParams,
                horizon: float) -> tuple[np.ndarray, np.ndarray]:
    """Exact exponential jump times on [0, horizon) and +1/-1 signs."""
    gen_t = _stream(seed, path_id, _STREAM_JUMP_TIMES)
    times = []
    t = 0.0
    while True:
        block = gen_t.exponential(1.0 / jumps.lam, size=8)
        for gap in block:
            t += gap
            if t >= horizon:
                break
            times.append(t)
        if t >= horizon:
            break
    times = np.asarray(times)
    gen_s = _stream(seed, path_id, _STREAM_JUMP_SIGNS)
    uniforms = gen_s.random(size=times.size)
    signs = np.where(uniforms < jumps.p_plus, 1, -1)
    return times, signs


def _simulate_chunk(path_ids: np.ndarray, params: ModelParams,
                    jumps: JumpParams | None, policy: Policy, dt: float,
                    seed: int, n_steps: int, recorded: np.ndarray,
                    out: dict) -> None:
    n = path_ids.size
    sqrt_dt = math.sqrt(dt)
    d0, y0, x0 = out["d0"], out["y0"], out["x0"]

    dw = np.empty((n, n_steps))
    dw_perp = np.empty((n, n_steps))
    for i, pid in enumerate(path_ids):
        dw[i] = _stream(seed, int(pid), _STREAM_W).standard_normal(n_steps)
        dw_perp[i] = _stream(seed, int(pid), _STREAM_W_PERP).standard_normal(n_steps)
    dw *= sqrt_dt
    dw_perp *= sqrt_dt
    db = params.rho * dw + math.sqrt(1.0 - params.rho**2) * dw_perp

    jump_d = np.zeros((n, n_steps + 1))
    jump_y = np.zeros((n, n_steps + 1))
    flags = np.zeros((n, n_steps + 1), dtype=np.int64)
    if jumps is not None and jumps.lam > 0.0:
        for i, pid in enumerate(path_ids):
            times, signs = _draw_jumps(seed, int(pid), jumps, params.horizon)
            if times.size == 0:
                continue
            # first grid node at or after the exact jump time
            nodes = np.minimum(np.ceil(times / dt - 1e-12).astype(np.int64),
                               n_steps)
            np.add.at(jump_d[i], nodes,
                      np.where(signs > 0, jumps.delta_plus, jumps.delta_minus))
            np.add.at(jump_y[i], nodes,
                      np.where(signs > 0, jumps.pi_plus, jumps.pi_minus))
            np.add.at(flags[i], nodes, signs)

    x = np.full(n, x0)
    y = np.full(n, y0) + jump_y[:, 0]
    d = np.full(n, d0) + jump_d[:, 0]
    p_hat = np.full(n, y0) + jump_y[:, 0]
    xi = np.zeros(n)
    running_cost = np.zeros(n)
    produced = False

    record_pos = {node: pos for pos, node in enumerate(recorded)}
    rows = slice(out["offset"], out["offset"] + n)

    def record(node: int, q_now: np.ndarray) -> None:
        pos = record_pos.get(node)
        if pos is None:
            return
        out["x"][rows, pos] = x
        out["y"][rows, pos] = y
        out["d"][rows, pos] = d
        out["p_hat"][rows, pos] = p_hat
        out["q"][rows, pos] = q_now
        out["jump_flag"][rows, pos] = flags[:, node]

    production_index = out["production_index"]
    for k in range(n_steps + 1):
        if k == production_index and not produced:
            xi = np.asarray(policy.production_rule(d - x, y), dtype=float)
            if xi.ndim == 0:
                xi = np.full(n, float(xi))
            produced = True
        x_eff = x + xi if produced else x
        q = np.asarray(policy.rate_rule(k * dt, x_eff, y, d), dtype=float)
        if q.ndim == 0:
            q = np.full(n, float(q))
        record(k, q)
        if k == n_steps:
            break
        running_cost += q * (y + params.gamma * q) * dt
        x = x + q * dt
        y = y + params.nu * q * dt + params.sigma0 * dw[:, k] + jump_y[:, k + 1]
        d = d + params.mu * dt + params.sigma_d * db[:, k] + jump_d[:, k + 1]
        p_hat = p_hat + params.sigma0 * dw[:, k] + jump_y[:, k + 1]

    out["xi"][rows] = xi
    out["running_cost"][rows] = running_cost


def sample_paths(params: ModelParams, jumps: JumpParams | None, policy: Policy,
                 n_paths: int, dt: float, seed: int, *,
                 d0: float = 0.0, y0: float = 0.0, x0: float = 0.0,
                 n_workers: int = 1, record_every: Optional[int] = 1,
                 allow_coarse_dt: bool = False) -> PathSet:
    """Simulate ``n_paths`` Euler trajectories under a policy.

    Parameters
    ----------
    record_every : int or None
        Record every k-th grid node (the final node is always recorded);
        ``None`` keeps only the terminal node.  The cost integral is
        always accumulated at full resolution.
    allow_coarse_dt : bool
        Override the rejection of dt > 60 s when jumps are present.
    """
    if n_paths < 1:
        raise ValueError("n_paths must be at least 1")
    if dt <= 0:
        raise ValueError("dt must be positive")
    n_steps = round(params.horizon / dt)
    if n_steps < 1 or abs(n_steps * dt - params.horizon) > 1e-6 * dt:
        raise ValueError("dt must divide the horizon")
    if (jumps is not None and jumps.lam > 0.0 and dt > MAX_JUMP_DT
            and not allow_coarse_dt):
        raise ValueError(
            f"dt > {MAX_JUMP_DT:.0f} s with jumps misplaces jump times; "
            "pass allow_coarse_dt=True to override")
    if seed < 0:
        raise ValueError("seed must be nonnegative")

    if record_every is None:
        recorded = np.array([n_steps])
    else:
        if record_every < 1:
            raise ValueError("record_every must be positive or None")
        recorded = np.arange(0, n_steps + 1, record_every)
        if recorded[-1] != n_steps:
            recorded = np.append(recorded, n_steps)

    if not 0.0 <= policy.production_time <= params.horizon:
        raise ValueError("production time must lie in [0, horizon]")
    production_index = min(int(math.floor(policy.production_time / dt + 1e-9)),
                           n_steps)

    n_rec = recorded.size
    arrays = {name: np.empty((n_paths, n_rec)) for name in
              ("x", "y", "d", "p_hat", "q")}
    arrays["jump_flag"] = np.zeros((n_paths, n_rec), dtype=np.int64)
    arrays["xi"] = np.empty(n_paths)
    arrays["running_cost"] = np.empty(n_paths)

    chunks = [np.arange(start, min(start + _CHUNK, n_paths))
              for start in range(0, n_paths, _CHUNK)]

    def run(chunk: np.ndarray) -> None:
        out = dict(arrays, offset=int(chunk[0]), d0=d0, y0=y0, x0=x0,
                   production_index=production_index)
        _simulate_chunk(chunk, params, jumps, policy, dt, seed, n_steps,
                        recorded, out)

    if n_workers > 1:
        with ThreadPoolExecutor(max_workers=n_workers) as pool:
            list(pool.map(run, chunks))
    else:
        for chunk in chunks:
            run(chunk)

    return PathSet(times=recorded * dt, x=arrays["x"], y=arrays["y"],
                   d=arrays["d"], p_hat=arrays["p_hat"], q=arrays["q"],
                   jump_flag=arrays["jump_flag"], xi=arrays["xi"],
                   running_cost=arrays["running_cost"],
                   production_index=production_index, dt=dt, seed=seed)


def estimate_cost(paths: PathSet, params: ModelParams) -> CostEstimate:
    """Mean realized cost J = trading cost integral + terminal cost."""
    terminal = model.terminal_cost(paths.terminal_spread, paths.xi, params)
    total = paths.running_cost + terminal
    stderr = float(total.std(ddof=1) / math.sqrt(paths.n_paths)) \
        if paths.n_paths > 1 else float("nan")
    return CostEstimate(mean=float(total.mean()), stderr=stderr,
                        n_paths=paths.n_paths)


def martingale_diagnostics(paths: PathSet, params: ModelParams,
                           jumps: JumpParams | None = None) -> DriftEstimate:
    """Drift of the optimal trading rate: slope of E[q_s] against s.

    Each path contributes an ordinary least-squares slope of its recorded
    rate series; their average estimates the drift of the mean rate, with
    the standard error taken across paths.  Only nodes strictly before the
    production decision enter (afterwards the rate rule sees the
    production-adjusted inventory).  The theoretical drift is 0 without
    jumps and ``-lam pi / (2 gamma)`` with jumps.
    """
    mask = paths.times < paths.production_index * paths.dt
    times = paths.times[mask]
    if times.size < 3:
        raise ValueError("need at least 3 recorded nodes for a slope")
    centred = times - times.mean()
    denom = float((centred**2).sum())
    slopes = paths.q[:, mask] @ centred / denom
    expected = 0.0
    if jumps is not None and jumps.lam > 0.0:
        expected = -jumps.lam * jumps.pi / (2.0 * params.gamma)
    stderr = float(slopes.std(ddof=1) / math.sqrt(slopes.size)) \
        if slopes.size > 1 else float("nan")
    return DriftEstimate(slope=float(slopes.mean()), stderr=stderr,
                         expected=expected)


def export_csv(paths: PathSet, destination) -> Path:
    """Write trajectories as CSV, one row per (path, recorded node).

    Columns: time_s, path_id, X, Y, D, P_hat, q, jump_flag,
    xi_at_decision (the production quantity on its decision row, else 0).
    Floats are written with ``repr`` so parsing the file reproduces the
    arrays bit-identically.
    """
    destination = Path(destination)
    try:
        with destination.open("w", newline="") as handle:
            handle.write("time_s,path_id,X,Y,D,P_hat,q,jump_flag,xi_at_decision\n")
            record_pos = {float(t): pos for pos, t in enumerate(paths.times)}
            decision_time = paths.production_index * paths.dt
            decision_pos = record_pos.get(decision_time)
            for path_id in range(paths.n_paths):
                for pos, t in enumerate(paths.times):
                    xi = paths.xi[path_id] if pos == decision_pos else 0.0
                    handle.write(
                        f"{float(t)!r},{path_id},{float(paths.x[path_id, pos])!r},"
                        f"{float(paths.y[path_id, pos])!r},{float(paths.d[path_id, pos])!r},"
                        f"{float(paths.p_hat[path_id, pos])!r},{float(paths.q[path_id, pos])!r},"
                        f"{int(paths.jump_flag[path_id, pos])},{float(xi)!r}\n")
    except OSError as exc:
        raise OSError(f"failed to write path CSV to {destination}: {exc}") from exc
    return destination
