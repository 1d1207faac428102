"""Euler-Maruyama baselines: overdamped and underdamped Langevin chains.

Plain first-order updates with a fixed step, matching the comparison
experiments.  Ensembles are advanced with one vectorized stream so the
result depends only on the seed, never on worker scheduling.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .potentials import Potential
from .rng import path_bitgen

OVERDAMPED = "overdamped"
UNDERDAMPED = "underdamped"


@dataclass(frozen=True)
class EmConfig:
    mode: str
    step: float = 0.01
    horizon: float = 100.0
    x0: float = 0.0
    v0: float = 0.0
    seed: int = 0

    def __post_init__(self):
        if self.mode not in (OVERDAMPED, UNDERDAMPED):
            raise ValueError(f"unknown mode {self.mode!r}")
        if self.step <= 0 or self.horizon < self.step:
            raise ValueError("need step > 0 and horizon >= step")

    @property
    def n_steps(self) -> int:
        return int(round(self.horizon / self.step))


@dataclass
class EmPath:
    times: np.ndarray
    xs: np.ndarray
    vs: Optional[np.ndarray] = None


def em_underdamped(potential: Potential, cfg: EmConfig) -> EmPath:
    """X' = V, V' = -grad U(X) - V + sqrt(2) noise, explicit Euler, d = 1."""
    h = cfg.step
    n = cfg.n_steps
    rng = np.random.Generator(path_bitgen(cfg.seed, 0))
    noise = rng.standard_normal(n) * np.sqrt(2.0 * h)
    xs = np.empty(n + 1)
    vs = np.empty(n + 1)
    xs[0], vs[0] = cfg.x0, cfg.v0
    x, v = cfg.x0, cfg.v0
    grad = potential.grad_1d
    for i in range(n):
        x_new = x + h * v
        v = v - h * grad(x) - h * v + noise[i]
        x = x_new
        xs[i + 1], vs[i + 1] = x, v
    return EmPath(times=np.arange(n + 1) * h, xs=xs, vs=vs)


def em_overdamped(potential: Potential, cfg: EmConfig) -> EmPath:
    """X' = -grad U(X) + sqrt(2) noise, explicit Euler, d = 1."""
    h = cfg.step
    n = cfg.n_steps
    rng = np.random.Generator(path_bitgen(cfg.seed, 0))
    noise = rng.standard_normal(n) * np.sqrt(2.0 * h)
    xs = np.empty(n + 1)
    xs[0] = cfg.x0
    x = cfg.x0
    grad = potential.grad_1d
    for i in range(n):
        x = x - h * grad(x) + noise[i]
        xs[i + 1] = x
    return EmPath(times=np.arange(n + 1) * h, xs=xs)


def em_ensemble(potential: Potential, cfg: EmConfig, n_paths: int,
                grid_times: np.ndarray,
                v0_gaussian: bool = True) -> np.ndarray:
    """Positions of n_paths chains at the requested grid times, (N, n_times).

    All chains share one counter-based stream, advanced jointly, so the
    output is a pure function of (cfg.seed, n_paths) regardless of how the
    caller schedules work.
    """
    h = cfg.step
    grid_times = np.asarray(grid_times, dtype=float)
    idx = np.round(grid_times / h).astype(int)
    if np.max(np.abs(idx * h - grid_times)) > 1e-9 * (1.0 + grid_times.max()):
        raise ValueError("grid times must be multiples of the step")
    n = int(idx.max())
    rng = np.random.Generator(path_bitgen(cfg.seed, 0))
    x = np.full(n_paths, cfg.x0)
    if cfg.mode == UNDERDAMPED:
        v = rng.standard_normal(n_paths) if v0_gaussian else np.full(n_paths, cfg.v0)
    out = np.empty((n_paths, idx.size))
    take = {int(k): j for j, k in enumerate(idx)}
    if 0 in take:
        out[:, take[0]] = x
    root = np.sqrt(2.0 * h)
    for step_i in range(1, n + 1):
        noise = rng.standard_normal(n_paths) * root
        gx = _grad_vec(potential, x)
        if cfg.mode == UNDERDAMPED:
            x_new = x + h * v
            v = v - h * gx - h * v + noise
            x = x_new
        else:
            x = x - h * gx + noise
        if step_i in take:
            out[:, take[step_i]] = x
    return out


def _grad_vec(potential: Potential, x: np.ndarray) -> np.ndarray:
    """Vectorized d=1 gradient for the built-in families."""
    if potential.family == "power_law":
        return (1.0 + potential.params["p"]) * x / (1.0 + x * x)
    if potential.family == "subexp":
        sigma = potential.params["sigma"]
        delta = potential.params["delta"]
        M = potential.params["M"]
        b = potential.params["patch_b"]
        ax = np.abs(x)
        out = 2.0 * b * x
        mask = ax >= M
        out[mask] = sigma * delta * ax[mask] ** (delta - 1.0) * np.sign(x[mask])
        return out
    if potential.grad_fn is not None:
        # many 1-d gradients are elementwise; accept the fast path when the
        # shape works out and it agrees with the scalar evaluation
        try:
            out = np.asarray(potential.grad_fn(x), dtype=float)
        except Exception:
            out = None
        if out is not None and out.shape == x.shape and x.size > 0 \
                and np.isclose(out.flat[0], potential.grad_1d(float(x.flat[0]))):
            return out
    return np.array([potential.grad_1d(float(xx)) for xx in x])


def discrete_stationary_covariance(h: float) -> np.ndarray:
    """Exact stationary covariance of the linearized underdamped chain.

    For U = x^2/2 the update is z -> A z + noise with
    A = [[1, h], [-h, 1-h]] and noise covariance Q = [[0,0],[0,2h]]; the
    stationary covariance solves S = A S A^T + Q (discrete Lyapunov).
    """
    from scipy.linalg import solve_discrete_lyapunov
    a = np.array([[1.0, h], [-h, 1.0 - h]])
    q = np.array([[0.0, 0.0], [0.0, 2.0 * h]])
    return solve_discrete_lyapunov(a, q)


def discrete_ou_variance(h: float) -> float:
    """Stationary variance 2h/(1-(1-h)^2) of x -> (1-h)x + sqrt(2h) noise."""
    return 2.0 * h / (1.0 - (1.0 - h) ** 2)
