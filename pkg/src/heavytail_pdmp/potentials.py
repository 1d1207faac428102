"""Target potentials U, their regularity constants, and sampler vector fields.

A potential defines the target density pi ~ exp(-U) on R^d.  Each built-in
family carries the constants needed downstream: a lower bound -c_U on the
Hessian, a sup bound on |grad U| when the gradient is bounded, and the
per-coordinate gradient bounds used by the Zig-Zag thinning envelopes.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Callable, Optional, Sequence

import numpy as np
from scipy.integrate import quad

POWER_LAW = "power_law"
SUBEXP = "subexp"
CUSTOM = "custom"

ZIGZAG = "zigzag"
BPS = "bps"


@dataclass(frozen=True)
class Potential:
    """Target potential with gradient and regularity constants.

    ``hessian_lower_bound`` is c_U >= 0 with hess(U) >= -c_U * I everywhere.
    ``grad_sup_bound`` is sup_x |grad U(x)| when finite, else None.
    ``coord_grad_sup_bound`` bounds sup_x |dU/dx_k| uniformly in k.
    ``laplacian_bound`` is an optional pair (C_U, omega) such that
    lap U <= C_U d^(1+omega) + |grad U|^2 / 2.
    """

    dim: int
    family: str
    params: dict
    hessian_lower_bound: float
    grad_sup_bound: Optional[float] = None
    coord_grad_sup_bound: Optional[float] = None
    laplacian_bound: Optional[tuple] = None
    eval_fn: Optional[Callable] = None
    grad_fn: Optional[Callable] = None

    def value(self, x) -> float:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.family == POWER_LAW:
            d, p = self.dim, self.params["p"]
            return 0.5 * (d + p) * np.log1p(float(x @ x))
        if self.family == SUBEXP:
            sigma, delta, M = (self.params[k] for k in ("sigma", "delta", "M"))
            r = float(np.sqrt(x @ x))
            if r >= M:
                return sigma * r ** delta
            a, b = self.params["patch_a"], self.params["patch_b"]
            return a + b * r * r
        return float(self.eval_fn(x))

    def grad(self, x) -> np.ndarray:
        x = np.atleast_1d(np.asarray(x, dtype=float))
        if self.family == POWER_LAW:
            d, p = self.dim, self.params["p"]
            return (d + p) * x / (1.0 + float(x @ x))
        if self.family == SUBEXP:
            sigma, delta, M = (self.params[k] for k in ("sigma", "delta", "M"))
            r = float(np.sqrt(x @ x))
            if r >= M:
                return sigma * delta * r ** (delta - 2.0) * x
            return 2.0 * self.params["patch_b"] * x
        return np.atleast_1d(np.asarray(self.grad_fn(x), dtype=float))

    def __call__(self, x) -> float:
        return self.value(x)

    def grad_1d(self, x: float) -> float:
        """Scalar gradient, d=1 fast path used by the simulators."""
        if self.family == POWER_LAW:
            p1 = 1.0 + self.params["p"]
            return p1 * x / (1.0 + x * x)
        if self.family == SUBEXP:
            sigma, delta, M = (self.params[k] for k in ("sigma", "delta", "M"))
            ax = abs(x)
            if ax >= M:
                return sigma * delta * ax ** (delta - 1.0) * (1.0 if x > 0 else -1.0)
            return 2.0 * self.params["patch_b"] * x
        return float(np.atleast_1d(self.grad_fn(np.array([x])))[0])


def make_power_law(d: int, p: float) -> Potential:
    """Potential U(x) = (d+p)/2 * log(1 + |x|^2); heavy polynomial tails."""
    if d < 1:
        raise ValueError(f"dimension must be >= 1, got {d}")
    if p <= 0:
        raise ValueError(f"tail exponent p must be positive, got {p}")
    if d == 1:
        # U'' along the radial direction is (d+p)(1-r^2)/(1+r^2)^2,
        # minimized at r^2 = 3 with value -(d+p)/8.
        c_u = (d + p) / 8.0
    else:
        rr = np.linspace(0.0, 50.0, 200001)
        radial = (d + p) * (1.0 - rr * rr) / (1.0 + rr * rr) ** 2
        c_u = max(0.0, -float(radial.min()))
    # |grad U| = (d+p) r/(1+r^2) <= (d+p)/2, same bound per coordinate.
    g = (d + p) / 2.0
    return Potential(
        dim=d,
        family=POWER_LAW,
        params={"p": float(p)},
        hessian_lower_bound=c_u,
        grad_sup_bound=g,
        coord_grad_sup_bound=g,
    )


def make_subexp(sigma: float, delta: float, M: float, d: int = 1) -> Potential:
    """Potential U(x) = sigma |x|^delta for |x| >= M, quadratic patch inside.

    The patch a + b|x|^2 matches value and slope at |x| = M, so U is C^1
    everywhere (C^2 except on the sphere |x| = M).
    """
    if not 0.0 < delta < 1.0:
        raise ValueError(f"stretch exponent delta must lie in (0,1), got {delta}")
    if sigma <= 0 or M <= 0:
        raise ValueError("sigma and M must be positive")
    b = 0.5 * sigma * delta * M ** (delta - 2.0)
    a = sigma * M ** delta * (1.0 - delta / 2.0)
    # Radial second derivative sigma*delta*(delta-1)|x|^(delta-2) is most
    # negative at |x| = M; the patch Hessian 2b*I is positive.
    c_u = sigma * delta * (1.0 - delta) * M ** (delta - 2.0)
    g = sigma * delta * M ** (delta - 1.0)
    return Potential(
        dim=d,
        family=SUBEXP,
        params={"sigma": float(sigma), "delta": float(delta), "M": float(M),
                "patch_a": a, "patch_b": b},
        hessian_lower_bound=c_u,
        grad_sup_bound=g,
        coord_grad_sup_bound=g,
    )


def make_custom(dim: int,
                eval_fn: Callable,
                grad_fn: Callable,
                hessian_lower_bound: Optional[float] = None,
                grad_sup_bound: Optional[float] = None,
                coord_grad_sup_bound: Optional[float] = None,
                laplacian_bound: Optional[tuple] = None,
                search_box: float = 20.0,
                seed: int = 0) -> Potential:
    """Wrap user callables; estimate c_U by grid + random-direction search.

    The estimated c_U is a point-sample estimate, not a certificate.
    """
    if hessian_lower_bound is None:
        hessian_lower_bound = _estimate_c_u(dim, grad_fn, search_box, seed)
    if coord_grad_sup_bound is None:
        coord_grad_sup_bound = grad_sup_bound
    return Potential(
        dim=dim,
        family=CUSTOM,
        params={},
        hessian_lower_bound=hessian_lower_bound,
        grad_sup_bound=grad_sup_bound,
        coord_grad_sup_bound=coord_grad_sup_bound,
        laplacian_bound=laplacian_bound,
        eval_fn=eval_fn,
        grad_fn=grad_fn,
    )


def _estimate_c_u(dim, grad_fn, box, seed, n_points=1000, h=1e-4):
    rng = np.random.default_rng(seed)
    worst = 0.0
    for _ in range(n_points):
        x = rng.uniform(-box, box, size=dim)
        u = rng.standard_normal(dim)
        u /= np.linalg.norm(u)
        gp = np.atleast_1d(grad_fn(x + h * u))
        gm = np.atleast_1d(grad_fn(x - h * u))
        curv = float(u @ (gp - gm)) / (2.0 * h)
        worst = min(worst, curv)
    return -worst


@dataclass(frozen=True)
class FieldDecomposition:
    """Vector fields F_k with sum_k F_k = grad U and |F_k| <= a_k (1+|grad U|)."""

    kind: str
    K: int
    potential: Potential
    growth_constants: tuple

    def field(self, k: int, x) -> np.ndarray:
        g = self.potential.grad(x)
        if self.kind == BPS:
            return g
        out = np.zeros_like(g)
        out[k] = g[k]
        return out


def decompose(potential: Potential, kind: str) -> FieldDecomposition:
    """Zig-Zag: F_k = (dU/dx_k) e_k, K = d.  BPS: F_1 = grad U, K = 1."""
    if kind == ZIGZAG:
        return FieldDecomposition(kind=ZIGZAG, K=potential.dim,
                                  potential=potential,
                                  growth_constants=(1.0,) * potential.dim)
    if kind == BPS:
        return FieldDecomposition(kind=BPS, K=1, potential=potential,
                                  growth_constants=(1.0,))
    raise ValueError(f"unknown sampler kind {kind!r}")


@dataclass
class AssumptionReport:
    gradient_bounded: bool
    laplacian_condition: Optional[bool]
    hessian_bound_ok: bool
    growth_bounds_ok: bool
    violations: list = field(default_factory=list)

    @property
    def all_ok(self) -> bool:
        checks = [self.hessian_bound_ok, self.growth_bounds_ok]
        if self.gradient_bounded is False:
            checks.append(bool(self.laplacian_condition))
        return all(checks)


def check_assumptions(potential: Potential,
                      box: float = 100.0,
                      n_points: int = 400,
                      seed: int = 0) -> AssumptionReport:
    """Grid-check the claimed regularity constants; reports violations."""
    rng = np.random.default_rng(seed)
    d = potential.dim
    pts = [rng.uniform(-box, box, size=d) for _ in range(n_points)]
    pts += [np.zeros(d), np.ones(d)]
    violations = []

    grad_bounded = potential.grad_sup_bound is not None
    if grad_bounded:
        for x in pts:
            gn = float(np.linalg.norm(potential.grad(x)))
            if gn > potential.grad_sup_bound * (1.0 + 1e-9):
                violations.append(("grad_sup_bound", x.copy(), gn))

    lap_ok = None
    if not grad_bounded and potential.laplacian_bound is not None:
        c_big, omega = potential.laplacian_bound
        h = 1e-4
        for x in pts:
            lap = 0.0
            for i in range(d):
                e = np.zeros(d)
                e[i] = h
                lap += (potential.grad(x + e)[i] - potential.grad(x - e)[i]) / (2 * h)
            rhs = c_big * d ** (1.0 + omega) + float(potential.grad(x) @ potential.grad(x)) / 2.0
            if lap > rhs + 1e-6 * (1.0 + abs(rhs)):
                violations.append(("laplacian_bound", x.copy(), lap))
        lap_ok = not any(v[0] == "laplacian_bound" for v in violations)

    h = 1e-4
    hess_ok = True
    for x in pts:
        u = rng.standard_normal(d)
        u /= np.linalg.norm(u)
        curv = float(u @ (potential.grad(x + h * u) - potential.grad(x - h * u))) / (2 * h)
        if curv < -potential.hessian_lower_bound - 1e-4 * (1.0 + abs(curv)):
            violations.append(("hessian_lower_bound", x.copy(), curv))
            hess_ok = False

    growth_ok = True
    for kind in (ZIGZAG, BPS):
        dec = decompose(potential, kind)
        for x in pts[:100]:
            gn = float(np.linalg.norm(potential.grad(x)))
            for k in range(dec.K):
                fk = float(np.linalg.norm(dec.field(k, x)))
                if fk > dec.growth_constants[k] * (1.0 + gn) * (1.0 + 1e-9):
                    violations.append(("growth_bound", x.copy(), fk))
                    growth_ok = False

    return AssumptionReport(
        gradient_bounded=grad_bounded,
        laplacian_condition=lap_ok,
        hessian_bound_ok=hess_ok,
        growth_bounds_ok=growth_ok,
        violations=violations,
    )


def log_density_normalizer(potential: Potential) -> float:
    """Z = int exp(-U) dx for d=1; raises if the integral does not converge."""
    if potential.dim != 1:
        raise ValueError("normalizer quadrature implemented for d=1 only")
    import warnings
    from scipy.integrate import IntegrationWarning
    with warnings.catch_warnings():
        warnings.simplefilter("ignore", IntegrationWarning)
        val, err = quad(lambda x: np.exp(-potential.value(np.array([x]))),
                        -np.inf, np.inf, limit=400)
    if not np.isfinite(val) or val <= 0 or err > 1e-6 * val:
        raise ValueError("target density is not integrable (or quadrature failed)")
    return val


def quantile_sampler_1d(potential: Potential, n_grid: int = 200001,
                        tail_mass: float = 1e-11):
    """Numeric inverse-CDF sampler for the normalized d=1 target.

    Returns a callable mapping uniforms in (0,1) to target samples.
    """
    if potential.family == POWER_LAW and potential.params["p"] == 1.0 and potential.dim == 1:
        # standard Cauchy: exact quantile
        return lambda u: np.tan(np.pi * (np.asarray(u) - 0.5))
    # find a cut x_max with negligible tail mass
    z = log_density_normalizer(potential)
    x_max = 1.0
    while True:
        t, _ = quad(lambda x: np.exp(-potential.value(np.array([x]))), x_max, np.inf, limit=200)
        if t / z < tail_mass / 2:
            break
        x_max *= 2.0
        if x_max > 1e12:
            raise ValueError("could not bracket the target tails")
    xs = np.linspace(-x_max, x_max, n_grid)
    dens = np.exp(-np.array([potential.value(np.array([x])) for x in xs]))
    cdf = np.concatenate([[0.0], np.cumsum(0.5 * (dens[1:] + dens[:-1]) * np.diff(xs))])
    cdf /= cdf[-1]
    cdf, idx = np.unique(cdf, return_index=True)
    xs = xs[idx]
    return lambda u: np.interp(np.asarray(u), cdf, xs)
