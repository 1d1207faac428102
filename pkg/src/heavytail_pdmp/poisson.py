"""Finite-difference validation oracle for the 1-d equation u - u'' + U'u' = g.

The operator is discretized in flux form, -(rho u')'/rho with
rho = e^(-U), using midpoint densities and mirrored-ghost Neumann ends.
With trapezoid quadrature weights this discrete operator is exactly
self-adjoint in the rho-weighted inner product, which is what the
derivative-bound ratio checks rely on.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np
from scipy.integrate import quad
from scipy.linalg import solve_banded

from .langevin import _grad_vec as _grad_vec_1d
from .potentials import Potential


@dataclass
class PoissonSolution:
    grid: np.ndarray
    u: np.ndarray
    du: np.ndarray
    d2u: np.ndarray
    g: np.ndarray
    weights: np.ndarray          # trapezoid weights times normalized density
    norm_u: float
    norm_du: float
    norm_d2u: float
    norm_drift: float            # pi-weighted norm of U'u'
    norm_g: float
    residual_norm: float


def _value_vec(potential: Potential, xs: np.ndarray) -> np.ndarray:
    """Vectorized 1-d potential values for the built-in families."""
    if potential.family == "power_law":
        p = potential.params["p"]
        return 0.5 * (1.0 + p) * np.log1p(xs * xs)
    if potential.family == "subexp":
        sigma = potential.params["sigma"]
        delta = potential.params["delta"]
        m = potential.params["M"]
        ax = np.abs(xs)
        out = potential.params["patch_a"] + potential.params["patch_b"] * xs * xs
        mask = ax >= m
        out[mask] = sigma * ax[mask] ** delta
        return out
    return np.array([potential.value(np.array([x])) for x in xs])


def _pi_weights(potential: Potential, xs: np.ndarray) -> np.ndarray:
    """Trapezoid weights against the normalized density on the grid."""
    h = xs[1] - xs[0]
    dens = np.exp(-_value_vec(potential, xs))
    w = np.full(xs.shape, h)
    w[0] = w[-1] = 0.5 * h
    w = w * dens
    return w / w.sum()


def _weighted_norm(values: np.ndarray, weights: np.ndarray) -> float:
    return float(np.sqrt(np.sum(weights * values * values)))


def solve_poisson_1d(potential: Potential, g, L: float, n: int) -> PoissonSolution:
    """Solve u - u'' + U'u' = g on [-L, L] with Neumann ends.

    ``g`` is a callable of a scalar x, expected to be supported well inside
    the domain.  Uses the self-adjoint form u - (rho u')'/rho = g with
    rho = e^(-U) and a banded tridiagonal solve.
    """
    if potential.dim != 1:
        raise ValueError("solver is 1-d only")
    if n < 1000:
        raise ValueError("need n >= 1000 grid points")
    xs = np.linspace(-L, L, n)
    h = xs[1] - xs[0]
    g_vals = np.array([float(g(x)) for x in xs])
    scale = np.max(np.abs(g_vals))
    if not np.all(np.isfinite(g_vals)) or scale == 0.0:
        raise ValueError("g must be finite and not identically zero")
    # Neumann ends need either g negligible there or a flat g (zero slope),
    # otherwise the boundary condition pollutes the interior solution
    end_val = max(abs(g_vals[0]), abs(g_vals[-1]))
    end_step = max(abs(g_vals[1] - g_vals[0]), abs(g_vals[-1] - g_vals[-2]))
    if end_val > 1e-6 * scale and end_step > 1e-4 * scale:
        raise ValueError("g is not supported well inside [-L, L]")

    u_vals = _value_vec(potential, xs)
    u_mid = _value_vec(potential, 0.5 * (xs[:-1] + xs[1:]))
    # shift before exponentiating; the common factor cancels in L rho^-1
    shift = u_vals.min()
    rho = np.exp(-(u_vals - shift))
    rho_mid = np.exp(-(u_mid - shift))

    # row i: u_i + [rho_{i-1/2}(u_i - u_{i-1}) + rho_{i+1/2}(u_i - u_{i+1})]
    #        / (h^2 rho_i), ghost values mirrored at the ends
    lower = np.zeros(n)
    diag = np.ones(n)
    upper = np.zeros(n)
    inv = 1.0 / (h * h * rho)
    diag[1:-1] += (rho_mid[:-1] + rho_mid[1:]) * inv[1:-1]
    lower[0:-1] = -rho_mid * inv[1:]     # sub-diagonal entries for rows 1..n-1
    upper[1:] = -rho_mid * inv[:-1]      # super-diagonal entries for rows 0..n-2
    # mirrored ghost points double the end fluxes; combined with the halved
    # trapezoid end weights this makes the operator exactly self-adjoint
    diag[0] += 2.0 * rho_mid[0] * inv[0]
    upper[1] = -2.0 * rho_mid[0] * inv[0]
    diag[-1] += 2.0 * rho_mid[-1] * inv[-1]
    lower[-2] = -2.0 * rho_mid[-1] * inv[-1]

    ab = np.zeros((3, n))
    ab[0, 1:] = upper[1:]
    ab[1, :] = diag
    ab[2, :-1] = lower[:-1]
    u = solve_banded((1, 1), ab, g_vals)

    du = np.gradient(u, h, edge_order=2)
    d2u = np.empty_like(u)
    d2u[1:-1] = (u[2:] - 2.0 * u[1:-1] + u[:-2]) / (h * h)
    d2u[0] = d2u[1]
    d2u[-1] = d2u[-2]
    drift = _grad_vec_1d(potential, xs) * du

    w = _pi_weights(potential, xs)
    residual = u - d2u + drift - g_vals
    interior = np.ones(n)
    interior[:2] = interior[-2:] = 0.0   # one-sided stencils excluded
    return PoissonSolution(
        grid=xs, u=u, du=du, d2u=d2u, g=g_vals, weights=w,
        norm_u=_weighted_norm(u, w),
        norm_du=_weighted_norm(du, w),
        norm_d2u=_weighted_norm(d2u, w),
        norm_drift=_weighted_norm(drift, w),
        norm_g=_weighted_norm(g_vals, w),
        residual_norm=_weighted_norm(residual * interior, w),
    )


def apply_operator(potential: Potential, xs: np.ndarray, u: np.ndarray) -> np.ndarray:
    """Discrete u - (rho u')'/rho on the same stencil as the solver."""
    h = xs[1] - xs[0]
    u_vals = _value_vec(potential, xs)
    u_mid = _value_vec(potential, 0.5 * (xs[:-1] + xs[1:]))
    shift = u_vals.min()
    rho = np.exp(-(u_vals - shift))
    rho_mid = np.exp(-(u_mid - shift))
    out = u.copy()
    inv = 1.0 / (h * h * rho)
    out[1:-1] += (rho_mid[:-1] * (u[1:-1] - u[:-2])
                  + rho_mid[1:] * (u[1:-1] - u[2:])) * inv[1:-1]
    out[0] += 2.0 * rho_mid[0] * (u[0] - u[1]) * inv[0]
    out[-1] += 2.0 * rho_mid[-1] * (u[-1] - u[-2]) * inv[-1]
    return out


@dataclass
class EstimateReport:
    ratio_u: float
    ratio_du: float
    ratio_d2u: float
    ratio_drift: float
    ok_u: bool
    ok_du: bool
    ok_d2u: bool
    ok_drift: bool

    @property
    def all_ok(self) -> bool:
        return self.ok_u and self.ok_du and self.ok_d2u and self.ok_drift

    def table(self) -> str:
        rows = [
            ("||u|| / ||g||", self.ratio_u, self.ok_u),
            ("||u'|| / ||g||", self.ratio_du, self.ok_du),
            ("||u''|| / (k1 ||g||)", self.ratio_d2u, self.ok_d2u),
            ("||U'u'|| / (k2 ||g||)", self.ratio_drift, self.ok_drift),
        ]
        lines = [f"{name:<22s} {val:10.6f}  {'ok' if ok else 'VIOLATED'}"
                 for name, val, ok in rows]
        return "\n".join(lines)


def verify_estimates(sol: PoissonSolution, k1: float, k2: float) -> EstimateReport:
    """Check the four derivative bounds; all ratios should be < 1."""
    if sol.norm_g == 0.0:
        raise ValueError("zero right-hand side")
    r_u = sol.norm_u / sol.norm_g
    r_du = sol.norm_du / sol.norm_g
    r_d2u = sol.norm_d2u / (k1 * sol.norm_g)
    r_drift = sol.norm_drift / (k2 * sol.norm_g)
    return EstimateReport(
        ratio_u=r_u, ratio_du=r_du, ratio_d2u=r_d2u, ratio_drift=r_drift,
        ok_u=r_u < 1.0, ok_du=r_du < 1.0,
        ok_d2u=r_d2u < 1.0, ok_drift=r_drift < 1.0,
    )
