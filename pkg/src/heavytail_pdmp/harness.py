"""Monte Carlo error-curve experiments over the PDMP and Langevin samplers.

Reads flat INI configs, runs N independent seeded paths (optionally across
a process pool), compares the time-t estimates of E[f(X_t)] against the
quadrature value mu(f), and emits CSV rows plus a JSON metadata mirror.
Results are bit-identical for any worker count at a fixed seed.
"""

from __future__ import annotations

import configparser
import csv
import hashlib
import json
import time
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace
from math import sqrt
from pathlib import Path
from typing import Optional

import numpy as np
from scipy.integrate import quad

from .langevin import EmConfig, OVERDAMPED, UNDERDAMPED, em_ensemble
from .potentials import (BPS, POWER_LAW, SUBEXP, ZIGZAG, Potential,
                         log_density_normalizer, make_power_law, make_subexp,
                         quantile_sampler_1d)
from .simulate import simulate
from .velocities import (VelocityMeasure, rademacher_product, std_gaussian,
                         uniform_sphere)

PDMP_SAMPLERS = (ZIGZAG, BPS)
EM_SAMPLERS = ("underdamped_em", "overdamped_em")

CHUNK_SIZE = 2000  # fixed scheduling unit; results never depend on it


class ConfigError(ValueError):
    """Invalid or incomplete experiment configuration."""


@dataclass(frozen=True)
class IndicatorAbove:
    """f(x) = 1{x_coord >= threshold}; bounded with oscillation norm 1."""

    threshold: float
    coord: int = 0

    def __call__(self, x, v=None) -> float:
        x = np.atleast_1d(x)
        return 1.0 if x[self.coord] >= self.threshold else 0.0

    def of_positions(self, positions: np.ndarray) -> np.ndarray:
        return (positions >= self.threshold).astype(float)


@dataclass(frozen=True)
class ExperimentConfig:
    sampler: str
    potential: Potential
    nu: VelocityMeasure
    lambda_ref: float
    x0: object               # float, or "stationary"
    v0: object               # vector, "draw", or "uniform_pm1"
    observable: IndicatorAbove
    grid_times: tuple
    n_paths: int
    seed: int
    workers: int = 1
    em_step: float = 0.01
    label: str = ""

    def validate(self) -> None:
        if self.sampler not in PDMP_SAMPLERS + EM_SAMPLERS:
            raise ConfigError(f"unknown sampler {self.sampler!r}")
        if self.n_paths < 1:
            raise ConfigError("n_paths must be >= 1")
        ts = np.asarray(self.grid_times)
        if ts.size == 0 or np.any(np.diff(ts) <= 0) or ts[0] < 0:
            raise ConfigError("time grid must be increasing and nonnegative")
        if self.workers < 1:
            raise ConfigError("workers must be >= 1")


@dataclass
class ErrorCurve:
    times: np.ndarray
    estimates: np.ndarray
    sq_errors: np.ndarray
    stderrs: np.ndarray
    n_paths: int
    metadata: dict = field(default_factory=dict)

    CSV_HEADER = ["t", "estimate", "sq_error", "stderr", "n_paths"]

    def write_csv(self, path) -> None:
        with open(path, "w", newline="") as fh:
            writer = csv.writer(fh)
            writer.writerow(self.CSV_HEADER)
            for i in range(self.times.size):
                writer.writerow([repr(float(self.times[i])),
                                 repr(float(self.estimates[i])),
                                 repr(float(self.sq_errors[i])),
                                 repr(float(self.stderrs[i])),
                                 self.n_paths])

    @classmethod
    def read_csv(cls, path) -> "ErrorCurve":
        with open(path, newline="") as fh:
            reader = csv.reader(fh)
            header = next(reader)
            if header != cls.CSV_HEADER:
                raise ValueError(f"unexpected CSV header {header}")
            rows = [[float(c) for c in row[:4]] + [int(row[4])]
                    for row in reader]
        arr = np.array([r[:4] for r in rows])
        return cls(times=arr[:, 0], estimates=arr[:, 1], sq_errors=arr[:, 2],
                   stderrs=arr[:, 3], n_paths=rows[0][4] if rows else 0)

    def write_json(self, path) -> None:
        with open(path, "w") as fh:
            json.dump(self.metadata, fh, indent=2, sort_keys=True)


# ---------------------------------------------------------------------------
# config parsing


def _build_potential(section) -> Potential:
    family = section.get("family", "").strip().lower()
    try:
        if family == POWER_LAW:
            return make_power_law(section.getint("d", 1),
                                  float(section.get("p")))
        if family == SUBEXP:
            return make_subexp(float(section.get("sigma")),
                               float(section.get("delta")),
                               float(section.get("m")),
                               d=section.getint("d", 1))
    except (TypeError, ValueError) as exc:
        raise ConfigError(f"bad potential section: {exc}") from exc
    raise ConfigError(f"unknown potential family {family!r}")


def _build_velocity(section, d: int) -> VelocityMeasure:
    kind = section.get("kind", "rademacher").strip().lower()
    if kind == "rademacher":
        return rademacher_product(d)
    if kind == "gaussian":
        return std_gaussian(d)
    if kind == "sphere":
        radius = section.getfloat("radius", fallback=None)
        return uniform_sphere(d, radius)
    raise ConfigError(f"unknown velocity law {kind!r}")


def load_config(path, seed_override: Optional[int] = None,
                workers_override: Optional[int] = None) -> ExperimentConfig:
    parser = configparser.ConfigParser()
    read = parser.read(path)
    if not read:
        raise ConfigError(f"cannot read config file {path}")
    try:
        exp = parser["experiment"]
        pot_sec = parser["potential"]
    except KeyError as exc:
        raise ConfigError(f"missing config section {exc}") from exc
    try:
        potential = _build_potential(pot_sec)
        if "velocity" in parser:
            nu = _build_velocity(parser["velocity"], potential.dim)
        else:
            nu = rademacher_product(potential.dim)

        sampler = exp.get("sampler", "zigzag").strip().lower()
        t_max = float(exp.get("t_max", 100.0))
        t_step = float(exp.get("t_step", 1.0))
        n_grid = int(round(t_max / t_step))
        grid = tuple(np.round(np.arange(n_grid + 1) * t_step, 12))

        x0_raw = exp.get("x0", "0").strip().lower()
        x0 = "stationary" if x0_raw == "stationary" else float(x0_raw)
        v0_raw = exp.get("v0", "draw").strip().lower()
        v0 = v0_raw if v0_raw in ("draw", "uniform_pm1") else float(v0_raw)

        cfg = ExperimentConfig(
            sampler=sampler,
            potential=potential,
            nu=nu,
            lambda_ref=float(exp.get("lambda_ref", 1.0)),
            x0=x0,
            v0=v0,
            observable=IndicatorAbove(float(exp.get("threshold", 5.0))),
            grid_times=grid,
            n_paths=int(exp.get("n_paths", 100000)),
            seed=int(exp.get("seed", 0)),
            workers=int(exp.get("workers", 1)),
            em_step=float(exp.get("em_step", 0.01)),
            label=exp.get("label", Path(str(path)).stem),
        )
    except (TypeError, ValueError) as exc:
        if isinstance(exc, ConfigError):
            raise
        raise ConfigError(f"bad config value: {exc}") from exc
    if seed_override is not None:
        cfg = replace(cfg, seed=seed_override)
    if workers_override is not None:
        cfg = replace(cfg, workers=workers_override)
    cfg.validate()
    return cfg


def config_hash(path) -> str:
    return hashlib.sha256(Path(path).read_bytes()).hexdigest()[:16]


# ---------------------------------------------------------------------------
# reference value


def mu_f_quadrature(potential: Potential, f) -> float:
    """mu(f) = int f e^(-U) / Z to relative accuracy 1e-9, d = 1."""
    if potential.dim != 1:
        raise ValueError("quadrature reference implemented for d = 1")
    z = log_density_normalizer(potential)
    dens = lambda x: np.exp(-potential.value(np.array([x])))
    if isinstance(f, IndicatorAbove):
        val, err = quad(dens, f.threshold, np.inf, limit=400,
                        epsrel=1e-11, epsabs=0.0)
    else:
        val, err = quad(lambda x: f(np.array([x])) * dens(x),
                        -np.inf, np.inf, limit=400, epsrel=1e-11, epsabs=0.0)
    if err > 1e-9 * (abs(val) + 1e-12):
        raise ValueError("quadrature for mu(f) did not converge")
    return val / z


# ---------------------------------------------------------------------------
# path ensembles


def _pdmp_chunk(args) -> tuple:
    (kind, potential, nu, lambda_ref, x0, v0, grid, seed, start, stop) = args
    grid = np.asarray(grid, dtype=float)
    if x0 == "stationary":
        sampler = quantile_sampler_1d(potential)
        x0_of = lambda rng: np.atleast_1d(sampler(rng.random()))
    else:
        x0_of = None
    horizon = float(grid[-1]) if grid[-1] > 0 else 1e-9
    out = np.empty((stop - start, grid.size))
    for j, path_index in enumerate(range(start, stop)):
        init = x0_of if x0_of is not None else np.array([float(x0)])
        path = simulate(kind, potential, nu, lambda_ref, init, v0,
                        horizon, seed, path_index=path_index)
        for ti, t in enumerate(grid):
            out[j, ti] = path.state_at(float(min(t, horizon))).x[0]
    return start, out


def pdmp_positions(cfg: ExperimentConfig) -> np.ndarray:
    """(N, n_times) matrix of path positions at the grid times."""
    grid = tuple(float(t) for t in cfg.grid_times)
    jobs = [(cfg.sampler, cfg.potential, cfg.nu, cfg.lambda_ref, cfg.x0,
             cfg.v0, grid, cfg.seed, start, min(start + CHUNK_SIZE, cfg.n_paths))
            for start in range(0, cfg.n_paths, CHUNK_SIZE)]
    out = np.empty((cfg.n_paths, len(grid)))
    if cfg.workers == 1:
        results = map(_pdmp_chunk, jobs)
        for start, block in results:
            out[start:start + block.shape[0]] = block
    else:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            for start, block in pool.map(_pdmp_chunk, jobs, chunksize=1):
                out[start:start + block.shape[0]] = block
    return out


def em_positions(cfg: ExperimentConfig) -> np.ndarray:
    mode = UNDERDAMPED if cfg.sampler == "underdamped_em" else OVERDAMPED
    if cfg.x0 == "stationary":
        raise ConfigError("stationary starts are not wired for the EM baselines")
    em_cfg = EmConfig(mode=mode, step=cfg.em_step,
                      horizon=max(float(cfg.grid_times[-1]), cfg.em_step),
                      x0=float(cfg.x0), seed=cfg.seed)
    return em_ensemble(cfg.potential, em_cfg, cfg.n_paths,
                       np.asarray(cfg.grid_times, dtype=float))


def run_error_experiment(cfg: ExperimentConfig) -> ErrorCurve:
    cfg.validate()
    t_start = time.perf_counter()
    positions = pdmp_positions(cfg) if cfg.sampler in PDMP_SAMPLERS \
        else em_positions(cfg)
    mu = mu_f_quadrature(cfg.potential, cfg.observable)
    values = cfg.observable.of_positions(positions)       # (N, n_times)
    estimates = values.mean(axis=0)                       # pairwise summation
    stds = values.std(axis=0, ddof=1) if cfg.n_paths > 1 \
        else np.zeros(values.shape[1])
    curve = ErrorCurve(
        times=np.asarray(cfg.grid_times, dtype=float),
        estimates=estimates,
        sq_errors=(estimates - mu) ** 2,
        stderrs=stds / sqrt(cfg.n_paths),
        n_paths=cfg.n_paths,
        metadata={
            "sampler": cfg.sampler,
            "label": cfg.label,
            "seed": cfg.seed,
            "n_paths": cfg.n_paths,
            "mu_f": mu,
            "wall_time_s": time.perf_counter() - t_start,
        },
    )
    return curve


def figure1_repro(pdmp_cfg: ExperimentConfig,
                  em_cfg: ExperimentConfig,
                  xi_curve,
                  out_dir) -> dict:
    """Three aligned series: PDMP error, EM error, and the scaled bound.

    The bound prefactor c is fixed so that c * xi(0) equals the PDMP squared
    error at t = 0.  Writes pdmp.csv, langevin.csv, bound.csv in out_dir.
    """
    if tuple(pdmp_cfg.grid_times) != tuple(em_cfg.grid_times):
        raise ConfigError("the two samplers must share one time grid")
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    pdmp_curve = run_error_experiment(pdmp_cfg)
    em_curve = run_error_experiment(em_cfg)
    times = pdmp_curve.times
    xi0 = xi_curve(0.0)
    c = pdmp_curve.sq_errors[0] / xi0 if xi0 > 0 else 0.0
    bound_vals = np.array([c * xi_curve(float(t)) for t in times])
    bound = ErrorCurve(times=times, estimates=np.zeros_like(times),
                       sq_errors=bound_vals,
                       stderrs=np.zeros_like(times),
                       n_paths=pdmp_curve.n_paths,
                       metadata={"label": "bound", "c": float(c)})
    pdmp_curve.write_csv(out_dir / "pdmp.csv")
    em_curve.write_csv(out_dir / "langevin.csv")
    bound.write_csv(out_dir / "bound.csv")
    pdmp_curve.metadata["series"] = ["pdmp.csv", "langevin.csv", "bound.csv"]
    pdmp_curve.write_json(out_dir / "metadata.json")
    return {"pdmp": pdmp_curve, "langevin": em_curve, "bound": bound}
