"""Monte Carlo rate-region experiments over random Rayleigh channels."""

from __future__ import annotations

import csv
import io
import json
import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field, fields
from pathlib import Path
from typing import List, Optional, Sequence, Tuple, Union

import numpy as np

from .channel import (
    ChannelRealization,
    Individual,
    SumPower,
    SystemConfig,
    effective_channels,
    rate_pair,
)
from .errors import ParameterError
from .heuristics import equal_power, max_power
from .nonreciprocal import BisectionConfig, solve_nonreciprocal
from .reciprocal import beam_from_amplitudes, wsismin_individual, wsismin_sum_power
from .region import DEFAULT_KAPPA_GRID, DEFAULT_MU_GRID, RegionEstimate, build_region

__all__ = [
    "ExperimentConfig",
    "Dataset",
    "DatasetRow",
    "db_to_watts",
    "gen_channels",
    "system_config",
    "run_experiment",
    "write_csv",
    "write_json",
    "write_dataset",
    "load_config",
]

Seed = Union[int, Sequence[int]]


def db_to_watts(db: float) -> float:
    """Power in watts for a level in dB relative to unit noise power."""
    return 10.0 ** (db / 10.0)


@dataclass
class ExperimentConfig:
    """Everything needed to reproduce one rate-region experiment.

    Powers are given in dB relative to unit noise, except ``p_individual``
    which lists per-relay limits in watts. ``backward`` picks how backward
    channels are drawn when ``reciprocal`` is false: ``"independent"`` draws
    fresh coefficients, ``"phase"`` keeps the forward magnitudes and draws
    new phases (useful for matched comparisons).
    """

    k_relays: int = 5
    seed: int = 0
    n_realizations: int = 20
    reciprocal: bool = True
    profile: str = "symmetric"
    backward: str = "independent"
    p_s1_db: float = 0.0
    p_s2_db: float = 0.0
    constraint: str = "sum"
    p_r_db: float = 10.0
    p_individual: Optional[List[float]] = None
    pipeline: str = "auto"
    mu_grid: List[float] = field(default_factory=lambda: list(DEFAULT_MU_GRID))
    kappa_grid: List[float] = field(default_factory=lambda: list(DEFAULT_KAPPA_GRID))
    epsilon: float = 1e-3
    sdp_tol: float = 1e-8
    n_candidates: int = 1000
    heuristics: bool = True
    per_realization: bool = False
    workers: int = 1
    out_path: Optional[str] = None
    out_format: str = "both"

    def __post_init__(self):
        if self.k_relays < 1:
            raise ParameterError("k_relays must be at least 1")
        if self.n_realizations < 1:
            raise ParameterError("n_realizations must be at least 1")
        if self.profile not in ("symmetric", "asymmetric"):
            raise ParameterError(f"unknown channel profile {self.profile!r}")
        if self.backward not in ("independent", "phase"):
            raise ParameterError(f"unknown backward channel mode {self.backward!r}")
        if self.constraint not in ("sum", "individual"):
            raise ParameterError(f"unknown relay constraint {self.constraint!r}")
        if self.pipeline not in ("auto", "closed-form", "sdr"):
            raise ParameterError(f"unknown pipeline {self.pipeline!r}")
        if self.out_format not in ("csv", "json", "both"):
            raise ParameterError(f"unknown output format {self.out_format!r}")
        if self.p_individual is not None:
            self.p_individual = [float(p) for p in self.p_individual]
            if len(self.p_individual) != self.k_relays:
                raise ParameterError("p_individual needs one entry per relay")
        if self.resolved_pipeline == "closed-form" and not self.reciprocal:
            raise ParameterError("the closed-form pipeline needs reciprocal channels")
        self.mu_grid = [float(v) for v in self.mu_grid]
        self.kappa_grid = [float(v) for v in self.kappa_grid]

    @property
    def resolved_pipeline(self) -> str:
        if self.pipeline != "auto":
            return self.pipeline
        return "closed-form" if self.reciprocal else "sdr"

    @property
    def grid(self) -> List[float]:
        return self.mu_grid if self.resolved_pipeline == "closed-form" else self.kappa_grid

    @classmethod
    def from_dict(cls, d: dict) -> "ExperimentConfig":
        known = {f.name for f in fields(cls)}
        extra = set(d) - known
        if extra:
            raise ParameterError(f"unknown config keys: {sorted(extra)}")
        return cls(**d)


def load_config(path: Union[str, Path]) -> ExperimentConfig:
    with open(path) as fh:
        return ExperimentConfig.from_dict(json.load(fh))


def _cn(rng: np.random.Generator, var: np.ndarray) -> np.ndarray:
    k = var.size
    return np.sqrt(var / 2) * (rng.standard_normal(k) + 1j * rng.standard_normal(k))


def gen_channels(k: int, seed: Seed, profile: str = "symmetric", reciprocal: bool = True,
                 backward: str = "independent") -> ChannelRealization:
    """Draw one Rayleigh realization.

    Forward channels are drawn first, so realizations that share a seed share
    h1 and h2 whatever the backward mode. The asymmetric profile gives the
    S2-side channels of relay i variance i.
    """
    if profile not in ("symmetric", "asymmetric"):
        raise ParameterError(f"unknown channel profile {profile!r}")
    rng = np.random.default_rng(seed)
    v1 = np.ones(k)
    v2 = np.arange(1, k + 1, dtype=float) if profile == "asymmetric" else np.ones(k)
    h1, h2 = _cn(rng, v1), _cn(rng, v2)
    if reciprocal:
        return ChannelRealization(h1, h2, h1, h2, reciprocal=True)
    if backward == "independent":
        return ChannelRealization(h1, h2, _cn(rng, v1), _cn(rng, v2))
    if backward == "phase":
        ph = rng.uniform(0.0, 2 * np.pi, size=(2, k))
        return ChannelRealization(h1, h2, np.abs(h1) * np.exp(1j * ph[0]),
                                  np.abs(h2) * np.exp(1j * ph[1]))
    raise ParameterError(f"unknown backward channel mode {backward!r}")


def system_config(cfg: ExperimentConfig) -> SystemConfig:
    """Watts-domain system parameters (unit noise everywhere)."""
    k = cfg.k_relays
    if cfg.constraint == "sum":
        rc = SumPower(db_to_watts(cfg.p_r_db))
    elif cfg.p_individual is not None:
        rc = Individual(cfg.p_individual)
    else:
        rc = Individual(np.full(k, db_to_watts(cfg.p_r_db) / k))
    return SystemConfig.unit_noise(db_to_watts(cfg.p_s1_db), db_to_watts(cfg.p_s2_db), k, rc)


def _realization_seed(cfg: ExperimentConfig, i: int) -> Tuple[int, int]:
    return (cfg.seed, i)


@dataclass
class _RealizationResult:
    index: int
    points: List[Optional[Tuple[float, float]]]
    heuristic: Optional[Tuple[float, float]]
    failures: List[Tuple[int, float, str]]


def _run_one(cfg: ExperimentConfig, i: int) -> _RealizationResult:
    ch = gen_channels(cfg.k_relays, _realization_seed(cfg, i), cfg.profile,
                      cfg.reciprocal, cfg.backward)
    sc = system_config(cfg)
    eff = effective_channels(ch, sc)
    bis = BisectionConfig(epsilon=cfg.epsilon, sdp_tol=cfg.sdp_tol)
    points, failures = [], []
    for j, v in enumerate(cfg.grid):
        try:
            if cfg.resolved_pipeline == "closed-form":
                if sc.is_sum_power:
                    x = wsismin_sum_power(eff, sc, v).x
                else:
                    x = wsismin_individual(eff, sc, v).amplitudes(eff, sc)
                r = rate_pair(beam_from_amplitudes(x, ch), eff, sc)
            else:
                r = solve_nonreciprocal(ch, sc, v, bis, seed=cfg.seed + 7919 * i + j,
                                        num_candidates=cfg.n_candidates).rates
            points.append((float(r[0]), float(r[1])))
        except (ValueError, ArithmeticError, RuntimeError) as exc:
            points.append(None)
            failures.append((i, float(v), f"{type(exc).__name__}: {exc}"))
    heur = None
    if cfg.heuristics:
        w = equal_power(ch, sc) if sc.is_sum_power else max_power(ch, sc)
        r = rate_pair(w, eff, sc)
        heur = (float(r[0]), float(r[1]))
    return _RealizationResult(i, points, heur, failures)


@dataclass(frozen=True)
class DatasetRow:
    mu_or_kappa: float
    r1: float
    r2: float
    scheme: str
    realization_count: int
    seed: int


COLUMNS = ("mu_or_kappa", "r1", "r2", "scheme", "realization_count", "seed")


@dataclass
class Dataset:
    """Averaged boundary points, their hull, heuristic points and failures."""

    config: ExperimentConfig
    rows: List[DatasetRow]
    region: RegionEstimate
    heuristic: Optional[Tuple[float, float]]
    failures: List[Tuple[int, float, str]]
    realization_regions: Optional[List[RegionEstimate]] = None

    def boundary_rows(self) -> List[DatasetRow]:
        return [r for r in self.rows if r.scheme in ("closed-form", "sdr")]

    def to_json_dict(self) -> dict:
        return {
            "config": asdict(self.config),
            "rows": [asdict(r) for r in self.rows],
            "hull": [[float(a), float(b)] for a, b in self.region.hull_vertices],
            "hull_area": self.region.area,
            "heuristic": list(self.heuristic) if self.heuristic else None,
            "failures": [list(f) for f in self.failures],
        }


def run_experiment(cfg: ExperimentConfig) -> Dataset:
    """Sweep every realization, average each grid point, hull the averages.

    Solver failures are recorded per (realization, grid value) and that
    realization is left out of the affected grid point's average.
    """
    idx = range(cfg.n_realizations)
    if cfg.workers > 1:
        with ProcessPoolExecutor(max_workers=cfg.workers) as pool:
            results = list(pool.map(_run_one, [cfg] * cfg.n_realizations, idx))
    else:
        results = [_run_one(cfg, i) for i in idx]
    results.sort(key=lambda r: r.index)

    scheme = cfg.resolved_pipeline
    grid = cfg.grid
    rows, avg_pts, params = [], [], []
    for j, v in enumerate(grid):
        pts = [r.points[j] for r in results if r.points[j] is not None]
        if not pts:
            continue
        m = np.mean(np.array(pts), axis=0)
        rows.append(DatasetRow(v, float(m[0]), float(m[1]), scheme, len(pts), cfg.seed))
        avg_pts.append(m)
        params.append(v)
    failures = [f for r in results for f in r.failures]
    if not avg_pts:
        raise ParameterError("every realization failed at every grid point")
    meta = {"pipeline": scheme, "constraint": cfg.constraint,
            "n_realizations": cfg.n_realizations, "seed": cfg.seed}
    region = build_region(np.array(avg_pts), meta, params)
    for a, b in region.hull_vertices:
        rows.append(DatasetRow(math.nan, float(a), float(b), "hull", cfg.n_realizations, cfg.seed))

    heur = None
    if cfg.heuristics:
        h = np.mean(np.array([r.heuristic for r in results]), axis=0)
        heur = (float(h[0]), float(h[1]))
        name = "equal-power" if cfg.constraint == "sum" else "max-power"
        rows.append(DatasetRow(math.nan, heur[0], heur[1], name, cfg.n_realizations, cfg.seed))

    per = None
    if cfg.per_realization:
        per = [build_region([p for p in r.points if p is not None],
                            dict(meta, realization=r.index), None) for r in results
               if any(p is not None for p in r.points)]
    return Dataset(cfg, rows, region, heur, failures, per)


def _fmt(v) -> str:
    if isinstance(v, float):
        return "" if math.isnan(v) else repr(v)
    return str(v)


def write_csv(ds: Dataset, path: Union[str, Path, None] = None) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(COLUMNS)
    for r in ds.rows:
        w.writerow([_fmt(getattr(r, c)) for c in COLUMNS])
    text = buf.getvalue()
    if path is not None:
        Path(path).write_text(text)
    return text


def _json_safe(o):
    if isinstance(o, float) and math.isnan(o):
        return None
    if isinstance(o, dict):
        return {k: _json_safe(v) for k, v in o.items()}
    if isinstance(o, (list, tuple)):
        return [_json_safe(v) for v in o]
    return o


def write_json(ds: Dataset, path: Union[str, Path, None] = None) -> str:
    text = json.dumps(_json_safe(ds.to_json_dict()), indent=2, sort_keys=True) + "\n"
    if path is not None:
        Path(path).write_text(text)
    return text


def write_dataset(ds: Dataset, out_path: Union[str, Path], fmt: str = "both") -> List[Path]:
    """Write ``<out_path>.csv`` and/or ``<out_path>.json``; returns the paths."""
    base = Path(out_path)
    if base.suffix in (".csv", ".json"):
        base = base.with_suffix("")
    base.parent.mkdir(parents=True, exist_ok=True)
    written = []
    if fmt in ("csv", "both"):
        p = base.with_suffix(".csv")
        write_csv(ds, p)
        written.append(p)
    if fmt in ("json", "both"):
        p = base.with_suffix(".json")
        write_json(ds, p)
        written.append(p)
    return written
