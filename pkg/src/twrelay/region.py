"""Achievable rate regions: sweeps, Pareto filtering and convex hulls.

A region is stored as the raw boundary samples plus the counter-clockwise
vertex list of their convex hull, closed off by the origin and the two axis
anchors (every rate pair dominated by an achievable one is achievable).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Dict, Iterable, Optional, Sequence

import numpy as np

from .channel import (
    ChannelRealization,
    SumPower,
    SystemConfig,
    effective_channels,
    rate_pair,
)
from .errors import ParameterError
from .nonreciprocal import BisectionConfig, solve_nonreciprocal
from .reciprocal import beam_from_amplitudes, wsismin_individual, wsismin_sum_power

__all__ = [
    "DEFAULT_MU_GRID",
    "DEFAULT_KAPPA_GRID",
    "RegionEstimate",
    "map_u",
    "pareto_filter",
    "convex_hull",
    "hull_area",
    "distance_outside",
    "build_region",
    "sweep_reciprocal",
    "sweep_nonreciprocal",
    "max_vertex_gap",
    "DominanceReport",
    "check_dominance_preservation",
    "ConvexityReport",
    "check_segment_convexity",
    "TieReport",
    "check_weighted_ties",
]

DEFAULT_MU_GRID = tuple(np.round(np.linspace(0.0, 1.0, 11), 12))
DEFAULT_KAPPA_GRID = tuple(np.round(np.linspace(0.0, 1.0, 21), 12))


def map_u(t):
    """Inverse-SNR pair(s) -> rate pair(s): (½log2(1 + 1/t1), ½log2(1 + 1/t2))."""
    t = np.asarray(t, dtype=float)
    if np.any(~(t > 0)):
        raise ParameterError("inverse SNRs must be strictly positive")
    return 0.5 * np.log2(1.0 + 1.0 / t)


def pareto_filter(points) -> np.ndarray:
    """Points not dominated (>= in both, > in one) by any other point."""
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    ge = (p[None, :, 0] >= p[:, None, 0]) & (p[None, :, 1] >= p[:, None, 1])
    gt = (p[None, :, 0] > p[:, None, 0]) | (p[None, :, 1] > p[:, None, 1])
    dominated = np.any(ge & gt, axis=1)
    return p[~dominated]


def _cross(o, a, b):
    return (a[0] - o[0]) * (b[1] - o[1]) - (a[1] - o[1]) * (b[0] - o[0])


def convex_hull(points, tol: float = 1e-12) -> np.ndarray:
    """Counter-clockwise hull vertices (monotone chain).

    Points closer than ``tol`` are merged and collinear points dropped. The
    first vertex is the lexicographically smallest point.
    """
    p = np.asarray(points, dtype=float).reshape(-1, 2)
    if p.shape[0] < 1:
        raise ParameterError("convex hull needs at least one point")
    p = p[np.lexsort((p[:, 1], p[:, 0]))]
    uniq = [p[0]]
    for q in p[1:]:
        if np.max(np.abs(q - uniq[-1])) > tol:
            uniq.append(q)
    p = np.array(uniq)
    if len(p) <= 2:
        return p
    scale = max(1.0, float(np.max(np.abs(p))))
    eps = tol * scale * scale

    def chain(seq):
        out = []
        for q in seq:
            while len(out) >= 2 and _cross(out[-2], out[-1], q) <= eps:
                out.pop()
            out.append(q)
        return out

    lower = chain(p)
    upper = chain(p[::-1])
    hull = np.array(lower[:-1] + upper[:-1])
    if len(hull) < 2:
        hull = np.array([p[0], p[-1]])
    return hull


def hull_area(vertices) -> float:
    v = np.asarray(vertices, dtype=float).reshape(-1, 2)
    if len(v) < 3:
        return 0.0
    x, y = v[:, 0], v[:, 1]
    return 0.5 * float(abs(x @ np.roll(y, -1) - y @ np.roll(x, -1)))


def _segment_distance(pts, a, b):
    ab = b - a
    L = float(ab @ ab)
    if L == 0:
        return np.linalg.norm(pts - a, axis=1)
    s = np.clip((pts - a) @ ab / L, 0.0, 1.0)
    return np.linalg.norm(pts - (a + s[:, None] * ab), axis=1)


def distance_outside(vertices, points) -> np.ndarray:
    """Euclidean distance of each point to a convex CCW polygon (0 inside)."""
    v = np.asarray(vertices, dtype=float).reshape(-1, 2)
    pts = np.atleast_2d(np.asarray(points, dtype=float))
    m = len(v)
    dist = np.full(len(pts), np.inf)
    for i in range(max(m, 1)):
        a, b = v[i], v[(i + 1) % m]
        dist = np.minimum(dist, _segment_distance(pts, a, b))
    if m < 3:
        return dist
    inside = np.ones(len(pts), dtype=bool)
    for i in range(m):
        a, b = v[i], v[(i + 1) % m]
        inside &= ((b[0] - a[0]) * (pts[:, 1] - a[1]) - (b[1] - a[1]) * (pts[:, 0] - a[0])) >= 0
    dist[inside] = 0.0
    return dist


@dataclass
class RegionEstimate:
    raw_points: np.ndarray
    hull_vertices: np.ndarray
    metadata: Dict = field(default_factory=dict)
    params: Optional[np.ndarray] = None
    beams: Optional[np.ndarray] = None

    @property
    def area(self) -> float:
        return hull_area(self.hull_vertices)

    @property
    def r1_max(self) -> float:
        return float(np.max(self.hull_vertices[:, 0]))

    @property
    def r2_max(self) -> float:
        return float(np.max(self.hull_vertices[:, 1]))

    def distance_outside(self, points) -> np.ndarray:
        return distance_outside(self.hull_vertices, points)

    def contains(self, points, tol: float = 1e-9) -> np.ndarray:
        return self.distance_outside(points) <= tol

    def mirrored(self) -> "RegionEstimate":
        """Region with the two rate axes exchanged."""
        raw = self.raw_points[:, ::-1]
        return build_region(raw, dict(self.metadata, mirrored=True), self.params)


def build_region(points, metadata: Optional[Dict] = None, params=None,
                 beams=None) -> RegionEstimate:
    raw = np.asarray(points, dtype=float).reshape(-1, 2)
    r1m = float(raw[:, 0].max()) if len(raw) else 0.0
    r2m = float(raw[:, 1].max()) if len(raw) else 0.0
    anchors = np.array([[0.0, 0.0], [r1m, 0.0], [0.0, r2m]])
    hull = convex_hull(np.vstack([raw, anchors]))
    return RegionEstimate(raw, hull, dict(metadata or {}),
                          None if params is None else np.asarray(params, float), beams)


def _constraint_name(cfg: SystemConfig) -> str:
    return "sum" if isinstance(cfg.relay_constraint, SumPower) else "individual"


def sweep_reciprocal(ch: ChannelRealization, cfg: SystemConfig,
                     mu_grid: Sequence[float] = DEFAULT_MU_GRID) -> RegionEstimate:
    """Closed-form boundary points for every weight in ``mu_grid``."""
    eff = effective_channels(ch, cfg)
    beams, pts = [], []
    for mu in mu_grid:
        if isinstance(cfg.relay_constraint, SumPower):
            x = wsismin_sum_power(eff, cfg, mu).x
        else:
            x = wsismin_individual(eff, cfg, mu).amplitudes(eff, cfg)
        w = beam_from_amplitudes(x, ch)
        beams.append(w)
        pts.append(rate_pair(w, eff, cfg))
    meta = {"pipeline": "reciprocal", "grid": list(map(float, mu_grid)),
            "constraint": _constraint_name(cfg)}
    return build_region(pts, meta, mu_grid, np.array(beams))


def sweep_nonreciprocal(ch: ChannelRealization, cfg: SystemConfig,
                        kappa_grid: Sequence[float] = DEFAULT_KAPPA_GRID,
                        bis: BisectionConfig = BisectionConfig(), seed: int = 0,
                        num_candidates: int = 1000) -> RegionEstimate:
    """Rate-profile boundary points for every ``kappa`` in the grid."""
    beams, pts, r_stars = [], [], []
    for j, kappa in enumerate(kappa_grid):
        sol = solve_nonreciprocal(ch, cfg, kappa, bis, seed=seed + j,
                                  num_candidates=num_candidates)
        beams.append(sol.w)
        pts.append(sol.rates)
        r_stars.append(sol.r_star)
    meta = {"pipeline": "nonreciprocal", "grid": list(map(float, kappa_grid)),
            "constraint": _constraint_name(cfg), "r_star": r_stars, "seed": seed}
    return build_region(pts, meta, kappa_grid, np.array(beams))


def max_vertex_gap(a: RegionEstimate, b: RegionEstimate) -> float:
    """Largest distance of a hull vertex of either region outside the other."""
    return float(max(np.max(b.distance_outside(a.hull_vertices)),
                     np.max(a.distance_outside(b.hull_vertices))))


@dataclass
class DominanceReport:
    pairs_checked: int
    dominated_pairs: int
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


def _strict(p):
    return (p[:, None, 0] < p[None, :, 0]) & (p[:, None, 1] < p[None, :, 1])


def _pareto(p):
    le = (p[:, None, 0] <= p[None, :, 0]) & (p[:, None, 1] <= p[None, :, 1])
    lt = (p[:, None, 0] < p[None, :, 0]) | (p[:, None, 1] < p[None, :, 1])
    return le & lt


def check_dominance_preservation(inverse_points) -> DominanceReport:
    """Dominance among inverse-SNR points must reverse exactly under ``map_u``.

    Checks, over all ordered pairs, that t_i below t_j (strictly, and in the
    Pareto sense) holds exactly when U(t_i) is above U(t_j).
    """
    t = np.asarray(inverse_points, dtype=float).reshape(-1, 2)
    r = map_u(t)
    neg_r = -r
    viol = 0
    dom = 0
    for rel in (_strict, _pareto):
        a, b = rel(t), rel(neg_r)
        dom += int(a.sum())
        viol += int(np.sum(a != b))
    n = len(t)
    return DominanceReport(n * (n - 1), dom, viol)


@dataclass
class ConvexityReport:
    samples: int
    decreasing: bool
    convex: bool
    worst_slope_drop: float

    @property
    def passed(self) -> bool:
        return self.decreasing and self.convex


def check_segment_convexity(start, end, samples: int = 50,
                            tol: float = 1e-9) -> ConvexityReport:
    """Image under ``map_u`` of a segment in inverse-SNR space.

    For a segment along which the second coordinate falls as the first grows,
    the image, read as a function of its first coordinate, must be
    non-increasing with non-decreasing slopes.
    """
    start, end = np.asarray(start, float), np.asarray(end, float)
    if np.any(~(start > 0)) or np.any(~(end > 0)):
        raise ParameterError("segment endpoints must be strictly positive")
    s = np.linspace(0.0, 1.0, samples)
    img = map_u(start + s[:, None] * (end - start))
    img = img[np.argsort(img[:, 0], kind="stable")]
    y, z = img[:, 0], img[:, 1]
    dy = np.diff(y)
    if np.all(dy <= 1e-15):
        return ConvexityReport(samples, True, True, 0.0)
    keep = np.r_[True, dy > 1e-15]
    y, z = y[keep], z[keep]
    slopes = np.diff(z) / np.diff(y)
    decreasing = bool(np.all(np.diff(z) <= tol))
    drops = np.diff(slopes) / np.maximum(1.0, np.abs(slopes[:-1])) if slopes.size > 1 else np.zeros(0)
    worst = float(-np.min(drops)) if drops.size else 0.0
    return ConvexityReport(samples, decreasing, bool(worst <= tol), max(worst, 0.0))


@dataclass
class TieReport:
    weights_with_ties: int
    points_checked: int
    violations: int

    @property
    def passed(self) -> bool:
        return self.violations == 0


def check_weighted_ties(inverse_points, mu_grid: Iterable[float], tie_tol: float = 1e-12,
                        tol: float = 1e-9) -> TieReport:
    """Points lying between two tied weighted-sum minimisers sit on or above their chord."""
    t = np.asarray(inverse_points, dtype=float).reshape(-1, 2)
    ties = checked = viol = 0
    for mu in mu_grid:
        val = mu * t[:, 0] + (1 - mu) * t[:, 1]
        m = val.min()
        arg = np.abs(val - m) <= tie_tol * max(1.0, abs(m))
        mins = t[arg]
        if len(mins) < 2 or np.ptp(mins[:, 0]) <= tie_tol:
            continue
        ties += 1
        lo, hi = mins[np.argmin(mins[:, 0])], mins[np.argmax(mins[:, 0])]
        between = (~arg) & (t[:, 0] > lo[0]) & (t[:, 0] < hi[0])
        q = t[between]
        chord = lo[1] + (q[:, 0] - lo[0]) * (hi[1] - lo[1]) / (hi[0] - lo[0])
        checked += len(q)
        viol += int(np.sum(q[:, 1] < chord - tol))
    return TieReport(ties, checked, viol)
