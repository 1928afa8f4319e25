"""Sequential parametrized motion planner inside one sphere fibre.

Given unit vectors ``e_1, ..., e_r`` of one fibre, every ``e_j`` is joined to
``e_1``.  Non-antipodal targets use the normalized straight-line
interpolation; targets antipodal to ``e_1`` follow the half great circle
through ``s_i(e_1)``, where ``s_i`` is the section of a Stiefel section table
on the piece ``A_i`` containing ``e_1``.  The configuration lands in the
partition piece ``|J| + i`` (``0`` when no target is antipodal).

Antipodality is decided numerically with the band ``|e_j + e_1| <= tau_antipodal``.
Inside the band (but not exactly antipodal) the great circle gets a linear
correction ``t * (e_j + e_1)`` before normalization so the path still ends at
``e_j``; the correction vanishes for exact antipodes.
"""

from __future__ import annotations

import os
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Hashable, List, Optional, Sequence, Tuple

import numpy as np

TAU_NORM = 1e-9
TAU_ENDPOINT = 1e-9
TAU_ANTIPODAL = 1e-6
TAU_DEN = 1e-12

Predicate = Callable[[np.ndarray], np.ndarray]
Section = Callable[[np.ndarray], np.ndarray]


class PlannerError(ValueError):
    pass


class DenominatorUnderflow(PlannerError):
    """Interpolation passed too close to the origin; tighten ``tau_antipodal``."""


class UncoveredPoint(PlannerError):
    pass


@dataclass(frozen=True)
class Piece:
    """A set ``A_i`` (vectorized membership test) with its section ``e -> e'``."""

    predicate: Predicate
    section: Section


@dataclass(frozen=True)
class StiefelSectionTable:
    pieces: Tuple[Piece, ...]
    q: int
    name: str = "custom"

    @property
    def k(self) -> int:
        return len(self.pieces) - 1

    def piece_of(self, e: np.ndarray) -> np.ndarray:
        """Index of the first piece containing each row of ``e``; ``-1`` if none."""
        e = np.atleast_2d(e)
        idx = np.full(len(e), -1, dtype=np.int64)
        for i, piece in enumerate(self.pieces):
            hit = (idx < 0) & np.asarray(piece.predicate(e), dtype=bool)
            idx[hit] = i
        return idx

    def section(self, e: np.ndarray, idx: Optional[np.ndarray] = None) -> np.ndarray:
        e = np.atleast_2d(e)
        if idx is None:
            idx = self.piece_of(e)
        if np.any(idx < 0):
            raise UncoveredPoint("section table does not cover some point")
        out = np.empty_like(e, dtype=float)
        for i, piece in enumerate(self.pieces):
            sel = idx == i
            if np.any(sel):
                out[sel] = piece.section(e[sel])
        return out


def _complex_rotate(e: np.ndarray) -> np.ndarray:
    e = np.atleast_2d(e)
    out = np.empty_like(e, dtype=float)
    out[:, 0::2] = -e[:, 1::2]
    out[:, 1::2] = e[:, 0::2]
    return out


def builtin_complex_section(q: int) -> StiefelSectionTable:
    """Single-piece table ``e -> J e`` with ``J(x1, y1, ...) = (-y1, x1, ...)``."""
    if q < 2 or q % 2:
        raise PlannerError(f"complex structure needs even q >= 2, got {q}")
    everything = lambda e: np.ones(len(np.atleast_2d(e)), dtype=bool)  # noqa: E731
    return StiefelSectionTable((Piece(everything, _complex_rotate),), q, "complex")


def from_open_cover(charts: Sequence[Piece], q: int, name: str = "cover") -> StiefelSectionTable:
    """Disjoint table from overlapping open sets with sections.

    With ``k + 1`` charts, ``mu(e)`` counts the charts containing ``e`` and
    ``A_i = {mu = k + 1 - i}``.  On ``A_i`` the section of the lowest-indexed
    chart containing the point is used.
    """
    charts = tuple(charts)
    k = len(charts) - 1

    def membership(e: np.ndarray) -> np.ndarray:
        e = np.atleast_2d(e)
        return np.stack([np.asarray(c.predicate(e), dtype=bool) for c in charts], axis=1)

    def section(e: np.ndarray) -> np.ndarray:
        e = np.atleast_2d(e)
        member = membership(e)
        if not member.any(axis=1).all():
            raise UncoveredPoint("open cover does not cover some point")
        first = member.argmax(axis=1)
        out = np.empty_like(e, dtype=float)
        for j, chart in enumerate(charts):
            sel = first == j
            if np.any(sel):
                out[sel] = chart.section(e[sel])
        return out

    def level(i: int) -> Predicate:
        return lambda e: membership(e).sum(axis=1) == k + 1 - i

    return StiefelSectionTable(tuple(Piece(level(i), section) for i in range(k + 1)), q, name)


def _tangent_toward(axis: np.ndarray) -> Section:
    def section(e: np.ndarray) -> np.ndarray:
        e = np.atleast_2d(e)
        w = axis - (e @ axis)[:, None] * e
        return w / np.linalg.norm(w, axis=1, keepdims=True)

    return section


def two_chart_table(q: int, split: float = 0.5) -> StiefelSectionTable:
    """A ``k = 1`` table valid in every rank ``q >= 2``.

    Chart 0 avoids the poles ``+-N`` of the last axis and projects ``N`` onto the
    tangent space; chart 1 is a neighbourhood of those poles and projects the
    first axis ``M`` instead.
    """
    if q < 2:
        raise PlannerError("q must be >= 2")
    north = np.zeros(q)
    north[-1] = 1.0
    first = np.zeros(q)
    first[0] = 1.0
    lo, hi = 0.2 * split, min(0.99, 1.8 * split)
    charts = (
        Piece(lambda e: np.abs(np.atleast_2d(e) @ north) < hi, _tangent_toward(north)),
        Piece(lambda e: np.abs(np.atleast_2d(e) @ north) > lo, _tangent_toward(first)),
    )
    return from_open_cover(charts, q, "two-chart")


@dataclass(frozen=True)
class FiberConfig:
    points: np.ndarray
    fiber_id: Hashable = None

    def __post_init__(self) -> None:
        pts = np.array(self.points, dtype=float)
        if pts.ndim != 2 or pts.shape[0] < 2 or pts.shape[1] < 2:
            raise PlannerError("need r >= 2 points in R^q with q >= 2")
        dev = np.abs(np.linalg.norm(pts, axis=1) - 1.0)
        if np.any(dev > TAU_NORM):
            raise PlannerError(f"points must be unit vectors (max deviation {dev.max():.3g})")
        pts.setflags(write=False)
        object.__setattr__(self, "points", pts)

    @property
    def r(self) -> int:
        return self.points.shape[0]

    @property
    def q(self) -> int:
        return self.points.shape[1]


def antipodal_mask(points: np.ndarray, tau_antipodal: float = TAU_ANTIPODAL) -> np.ndarray:
    """``(N, r-1)`` mask of targets within the antipodal band of ``e_1``."""
    e1 = points[:, :1, :]
    return np.linalg.norm(points[:, 1:, :] + e1, axis=2) <= tau_antipodal


def piece_indices(
    points: np.ndarray, table: StiefelSectionTable, tau_antipodal: float = TAU_ANTIPODAL
) -> np.ndarray:
    """Partition piece ``|J| + i`` of each configuration in an ``(N, r, q)`` batch."""
    anti = antipodal_mask(points, tau_antipodal)
    size = anti.sum(axis=1)
    out = np.zeros(len(points), dtype=np.int64)
    some = size > 0
    if np.any(some):
        idx = table.piece_of(points[some, 0, :])
        if np.any(idx < 0):
            raise UncoveredPoint("section table does not cover e_1")
        out[some] = size[some] + idx
    return out


def _norms(x: np.ndarray) -> np.ndarray:
    return np.sqrt(np.einsum("...i,...i->...", x, x))[..., None]


def _paths(e1, ej, s, anti, t, tau_den):
    """Evaluate all paths; shapes ``e1 (N,q)``, ``ej (N,m,q)``, result ``(N,m,T,q)``."""
    t = np.asarray(t, dtype=float)
    tt = t[None, None, :, None]
    a = e1[:, None, None, :]
    b = ej[:, :, None, :]
    out = a + tt * (b - a)
    norms = _norms(out)
    straight = ~anti
    if np.any(straight):
        worst = norms[straight].min()
        if worst < tau_den:
            raise DenominatorUnderflow(f"interpolation norm {worst:.3g} < {tau_den:g}")
    np.divide(out, norms, out=out, where=norms > 0)
    if np.any(anti):
        rows, cols = np.nonzero(anti)
        theta = np.pi * t[None, :, None]
        a1 = e1[rows][:, None, :]
        circle = np.cos(theta) * a1 + np.sin(theta) * s[rows][:, None, :] + t[None, :, None] * (ej[rows, cols][:, None, :] + a1)
        out[rows, cols] = circle / _norms(circle)
    return out


@dataclass(frozen=True)
class BatchPlan:
    paths: np.ndarray
    antipodal: np.ndarray
    piece_index: np.ndarray
    t: np.ndarray


def plan_batch(
    points: np.ndarray,
    table: StiefelSectionTable,
    t: np.ndarray,
    tau_antipodal: float = TAU_ANTIPODAL,
    tau_den: float = TAU_DEN,
) -> BatchPlan:
    """Vectorized planner over an ``(N, r, q)`` batch of configurations."""
    points = np.asarray(points, dtype=float)
    e1 = points[:, 0, :]
    anti = antipodal_mask(points, tau_antipodal)
    s = np.zeros_like(e1)
    some = anti.any(axis=1)
    if np.any(some):
        s[some] = table.section(e1[some])
    paths = _paths(e1, points[:, 1:, :], s, anti, t, tau_den)
    return BatchPlan(paths, anti, piece_indices(points, table, tau_antipodal), np.asarray(t, dtype=float))


@dataclass(frozen=True)
class PlanResult:
    config: FiberConfig
    antipodal_set: Tuple[int, ...]
    piece_index: int
    t: np.ndarray
    samples: np.ndarray
    paths: Tuple[Callable[[np.ndarray], np.ndarray], ...] = field(repr=False)

    def kind(self, j: int) -> str:
        return "great_circle" if j in self.antipodal_set else "interpolation"

    def to_dict(self) -> dict:
        cfg = self.config
        return {
            "config": {
                "q": cfg.q,
                "r": cfg.r,
                "points": cfg.points.tolist(),
                "fiber_id": None if cfg.fiber_id is None else str(cfg.fiber_id),
            },
            "J": list(self.antipodal_set),
            "piece_index": self.piece_index,
            "paths": [{"j": j, "kind": self.kind(j)} for j in range(2, cfg.r + 1)],
            "samples": [
                [[float(tv), *map(float, x)] for tv, x in zip(self.t, path)] for path in self.samples
            ],
        }


def plan(
    config: FiberConfig,
    table: StiefelSectionTable,
    n_samples: int = 1024,
    tau_antipodal: float = TAU_ANTIPODAL,
    tau_den: float = TAU_DEN,
) -> PlanResult:
    if table.q != config.q:
        raise PlannerError(f"table is for q={table.q}, configuration has q={config.q}")
    t = np.linspace(0.0, 1.0, n_samples)
    pts = config.points[None, :, :]
    batch = plan_batch(pts, table, t, tau_antipodal, tau_den)
    anti = batch.antipodal[0]
    e1 = config.points[0]
    s = table.section(e1)[0] if anti.any() else np.zeros_like(e1)

    def curve(j: int) -> Callable[[np.ndarray], np.ndarray]:
        def gamma(tv):
            scalar = np.ndim(tv) == 0
            vals = _paths(e1[None], config.points[None, j - 1 : j], s[None], anti[None, j - 2 : j - 1],
                          np.atleast_1d(tv), tau_den)[0, 0]
            return vals[0] if scalar else vals

        return gamma

    J = tuple(int(j) + 2 for j in np.flatnonzero(anti))
    return PlanResult(
        config,
        J,
        int(batch.piece_index[0]),
        t,
        batch.paths[0],
        tuple(curve(j) for j in range(2, config.r + 1)),
    )


def random_configurations(
    rng: np.random.Generator, n: int, r: int, q: int, antipodal_rate: float = 0.0
) -> np.ndarray:
    """Uniform configurations on ``S^{q-1}``; optionally force exact antipodes."""
    pts = rng.standard_normal((n, r, q))
    pts /= np.linalg.norm(pts, axis=2, keepdims=True)
    if antipodal_rate > 0:
        flip = rng.random((n, r - 1)) < antipodal_rate
        neg = np.broadcast_to(-pts[:, :1, :], pts[:, 1:, :].shape)
        pts[:, 1:, :] = np.where(flip[:, :, None], neg, pts[:, 1:, :])
    return pts


def thread_cap() -> int:
    """Worker count: ``TC_SPHERE_THREADS`` if set, else the CPU count."""
    env = os.environ.get("TC_SPHERE_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def piece_statistics(
    samples: int,
    q: int,
    r: int,
    table: StiefelSectionTable,
    seed: int = 0,
    tau_antipodal: float = TAU_ANTIPODAL,
    antipodal_rate: float = 0.0,
    chunk: int = 10_000,
    workers: Optional[int] = None,
) -> np.ndarray:
    """Histogram of piece indices over ``samples`` random configurations.

    Chunks draw from independent child seeds, so the result depends on
    ``seed`` and ``chunk`` but not on the number of workers.
    """
    sizes = [min(chunk, samples - start) for start in range(0, samples, chunk)]
    seeds = np.random.SeedSequence(seed).spawn(len(sizes))
    length = table.k + r

    def run(args) -> np.ndarray:
        size, child = args
        rng = np.random.default_rng(child)
        pts = random_configurations(rng, size, r, q, antipodal_rate)
        return np.bincount(piece_indices(pts, table, tau_antipodal), minlength=length)

    workers = workers or thread_cap()
    jobs = list(zip(sizes, seeds))
    if workers > 1 and len(jobs) > 1:
        with ThreadPoolExecutor(max_workers=workers) as pool:
            parts: List[np.ndarray] = list(pool.map(run, jobs))
    else:
        parts = [run(job) for job in jobs]
    hist = np.zeros(length, dtype=np.int64)
    for part in parts:
        hist += part[:length]
    return hist
