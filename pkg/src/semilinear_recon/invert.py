"""Iterative-thresholding recovery of the sources ``G_k = F(u_k)`` and of ``F`` itself.

For each excitation level ``delta_k`` the source is updated by

    G <- phi / (lam + M) + M G / (lam + M)

where ``psi = delta_k y + w`` solves ``-Lap psi = G`` with ``psi = delta_k y`` on the boundary and
``phi`` is the harmonic function whose boundary values are the flux misfit
``d_nu psi - m_k`` on the measured nodes and zero elsewhere. ``F`` is then read
off by averaging each ``G_k`` over the level set ``{psi_k = s}``.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass
from typing import NamedTuple, Sequence

import numpy as np

from .forward import DEFAULT_SETTINGS, LinearProblem, SolverSettings, solve_linear, solve_semilinear
from .grid import (BoundaryTrace, Grid2D, build_grid, harmonic_lift, l2_norm,
                   lift_normal_derivative, normal_derivative)
from .measure import MeasurementSet
from .nonlinearity import Nonlinearity

# relative growth of ||G|| past which a level is declared divergent
DIVERGENCE_FACTOR = 1e8


@dataclass(frozen=True)
class RegularizationParams:
    M: float
    lam: float
    eps_stop: float = 1e-3
    max_outer: int = 500

    def __post_init__(self):
        if self.M <= 0:
            raise ValueError(f"M must be positive, got {self.M}")
        if self.lam < 0:
            raise ValueError(f"lambda must be non-negative, got {self.lam}")
        if self.eps_stop < 0 or self.max_outer < 1:
            raise ValueError("eps_stop must be >= 0 and max_outer >= 1")


@dataclass
class LevelInversion:
    delta: float
    G: np.ndarray
    psi: np.ndarray
    iterations: int
    converged: bool
    diverged: bool = False

    def to_dict(self) -> dict:
        return {
            "delta": self.delta,
            "iterations": self.iterations,
            "converged": self.converged,
            "diverged": self.diverged,
            "G": self.G.tolist(),
            "psi": self.psi.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "LevelInversion":
        return cls(float(d["delta"]), np.array(d["G"], dtype=float), np.array(d["psi"], dtype=float),
                   int(d["iterations"]), bool(d["converged"]), bool(d.get("diverged", False)))


def _correction(grid: Grid2D, G, settings, w0=None):
    # psi = delta*y + w with w = 0 on the boundary, so a zero source gives w = 0 exactly
    return solve_linear(LinearProblem(grid, G, grid.zeros()), settings, initial=w0)


def _step(grid: Grid2D, G, delta, m: BoundaryTrace, params, settings, w0=None, phi0=None):
    w = _correction(grid, G, settings, w0)
    flux = lift_normal_derivative(grid, delta, m.nodes).values + normal_derivative(w, m.nodes).values
    misfit = flux - m.values
    r = grid.zeros()
    for (i, j), val in zip(m.nodes, misfit):
        r[i, j] = val
    phi = solve_linear(LinearProblem(grid, grid.zeros(), r), settings, initial=phi0)
    denom = params.lam + params.M
    G_next = phi / denom + params.M * G / denom
    return G_next, w, phi


def threshold_step(G: np.ndarray, delta: float, m: BoundaryTrace, params: RegularizationParams,
                   settings: SolverSettings = DEFAULT_SETTINGS) -> tuple[np.ndarray, np.ndarray]:
    """One thresholding update; returns ``(G_next, psi)``."""
    grid = build_grid(G.shape[0] - 1)
    G_next, w, _ = _step(grid, np.asarray(G, dtype=float), delta, m, params, settings)
    return G_next, harmonic_lift(grid, delta) + w


def run_level(delta: float, m: BoundaryTrace, F0: Nonlinearity, params: RegularizationParams,
              grid: Grid2D, settings: SolverSettings = DEFAULT_SETTINGS) -> LevelInversion:
    """Iterate from ``G_0 = F0(u_{delta,F0})`` until the relative L2 change is at most ``eps_stop``."""
    G = np.asarray(F0(solve_semilinear(grid, F0, delta, settings)), dtype=float)
    ceiling = DIVERGENCE_FACTOR * max(l2_norm(G), 1.0)
    w = phi = None
    converged = diverged = False
    it = 0
    while it < params.max_outer:
        G_next, w, phi = _step(grid, G, delta, m, params, settings, w, phi)
        it += 1
        change, size = l2_norm(G_next - G), l2_norm(G)
        G = G_next
        if change <= params.eps_stop * size:
            converged = True
            break
        if not np.all(np.isfinite(G)) or l2_norm(G) > ceiling:
            diverged = True
            break
    if diverged:
        psi = np.full(grid.shape, np.nan)
    else:
        # final state re-solved from the accepted source
        psi = harmonic_lift(grid, delta) + _correction(grid, G, settings, w)
    return LevelInversion(delta, G, psi, it, converged, diverged)


def run_inversion(data: MeasurementSet, F0: Nonlinearity, params: RegularizationParams,
                  settings: SolverSettings = DEFAULT_SETTINGS) -> list[LevelInversion]:
    grid = build_grid(data.coarse_n)
    nodes = data.nodes()
    return [run_level(d, BoundaryTrace(nodes, t), F0, params, grid, settings)
            for d, t in zip(data.deltas, data.traces)]


def level_set_samples(psi: np.ndarray, G: np.ndarray, s: float) -> np.ndarray:
    """Values of ``G`` at the crossings of ``{psi = s}`` with grid edges.

    Crossings are located by sign changes of ``psi - s`` along horizontal and
    vertical edges and placed by linear interpolation; nodes where ``psi == s``
    exactly contribute once.
    """
    d = psi - s
    out = [G[d == 0.0]]
    for a, b, ga, gb in ((d[:-1, :], d[1:, :], G[:-1, :], G[1:, :]),
                         (d[:, :-1], d[:, 1:], G[:, :-1], G[:, 1:])):
        hit = ((a < 0) & (b > 0)) | ((a > 0) & (b < 0))
        t = a[hit] / (a[hit] - b[hit])
        out.append(ga[hit] + t * (gb[hit] - ga[hit]))
    return np.concatenate(out)


def level_set_points(psi: np.ndarray, s: float) -> np.ndarray:
    """Coordinates ``(x, y)`` of the crossings used by :func:`level_set_samples`."""
    n = psi.shape[0] - 1
    X, Y = np.meshgrid(np.arange(n + 1) / n, np.arange(n + 1) / n, indexing="ij")
    return np.column_stack([level_set_samples(psi, X, s), level_set_samples(psi, Y, s)])


@dataclass
class ReconstructedF:
    """Samples ``F_hat(s_m)``; missing samples hold NaN and are flagged."""

    s: np.ndarray
    values: np.ndarray
    missing: np.ndarray
    crossings: np.ndarray
    levels_used: np.ndarray

    def __call__(self, x):
        """Piecewise-linear interpolant through ``(0, 0)`` and the available samples."""
        keep = ~self.missing
        xs = np.concatenate([[0.0], self.s[keep]])
        ys = np.concatenate([[0.0], self.values[keep]])
        return np.interp(x, xs, ys)

    def to_dict(self) -> dict:
        return {
            "s": self.s.tolist(),
            "F_hat": [None if m else v for v, m in zip(self.values.tolist(), self.missing)],
            "missing": [int(i) for i in np.flatnonzero(self.missing)],
            "crossings": self.crossings.tolist(),
            "levels_used": self.levels_used.tolist(),
        }

    @classmethod
    def from_dict(cls, d: dict) -> "ReconstructedF":
        vals = np.array([np.nan if v is None else v for v in d["F_hat"]], dtype=float)
        missing = np.zeros(len(vals), dtype=bool)
        missing[list(d["missing"])] = True
        return cls(np.array(d["s"], dtype=float), vals, missing,
                   np.array(d["crossings"], dtype=int), np.array(d["levels_used"], dtype=int))

    def to_csv(self, F_true: Nonlinearity | None = None) -> str:
        buf = io.StringIO()
        w = csv.writer(buf, lineterminator="\n")
        w.writerow(["s", "F_true", "F_hat", "missing"])
        for s, v, miss in zip(self.s.tolist(), self.values.tolist(), self.missing.tolist()):
            ft = repr(float(F_true(s))) if F_true is not None else ""
            w.writerow([repr(s), ft, "" if miss else repr(v), int(miss)])
        return buf.getvalue()


def reconstruct(levels: Sequence[LevelInversion], N: int | None = None) -> ReconstructedF:
    """Average each level's source over its own level sets ``{psi_k = s_m}``.

    ``s_m = delta_m + 1/(2N)`` with ``delta_0 = 0``; level ``k`` contributes to
    ``s_m`` for ``k > m``. Levels whose level set is empty are skipped; a sample
    with no contributing level is marked missing.
    """
    N = len(levels) if N is None else N
    if len(levels) != N:
        raise ValueError(f"expected {N} levels, got {len(levels)}")
    deltas = [0.0] + [lv.delta for lv in levels]
    if any(b <= a for a, b in zip(deltas, deltas[1:])):
        raise ValueError("levels must be sorted by increasing delta")
    s = np.array([deltas[m] + 1.0 / (2 * N) for m in range(N)])
    values = np.full(N, np.nan)
    crossings = np.zeros(N, dtype=int)
    used = np.zeros(N, dtype=int)
    for m in range(N):
        per_level = []
        for lv in levels[m:]:
            pts = level_set_samples(lv.psi, lv.G, s[m])
            if pts.size:
                per_level.append(pts.mean())
                crossings[m] += pts.size
        if per_level:
            values[m] = float(np.mean(per_level))
            used[m] = len(per_level)
    missing = ~np.isfinite(values)
    values[missing] = np.nan
    return ReconstructedF(s, values, missing, crossings, used)


class ErrorMeasure(NamedTuple):
    value: float
    absolute: bool  # True when ||F_true|| vanished on the samples
    n_samples: int


def relative_error(F_true: Nonlinearity, Fhat: ReconstructedF) -> ErrorMeasure:
    """Relative l2 error over the non-missing samples."""
    keep = ~Fhat.missing
    if not keep.any():
        raise ValueError("every reconstructed sample is missing")
    ft = np.asarray(F_true(Fhat.s[keep]), dtype=float)
    num = float(np.sqrt(np.sum((ft - Fhat.values[keep]) ** 2)))
    den = float(np.sqrt(np.sum(ft**2)))
    if den == 0.0:
        return ErrorMeasure(num, True, int(keep.sum()))
    return ErrorMeasure(num / den, False, int(keep.sum()))


def levels_to_json(levels: Sequence[LevelInversion]) -> str:
    return json.dumps([lv.to_dict() for lv in levels])
