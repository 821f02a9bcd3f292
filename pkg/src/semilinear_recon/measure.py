"""Synthetic flux measurements with seeded uniform noise, and the ``d_delta`` diagnostic."""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .forward import DEFAULT_SETTINGS, SolverSettings, solve_semilinear
from .grid import Grid2D, Node, build_grid, l2_norm, normal_derivative, right_edge_nodes
from .nonlinearity import Nonlinearity

GEOMETRIES = ("gamma1", "gamma2")


@dataclass(frozen=True)
class MeasurementGeometry:
    """Where the flux is observed.

    ``gamma1`` is the right edge ``x = 1`` without its two corners; ``gamma2`` is
    the single boundary point ``point`` (default ``(1, 0.5)``).
    """

    kind: str = "gamma1"
    point: tuple[float, float] = (1.0, 0.5)

    def __post_init__(self):
        if self.kind not in GEOMETRIES:
            raise ValueError(f"geometry must be one of {GEOMETRIES}, got {self.kind!r}")

    def nodes(self, grid: Grid2D) -> tuple[Node, ...]:
        if self.kind == "gamma1":
            return right_edge_nodes(grid)
        i, j = (round(c * grid.n) for c in self.point)
        if abs(i - self.point[0] * grid.n) > 1e-9 or abs(j - self.point[1] * grid.n) > 1e-9:
            raise ValueError(f"point {self.point} is not a node of the n={grid.n} grid")
        node = (int(i), int(j))
        if not grid.is_boundary(node) or grid.is_corner(node):
            raise ValueError(f"point {self.point} is not a non-corner boundary node")
        return (node,)

    def to_dict(self) -> dict:
        return {"kind": self.kind, "point": list(self.point)}

    @classmethod
    def from_dict(cls, d) -> "MeasurementGeometry":
        if isinstance(d, str):
            return cls(d)
        return cls(d["kind"], tuple(d.get("point", (1.0, 0.5))))


@dataclass
class MeasurementSet:
    """Noisy flux traces ``m_k`` for ``delta_k``, sampled on the coarse-grid nodes of the geometry."""

    deltas: list[float]
    traces: list[np.ndarray]
    epsilon0: float
    seed: int
    geometry: MeasurementGeometry
    coarse_n: int
    fine_n: int
    noise_levels: list[float] = field(default_factory=list)
    clean_traces: list[np.ndarray] = field(default_factory=list)
    f_true: str | None = None

    def __post_init__(self):
        if not self.deltas:
            raise ValueError("need at least one level")
        if any(b <= a for a, b in zip(self.deltas, self.deltas[1:])):
            raise ValueError("deltas must be strictly increasing")
        if len(self.traces) != len(self.deltas):
            raise ValueError("one trace per level required")

    @property
    def N(self) -> int:
        return len(self.deltas)

    def nodes(self) -> tuple[Node, ...]:
        return self.geometry.nodes(build_grid(self.coarse_n))

    def to_dict(self) -> dict:
        return {
            "geometry": self.geometry.to_dict(),
            "coarse_n": self.coarse_n,
            "fine_n": self.fine_n,
            "epsilon0": self.epsilon0,
            "seed": self.seed,
            "f_true": self.f_true,
            "noise_scale": "per_level",
            "deltas": list(self.deltas),
            "noise_levels": list(self.noise_levels),
            "traces": [t.tolist() for t in self.traces],
            "clean_traces": [t.tolist() for t in self.clean_traces],
        }

    def to_json(self) -> str:
        return json.dumps(self.to_dict(), indent=1)

    @classmethod
    def from_dict(cls, d: dict) -> "MeasurementSet":
        return cls(
            deltas=[float(x) for x in d["deltas"]],
            traces=[np.array(t, dtype=float) for t in d["traces"]],
            epsilon0=float(d["epsilon0"]),
            seed=int(d["seed"]),
            geometry=MeasurementGeometry.from_dict(d["geometry"]),
            coarse_n=int(d["coarse_n"]),
            fine_n=int(d["fine_n"]),
            noise_levels=[float(x) for x in d.get("noise_levels", [])],
            clean_traces=[np.array(t, dtype=float) for t in d.get("clean_traces", [])],
            f_true=d.get("f_true"),
        )

    @classmethod
    def from_json(cls, text: str) -> "MeasurementSet":
        return cls.from_dict(json.loads(text))


def noise_stream(seed: int, k: int) -> np.random.Generator:
    """Independent PCG64 stream for level ``k``; draws do not depend on other levels."""
    return np.random.Generator(np.random.PCG64(np.random.SeedSequence([int(seed), int(k)])))


def uniform_pm1(rng: np.random.Generator, size: int) -> np.ndarray:
    # -1 + 2 U with U uniform on [0, 1)
    return -1.0 + 2.0 * rng.random(size)


def synthesize(F_true: Nonlinearity, geometry: MeasurementGeometry, N: int, epsilon0: float,
               fine_n: int = 64, coarse_n: int = 32, seed: int = 0,
               settings: SolverSettings = DEFAULT_SETTINGS) -> MeasurementSet:
    """Solve on the fine grid for ``delta_k = k/N`` and sample noisy fluxes at coarse nodes."""
    if N < 1:
        raise ValueError("N must be >= 1")
    if not 0.0 <= epsilon0 < 1.0:
        raise ValueError(f"epsilon0 must lie in [0, 1), got {epsilon0}")
    if fine_n % coarse_n:
        raise ValueError(f"coarse_n={coarse_n} does not divide fine_n={fine_n}")
    fine, coarse = build_grid(fine_n), build_grid(coarse_n)
    ratio = fine_n // coarse_n
    fine_nodes = [(i * ratio, j * ratio) for i, j in geometry.nodes(coarse)]

    deltas, traces, clean, levels = [], [], [], []
    for k in range(1, N + 1):
        delta = k / N
        u = solve_semilinear(fine, F_true, delta, settings)
        exact = normal_derivative(u, fine_nodes).values
        eps_k = epsilon0 * float(np.max(np.abs(exact)))
        noisy = exact + eps_k * uniform_pm1(noise_stream(seed, k), exact.size)
        deltas.append(delta)
        traces.append(noisy)
        clean.append(exact)
        levels.append(eps_k)
    return MeasurementSet(deltas, traces, epsilon0, int(seed), geometry, coarse_n, fine_n,
                          levels, clean, F_true.name)


def d_delta(F: Nonlinearity, G: Nonlinearity, delta: float, grid: Grid2D,
            settings: SolverSettings = DEFAULT_SETTINGS) -> float:
    """Discrete L2 distance between ``F(u_{delta,F})`` and ``G(u_{delta,G})``."""
    uF = solve_semilinear(grid, F, delta, settings)
    uG = solve_semilinear(grid, G, delta, settings)
    return l2_norm(np.asarray(F(uF)) - np.asarray(G(uG)))
