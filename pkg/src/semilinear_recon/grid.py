"""Uniform node lattice on the unit square, discrete norms and boundary traces.

Scalar fields are plain ``numpy`` arrays of shape ``(n + 1, n + 1)`` indexed
``[i, j]`` with node ``(i, j)`` located at ``(x, y) = (i h, j h)``.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence

import numpy as np

Node = tuple[int, int]


@dataclass(frozen=True)
class Grid2D:
    """Uniform ``(n+1) x (n+1)`` lattice over ``[0, 1]^2``; ``n`` is authoritative."""

    n: int

    @property
    def h(self) -> float:
        return 1.0 / self.n

    @property
    def shape(self) -> tuple[int, int]:
        return (self.n + 1, self.n + 1)

    @property
    def coords(self) -> np.ndarray:
        return np.arange(self.n + 1) / self.n

    def mesh(self) -> tuple[np.ndarray, np.ndarray]:
        """Return ``(X, Y)`` arrays of node coordinates, ``[i, j]`` indexing."""
        c = self.coords
        return np.meshgrid(c, c, indexing="ij")

    def zeros(self) -> np.ndarray:
        return np.zeros(self.shape)

    def is_boundary(self, node: Node) -> bool:
        i, j = node
        if not (0 <= i <= self.n and 0 <= j <= self.n):
            return False
        return i in (0, self.n) or j in (0, self.n)

    def is_corner(self, node: Node) -> bool:
        return node[0] in (0, self.n) and node[1] in (0, self.n)


@dataclass(frozen=True)
class BoundaryTrace:
    """Values attached to an ordered list of boundary nodes."""

    nodes: tuple[Node, ...]
    values: np.ndarray

    def __post_init__(self):
        if len(self.nodes) != len(self.values):
            raise ValueError("nodes and values differ in length")


def build_grid(n: int) -> Grid2D:
    if int(n) != n or n < 8 or n % 2:
        raise ValueError(f"grid needs an even n >= 8, got {n!r}")
    return Grid2D(int(n))


def dirichlet_g(grid: Grid2D, delta: float) -> np.ndarray:
    """Field holding ``delta * y`` on boundary nodes and zero inside."""
    if not 0.0 <= delta <= 1.0:
        raise ValueError(f"delta must lie in [0, 1], got {delta}")
    g = grid.zeros()
    y = delta * grid.coords
    g[0, :] = y
    g[-1, :] = y
    g[:, 0] = 0.0
    g[:, -1] = delta
    return g


def harmonic_lift(grid: Grid2D, delta: float) -> np.ndarray:
    """``delta * y`` at every node; discretely harmonic and matching ``dirichlet_g``."""
    return np.broadcast_to(delta * grid.coords, grid.shape).copy()


def boundary_mask(grid: Grid2D) -> np.ndarray:
    m = np.zeros(grid.shape, dtype=bool)
    m[0, :] = m[-1, :] = m[:, 0] = m[:, -1] = True
    return m


def l2_norm(f: np.ndarray) -> float:
    """Nodal quadrature ``sqrt(h^2 * sum f^2)`` over every node, boundary included."""
    f = np.asarray(f, dtype=float)
    h = 1.0 / (f.shape[0] - 1)
    return float(np.sqrt(h * h * np.sum(f * f)))


def normal_derivative(u: np.ndarray, nodes: Sequence[Node]) -> BoundaryTrace:
    """Outward normal derivative by the one-sided second-order 3-point stencil.

    Corner nodes are rejected since the outward normal is not defined there.
    """
    n = u.shape[0] - 1
    if n < 2:
        raise ValueError("need at least two interior layers")
    h = 1.0 / n
    nodes = tuple((int(i), int(j)) for i, j in nodes)
    vals = np.empty(len(nodes))
    for k, (i, j) in enumerate(nodes):
        if not (0 <= i <= n and 0 <= j <= n) or not (i in (0, n) or j in (0, n)):
            raise ValueError(f"node {(i, j)} is not on the boundary")
        if i in (0, n) and j in (0, n):
            raise ValueError(f"node {(i, j)} is a corner; normal undefined")
        if i == n:
            vals[k] = 3 * u[n, j] - 4 * u[n - 1, j] + u[n - 2, j]
        elif i == 0:
            vals[k] = 3 * u[0, j] - 4 * u[1, j] + u[2, j]
        elif j == n:
            vals[k] = 3 * u[i, n] - 4 * u[i, n - 1] + u[i, n - 2]
        else:
            vals[k] = 3 * u[i, 0] - 4 * u[i, 1] + u[i, 2]
    return BoundaryTrace(nodes, vals / (2 * h))


def lift_normal_derivative(grid: Grid2D, delta: float, nodes: Sequence[Node]) -> BoundaryTrace:
    """Exact outward normal derivative of ``delta * y``: ``+-delta`` on top/bottom, 0 on the sides.

    The 3-point stencil is exact for linear functions, so this equals
    ``normal_derivative(harmonic_lift(grid, delta), nodes)`` without the rounding.
    """
    tr = normal_derivative(grid.zeros(), nodes)
    vals = np.array([0.0 if i in (0, grid.n) else (delta if j == grid.n else -delta)
                     for i, j in tr.nodes])
    return BoundaryTrace(tr.nodes, vals)


def right_edge_nodes(grid: Grid2D) -> tuple[Node, ...]:
    """Nodes of ``x = 1`` with ``0 < y < 1`` (corners excluded)."""
    return tuple((grid.n, j) for j in range(1, grid.n))
