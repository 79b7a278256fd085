"""Uniform radial meshes on [0, R] with the r^(N-1) dr volume weight.

All integrals in this package omit the angular surface factor |S^(N-1)|;
every identity checked downstream is homogeneous in that constant.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np


@dataclass(frozen=True)
class RadialGrid:
    """Uniform half-line mesh r_j = j*h, j = 0..M, with h = radius/M."""

    dim: int
    radius: float
    nodes: int

    def __post_init__(self):
        if int(self.dim) != self.dim or self.dim < 1:
            raise ValueError(f"spatial dimension must be an integer >= 1, got {self.dim}")
        if not np.isfinite(self.radius) or self.radius <= 0:
            raise ValueError(f"truncation radius must be positive, got {self.radius}")
        if int(self.nodes) != self.nodes or self.nodes < 17:
            raise ValueError(f"need at least 17 nodes, got {self.nodes}")

    @property
    def h(self) -> float:
        return self.radius / (self.nodes - 1)

    @cached_property
    def r(self) -> np.ndarray:
        return np.linspace(0.0, self.radius, self.nodes)

    @cached_property
    def weights(self) -> np.ndarray:
        """Composite-trapezoid weights times r^(N-1)."""
        w = np.full(self.nodes, self.h)
        w[0] = 0.5 * self.h
        w[-1] = 0.5 * self.h
        return w * self.r ** (self.dim - 1)

    def function(self, values) -> "GridFunction":
        return GridFunction(self, values)


@dataclass(frozen=True)
class GridFunction:
    """Real samples v(r_j) attached to their grid."""

    grid: RadialGrid
    values: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.values, dtype=float)
        if v.shape != (self.grid.nodes,):
            raise ValueError(
                f"values have shape {v.shape}, expected ({self.grid.nodes},)"
            )
        if not np.all(np.isfinite(v)):
            raise ValueError("grid function values must be finite")
        object.__setattr__(self, "values", v)


def make_grid(dim: int, radius: float, nodes: int) -> RadialGrid:
    """Uniform mesh with the stated node count; h = radius/(nodes-1)."""
    return RadialGrid(dim, float(radius), nodes)


def quad_weighted(f: GridFunction) -> float:
    """Trapezoid approximation of the weighted integral of f over [0, R]."""
    return float(f.grid.weights @ f.values)


def quad_values(grid: RadialGrid, values: np.ndarray) -> float:
    """quad_weighted on a bare array (internal fast path)."""
    return float(grid.weights @ values)


def weighted_dot(grid: RadialGrid, a: np.ndarray, b: np.ndarray) -> float:
    return float(grid.weights @ (a * b))


def weighted_norm(grid: RadialGrid, a: np.ndarray) -> float:
    return float(np.sqrt(max(grid.weights @ (a * a), 0.0)))


def fd_derivative(f: GridFunction) -> GridFunction:
    """Second-order finite differences: centered inside, one-sided at the ends."""
    if f.grid.nodes < 3:
        raise ValueError("derivative stencil needs at least 3 nodes")
    v = f.values
    h = f.grid.h
    d = np.empty_like(v)
    d[1:-1] = (v[2:] - v[:-2]) / (2.0 * h)
    d[0] = (-3.0 * v[0] + 4.0 * v[1] - v[2]) / (2.0 * h)
    d[-1] = (3.0 * v[-1] - 4.0 * v[-2] + v[-3]) / (2.0 * h)
    return GridFunction(f.grid, d)


def coarsen(grid: RadialGrid, factor: int = 2) -> RadialGrid:
    """Same box, every factor-th node. Requires the cell count to divide."""
    cells = grid.nodes - 1
    if cells % factor != 0:
        raise ValueError(f"cannot coarsen {grid.nodes} nodes by factor {factor}")
    return RadialGrid(grid.dim, grid.radius, cells // factor + 1)


def extend(grid: RadialGrid, factor: int = 2) -> RadialGrid:
    """Same mesh width, box enlarged to factor*R."""
    return RadialGrid(grid.dim, grid.radius * factor, (grid.nodes - 1) * factor + 1)
