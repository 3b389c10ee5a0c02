"""Fractional centered-difference discretization on a box with zero exterior.

A field is a flat ``numpy`` vector over the interior nodes of a
:class:`GridSpec` (C order in 2-D). Values outside the box are zero,
which is what makes truncating the stencil at the box exact.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from functools import cached_property

import numpy as np
from scipy import linalg


@dataclass(frozen=True)
class GridSpec:
    """Uniform grid with ``n`` interior points per axis.

    >>> GridSpec(dim=1, bounds=((0.0, 1.0),), n=3).h
    (0.25,)
    """

    dim: int
    bounds: tuple
    n: int

    def __post_init__(self):
        if self.dim not in (1, 2):
            raise ValueError(f"dim must be 1 or 2, got {self.dim}")
        bounds = tuple((float(a), float(b)) for a, b in self.bounds)
        if len(bounds) != self.dim:
            raise ValueError(f"need {self.dim} bound pairs, got {len(bounds)}")
        if any(b <= a for a, b in bounds):
            raise ValueError(f"empty interval in bounds {bounds}")
        if self.n < 3:
            raise ValueError(f"need n >= 3 interior points, got {self.n}")
        object.__setattr__(self, "bounds", bounds)

    @classmethod
    def interval(cls, a: float, b: float, n: int) -> "GridSpec":
        return cls(dim=1, bounds=((a, b),), n=n)

    @property
    def h(self) -> tuple:
        return tuple((b - a) / (self.n + 1) for a, b in self.bounds)

    @property
    def cell_volume(self) -> float:
        return float(np.prod(self.h))

    @property
    def shape(self) -> tuple:
        return (self.n,) * self.dim

    @property
    def size(self) -> int:
        return self.n**self.dim

    @property
    def measure(self) -> float:
        return float(np.prod([b - a for a, b in self.bounds]))

    def axes(self) -> list:
        return [a + hi * np.arange(1, self.n + 1) for (a, _), hi in zip(self.bounds, self.h)]

    def nodes(self) -> np.ndarray:
        """Interior node coordinates, shape ``(size,)`` in 1-D, ``(size, 2)`` in 2-D."""
        ax = self.axes()
        if self.dim == 1:
            return ax[0]
        X, Y = np.meshgrid(ax[0], ax[1], indexing="ij")
        return np.column_stack([X.ravel(), Y.ravel()])

    def to_dict(self) -> dict:
        return {"dim": self.dim, "bounds": [list(b) for b in self.bounds], "n": self.n}


def stencil_weights(s: float, K: int) -> np.ndarray:
    """Weights g_0..g_K of the fractional centered difference of order 2s.

    g_k = (-1)^k Gamma(2s+1) / (Gamma(s+k+1) Gamma(s-k+1)), generated by the
    ratio g_{k+1} = g_k (k - s)/(k + s + 1). At s = 1 the factor (k - s)
    vanishes at k = 1, so g_k = 0 exactly for k >= 2.
    """
    if not 0.5 < s <= 1.0:
        raise ValueError(f"order s must lie in (1/2, 1], got {s!r}")
    if K < 1:
        raise ValueError(f"cutoff K must be >= 1, got {K}")
    g = np.empty(K + 1)
    g[0] = math.gamma(2 * s + 1) / math.gamma(s + 1) ** 2
    for k in range(K):
        g[k + 1] = g[k] * (k - s) / (k + s + 1)
    return g + 0.0  # drop signed zeros


@dataclass(frozen=True, eq=False)
class FracOperator:
    """Dense symmetric matrix realizing (-Delta)^s with zero exterior data."""

    s: float
    grid: GridSpec
    matrix: np.ndarray = field(repr=False)
    weights: np.ndarray = field(repr=False)

    def apply(self, u: np.ndarray) -> np.ndarray:
        return self.matrix @ u

    def fast_apply(self, u: np.ndarray) -> np.ndarray:
        """Matrix-vector product through the Toeplitz structure (1-D only)."""
        if self.grid.dim != 1:
            return self.apply(u)
        col = self.weights * self.grid.h[0] ** (-2.0 * self.s)
        return linalg.matmul_toeplitz(col, u)

    def dirichlet_form(self, u: np.ndarray, v: np.ndarray | None = None) -> float:
        """Discrete <(-Delta)^(s/2) u, (-Delta)^(s/2) v>, i.e. (A u . v) h^dim."""
        v = u if v is None else v
        return float(self.apply(u) @ v) * self.grid.cell_volume

    @cached_property
    def min_eigenvalue(self) -> float:
        return float(linalg.eigvalsh(self.matrix, subset_by_index=[0, 0])[0])


def _axis_matrix(s: float, n: int, h: float) -> tuple[np.ndarray, np.ndarray]:
    g = stencil_weights(s, n - 1)
    return linalg.toeplitz(g) * h ** (-2.0 * s), g


def assemble_operator(grid: GridSpec, s: float) -> FracOperator:
    """Assemble the discrete fractional Laplacian of order ``s`` on ``grid``.

    In 2-D the operator is dimension-split, A_x (x) I + I (x) A_y, which at
    s = 1 is the 5-point Laplacian.
    """
    if not 0.5 < s <= 1.0:
        raise ValueError(f"order s must lie in (1/2, 1], got {s!r}")
    mats = [_axis_matrix(s, grid.n, h) for h in grid.h]
    g = mats[0][1]
    if grid.dim == 1:
        A = mats[0][0]
    else:
        eye = np.eye(grid.n)
        A = np.kron(mats[0][0], eye) + np.kron(eye, mats[1][0])
    A.setflags(write=False)
    return FracOperator(s=s, grid=grid, matrix=A, weights=g)


def norm_s_squared(op: FracOperator, V: np.ndarray, u: np.ndarray) -> float:
    """Squared energy norm: discrete Dirichlet form plus sum V u^2 h^dim."""
    u = np.asarray(u, dtype=float)
    V = np.broadcast_to(np.asarray(V, dtype=float), u.shape)
    if u.shape != (op.grid.size,):
        raise ValueError(f"field has shape {u.shape}, grid expects ({op.grid.size},)")
    return op.dirichlet_form(u) + float(np.sum(V * u * u)) * op.grid.cell_volume


def lebesgue_norm(grid: GridSpec, u: np.ndarray, nu: float) -> float:
    if nu < 1:
        raise ValueError(f"exponent must be >= 1, got {nu}")
    return float(np.sum(np.abs(u) ** nu) * grid.cell_volume) ** (1.0 / nu)


def operator_convergence_gap(grid: GridSpec, s: float, phi: np.ndarray) -> float:
    """Discrete L^2 distance between (-Delta)^s phi and -Delta phi."""
    diff = assemble_operator(grid, s).apply(phi) - assemble_operator(grid, 1.0).apply(phi)
    return lebesgue_norm(grid, diff, 2.0)
