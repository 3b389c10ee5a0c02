"""Energy functional, fiber maps and the Nehari projection."""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import linalg

from fraclab.discretization import FracOperator, GridSpec
from fraclab.exceptions import FracLabError, NoBracket, NonConvergence
from fraclab.model import Nonlinearity, Potential


@dataclass(frozen=True, eq=False)
class EnergyContext:
    operator: FracOperator
    potential: Potential
    model: Nonlinearity

    @property
    def grid(self) -> GridSpec:
        return self.operator.grid

    @property
    def s(self) -> float:
        return self.operator.s

    @property
    def hd(self) -> float:
        return self.operator.grid.cell_volume

    @cached_property
    def x(self) -> np.ndarray:
        return self.grid.nodes()

    @cached_property
    def V(self) -> np.ndarray:
        return self.potential.values(self.grid)

    @cached_property
    def stiffness(self) -> np.ndarray:
        """A_s + diag(V); the Gram matrix of the energy norm up to h^dim."""
        M = np.array(self.operator.matrix)
        M[np.diag_indices_from(M)] += self.V
        return M

    @cached_property
    def cholesky(self):
        return linalg.cho_factor(self.stiffness)

    def riesz(self, g: np.ndarray) -> np.ndarray:
        """Solve (A_s + V) z = g."""
        return linalg.cho_solve(self.cholesky, g)

    def f(self, u):
        return self.model.f(self.x, u)

    def norm_sq(self, u: np.ndarray) -> float:
        return float(u @ (self.stiffness @ u)) * self.hd

    def inner(self, u: np.ndarray, v: np.ndarray) -> float:
        return float(u @ (self.stiffness @ v)) * self.hd


def energy(ctx: EnergyContext, u: np.ndarray) -> float:
    """J_s(u) = 1/2 ||u||_s^2 - sum F(x, u) h^dim."""
    return 0.5 * ctx.norm_sq(u) - float(np.sum(ctx.model.F(ctx.x, u))) * ctx.hd


def el_residual(ctx: EnergyContext, u: np.ndarray) -> np.ndarray:
    """Nodal Euler-Lagrange residual A_s u + V u - f(x, u)."""
    return ctx.stiffness @ u - ctx.f(u)


def gradient(ctx: EnergyContext, u: np.ndarray) -> np.ndarray:
    """Vector G with energy_derivative(ctx, u, v) == G @ v."""
    return el_residual(ctx, u) * ctx.hd


def energy_derivative(ctx: EnergyContext, u: np.ndarray, v: np.ndarray) -> float:
    return float(gradient(ctx, u) @ v)


def nehari_functional(ctx: EnergyContext, u: np.ndarray) -> float:
    """J_s'(u)(u) = ||u||_s^2 - sum f(x,u) u h^dim."""
    return energy_derivative(ctx, u, u)


@dataclass(frozen=True)
class FiberSolution:
    t: float
    energy_at_t: float
    newton_iters: int
    residual: float


def _fiber_derivs(ctx, u, a):
    x, hd, model = ctx.x, ctx.hd, ctx.model

    def d1(t):
        return t * a - float(np.sum(model.f(x, t * u) * u)) * hd

    def d2(t):
        return a - float(np.sum(model.dfdu(x, t * u) * u * u)) * hd

    return d1, d2


def fiber_project(
    ctx: EnergyContext,
    u: np.ndarray,
    tol: float = 1e-12,
    t_max: float = 1e6,
    max_iter: int = 200,
    check_unique: bool = True,
) -> FiberSolution:
    """Find the unique t > 0 with t u on the Nehari manifold.

    Newton's method on phi'(t) = d/dt J_s(t u), safeguarded by a bracket
    obtained by doubling/halving from t = 1. Raises :class:`NoBracket` if
    phi' stays positive up to ``t_max``.
    """
    u = np.asarray(u, dtype=float)
    a = ctx.norm_sq(u)
    if not a > 0:
        raise ValueError("cannot project the zero field")
    d1, d2 = _fiber_derivs(ctx, u, a)

    lo, hi = 1.0, 1.0
    if d1(1.0) > 0:
        while d1(hi) > 0:
            lo = hi
            hi *= 2.0
            if hi > t_max:
                raise NoBracket(f"fiber derivative still positive at t={t_max:g}")
    else:
        while d1(lo) <= 0:
            hi = lo
            lo *= 0.5
            if lo < 1e-150:
                raise NoBracket("fiber derivative not positive near t=0")

    if check_unique:
        ts = np.geomspace(lo * 1e-6, hi * 1e3, 96)
        signs = np.sign([d1(t) for t in ts])
        signs = signs[signs != 0]
        changes = int(np.count_nonzero(np.diff(signs)))
        if changes != 1:
            raise FracLabError(f"fiber derivative changes sign {changes} times; expected exactly one")

    t = 0.5 * (lo + hi)
    for it in range(1, max_iter + 1):
        g = d1(t)
        if abs(g) <= tol * t * a:
            return FiberSolution(t, energy(ctx, t * u), it, g / (t * a))
        if g > 0:
            lo = t
        else:
            hi = t
        dg = d2(t)
        step = t - g / dg if dg != 0 else np.nan
        t = step if lo < step < hi else 0.5 * (lo + hi)
        if hi - lo <= 4 * np.finfo(float).eps * hi:
            g = d1(t)
            return FiberSolution(t, energy(ctx, t * u), it, g / (t * a))
    raise NonConvergence(f"fiber Newton did not converge in {max_iter} iterations")


def nehari_projection(ctx: EnergyContext, u: np.ndarray, **kw) -> np.ndarray:
    return fiber_project(ctx, u, **kw).t * np.asarray(u, dtype=float)


def nehari_energy(ctx: EnergyContext, v: np.ndarray, **kw) -> float:
    """J_s(m_s(v)), the fiber maximum along the ray through v."""
    return fiber_project(ctx, v, **kw).energy_at_t
