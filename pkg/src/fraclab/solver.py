"""Ground states by descent on the Nehari manifold plus a Newton polish."""

from __future__ import annotations

import logging
from dataclasses import dataclass, field

import numpy as np
from scipy import linalg

from fraclab.discretization import GridSpec
from fraclab.exceptions import FracLabError, NonConvergence
from fraclab.nehari import EnergyContext, el_residual, energy, fiber_project, nehari_functional

log = logging.getLogger(__name__)


@dataclass(frozen=True)
class SolverConfig:
    tol_residual: float = 1e-8
    tol_nehari: float = 1e-10
    max_iters: int = 500
    shrink: float = 0.5
    armijo: float = 1e-4
    init: str = "bump"
    continuation: bool = True
    seed: int = 0
    newton_switch: float = 1e-2
    max_newton: int = 25

    def __post_init__(self):
        if not (self.tol_residual > 0 and self.tol_nehari > 0):
            raise ValueError("tolerances must be positive")
        if self.max_iters < 1:
            raise ValueError("max_iters must be >= 1")
        if not 0 < self.shrink < 1:
            raise ValueError("shrink must lie in (0, 1)")
        if self.init not in ("bump", "random"):
            raise ValueError(f"unknown init policy {self.init!r}")


@dataclass
class GroundState:
    s: float
    u: np.ndarray
    energy: float
    nehari_residual: float
    el_residual: float
    iterations: int
    converged: bool
    grid: GridSpec | None = None
    descent_iters: int = 0
    newton_iters: int = 0
    history: list = field(default_factory=list, repr=False)

    def diagnostics(self) -> dict:
        return {
            "s": self.s,
            "energy": self.energy,
            "nehari_residual": self.nehari_residual,
            "el_residual": self.el_residual,
            "iterations": self.iterations,
            "descent_iters": self.descent_iters,
            "newton_iters": self.newton_iters,
            "converged": self.converged,
        }


def initial_guess(ctx: EnergyContext, policy: str = "bump", seed: int = 0) -> np.ndarray:
    grid = ctx.grid
    if policy == "bump":
        prof = np.ones(grid.size)
        pts = grid.nodes().reshape(grid.size, grid.dim)
        for k, (a, b) in enumerate(grid.bounds):
            prof *= np.sin(np.pi * (pts[:, k] - a) / (b - a))
        return prof
    rng = np.random.default_rng(seed)
    # white noise smoothed by the inverse energy operator
    return ctx.riesz(rng.standard_normal(grid.size))


def _residuals(ctx, u):
    nsq = ctx.norm_sq(u)
    r = el_residual(ctx, u)
    rel = np.sqrt(float(r @ r) * ctx.hd / nsq)
    neh = abs(nehari_functional(ctx, u)) / nsq
    return rel, neh


def _sign_normalize(u):
    return -u if u[int(np.argmax(np.abs(u)))] < 0 else u


def _newton_polish(ctx, u, cfg):
    """Newton on A u + V u - f(u) = 0, reprojected onto the Nehari set."""
    rel, neh = _residuals(ctx, u)
    steps = 0
    for _ in range(cfg.max_newton):
        if rel <= cfg.tol_residual and neh <= cfg.tol_nehari:
            return u, rel, neh, steps, True
        jac = ctx.stiffness - np.diag(ctx.model.dfdu(ctx.x, u))
        try:
            du = linalg.solve(jac, -el_residual(ctx, u), assume_a="sym")
        except linalg.LinAlgError:
            break
        cand = u + du
        cand = fiber_project(ctx, cand, check_unique=False).t * cand
        steps += 1
        c_rel, c_neh = _residuals(ctx, cand)
        if not np.isfinite(c_rel) or c_rel > 10 * rel:
            break
        u, rel, neh = cand, c_rel, c_neh
    ok = rel <= cfg.tol_residual and neh <= cfg.tol_nehari
    return u, rel, neh, steps, ok


def solve_ground_state(
    ctx: EnergyContext,
    cfg: SolverConfig | None = None,
    init: np.ndarray | None = None,
    raise_on_failure: bool = False,
) -> GroundState:
    """Minimize J_s over the Nehari manifold.

    Projected gradient descent on the unit sphere of the energy norm for
    the reduced functional v -> J_s(m_s(v)); gradients are Riesz
    representatives in the energy inner product, steps are backtracked
    with an Armijo test. Once the tangent gradient is small the iterate
    is handed to Newton's method on the discrete Euler-Lagrange system.
    The returned field has a positive largest-magnitude entry.
    """
    cfg = cfg or SolverConfig()
    v = np.asarray(init if init is not None else initial_guess(ctx, cfg.init, cfg.seed), dtype=float)
    v = v / np.sqrt(ctx.norm_sq(v))
    fib = fiber_project(ctx, v)
    psi, t = fib.energy_at_t, fib.t
    history = [psi]
    alpha = 1.0
    switch = cfg.newton_switch
    descent = newton = 0
    converged = False
    u = t * v

    while descent + newton < cfg.max_iters:
        u = t * v
        gdir = t * ctx.riesz(el_residual(ctx, u))
        gtan = gdir - ctx.inner(gdir, v) * v
        gnorm2 = ctx.inner(gtan, gtan)

        if np.sqrt(gnorm2) <= switch * max(1.0, t):
            polished, rel, neh, steps, ok = _newton_polish(ctx, u, cfg)
            newton += steps
            if ok:
                u, converged = polished, True
                break
            switch *= 0.1

        alpha = min(2.0 * alpha, 4.0)
        while True:
            trial = v - alpha * gtan
            trial /= np.sqrt(ctx.norm_sq(trial))
            tfib = fiber_project(ctx, trial, check_unique=False)
            if tfib.energy_at_t <= psi - cfg.armijo * alpha * gnorm2:
                break
            alpha *= cfg.shrink
            if alpha < 1e-14:
                break
        descent += 1
        if alpha < 1e-14:
            # no decrease possible at machine precision; try Newton once more
            polished, rel, neh, steps, ok = _newton_polish(ctx, u, cfg)
            newton += steps
            if ok:
                u, converged = polished, True
            break
        v, psi, t = trial, tfib.energy_at_t, tfib.t
        history.append(psi)
        u = t * v

    u = _sign_normalize(u)
    rel, neh = _residuals(ctx, u)
    converged = converged and rel <= cfg.tol_residual and neh <= cfg.tol_nehari
    gs = GroundState(
        s=ctx.s,
        u=u,
        energy=energy(ctx, u),
        nehari_residual=neh,
        el_residual=rel,
        iterations=descent + newton,
        converged=converged,
        grid=ctx.grid,
        descent_iters=descent,
        newton_iters=newton,
        history=history,
    )
    log.debug("s=%.4g energy=%.12g iters=%d converged=%s", gs.s, gs.energy, gs.iterations, converged)
    if not converged and raise_on_failure:
        raise NonConvergence(f"ground state at s={ctx.s} did not converge", best=gs)
    return gs


def continuation_sweep_init(prev: GroundState, ctx: EnergyContext) -> np.ndarray:
    """Previous minimizer reprojected onto the Nehari manifold of ``ctx``."""
    if not prev.converged:
        raise FracLabError("warm start needs a converged ground state")
    return fiber_project(ctx, prev.u).t * prev.u
