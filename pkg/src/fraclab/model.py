"""Potentials, nonlinearities and sampled checks of their hypotheses."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from fraclab.discretization import GridSpec


@dataclass(frozen=True)
class Potential:
    func: Callable = field(repr=False)
    v_min: float
    v_max: float
    kind: str = "custom"
    params: dict = field(default_factory=dict)

    def __post_init__(self):
        if not self.v_min > 0:
            raise ValueError(f"potential must satisfy inf V > 0, got v_min={self.v_min}")
        if not np.isfinite(self.v_max):
            raise ValueError("potential must be bounded")

    @classmethod
    def constant(cls, value: float = 1.0) -> "Potential":
        value = float(value)
        return cls(
            func=lambda x: np.full(np.shape(x)[:1], value),
            v_min=value,
            v_max=value,
            kind="constant",
            params={"value": value},
        )

    def __call__(self, x):
        return np.asarray(self.func(x), dtype=float)

    def values(self, grid: GridSpec) -> np.ndarray:
        return self(grid.nodes())


def _coef(lam, x):
    if callable(lam):
        return np.asarray(lam(x), dtype=float)
    return float(lam)


@dataclass(frozen=True)
class Nonlinearity:
    """f(x, u), its primitive F and u-derivative, with growth exponent p.

    Power terms are stored as ``(coefficient, exponent)`` pairs giving
    f = sum c |u|^(q-2) u; ``custom`` models supply their own callables.
    """

    kind: str
    p: float
    terms: tuple = ()
    f_custom: Callable | None = field(default=None, repr=False)
    F_custom: Callable | None = field(default=None, repr=False)
    df_custom: Callable | None = field(default=None, repr=False)

    @classmethod
    def power(cls, p: float = 4.0, lam=1.0) -> "Nonlinearity":
        return cls(kind="power", p=float(p), terms=((lam, float(p)),))

    @classmethod
    def power_sum(cls, terms) -> "Nonlinearity":
        terms = tuple((c, float(q)) for c, q in terms)
        return cls(kind="power_sum", p=max(q for _, q in terms), terms=terms)

    @classmethod
    def custom(cls, f, F, p, df=None) -> "Nonlinearity":
        return cls(kind="custom", p=float(p), f_custom=f, F_custom=F, df_custom=df)

    @property
    def lam(self):
        return self.terms[0][0] if self.kind == "power" else None

    def f(self, x, u):
        u = np.asarray(u, dtype=float)
        if self.f_custom is not None:
            return np.asarray(self.f_custom(x, u), dtype=float)
        a = np.abs(u)
        return sum(_coef(c, x) * a ** (q - 2.0) * u for c, q in self.terms)

    def F(self, x, u):
        u = np.asarray(u, dtype=float)
        if self.F_custom is not None:
            return np.asarray(self.F_custom(x, u), dtype=float)
        a = np.abs(u)
        return sum(_coef(c, x) * a**q / q for c, q in self.terms)

    def dfdu(self, x, u):
        u = np.asarray(u, dtype=float)
        if self.kind == "custom":
            if self.df_custom is not None:
                return np.asarray(self.df_custom(x, u), dtype=float)
            step = 1e-6 * np.maximum(1.0, np.abs(u))
            return (self.f(x, u + step) - self.f(x, u - step)) / (2 * step)
        a = np.abs(u)
        return sum(_coef(c, x) * (q - 1.0) * a ** (q - 2.0) for c, q in self.terms)


def F_integral(grid: GridSpec, u: np.ndarray, model: Nonlinearity, x=None) -> float:
    """Nodal quadrature of F(x, u) over the box."""
    x = grid.nodes() if x is None else x
    return float(np.sum(model.F(x, u))) * grid.cell_volume


def exponent_window(dim: int) -> tuple[float, float]:
    """Open window (2, 2d/(d-1)) for p; unbounded above in one dimension."""
    return 2.0, math.inf if dim == 1 else 2.0 * dim / (dim - 1.0)


@dataclass
class CheckResult:
    name: str
    passed: bool
    detail: str = ""
    witnesses: list = field(default_factory=list)
    value: float | None = None

    def to_dict(self) -> dict:
        return {
            "name": self.name,
            "passed": self.passed,
            "detail": self.detail,
            "witnesses": self.witnesses,
            "value": self.value,
        }


@dataclass
class AssumptionReport:
    checks: dict
    samples: int
    seed: int

    @property
    def passed(self) -> bool:
        return all(c.passed for c in self.checks.values())

    def __getitem__(self, name) -> CheckResult:
        return self.checks[name]

    def to_dict(self) -> dict:
        return {
            "passed": self.passed,
            "samples": self.samples,
            "seed": self.seed,
            "checks": {k: c.to_dict() for k, c in self.checks.items()},
        }


def _sample_points(bounds, count, rng):
    lo = np.array([a for a, _ in bounds])
    hi = np.array([b for _, b in bounds])
    pts = lo + (hi - lo) * rng.random((count, len(bounds)))
    return pts[:, 0] if len(bounds) == 1 else pts


def _witness(x, u, **extra):
    x = np.atleast_1d(x).tolist()
    return {"x": x if len(x) > 1 else x[0], "u": float(u), **extra}


def check_assumptions(
    model: Nonlinearity,
    potential: Potential,
    bounds,
    samples: int = 10_000,
    u_range: float = 10.0,
    seed: int = 0,
    f3_bound: float = 1e6,
    dyadic_levels: int = 40,
) -> AssumptionReport:
    """Falsification checks of (V), (F1)-(F4) and f u >= 2F on sampled (x, u).

    (F4) is tested in the form "f(x,u)/|u| strictly increasing on each
    half-line", which odd nonlinearities such as |u|^(p-2) u satisfy.

    The asymptotic hypotheses (F2), (F3) are probed along dyadic sequences
    u = 2^-k and u = u_range 2^k. Nothing here proves anything; a failed
    check carries at least one witness.
    """
    if samples < 100:
        raise ValueError("need at least 100 samples")
    bounds = tuple((float(a), float(b)) for a, b in bounds)
    dim = len(bounds)
    rng = np.random.default_rng(seed)
    n_x = max(4, int(round(math.sqrt(samples) / 2)))
    n_u = max(2, samples // (2 * n_x))
    xs = _sample_points(bounds, n_x, rng)
    u_pos = np.sort(u_range * rng.random(n_u))
    u_pos = u_pos[u_pos > 0]
    u_grid = np.concatenate([-u_pos[::-1], u_pos])
    checks = {}

    # (V)
    vals = potential(xs)
    bad = np.flatnonzero(~np.isfinite(vals) | (vals <= 0))
    checks["V"] = CheckResult(
        "V",
        bad.size == 0 and potential.v_min > 0,
        f"sampled min V = {float(np.min(vals)):.6g}",
        [_witness(xs[i], 0.0, V=float(vals[i])) for i in bad[:5]],
        float(np.min(vals)),
    )

    # (F1) growth with fitted constant and exponent window
    lo, hi = exponent_window(dim)
    worst_C, worst = 0.0, None
    finite = True
    for x in xs:
        xv = np.broadcast_to(x, (u_grid.size,) + np.shape(x))
        fv = model.f(xv, u_grid)
        if not np.all(np.isfinite(fv)):
            finite = False
        ratio = np.abs(fv) / (1.0 + np.abs(u_grid) ** (model.p - 1.0))
        j = int(np.argmax(ratio))
        if ratio[j] > worst_C:
            worst_C, worst = float(ratio[j]), (x, u_grid[j])
    in_window = lo < model.p < hi
    wit = [] if in_window and finite else [_witness(worst[0], worst[1], p=model.p)]
    checks["F1"] = CheckResult(
        "F1",
        in_window and finite,
        f"fitted growth constant C = {worst_C:.6g}; p = {model.p} in ({lo}, {hi})",
        wit,
        worst_C,
    )

    # (F2) f(x,u)/u -> 0 along u = +-2^-k
    tiny = 2.0 ** -np.arange(1, dyadic_levels + 1)
    f2_ok, f2_wit, f2_last = True, [], 0.0
    for x in xs:
        for sign in (1.0, -1.0):
            u = sign * tiny
            xv = np.broadcast_to(x, (u.size,) + np.shape(x))
            q = np.abs(model.f(xv, u) / u)
            f2_last = max(f2_last, float(q[-1]))
            if not q[-1] < 1e-6 * max(1.0, float(q[0])):
                f2_ok = False
                f2_wit.append(_witness(x, u[-1], ratio=float(q[-1])))
    checks["F2"] = CheckResult("F2", f2_ok, f"max |f/u| at u=2^-{dyadic_levels}: {f2_last:.3g}", f2_wit[:5], f2_last)

    # (F3) F/u^2 increasing and unbounded along u = +-u_range 2^k
    big = u_range * 2.0 ** np.arange(0, 31)
    f3_ok, f3_wit, f3_min = True, [], math.inf
    for x in xs:
        for sign in (1.0, -1.0):
            u = sign * big
            xv = np.broadcast_to(x, (u.size,) + np.shape(x))
            q = model.F(xv, u) / u**2
            f3_min = min(f3_min, float(q[-1]))
            steps = np.diff(q)
            if np.any(steps <= 0) or not q[-1] > f3_bound:
                f3_ok = False
                k = int(np.argmin(steps)) if np.any(steps <= 0) else len(u) - 1
                f3_wit.append(_witness(x, u[k], ratio=float(q[k])))
    checks["F3"] = CheckResult("F3", f3_ok, f"min F/u^2 at |u|={big[-1]:.3g}: {f3_min:.3g}", f3_wit[:5], f3_min)

    # (F4) u -> f(x,u)/|u| strictly increasing on each half-line
    f4_ok, f4_wit = True, []
    for x in xs:
        for u in (u_pos, -u_pos[::-1]):
            xv = np.broadcast_to(x, (u.size,) + np.shape(x))
            q = model.f(xv, u) / np.abs(u)
            bad = np.flatnonzero(np.diff(q) <= 0)
            if bad.size:
                f4_ok = False
                j = int(bad[0])
                f4_wit.append(_witness(x, u[j], next_u=float(u[j + 1]), ratio=float(q[j])))
    checks["F4"] = CheckResult("F4", f4_ok, "f(x,u)/|u| strictly increasing on sampled half-lines", f4_wit[:5])

    # consequence f u - 2F >= 0
    ar_min, ar_wit = math.inf, []
    for x in xs:
        xv = np.broadcast_to(x, (u_grid.size,) + np.shape(x))
        gap = model.f(xv, u_grid) * u_grid - 2.0 * model.F(xv, u_grid)
        scale = 1e-12 * (1.0 + np.abs(model.F(xv, u_grid)))
        bad = np.flatnonzero(gap < -scale)
        ar_min = min(ar_min, float(np.min(gap)))
        ar_wit.extend(_witness(x, u_grid[j], gap=float(gap[j])) for j in bad[:2])
    checks["AR"] = CheckResult("AR", not ar_wit, f"min f u - 2F = {ar_min:.3g}", ar_wit[:5], ar_min)

    checks["F1"].detail += "; Caratheodory measurability assumed"
    return AssumptionReport(checks=checks, samples=int(n_x * u_grid.size), seed=seed)
