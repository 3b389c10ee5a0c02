"""The s -> 1 experiment: sweep the order, compare with the local ground state."""

from __future__ import annotations

import csv
import json
import logging
import math
import os
import subprocess
import time
from concurrent.futures import ThreadPoolExecutor
from dataclasses import asdict, dataclass, field
from pathlib import Path

import numpy as np

from fraclab.discretization import GridSpec, assemble_operator, lebesgue_norm
from fraclab.exceptions import FracLabError, NonConvergence
from fraclab.model import Nonlinearity, Potential
from fraclab.nehari import EnergyContext, fiber_project
from fraclab.solver import GroundState, SolverConfig, continuation_sweep_init, solve_ground_state

log = logging.getLogger(__name__)


@dataclass
class SweepConfig:
    grid: GridSpec
    s_grid: tuple = (0.6, 0.7, 0.8, 0.9, 0.95, 0.99)
    potential: Potential = field(default_factory=Potential.constant)
    model: Nonlinearity = field(default_factory=Nonlinearity.power)
    solver: SolverConfig = field(default_factory=SolverConfig)
    include_local: bool = True
    nu_list: tuple = (2.0, 2.2, 2.5)
    N: int = 3
    allow_partial: bool = False

    def __post_init__(self):
        s_grid = tuple(float(s) for s in self.s_grid)
        if not s_grid:
            raise ValueError("s_grid is empty")
        if any(not 0.5 < s < 1.0 for s in s_grid):
            raise ValueError(f"s values must lie strictly inside (1/2, 1): {s_grid}")
        if any(b <= a for a, b in zip(s_grid, s_grid[1:])):
            raise ValueError("s_grid must be strictly ascending")
        nu_max = 2.0 * self.N / (self.N - 1.0)
        if any(not 2.0 <= nu < nu_max for nu in self.nu_list):
            raise ValueError(f"nu values must lie in [2, {nu_max:g})")
        self.s_grid = s_grid
        self.nu_list = tuple(float(nu) for nu in self.nu_list)

    def context(self, s: float) -> EnergyContext:
        return EnergyContext(assemble_operator(self.grid, s), self.potential, self.model)

    def to_dict(self) -> dict:
        return {
            "grid": self.grid.to_dict(),
            "s_grid": list(self.s_grid),
            "potential": {"kind": self.potential.kind, **self.potential.params},
            "model": {"kind": self.model.kind, "p": self.model.p, "terms": _terms_repr(self.model)},
            "solver": asdict(self.solver),
            "include_local": self.include_local,
            "nu_list": list(self.nu_list),
            "N": self.N,
            "allow_partial": self.allow_partial,
        }


def _terms_repr(model):
    return [[c if not callable(c) else "callable", q] for c, q in model.terms]


def nu_label(nu: float) -> str:
    return f"dist_L{nu:g}"


@dataclass
class SweepRow:
    s: float
    energy: float
    l2_norm: float
    s_norm: float
    dists: dict
    t_fiber: float
    upper_energy: float
    el_residual: float
    nehari_residual: float
    iterations: int
    converged: bool
    wall_time: float = 0.0

    @property
    def l2_dist(self) -> float:
        return self.dists[2.0]


@dataclass
class SweepResult:
    rows: list
    reference: SweepRow | None
    nu_list: tuple
    config: SweepConfig | None = None
    fields: dict = field(default_factory=dict, repr=False)

    @property
    def s_values(self) -> list:
        return [r.s for r in self.rows]

    def column(self, name: str) -> np.ndarray:
        return np.array([getattr(r, name) for r in self.rows], dtype=float)

    def dist(self, nu: float) -> np.ndarray:
        return np.array([r.dists[float(nu)] for r in self.rows])


def _make_row(cfg, ctx, gs, ref, wall):
    grid = cfg.grid
    nsq = ctx.norm_sq(gs.u)
    if ref is not None:
        dists = {nu: lebesgue_norm(grid, gs.u - ref.u, nu) for nu in cfg.nu_list}
        fib = fiber_project(ctx, ref.u)
        t_fib, upper = fib.t, fib.energy_at_t
    else:
        dists = {nu: math.nan for nu in cfg.nu_list}
        t_fib = upper = math.nan
    return SweepRow(
        s=gs.s,
        energy=gs.energy,
        l2_norm=lebesgue_norm(grid, gs.u, 2.0),
        s_norm=math.sqrt(nsq),
        dists=dists,
        t_fiber=t_fib,
        upper_energy=upper,
        el_residual=gs.el_residual,
        nehari_residual=gs.nehari_residual,
        iterations=gs.iterations,
        converged=gs.converged,
        wall_time=wall,
    )


def _thread_cap() -> int:
    try:
        return max(1, int(os.environ.get("FRAC_LAB_THREADS", "1")))
    except ValueError:
        return 1


def run_sweep(cfg: SweepConfig) -> SweepResult:
    """Solve for every s in the grid and compare against the s = 1 state.

    With ``cfg.solver.continuation`` the grid is walked in ascending order
    and each solve starts from the previous minimizer; otherwise rows are
    independent and may run on up to ``FRAC_LAB_THREADS`` threads.
    """
    ref = ref_row = None
    fields = {}
    if cfg.include_local:
        t0 = time.perf_counter()
        ctx1 = cfg.context(1.0)
        ref = solve_ground_state(ctx1, cfg.solver)
        if not ref.converged and not cfg.allow_partial:
            raise NonConvergence("local reference ground state did not converge", best=ref)
        ref_row = _make_row(cfg, ctx1, ref, ref, time.perf_counter() - t0)
        fields[1.0] = ref.u

    def solve_one(s, init=None):
        t0 = time.perf_counter()
        ctx = cfg.context(s)
        gs = solve_ground_state(ctx, cfg.solver, init=init if init is None else continuation_sweep_init(init, ctx))
        return ctx, gs, time.perf_counter() - t0

    solved = []
    if cfg.solver.continuation:
        prev = None
        for s in cfg.s_grid:
            ctx, gs, wall = solve_one(s, prev if prev is not None and prev.converged else None)
            solved.append((ctx, gs, wall))
            prev = gs
    else:
        with ThreadPoolExecutor(max_workers=_thread_cap()) as pool:
            solved = list(pool.map(solve_one, cfg.s_grid))

    rows = []
    for ctx, gs, wall in solved:
        if not gs.converged and not cfg.allow_partial:
            raise NonConvergence(f"ground state at s={gs.s} did not converge", best=gs)
        rows.append(_make_row(cfg, ctx, gs, ref, wall))
        fields[gs.s] = gs.u
    return SweepResult(rows=rows, reference=ref_row, nu_list=cfg.nu_list, config=cfg, fields=fields)


def uniform_bound_check(result: SweepResult) -> float:
    """M_hat = max over rows of ||u_s||_L2 + ||u_s||_s.

    Raises if the bound is not finite or the last quarter of the grid
    exceeds 1.1 times the overall maximum.
    """
    sums = np.array([r.l2_norm + r.s_norm for r in result.rows])
    m_hat = float(np.max(sums))
    if not np.isfinite(m_hat):
        raise FracLabError("uniform bound is not finite")
    tail = sums[-max(1, len(sums) // 4) :]
    if float(np.max(tail)) > 1.1 * m_hat:
        raise FracLabError("norms drift upward along the s grid")
    return m_hat


def lower_bound_check(result: SweepResult) -> float:
    """rho_hat = min over rows of ||u_s||_s."""
    return float(min(r.s_norm for r in result.rows))


def fiber_scaling_diagnostic(result: SweepResult) -> dict:
    """Fiber coefficient t_s of the projection of u_1 onto each Nehari set."""
    if result.reference is None:
        raise FracLabError("fiber diagnostic needs the s = 1 reference")
    out = {r.s: r.t_fiber for r in result.rows}
    out[1.0] = result.reference.t_fiber
    return out


def embedding_constant(
    ctx: EnergyContext, p: float, probes: int = 4, iters: int = 500, seed: int = 0, tol: float = 1e-14
) -> float:
    """Largest measured ratio ||u||_Lp / ||u||_s over probe fields.

    Each probe is driven by the nonlinear power iteration
    u <- (A_s + V)^-1 (|u|^(p-2) u), normalized in the energy norm, whose
    fixed points are the critical points of that ratio.
    """
    rng = np.random.default_rng(seed)
    grid = ctx.grid
    best = 0.0
    starts = [np.abs(rng.standard_normal(grid.size)) for _ in range(probes)]
    for u in starts:
        u = u / math.sqrt(ctx.norm_sq(u))
        prev = 0.0
        for _ in range(iters):
            u = ctx.riesz(np.abs(u) ** (p - 2.0) * u)
            u /= math.sqrt(ctx.norm_sq(u))
            ratio = lebesgue_norm(grid, u, p)
            if abs(ratio - prev) <= tol * ratio:
                break
            prev = ratio
        best = max(best, ratio)
    return best


def growth_constant(model: Nonlinearity, x, eps: float, u_max: float = 1e3, samples: int = 4001) -> float:
    """C_eps = sup (f(x,u) u - eps u^2)_+ / |u|^p over sampled (x, u)."""
    u = np.concatenate([-np.geomspace(1e-6, u_max, samples)[::-1], np.geomspace(1e-6, u_max, samples)])
    worst = 0.0
    for xi in np.atleast_1d(x) if np.ndim(x) == 1 else x:
        xv = np.broadcast_to(xi, (u.size,) + np.shape(xi))
        val = (model.f(xv, u) * u - eps * u * u) / np.abs(u) ** model.p
        worst = max(worst, float(np.max(val)))
    return worst


def analytic_floor(result: SweepResult, eps: float | None = None, **embed_kw) -> float:
    """s-uniform lower bound for ||u_s||_s from the Nehari identity.

    ||u||_s^2 <= eps ||u||_2^2 + C_eps ||u||_p^p together with
    ||u||_2^2 <= ||u||_s^2 / inf V and ||u||_p <= K_p ||u||_s gives
    ||u||_s^(p-2) >= (1 - eps/inf V) / (C_eps K_p^p). ``eps`` defaults to
    half of inf V; eps = 0 is admissible for pure power models.
    """
    cfg = result.config
    v_min = cfg.potential.v_min
    eps = 0.5 * v_min if eps is None else eps
    p = cfg.model.p
    x = cfg.grid.nodes()
    c_eps = growth_constant(cfg.model, x, eps)
    floors = []
    for row in result.rows:
        K = embedding_constant(cfg.context(row.s), p, **embed_kw)
        floors.append(((1.0 - eps / v_min) / (c_eps * K**p)) ** (1.0 / (p - 2.0)))
    return float(min(floors))


ROW_FIELDS = ("s", "energy", "l2_norm", "s_norm", "t_fiber", "upper_energy", "el_residual", "nehari_residual", "iterations", "converged")


def _fmt(v) -> str:
    if isinstance(v, (bool, np.bool_)):
        return "1" if v else "0"
    if isinstance(v, (int, np.integer)):
        return str(int(v))
    return repr(float(v))


def _version_string() -> str:
    from fraclab import __version__

    try:
        out = subprocess.run(
            ["git", "describe", "--always", "--dirty"],
            cwd=Path(__file__).resolve().parent,
            capture_output=True,
            text=True,
            timeout=5,
        )
        if out.returncode == 0 and out.stdout.strip():
            return f"{__version__}+{out.stdout.strip()}"
    except (OSError, subprocess.SubprocessError):
        pass
    return __version__


def write_sweep_csv(result: SweepResult, path) -> None:
    header = ["reference"] + list(ROW_FIELDS) + [nu_label(nu) for nu in result.nu_list]
    rows = [(0, r) for r in result.rows]
    if result.reference is not None:
        rows.append((1, result.reference))
    with open(path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(header)
        for is_ref, r in rows:
            w.writerow([str(is_ref)] + [_fmt(getattr(r, k)) for k in ROW_FIELDS] + [_fmt(r.dists[nu]) for nu in result.nu_list])


def read_sweep_csv(path) -> SweepResult:
    with open(path, newline="") as fh:
        reader = csv.DictReader(fh)
        dist_cols = [c for c in reader.fieldnames if c.startswith("dist_L")]
        nus = tuple(float(c[len("dist_L") :]) for c in dist_cols)
        rows, ref = [], None
        for rec in reader:
            row = SweepRow(
                s=float(rec["s"]),
                energy=float(rec["energy"]),
                l2_norm=float(rec["l2_norm"]),
                s_norm=float(rec["s_norm"]),
                dists={nu: float(rec[c]) for nu, c in zip(nus, dist_cols)},
                t_fiber=float(rec["t_fiber"]),
                upper_energy=float(rec["upper_energy"]),
                el_residual=float(rec["el_residual"]),
                nehari_residual=float(rec["nehari_residual"]),
                iterations=int(rec["iterations"]),
                converged=rec["converged"] == "1",
            )
            if rec["reference"] == "1":
                ref = row
            else:
                rows.append(row)
    return SweepResult(rows=rows, reference=ref, nu_list=nus)


def empirical_rates(result: SweepResult) -> dict:
    """Least-squares slopes of log|c_s - c| and log||u_s - u_1||_2 against log(1 - s).

    Reported only. No rate is claimed for either quantity.
    """
    if result.reference is None or len(result.rows) < 2:
        return {}
    x = np.log1p(-np.asarray(result.s_values))
    c = result.reference.energy
    out = {}
    for name, y in (("energy_gap", np.abs(result.column("energy") - c)), ("dist_L2", result.dist(2.0))):
        keep = y > 0
        if keep.sum() >= 2:
            out[name] = float(np.polyfit(x[keep], np.log(y[keep]), 1)[0])
    return out


def emit_report(result: SweepResult, out_dir, extra_meta: dict | None = None) -> dict:
    """Write ``sweep.csv``, ``plotdata.csv`` and ``meta.json`` into ``out_dir``.

    Wall-clock times go to ``meta.json`` only, so the CSV files are
    byte-identical across reruns of the same configuration.
    """
    out = Path(out_dir)
    try:
        out.mkdir(parents=True, exist_ok=True)
        paths = {"sweep": out / "sweep.csv", "plotdata": out / "plotdata.csv", "meta": out / "meta.json"}
        write_sweep_csv(result, paths["sweep"])
        with open(paths["plotdata"], "w", newline="") as fh:
            w = csv.writer(fh, lineterminator="\n")
            w.writerow(["s", "energy", "dist_L2"])
            for r in result.rows:
                w.writerow([_fmt(r.s), _fmt(r.energy), _fmt(r.dists.get(2.0, math.nan))])
            if result.reference is not None:
                w.writerow([_fmt(1.0), _fmt(result.reference.energy), _fmt(0.0)])
        meta = {
            "version": _version_string(),
            "config": result.config.to_dict() if result.config is not None else None,
            "seed": result.config.solver.seed if result.config is not None else None,
            "tolerances": {
                "tol_residual": result.config.solver.tol_residual,
                "tol_nehari": result.config.solver.tol_nehari,
            }
            if result.config is not None
            else None,
            "wall_time": {str(r.s): r.wall_time for r in result.rows},
            "all_converged": all(r.converged for r in result.rows),
            "empirical_rates": empirical_rates(result),
        }
        if result.reference is not None:
            meta["wall_time"]["1.0"] = result.reference.wall_time
        meta.update(extra_meta or {})
        with open(paths["meta"], "w") as fh:
            json.dump(meta, fh, indent=2, sort_keys=True)
    except OSError as exc:
        raise OSError(f"failed to write report under {out}: {exc}") from exc
    return paths
