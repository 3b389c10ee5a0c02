"""JSON experiment configuration: schema, defaults and range checks."""

from __future__ import annotations

import hashlib
import json
from dataclasses import dataclass, fields

import jsonschema

from fraclab.discretization import GridSpec
from fraclab.exceptions import FracLabError
from fraclab.model import Nonlinearity, Potential, exponent_window
from fraclab.solver import SolverConfig
from fraclab.transition import SweepConfig


class ConfigError(FracLabError, ValueError):
    def __init__(self, path: str, message: str):
        super().__init__(f"{path or '<root>'}: {message}")
        self.path = path


class SchemaError(ConfigError):
    pass


class RangeError(ConfigError):
    pass


_NUM = {"type": "number"}

SCHEMA = {
    "type": "object",
    "additionalProperties": False,
    "required": ["grid", "model"],
    "properties": {
        "grid": {
            "type": "object",
            "additionalProperties": False,
            "required": ["n"],
            "properties": {
                "dim": {"enum": [1, 2]},
                "bounds": {"type": "array", "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}},
                "n": {"type": "integer", "minimum": 3},
            },
        },
        "model": {
            "type": "object",
            "additionalProperties": False,
            "required": ["V", "f"],
            "properties": {
                "V": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind", "value"],
                    "properties": {"kind": {"enum": ["constant"]}, "value": _NUM},
                },
                "f": {
                    "type": "object",
                    "additionalProperties": False,
                    "required": ["kind"],
                    "properties": {
                        "kind": {"enum": ["power", "power_sum"]},
                        "p": _NUM,
                        "lambda": _NUM,
                        "terms": {"type": "array", "items": {"type": "array", "items": _NUM, "minItems": 2, "maxItems": 2}},
                    },
                },
            },
        },
        "solver": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "tol_residual": _NUM,
                "tol_nehari": _NUM,
                "max_iters": {"type": "integer"},
                "shrink": _NUM,
                "armijo": _NUM,
                "init": {"enum": ["bump", "random"]},
                "continuation": {"type": "boolean"},
                "seed": {"type": "integer"},
                "newton_switch": _NUM,
                "max_newton": {"type": "integer"},
            },
        },
        "sweep": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "s_grid": {"type": "array", "items": _NUM, "minItems": 1},
                "include_local": {"type": "boolean"},
                "nu_list": {"type": "array", "items": _NUM},
                "N": {"type": "integer"},
                "allow_partial": {"type": "boolean"},
            },
        },
        "output": {
            "type": "object",
            "additionalProperties": False,
            "properties": {
                "dir": {"type": "string"},
                "formats": {"type": "array", "items": {"enum": ["csv", "json"]}},
            },
        },
    },
}

DEFAULT_SWEEP = {
    "s_grid": [0.6, 0.7, 0.8, 0.9, 0.95, 0.99],
    "include_local": True,
    "nu_list": [2.0, 2.2, 2.5],
    "N": 3,
    "allow_partial": False,
}


@dataclass
class ExperimentConfig:
    grid: GridSpec
    potential: Potential
    model: Nonlinearity
    solver: SolverConfig
    sweep: dict
    output: dict
    raw: dict

    @property
    def hash(self) -> str:
        blob = json.dumps(self.raw, sort_keys=True, separators=(",", ":"))
        return hashlib.sha256(blob.encode()).hexdigest()

    def sweep_config(self, allow_partial: bool | None = None) -> SweepConfig:
        sw = self.sweep
        return SweepConfig(
            grid=self.grid,
            s_grid=tuple(sw["s_grid"]),
            potential=self.potential,
            model=self.model,
            solver=self.solver,
            include_local=sw["include_local"],
            nu_list=tuple(sw["nu_list"]),
            N=sw["N"],
            allow_partial=sw["allow_partial"] if allow_partial is None else allow_partial,
        )


def _path(err) -> str:
    out = ""
    for part in err.absolute_path:
        out += f"[{part}]" if isinstance(part, int) else (f".{part}" if out else str(part))
    return out


def parse_config(text: str) -> ExperimentConfig:
    """Validate a JSON document and build an :class:`ExperimentConfig`.

    Structural problems raise :class:`SchemaError`; values outside the
    admissible windows raise :class:`RangeError`. Both name the field path.
    """
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise SchemaError("", f"invalid JSON: {exc}") from exc
    validator = jsonschema.Draft7Validator(SCHEMA)
    errors = sorted(validator.iter_errors(doc), key=lambda e: list(e.absolute_path))
    if errors:
        raise SchemaError(_path(errors[0]), errors[0].message)

    g = doc["grid"]
    dim = g.get("dim", 1)
    bounds = g.get("bounds", [[-1.0, 1.0]] * dim)
    if len(bounds) != dim:
        raise SchemaError("grid.bounds", f"expected {dim} intervals, got {len(bounds)}")
    for i, (a, b) in enumerate(bounds):
        if not b > a:
            raise RangeError(f"grid.bounds[{i}]", f"empty interval [{a}, {b}]")
    grid = GridSpec(dim=dim, bounds=tuple(map(tuple, bounds)), n=g["n"])

    vdoc = doc["model"]["V"]
    if not vdoc["value"] > 0:
        raise RangeError("model.V.value", f"need inf V > 0 (assumption V), got {vdoc['value']}")
    potential = Potential.constant(vdoc["value"])

    fdoc = doc["model"]["f"]
    lo, hi = exponent_window(dim)
    if fdoc["kind"] == "power":
        p = fdoc.get("p", 4.0)
        lam = fdoc.get("lambda", 1.0)
        if not lo < p < hi:
            raise RangeError("model.f.p", f"p = {p} outside the subcritical window ({lo}, {hi}) for dim {dim}")
        if not lam > 0:
            raise RangeError("model.f.lambda", f"coefficient must be positive, got {lam}")
        model = Nonlinearity.power(p, lam)
        fdoc = {"kind": "power", "p": p, "lambda": lam}
    else:
        terms = fdoc.get("terms")
        if not terms:
            raise SchemaError("model.f.terms", "power_sum needs at least one term")
        for i, (c, q) in enumerate(terms):
            if not c > 0:
                raise RangeError(f"model.f.terms[{i}]", f"coefficient must be positive, got {c}")
            if not lo < q < hi:
                raise RangeError(f"model.f.terms[{i}]", f"exponent {q} outside ({lo}, {hi})")
        model = Nonlinearity.power_sum(terms)
        fdoc = {"kind": "power_sum", "terms": terms}

    sdoc = {f.name: f.default for f in fields(SolverConfig)}
    sdoc.update(doc.get("solver", {}))
    for key in ("tol_residual", "tol_nehari", "armijo", "newton_switch"):
        if not sdoc[key] > 0:
            raise RangeError(f"solver.{key}", "must be positive")
    if sdoc["max_iters"] < 1:
        raise RangeError("solver.max_iters", "must be >= 1")
    if not 0 < sdoc["shrink"] < 1:
        raise RangeError("solver.shrink", "must lie in (0, 1)")
    solver = SolverConfig(**sdoc)

    sw = dict(DEFAULT_SWEEP)
    sw.update(doc.get("sweep", {}))
    if sw["N"] < 3:
        raise RangeError("sweep.N", f"dimension for the exponent window must be >= 3, got {sw['N']}")
    for i, s in enumerate(sw["s_grid"]):
        if not 0.5 < s < 1.0:
            raise RangeError(f"sweep.s_grid[{i}]", f"s = {s} outside the order window 1/2 < s < 1 (assumption N)")
    if any(b <= a for a, b in zip(sw["s_grid"], sw["s_grid"][1:])):
        raise RangeError("sweep.s_grid", "must be strictly ascending")
    nu_max = 2.0 * sw["N"] / (sw["N"] - 1.0)
    for i, nu in enumerate(sw["nu_list"]):
        if not 2.0 <= nu < nu_max:
            raise RangeError(f"sweep.nu_list[{i}]", f"nu = {nu} outside [2, {nu_max:g})")

    out = {"dir": "out", "formats": ["csv", "json"]}
    out.update(doc.get("output", {}))

    raw = {
        "grid": grid.to_dict(),
        "model": {"V": {"kind": "constant", "value": vdoc["value"]}, "f": fdoc},
        "solver": sdoc,
        "sweep": sw,
        "output": out,
    }
    return ExperimentConfig(grid, potential, model, solver, sw, out, raw)


def load_config(path) -> ExperimentConfig:
    with open(path) as fh:
        return parse_config(fh.read())
