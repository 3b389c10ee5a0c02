import json

import pytest

from fraclab.cli import main
from fraclab.config import RangeError, SchemaError, parse_config

MINIMAL = {"grid": {"n": 64}, "model": {"V": {"kind": "constant", "value": 1.0}, "f": {"kind": "power"}}}


def _doc(**patch):
    doc = json.loads(json.dumps(MINIMAL))
    for dotted, value in patch.items():
        node = doc
        keys = dotted.split("__")
        for k in keys[:-1]:
            node = node.setdefault(k, {})
        node[keys[-1]] = value
    return json.dumps(doc)


def test_minimal_config_gets_defaults():
    cfg = parse_config(json.dumps(MINIMAL))
    assert cfg.grid.dim == 1 and cfg.grid.n == 64
    assert cfg.model.p == 4.0
    assert cfg.sweep["s_grid"] == [0.6, 0.7, 0.8, 0.9, 0.95, 0.99]
    assert cfg.solver.tol_residual == 1e-8
    assert len(cfg.hash) == 64


def test_hash_is_canonical():
    a = parse_config(json.dumps(MINIMAL))
    b = parse_config(json.dumps(MINIMAL, indent=4))
    assert a.hash == b.hash
    assert parse_config(_doc(grid__n=65)).hash != a.hash


def test_order_outside_window():
    with pytest.raises(RangeError, match="assumption N") as err:
        parse_config(_doc(sweep__s_grid=[0.4, 0.8]))
    assert err.value.path == "sweep.s_grid[0]"


def test_nonpositive_potential():
    with pytest.raises(RangeError, match="assumption V") as err:
        parse_config(_doc(model__V__value=0.0))
    assert err.value.path == "model.V.value"


def test_unknown_key_reports_path():
    with pytest.raises(SchemaError) as err:
        parse_config(_doc(solver__bogus=1))
    assert err.value.path == "solver"
    assert "bogus" in str(err.value)


def test_exponent_window_2d():
    with pytest.raises(RangeError):
        parse_config(_doc(grid__dim=2, grid__bounds=[[-1, 1], [-1, 1]], model__f__p=4.5))
    assert parse_config(_doc(grid__dim=2, grid__bounds=[[-1, 1], [-1, 1]], model__f__p=3.5)).grid.dim == 2


def test_nu_window_and_N():
    with pytest.raises(RangeError, match="nu"):
        parse_config(_doc(sweep__nu_list=[3.0]))
    with pytest.raises(RangeError):
        parse_config(_doc(sweep__N=2))


def test_bad_json():
    with pytest.raises(SchemaError):
        parse_config("{not json")


def _write(tmp_path, text, name="cfg.json"):
    path = tmp_path / name
    path.write_text(text)
    return str(path)


def test_cli_constants(capsys):
    assert main(["constants", "--N", "3", "--s", "0.75"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["N"] == 3 and out["s"] == 0.75 and out["A"] > 0


def test_cli_constants_invalid(capsys):
    assert main(["constants", "--N", "3", "--s", "1.5"]) == 1


def test_cli_missing_config(tmp_path, capsys):
    assert main(["solve", "--config", str(tmp_path / "nope.json"), "--out", str(tmp_path / "u.csv")]) == 1
    assert "not found" in capsys.readouterr().err


def test_cli_invalid_config(tmp_path, capsys):
    path = _write(tmp_path, _doc(model__V__value=-1.0))
    assert main(["check-model", "--config", path]) == 1
    assert "model.V.value" in capsys.readouterr().err


def test_cli_check_model(tmp_path, capsys):
    path = _write(tmp_path, json.dumps(MINIMAL))
    assert main(["check-model", "--config", path, "--samples", "400"]) == 0
    out = json.loads(capsys.readouterr().out)
    assert out["passed"] and "config_hash" in out


def test_cli_solve_writes_sidecar(tmp_path):
    path = _write(tmp_path, json.dumps(MINIMAL))
    out = tmp_path / "run" / "u.csv"
    assert main(["solve", "--config", path, "--out", str(out), "--s", "0.8"]) == 0
    lines = out.read_text().splitlines()
    assert lines[0] == "x,u" and len(lines) == 65
    meta = json.loads(out.with_suffix(".json").read_text())
    assert meta["converged"] is True
    assert meta["config_hash"] == parse_config(json.dumps(MINIMAL)).hash


def test_cli_solve_nonconvergence(tmp_path):
    path = _write(tmp_path, _doc(solver__max_iters=1))
    out = tmp_path / "u.csv"
    assert main(["solve", "--config", path, "--out", str(out), "--s", "0.8"]) == 2
    assert json.loads(out.with_suffix(".json").read_text())["converged"] is False
    assert out.exists()


def test_cli_sweep(tmp_path):
    path = _write(tmp_path, _doc(sweep__s_grid=[0.7, 0.9]))
    out = tmp_path / "sweep"
    assert main(["sweep", "--config", path, "--out", str(out)]) == 0
    meta = json.loads((out / "meta.json").read_text())
    assert meta["config_hash"] == parse_config(_doc(sweep__s_grid=[0.7, 0.9])).hash
    assert (out / "sweep.csv").exists() and (out / "plotdata.csv").exists()


def test_cli_sweep_partial(tmp_path):
    path = _write(tmp_path, _doc(sweep__s_grid=[0.8], solver__max_iters=1))
    assert main(["sweep", "--config", path, "--out", str(tmp_path / "a")]) == 2
    assert main(["sweep", "--config", path, "--out", str(tmp_path / "b"), "--allow-partial"]) == 2
    assert (tmp_path / "b" / "sweep.csv").exists()
