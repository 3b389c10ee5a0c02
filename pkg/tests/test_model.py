import numpy as np
import pytest

from fraclab.discretization import GridSpec
from fraclab.model import F_integral, Nonlinearity, Potential, check_assumptions

BOX = ((-1.0, 1.0),)


def test_power_closed_forms():
    m = Nonlinearity.power(4.0)
    u = np.linspace(-3, 3, 13)
    np.testing.assert_allclose(m.f(None, u), u**3)
    np.testing.assert_allclose(m.F(None, u), u**4 / 4)
    np.testing.assert_allclose(m.f(None, u) * u - 2 * m.F(None, u), u**4 / 2)


def test_default_model_passes():
    rep = check_assumptions(Nonlinearity.power(4.0), Potential.constant(1.0), BOX, samples=10_000)
    assert rep.passed, rep.to_dict()
    assert rep.samples >= 10_000
    assert 0.9 <= rep["F1"].value <= 1.1


def test_growth_constant_oracle():
    m = Nonlinearity.power(4.0)
    u = np.linspace(-10, 10, 20001)
    oracle = np.max(np.abs(m.f(None, u)) / (1 + np.abs(u) ** 3))
    rep = check_assumptions(m, Potential.constant(1.0), BOX, samples=10_000)
    assert rep["F1"].value <= oracle + 1e-12
    assert rep["F1"].value == pytest.approx(oracle, rel=1e-3)


def test_degenerate_p2_fails_F4_with_witness():
    rep = check_assumptions(Nonlinearity.power(2.0), Potential.constant(1.0), BOX, samples=10_000)
    assert not rep["F4"].passed
    assert rep["F4"].witnesses
    assert not rep.passed


def test_failed_checks_carry_witnesses():
    lam_neg = Nonlinearity.custom(lambda x, u: np.sin(u), lambda x, u: 1 - np.cos(u), p=3.0)
    rep = check_assumptions(lam_neg, Potential.constant(1.0), BOX, samples=1000)
    for c in rep.checks.values():
        if not c.passed:
            assert c.witnesses, c.name


def test_p_window_in_2d():
    box2 = ((0.0, 1.0), (0.0, 1.0))
    assert not check_assumptions(Nonlinearity.power(4.0), Potential.constant(1.0), box2, samples=400)["F1"].passed
    assert check_assumptions(Nonlinearity.power(3.0), Potential.constant(1.0), box2, samples=400).passed


def test_potential_must_be_positive():
    with pytest.raises(ValueError):
        Potential.constant(0.0)


def test_deterministic():
    a = check_assumptions(Nonlinearity.power(3.0), Potential.constant(1.0), BOX, samples=500, seed=7).to_dict()
    b = check_assumptions(Nonlinearity.power(3.0), Potential.constant(1.0), BOX, samples=500, seed=7).to_dict()
    assert a == b


def test_AR_inequality_for_F4_models():
    m = Nonlinearity.power_sum([(1.0, 4.0), (0.5, 3.0)])
    rep = check_assumptions(m, Potential.constant(1.0), BOX, samples=2000)
    assert rep["F4"].passed and rep["AR"].passed
    assert rep["AR"].value >= 0


def test_x_dependent_coefficient():
    m = Nonlinearity.power(4.0, lam=lambda x: 1.0 + 0.5 * np.cos(np.atleast_1d(x)))
    g = GridSpec.interval(-1, 1, 64)
    u = np.ones(64)
    expect = np.sum((1 + 0.5 * np.cos(g.nodes())) / 4) * g.h[0]
    assert F_integral(g, u, m) == pytest.approx(expect, rel=1e-14)
    assert check_assumptions(m, Potential.constant(1.0), BOX, samples=400).passed


def test_F_integral_values():
    m = Nonlinearity.power(4.0)
    g = GridSpec.interval(0, 1, 999)
    assert F_integral(g, np.zeros(999), m) == 0.0
    assert F_integral(g, np.ones(999), m) == pytest.approx(0.25, rel=5e-3)


def test_F_integral_first_order_quadrature_error():
    m = Nonlinearity.power(4.0)
    errs = []
    for n in (99, 199, 399):
        g = GridSpec.interval(0, 1, n)
        errs.append(abs(F_integral(g, np.ones(n), m) - 0.25))
    assert errs[0] / errs[1] == pytest.approx(2, rel=0.05)
    assert errs[1] / errs[2] == pytest.approx(2, rel=0.05)


def test_F_integral_directional_derivative():
    m = Nonlinearity.power_sum([(1.0, 4.0), (0.3, 3.0)])
    g = GridSpec.interval(-1, 1, 64)
    rng = np.random.default_rng(2)
    u, v = rng.standard_normal(64), rng.standard_normal(64)
    eps = 1e-5
    fd = (F_integral(g, u + eps * v, m) - F_integral(g, u - eps * v, m)) / (2 * eps)
    exact = np.sum(m.f(g.nodes(), u) * v) * g.h[0]
    assert fd == pytest.approx(exact, rel=1e-6)
