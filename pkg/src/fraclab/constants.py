"""Closed-form constants of the fractional Laplacian and its embeddings.

All integrals are evaluated with adaptive Gauss-Kronrod quadrature
(QUADPACK through :func:`scipy.integrate.quad`) after removing the
singular part analytically, so every value carries an error estimate.
"""

from __future__ import annotations

import math
from dataclasses import asdict, dataclass

import numpy as np
from scipy import integrate, special

_QUAD_OPTS = dict(epsabs=0.0, epsrel=1e-13, limit=200)


def _check_N(N: int) -> None:
    if int(N) != N or N < 3:
        raise ValueError(f"dimension N must be an integer >= 3, got {N!r}")


def _check_open_order(s: float) -> None:
    if not 0.0 < s < 1.0:
        raise ValueError(f"order s must lie in (0, 1), got {s!r}")


def sphere_area(k: int) -> float:
    """Surface area of the unit sphere S^k in R^(k+1)."""
    return 2.0 * math.pi ** ((k + 1) / 2.0) / math.gamma((k + 1) / 2.0)


def A_const_with_error(N: int, s: float) -> tuple[float, float]:
    """Return ``(A(N, s), relative error estimate)``.

    The (N-1)-dimensional integral is reduced to a radial one and mapped
    onto [0, pi/2] by r = tan(theta), which turns it into the smooth
    integral of sin^(N-2) * cos^(2s).
    """
    _check_N(N)
    _check_open_order(s)
    val, err = integrate.quad(
        lambda th: math.sin(th) ** (N - 2) * math.cos(th) ** (2.0 * s),
        0.0,
        math.pi / 2.0,
        **_QUAD_OPTS,
    )
    area = sphere_area(N - 2)
    return area * val, err / val


def A_const(N: int, s: float) -> float:
    return A_const_with_error(N, s)[0]


def _cos_head_series(s: float, terms: int = 14) -> tuple[float, float]:
    # int_0^1 (1 - cos t) t^(-1-2s) dt, integrated term by term
    total = 0.0
    for k in range(1, terms + 1):
        total += (-1) ** (k + 1) / (math.factorial(2 * k) * (2 * k - 2 * s))
    nxt = 1.0 / (math.factorial(2 * terms + 2) * (2 * terms + 2 - 2 * s))
    return total, nxt


def B_const_with_error(s: float) -> tuple[float, float]:
    """Return ``(B(s), relative error estimate)``.

    The integral over R is twice the one over (0, inf). On (0, 1) the
    Taylor series of 1 - cos t is integrated exactly; on (1, inf) the
    algebraic part is exact and the oscillatory remainder goes through
    QUADPACK's Fourier-weight routine.
    """
    _check_open_order(s)
    head, head_err = _cos_head_series(s)
    a = 1.0 + 2.0 * s
    # two integrations by parts speed up the decay of the oscillatory tail
    rest, osc_err = integrate.quad(
        lambda t: t ** (-a - 2.0), 1.0, np.inf, weight="cos", wvar=1.0,
        epsabs=1e-13, limlst=200,
    )
    osc = -math.sin(1.0) + a * math.cos(1.0) - a * (a + 1.0) * rest
    osc_err *= a * (a + 1.0)
    tail = 1.0 / (2.0 * s) - osc
    half = head + tail
    value = 2.0 * s * (1.0 - s) * half
    return value, (abs(head_err) + abs(osc_err)) / abs(half)


def B_const(s: float) -> float:
    return B_const_with_error(s)[0]


def C_const(N: int, s: float) -> float:
    return s * (1.0 - s) / (A_const(N, s) * B_const(s))


def sobolev_constant(N: int, s: float) -> float:
    """Coefficient of the sharp fractional Sobolev inequality.

    ``|S|`` is taken as the area of S^N in R^(N+1).
    """
    if N <= 2 * s:
        raise ValueError(f"need N > 2s, got N={N}, s={s}")
    ratio = math.exp(special.gammaln((N - 2 * s) / 2.0) - special.gammaln((N + 2 * s) / 2.0))
    return ratio * sphere_area(N) ** (-2.0 * s / N)


def critical_exponent(N: int, s: float) -> float:
    return 2.0 * N / (N - 2.0 * s)


def interpolation_theta(N: int, q: float, s: float) -> float:
    """Weight theta with 1/q = theta/2 + (1 - theta)/2_s^*."""
    q_max = 2.0 * N / (N - 1.0)
    if not 2.0 <= q <= q_max:
        raise ValueError(f"q must lie in [2, {q_max}], got {q!r}")
    if not 0.5 <= s <= 1.0:
        raise ValueError(f"s must lie in [1/2, 1], got {s!r}")
    return (2.0 * N - q * (N - 2.0 * s)) / (2.0 * s * q)


def extrapolate_to_one(func, s_values) -> float:
    """Polynomial (Richardson/Neville) extrapolation of ``func`` to s = 1.

    ``func`` is sampled at the given orders and the interpolating
    polynomial in (1 - s) is evaluated at zero.
    """
    d = np.asarray([1.0 - s for s in s_values], dtype=float)
    table = [float(func(s)) for s in s_values]
    n = len(table)
    # Neville's scheme at x = 0
    p = list(table)
    for m in range(1, n):
        for i in range(n - m):
            p[i] = (d[i] * p[i + 1] - d[i + m] * p[i]) / (d[i] - d[i + m])
    return p[0]


def C_limit_ratio(N: int) -> float:
    """lim_{s->1-} C(N, s)/(1 - s) = 4N / |S^(N-1)|."""
    return 4.0 * N / sphere_area(N - 1)


@dataclass(frozen=True)
class ConstantsReport:
    N: int
    s: float
    A: float
    B: float
    C: float
    sobolev_K: float
    theta: float | None
    omega: float
    sphere_area: float
    quadrature_error_estimate: float
    q: float | None = None

    def to_dict(self) -> dict:
        return asdict(self)


def constants_report(N: int, s: float, q: float | None = None) -> ConstantsReport:
    a, a_err = A_const_with_error(N, s)
    b, b_err = B_const_with_error(s)
    theta = interpolation_theta(N, q, s) if q is not None else None
    return ConstantsReport(
        N=N,
        s=s,
        A=a,
        B=b,
        C=s * (1.0 - s) / (a * b),
        sobolev_K=sobolev_constant(N, s),
        theta=theta,
        omega=sphere_area(N - 1),
        sphere_area=sphere_area(N),
        quadrature_error_estimate=max(a_err, b_err),
        q=q,
    )
