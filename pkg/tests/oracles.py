"""Independent reference computations used as test oracles."""

import math

import numpy as np
from scipy import integrate, optimize


def decade_quad(f, a, b, **kw):
    """quad over [a, b] split at powers of ten, for long ranges."""
    edges = [a]
    e = 1.0
    while e < b:
        if e > a:
            edges.append(e)
        e *= 10.0
    edges.append(b)
    total = 0.0
    for lo, hi in zip(edges, edges[1:]):
        total += integrate.quad(f, lo, hi, epsabs=0, epsrel=1e-12, limit=200, **kw)[0]
    return total


def A_bruteforce_N4(s, R=1e4):
    """A(4, s) as a nested quadrature over a ball of radius R in R^3 (cylindrical coords)."""
    expo = -(4 + 2 * s) / 2.0

    def inner(z):
        rmax = math.sqrt(max(R * R - z * z, 0.0))
        return decade_quad(lambda r: r * (1 + r * r + z * z) ** expo, 0.0, rmax)

    return 2 * 2 * math.pi * decade_quad(inner, 0.0, R)


def h1_energy(grid, V, u):
    """First-difference quadrature of int |grad u|^2 + V u^2 with zero padding."""
    hs = grid.h
    U = np.pad(np.asarray(u).reshape(grid.shape), 1)
    total = 0.0
    for axis, h in enumerate(hs):
        d = np.diff(U, axis=axis) / h
        # keep only the differences that touch the interior slab of the other axes
        sl = [slice(1, -1)] * grid.dim
        sl[axis] = slice(None)
        total += float(np.sum(d[tuple(sl)] ** 2))
    vol = grid.cell_volume
    return total * vol + float(np.sum(V * np.asarray(u) ** 2)) * vol


def cubic_ground_state_1d(L=1.0):
    """Positive solution of -u'' + u = u^3 on (-L, L), u(+-L) = 0, by shooting.

    Integrates from the centre with u(0) = a, u'(0) = 0 and solves
    u(L; a) = 0 with Brent's method. Returns (profile callable, energy)
    where the energy is 1/4 int u^4 (the Nehari identity for this model).
    """

    def shoot(a):
        return integrate.solve_ivp(
            lambda x, y: [y[1], y[0] - y[0] ** 3],
            [0.0, L],
            [a, 0.0],
            method="DOP853",
            rtol=1e-13,
            atol=1e-14,
            dense_output=True,
        )

    a = optimize.brentq(lambda a: shoot(a).y[0, -1], 1.5, 2.5, xtol=1e-15)
    sol = shoot(a)

    def profile(x):
        x = np.abs(np.asarray(x, dtype=float))
        return sol.sol(x)[0]

    energy = 0.25 * 2 * integrate.quad(lambda x: float(profile(x)) ** 4, 0.0, L, epsabs=0, epsrel=1e-13, limit=400)[0]
    return profile, energy
