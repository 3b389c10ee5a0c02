"""A single ground state, fractional and local, for V = 1 and f(u) = u^3."""

import numpy as np

from fraclab import EnergyContext, GridSpec, Nonlinearity, Potential, assemble_operator
from fraclab.solver import solve_ground_state

grid = GridSpec.interval(-1.0, 1.0, 256)
for s in (0.7, 1.0):
    ctx = EnergyContext(assemble_operator(grid, s), Potential.constant(1.0), Nonlinearity.power(4.0))
    gs = solve_ground_state(ctx)
    print(
        f"s={s}: energy={gs.energy:.10f} max u={np.max(gs.u):.6f} "
        f"EL residual={gs.el_residual:.1e} iterations={gs.iterations} converged={gs.converged}"
    )
