"""The discrete fractional operator converges to the three-point Laplacian.

We apply A_s to a smooth bump and watch the distance to A_1 shrink.
"""

import numpy as np

from fraclab import GridSpec, assemble_operator, stencil_weights
from fraclab.discretization import operator_convergence_gap

print("stencil weights at s = 1:", stencil_weights(1.0, 5))
print("stencil weights at s = 0.75:", np.round(stencil_weights(0.75, 5), 6))

grid = GridSpec.interval(-1.0, 1.0, 128)
x = grid.nodes()
bump = np.exp(-1.0 / np.clip(1.0 - x**2, 1e-300, None))
for s in (0.6, 0.8, 0.9, 0.99, 0.999):
    op = assemble_operator(grid, s)
    print(f"s={s:<6} gap={operator_convergence_gap(grid, s, bump):9.4f}  lambda_min={op.min_eigenvalue:8.4f}")
