"""Normalising constants of the fractional Laplacian as s approaches 1.

C(N, s) vanishes like (1 - s) at the local end, and the ratio C/(1 - s)
settles on 4N/|S^(N-1)|. Run:  python demos/01_constants.py
"""

from fraclab.constants import C_const, C_limit_ratio, constants_report, extrapolate_to_one

N = 3
print(f"{'s':>6} {'A':>12} {'B':>12} {'C/(1-s)':>12}")
for s in (0.55, 0.7, 0.85, 0.95, 0.99):
    r = constants_report(N, s)
    print(f"{s:6.2f} {r.A:12.8f} {r.B:12.8f} {r.C / (1 - s):12.8f}")

est = extrapolate_to_one(lambda s: C_const(N, s) / (1 - s), [0.9, 0.92, 0.94, 0.96, 0.98])
print(f"\nextrapolated limit {est:.10f}, closed form {C_limit_ratio(N):.10f}")
