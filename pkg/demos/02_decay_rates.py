"""Decay of the bound with the discretization level, against the regime map.

The map rate_exponent(H, q) returns the exponents of the three-regime upper
envelope: n^(-1/2) up to H = 1/2, n^(H-1) in a middle window, n^(qH-q+1/2)
near the admissibility boundary H = 1 - 1/(2q).  The computed bound always
decays at least that fast; in parts of the H > 1/2 range the exact lattice
sums decay strictly faster, so fitted slopes can undershoot the envelope.
"""

import numpy as np

from gaussapprox import bound_curve, fit_rate, rate_exponent

N_LIST = [2**k for k in range(7, 13)]

for q, h in [(2, 0.5), (2, 0.65), (3, 0.7), (3, 0.8)]:
    curve = bound_curve(h, q, (0.0, 1.0), N_LIST, np.eye(1))
    fit = fit_rate(curve)
    envelope = rate_exponent(h, q)
    print(f"q={q} H={h}:")
    for n, v in curve:
        print(f"    n={n:5d}  bound={v:.6f}")
    print(f"    fitted slope {fit.slope:+.4f}  envelope exponent {envelope:+.2f}")
    # one-sided check: the curve is dominated by an envelope with the map's slope
    logs = [np.log(v) - envelope * np.log(n) for n, v in curve]
    c = np.exp(max(logs))
    dominated = all(v <= c * n**envelope * (1 + 1e-9) for n, v in curve)
    print(f"    dominated by {c:.3f} * n^{envelope:+.2f}: {dominated}\n")
