#!/usr/bin/env python3
"""Distance to the arithmetic mean over widening windows.

G and H creep toward the radius 1/2 of the space as the window grows,
which is the numerical footprint of sitting on the border; a mean built
from a clamped transform stalls strictly inside.
"""

from meanscape import (
    AsymmetricFunction,
    Interval,
    POSITIVE_REALS,
    distance_to_arithmetic,
    make_geometric,
    make_harmonic,
    phi,
    phi_inverse,
)

base = phi(make_geometric())
clamped = phi_inverse(AsymmetricFunction(
    POSITIVE_REALS, lambda x, y: max(-1.0, min(1.0, base(x, y))), "clamped"))

means = [("G", make_geometric()), ("H", make_harmonic()), ("clamped", clamped)]

print(f"{'window':>16}  " + "".join(f"{name:>12}" for name, _ in means))
for k in (2, 4, 6, 8):
    window = Interval.closed(10.0 ** -k, 10.0 ** k)
    row = [f"{distance_to_arithmetic(m, window, 48).value:12.8f}" for _, m in means]
    print(f"[1e-{k:02d}, 1e+{k:02d}]  " + "".join(row))
