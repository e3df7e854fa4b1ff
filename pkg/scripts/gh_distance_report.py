#!/usr/bin/env python3
"""Print the certified distance between G and H and its algebraic check.

The maximum of the ratio profile (t^2 - t)/((t+1)(t^2+1)) is computed by
golden-section search; the residuals of two degree-4 polynomials at the
maximum are shown side by side. Only 16v^4 + 44v^2 - 1 vanishes there.
"""

import math

from meanscape import distance_gh_certificate

cert = distance_gh_certificate()
v = cert.value
print(f"d(G, H)                = {v:.15f}")
print(f"argmax ratio t         = {cert.argmax_t:.10f}")
print(f"closed form            = {math.sqrt((5 * math.sqrt(5) - 11) / 8):.15f}")
print(f"|v^4+10v^3+3v^2-14v+2| = {cert.quartic_residual:.3e}")
print(f"|16v^4+44v^2-1|        = {abs(16 * v**4 + 44 * v**2 - 1):.3e}")
