#!/usr/bin/env python3
"""Convergence tables for compound means.

Shows the quadratic contraction of the classical AGM next to a compound
of two means sitting at the extreme distance 1, which still converges
(to the arithmetic mean) because the iteration preserves x + y.
"""

from meanscape import (
    compound_trace,
    group_inverse,
    make_arithmetic,
    make_geometric,
)

A, G = make_arithmetic(), make_geometric()

for title, m1, m2, start in [
    ("AGM(1, 2)", A, G, (1.0, 2.0)),
    ("AGM(1, 1e6)", A, G, (1.0, 1e6)),
    ("mid(G, 2A-G)(1, 4)", G, group_inverse(G), (1.0, 4.0)),
]:
    trace = compound_trace(m1, m2, *start, estimate_contraction=False)
    print(f"\n{title}: limit = {trace.limit!r} after {trace.iterations_used} steps")
    print(f"{'n':>3} {'x':>24} {'y':>24} {'gap':>12}")
    for step in trace.steps:
        print(f"{step.n:>3} {step.x:>24.16g} {step.y:>24.16g} {step.gap:>12.3e}")
