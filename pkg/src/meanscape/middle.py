"""Functional symmetrics and compound means (the generalized AGM).

Two constructions live here. The functional symmetric of M1 with respect
to a monotone mean M0 is the unique mean T solving the functional
equation M0(M1(x,y), T(x,y)) = M0(x,y); it is found pointwise by a
bracketed root solve on [min(x,y), max(x,y)]. The compound of two means
M1, M2 is the unique mean M fixed by M(M1, M2) = M; it is evaluated as
the common limit of the coupled iteration

    x(n+1) = M1(x(n), y(n)),   y(n+1) = M2(x(n), y(n)),

which contracts geometrically whenever the distance between the operands
is below 1, and converges for continuous operands regardless. The
classical AGM is the compound of the arithmetic and geometric means.

Compound evaluation is pure per point; traces are per-call values and
never shared mutable state.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import NamedTuple, Optional

import numpy as np

from .core import (
    BracketError,
    ConvergenceError,
    DomainError,
    Interval,
    MeanFunction,
    DEFAULT_SEED,
    default_window,
    make_arithmetic,
    make_geometric,
    make_harmonic,
    sample_pairs,
)
from .algebra import group_inverse, group_symmetry, random_normal_mean
from .metric import distance

__all__ = [
    "TraceStep",
    "IterationTrace",
    "CompoundMean",
    "functional_symmetric",
    "functional_symmetric_mean",
    "sigma_closed_form",
    "compound",
    "compound_trace",
    "make_agm",
    "m_arithmetic",
    "agm_fixed_point_check",
    "coincidence_probe",
    "counterexample_check",
]

DEFAULT_TOLERANCE = 1e-13
DEFAULT_MAX_ITERATIONS = 200

# Envelope checks allow this much multiplicative slack over k^n * gap(0).
_ENVELOPE_SLACK = 1e-9


class TraceStep(NamedTuple):
    n: int
    x: float
    y: float
    gap: float


@dataclass(frozen=True)
class IterationTrace:
    """Per-step record of a coupled mean iteration.

    Gaps are non-increasing (the min/max envelope of the iterates
    contracts). ``limit`` is the midpoint of the final bracket, whose
    half-width bounds the error; when ``k_estimate`` < 1 was available,
    ``envelope_ok`` records whether gap(n) <= k^n * gap(0) held with
    relative slack 1e-9 at every recorded step.
    """

    steps: tuple[TraceStep, ...]
    converged: bool
    limit: float
    iterations_used: int
    k_estimate: Optional[float] = None
    envelope_ok: Optional[bool] = None


@dataclass(frozen=True)
class CompoundMean(MeanFunction):
    """The unique mean fixed by M(M1, M2) = M, evaluated by iteration.

    Substitutable for a MeanFunction everywhere. ``guaranteed`` is False
    when neither convergence route applied at construction: the distance
    estimate between the operands was not below 1 and the operands were
    not both flagged continuous.
    """

    m1: Optional[MeanFunction] = None
    m2: Optional[MeanFunction] = None
    tolerance: float = DEFAULT_TOLERANCE
    max_iterations: int = DEFAULT_MAX_ITERATIONS
    d_estimate: Optional[float] = None
    guaranteed: bool = True


def _relative_gap_done(x: float, y: float, tol: float) -> bool:
    return abs(x - y) <= tol * max(1.0, abs(x), abs(y))


def _run_iteration(m1: MeanFunction, m2: MeanFunction, x: float, y: float,
                   tol: float, max_iter: int, record: bool):
    """Coupled iteration with envelope clamping.

    Each update lies inside the current [min, max] envelope by the mean
    axioms; clamping removes half-ulp rounding drift so the envelope is
    monotone in floating point too.
    """
    xn, yn = float(x), float(y)
    steps = [TraceStep(0, xn, yn, abs(xn - yn))] if record else None
    n = 0
    while not _relative_gap_done(xn, yn, tol) and n < max_iter:
        lo, hi = min(xn, yn), max(xn, yn)
        nx = m1(xn, yn)
        ny = m2(xn, yn)
        xn = min(max(nx, lo), hi)
        yn = min(max(ny, lo), hi)
        n += 1
        if record:
            steps.append(TraceStep(n, xn, yn, abs(xn - yn)))
    return _relative_gap_done(xn, yn, tol), xn, yn, n, steps


def compound(m1: MeanFunction, m2: MeanFunction,
             tolerance: float = DEFAULT_TOLERANCE,
             max_iterations: int = DEFAULT_MAX_ITERATIONS, *,
             estimate_distance: bool = True, grid: int = 48) -> CompoundMean:
    """Compound mean of m1 and m2.

    Convergence is guaranteed when the estimated distance between the
    operands is below 1 or both are flagged continuous; otherwise the
    compound is still constructed but flagged ``guaranteed=False``.
    Evaluation iterates until |x_n - y_n| <= tolerance * max(1, |x_n|,
    |y_n|) and returns the midpoint; running out of iterations raises
    ConvergenceError carrying the trace.
    """
    if m1.maps_into_domain is False or m2.maps_into_domain is False:
        raise ValueError("compound operands must map into their domain interval")
    dom = m1.domain.intersect(m2.domain)
    if dom is None:
        raise DomainError(f"domains {m1.domain} and {m2.domain} do not overlap")

    d_est = None
    if estimate_distance:
        d_est = distance(m1, m2, default_window(dom), grid).value
    continuous = bool(m1.is_continuous) and bool(m2.is_continuous)
    guaranteed = (d_est is not None and d_est < 1.0) or continuous

    def fn(x: float, y: float) -> float:
        ok, xn, yn, n, _ = _run_iteration(m1, m2, x, y, tolerance, max_iterations, False)
        if not ok:
            _, _, _, _, steps = _run_iteration(m1, m2, x, y, tolerance, max_iterations, True)
            trace = IterationTrace(tuple(steps), False, 0.5 * (xn + yn), n)
            raise ConvergenceError(
                f"compound({m1.name},{m2.name}) did not converge at ({x}, {y}) "
                f"within {max_iterations} iterations (gap {abs(xn - yn):.3e})", trace)
        return 0.5 * (xn + yn)

    return CompoundMean(
        name=f"mid({m1.name},{m2.name})", domain=dom, fn=fn,
        is_monotone=None, is_continuous=None, maps_into_domain=True,
        m1=m1, m2=m2, tolerance=tolerance, max_iterations=max_iterations,
        d_estimate=d_est, guaranteed=guaranteed)


def compound_trace(m1: MeanFunction, m2: MeanFunction, x: float, y: float,
                   tolerance: float = DEFAULT_TOLERANCE,
                   max_iterations: int = DEFAULT_MAX_ITERATIONS, *,
                   estimate_contraction: bool = True,
                   grid: int = 48) -> IterationTrace:
    """Full per-step trace of the coupled iteration started at (x, y).

    When a contraction factor k < 1 can be estimated (distance of the
    operands over the default window, sharpened with the starting point
    itself), the geometric envelope gap(n) <= k^n * gap(0) is checked for
    every recorded step. Non-convergence raises ConvergenceError carrying
    the partial trace.
    """
    dom = m1.domain.intersect(m2.domain)
    if dom is None:
        raise DomainError(f"domains {m1.domain} and {m2.domain} do not overlap")

    converged, xn, yn, n, steps = _run_iteration(m1, m2, x, y, tolerance,
                                                 max_iterations, True)

    k = None
    envelope_ok = None
    if estimate_contraction:
        k = distance(m1, m2, default_window(dom), grid).value
        if x != y:
            k = max(k, abs(m1(x, y) - m2(x, y)) / abs(x - y))
        if k < 1.0:
            gap0 = steps[0].gap
            envelope_ok = all(
                step.gap <= k ** step.n * gap0 * (1.0 + _ENVELOPE_SLACK)
                for step in steps[1:])

    trace = IterationTrace(tuple(steps), converged, 0.5 * (xn + yn), n, k, envelope_ok)
    if not converged:
        raise ConvergenceError(
            f"compound({m1.name},{m2.name}) did not converge at ({x}, {y}) "
            f"within {max_iterations} iterations", trace)
    return trace


def make_agm(tolerance: float = DEFAULT_TOLERANCE,
             max_iterations: int = DEFAULT_MAX_ITERATIONS) -> CompoundMean:
    """The classical AGM: compound of the arithmetic and geometric means."""
    agm = compound(make_arithmetic(), make_geometric(), tolerance, max_iterations,
                   estimate_distance=False)
    # d(G, A) <= 1/2 holds for every mean against A; no estimate needed
    return CompoundMean(
        name="AGM", domain=agm.domain, fn=agm.fn,
        is_monotone=True, is_continuous=True, maps_into_domain=True,
        m1=agm.m1, m2=agm.m2, tolerance=tolerance, max_iterations=max_iterations,
        d_estimate=0.5, guaranteed=True)


def m_arithmetic(frak_m: MeanFunction, tolerance: float = DEFAULT_TOLERANCE,
                 max_iterations: int = DEFAULT_MAX_ITERATIONS) -> CompoundMean:
    """Compound of the arithmetic mean with ``frak_m``.

    Always applicable: every mean is within distance 1/2 of A, so the
    coupled iteration contracts with factor below 1.
    """
    return compound(make_arithmetic(), frak_m, tolerance, max_iterations)


def functional_symmetric(m0: MeanFunction, m1: MeanFunction, x: float, y: float,
                         *, rel_tol: float = 1e-12, fast: bool = False) -> float:
    """The value t with m0(m1(x, y), t) = m0(x, y), solved on [min, max].

    Requires m0 to be declared monotone (is_monotone=True): monotonicity
    both guarantees the root is unique and puts it inside the bracket
    [min(x,y), max(x,y)]. Baseline solver is bisection; ``fast=True``
    switches to Brent's method on the same bracket. A missing sign change
    raises BracketError with the endpoint values.
    """
    if m0.is_monotone is not True:
        raise ValueError(f"{m0.name} is not declared monotone (is_monotone=True required)")
    x, y = float(x), float(y)
    if x == y:
        return x
    lo, hi = min(x, y), max(x, y)
    target = m0(x, y)
    a = m1(x, y)

    def g(t: float) -> float:
        return m0(a, t) - target

    g_lo, g_hi = g(lo), g(hi)
    if g_lo == 0.0:
        return lo
    if g_hi == 0.0:
        return hi
    if (g_lo > 0.0) == (g_hi > 0.0):
        raise BracketError(
            f"no sign change for the functional symmetric of {m1.name} with respect to "
            f"{m0.name} on [{lo}, {hi}]: endpoints {g_lo:.6e}, {g_hi:.6e}")

    if fast:
        from scipy.optimize import brentq
        return float(brentq(g, lo, hi, xtol=rel_tol * max(1.0, abs(lo), abs(hi))))

    increasing = g_hi > 0.0
    tol = rel_tol * max(1.0, abs(lo), abs(hi))
    for _ in range(256):
        if hi - lo <= tol:
            break
        mid = 0.5 * (lo + hi)
        gm = g(mid)
        if gm == 0.0:
            return mid
        if (gm > 0.0) == increasing:
            hi = mid
        else:
            lo = mid
    return 0.5 * (lo + hi)


def functional_symmetric_mean(m0: MeanFunction, m1: MeanFunction, *,
                              fast: bool = False) -> MeanFunction:
    """The functional symmetric of m1 with respect to m0, as a mean."""
    dom = m0.domain.intersect(m1.domain)
    if dom is None:
        raise DomainError(f"domains {m0.domain} and {m1.domain} do not overlap")
    return MeanFunction(
        f"sigma[{m0.name}]({m1.name})", dom,
        lambda x, y: functional_symmetric(m0, m1, x, y, fast=fast),
        maps_into_domain=True)


def sigma_closed_form(which: str, m: MeanFunction) -> MeanFunction:
    """Closed-form functional symmetric with respect to A, G or H.

    Solving the functional equation directly gives x + y - M for A,
    xy/M for G and xyM/((x+y)M - xy) for H; the latter two need a
    positive domain.
    """
    if which == "A":
        return MeanFunction(f"sigma[A]({m.name})", m.domain,
                            lambda x, y: x + y - m(x, y), maps_into_domain=True)
    if which not in ("G", "H"):
        raise ValueError(f"unknown closed form {which!r}; expected 'A', 'G' or 'H'")
    if m.domain.lo < 0.0:
        raise DomainError(f"sigma with respect to {which} needs a domain within (0, inf), "
                          f"got {m.domain}")
    if which == "G":
        return MeanFunction(f"sigma[G]({m.name})", m.domain,
                            lambda x, y: x * y / m(x, y), maps_into_domain=True)

    def harmonic_reflect(x: float, y: float) -> float:
        v = m(x, y)
        return x * y * v / ((x + y) * v - x * y)

    return MeanFunction(f"sigma[H]({m.name})", m.domain, harmonic_reflect,
                        maps_into_domain=True)


def agm_fixed_point_check(x: float, y: float, tolerance: float = 1e-10) -> bool:
    """Whether AGM(A(x,y), G(x,y)) equals AGM(x,y) to a relative tolerance.

    The coupled iteration started from (A(x,y), G(x,y)) is the original
    one shifted by a step, so equality is exact in real arithmetic.
    """
    if not (x > 0.0 and y > 0.0):
        raise DomainError("AGM arguments must be positive")
    agm = make_agm()
    a = make_arithmetic()
    g = make_geometric()
    reference = agm(x, y)
    shifted = agm(a(x, y), g(x, y))
    return abs(shifted - reference) <= tolerance * abs(reference)


def _probe_family(seed: int) -> list[MeanFunction]:
    rng = np.random.default_rng(seed)
    family = [make_arithmetic(), make_geometric(), make_harmonic()]
    family += [random_normal_mean(rng) for _ in range(2)]
    return family


class CoincidenceResult(NamedTuple):
    max_discrepancy: float
    worst_point: tuple[float, float]


def coincidence_probe(m: MeanFunction, window: Interval, samples: int,
                      seed: int = DEFAULT_SEED) -> CoincidenceResult:
    """Largest observed gap between the two reflections through ``m``.

    For test means T drawn from a fixed family (A, G, H and seeded normal
    means), compares the group reflection S_m(T) with the functional
    symmetric of T with respect to m on sampled points. Purely
    exploratory: a small discrepancy suggests the two symmetries agree
    for m, it proves nothing.
    """
    if m.is_monotone is not True:
        raise ValueError(f"{m.name} must be declared monotone for the functional solve")
    worst = 0.0
    worst_point = (window.lo, window.hi)
    pairs = sample_pairs(window, samples, seed, min_gap=1e-9)
    for test_mean in _probe_family(seed):
        dom = m.domain.intersect(test_mean.domain)
        if dom is None or not dom.contains_interval(window):
            raise DomainError(f"window {window} not inside the shared domain of "
                              f"{m.name} and {test_mean.name}")
        reflected = group_symmetry(m, test_mean)
        for x, y in pairs:
            x, y = float(x), float(y)
            s_val = reflected(x, y)
            f_val = functional_symmetric(m, test_mean, x, y)
            gap = abs(s_val - f_val)
            if gap > worst:
                worst = gap
                worst_point = (x, y)
    return CoincidenceResult(worst, worst_point)


class CounterexampleResult(NamedTuple):
    d_estimate: float
    compound_is_A: bool


def counterexample_check(window: Optional[Interval] = None, grid: int = 64,
                         samples: int = 100, seed: int = DEFAULT_SEED) -> CounterexampleResult:
    """Compound of a pair at the extreme distance 1 still converges, to A.

    The pair is G and its group inverse x + y - sqrt(xy): their distance
    estimate approaches 1 on wide windows (they sit diametrically opposed
    on the border), yet the coupled iteration preserves x + y and so
    converges to the arithmetic mean. Checks the limit against A on
    seeded sample pairs at relative tolerance 1e-9.
    """
    g = make_geometric()
    partner = group_inverse(g)
    win = window or Interval.closed(1e-6, 1e6)
    d_est = distance(g, partner, win, grid).value

    c = compound(g, partner, estimate_distance=False)
    a = make_arithmetic()
    is_a = True
    for x, y in sample_pairs(Interval.closed(0.1, 10.0), samples, seed):
        x, y = float(x), float(y)
        expect = a(x, y)
        if abs(c(x, y) - expect) > 1e-9 * max(1.0, abs(expect)):
            is_a = False
            break
    return CounterexampleResult(d_est, is_a)
