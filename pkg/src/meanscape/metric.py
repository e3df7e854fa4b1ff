"""A metric on means: the worst slope of the difference between two means.

    d(M1, M2) = sup over x != y of |M1(x,y) - M2(x,y)| / |x - y|.

Betweenness pins every mean within |x - y| of any other, so d <= 1, and
d(M, A) <= 1/2 for all M: the whole space is the closed ball of radius 1/2
around the arithmetic mean. A mean sits on the border of that ball exactly
when its log-ratio transform is unbounded above.

Sups over a continuum are not computable, so every estimator here reports
a certified lower bound: the best value actually evaluated on a coarse
grid over a bounded window, sharpened by coordinate-wise golden-section
refinement around the best cell. The window is always part of the result.

Grid evaluation is embarrassingly parallel and the refinement stage is
sequential; results depend only on (window, grid), never on scheduling.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, NamedTuple, Sequence

import numpy as np

from .core import DomainError, Interval, MeanFunction, is_builtin
from .algebra import phi

__all__ = [
    "DistanceEstimate",
    "BorderDiagnostic",
    "distance",
    "distance_via_phi",
    "distance_to_arithmetic",
    "border_diagnostic",
    "distance_gh_certificate",
    "golden_section_max",
]

# Relative half-width of the excluded band around the diagonal, where the
# difference quotient is 0/0.
_DIAG_BAND = 1e-9

# Above this sup estimate the distance-to-A formula saturates at 1/2.
_EXP_SAT = 700.0

_INV_PHI = (math.sqrt(5.0) - 1.0) / 2.0


def golden_section_max(f: Callable[[float], float], a: float, b: float,
                       rel_tol: float = 1e-10, max_iter: int = 200) -> tuple[float, float]:
    """Maximize a unimodal function on [a, b] by golden-section search.

    Returns (x, f(x)) for the best point actually evaluated, endpoints
    included, so the value is a certified lower bound of the maximum.
    """
    if b < a:
        a, b = b, a
    best_x, best_v = a, f(a)
    fb = f(b)
    if fb > best_v:
        best_x, best_v = b, fb
    h = b - a
    c = b - _INV_PHI * h
    d = a + _INV_PHI * h
    fc, fd = f(c), f(d)
    for _ in range(max_iter):
        if fc > best_v:
            best_x, best_v = c, fc
        if fd > best_v:
            best_x, best_v = d, fd
        if h <= rel_tol * max(1.0, abs(a), abs(b)):
            break
        if fc >= fd:
            b, d, fd = d, c, fc
            h = b - a
            c = b - _INV_PHI * h
            fc = f(c)
        else:
            a, c, fc = c, d, fd
            h = b - a
            d = a + _INV_PHI * h
            fd = f(d)
    return best_x, best_v


@dataclass(frozen=True)
class DistanceEstimate:
    """A certified lower bound for a sup over a bounded window.

    ``value`` lies in [0, 1]; ``argmax`` is the off-diagonal point where it
    was attained; ``refined`` records whether golden-section refinement ran
    after the grid stage.
    """

    value: float
    argmax: tuple[float, float]
    window: Interval
    refined: bool
    grid_size: int


@dataclass(frozen=True)
class BorderDiagnostic:
    """Trend of sup phi(M) across nested windows.

    ``trend`` is "growing" only when the estimate strictly increased at
    every enlargement; border membership itself (sup = +inf) is not
    decidable numerically and is never asserted.
    """

    sup_f_estimate: float
    windows_tested: tuple[Interval, ...]
    sup_per_window: tuple[float, ...]
    trend: str


def _axis_points(window: Interval, n: int) -> tuple[np.ndarray, bool]:
    """Grid points over a window, log-spaced when it sits in (0, inf)."""
    if window.lo > 0.0:
        return np.geomspace(window.lo, window.hi, n), True
    return np.linspace(window.lo, window.hi, n), False


def _sup2d(f: Callable[[float, float], float], window: Interval, grid: int,
           refine_tol: float = 1e-10) -> tuple[float, tuple[float, float], bool]:
    """Grid + coordinate-wise golden-section estimate of sup f over window^2.

    ``f`` may return -inf to mask points (the diagonal band). The returned
    value is the best point actually evaluated.
    """
    pts, log_spaced = _axis_points(window, grid)
    best_v = -math.inf
    bi = bj = 0
    for i, x in enumerate(pts):
        for j, y in enumerate(pts):
            v = f(float(x), float(y))
            if v > best_v:
                best_v, bi, bj = v, i, j
    if not math.isfinite(best_v):
        raise DomainError("no admissible grid points in the window")

    # refine around the best cell, working in log coordinates when the
    # grid is log-spaced so the tolerance is relative
    if log_spaced:
        coords = np.log(pts)
        def eval_at(u, w):
            return f(math.exp(u), math.exp(w))
    else:
        coords = pts
        eval_at = f
    ax, bx = coords[max(bi - 1, 0)], coords[min(bi + 1, grid - 1)]
    ay, by = coords[max(bj - 1, 0)], coords[min(bj + 1, grid - 1)]
    u, w = coords[bi], coords[bj]
    val = best_v
    for _ in range(3):
        u, vx = golden_section_max(lambda s: eval_at(s, w), ax, bx, refine_tol)
        w, vy = golden_section_max(lambda s: eval_at(u, s), ay, by, refine_tol)
        val = max(val, vx, vy)
    if log_spaced:
        u, w = math.exp(u), math.exp(w)
    if val > best_v:
        arg = (float(u), float(w))
    else:
        arg = (float(pts[bi]), float(pts[bj]))
    return max(val, best_v), arg, True


def _check_window(m1: MeanFunction, m2: MeanFunction | None, window: Interval,
                  grid: int) -> None:
    if grid < 8:
        raise ValueError("grid must be >= 8")
    if not window.bounded:
        raise DomainError("window must be bounded")
    for m in (m1, m2) if m2 is not None else (m1,):
        if not m.domain.contains_interval(window):
            raise DomainError(f"window {window} is not inside the domain {m.domain} of {m.name}")


def _gh_slope(t: float) -> float:
    """Slope profile of G against H along the ratio coordinate t = sqrt(x/y)."""
    return (t * t - t) / ((t + 1.0) * (t * t + 1.0))


def distance(m1: MeanFunction, m2: MeanFunction, window: Interval,
             grid: int = 64) -> DistanceEstimate:
    """Lower-bound estimate of d(m1, m2) over a bounded window.

    The signed quotient (M1 - M2)/(x - y) suffices: it is asymmetric, so
    its sup over the square window equals the sup of its absolute value.
    Points with |x - y| <= 1e-9 * max(1, |x|, |y|) are excluded. The pair
    (G, H) is homogeneous and reduces to a one-dimensional search along
    the ratio coordinate, which is used when both operands are the
    built-ins.
    """
    _check_window(m1, m2, window, grid)

    gh = (is_builtin(m1, "G") and is_builtin(m2, "H")) or \
         (is_builtin(m1, "H") and is_builtin(m2, "G"))
    if gh and window.lo > 0.0:
        t_max = math.sqrt(window.hi / window.lo)
        u, v = golden_section_max(lambda s: _gh_slope(math.exp(s)), 0.0, math.log(t_max), 1e-12)
        t = math.exp(u)
        c = math.sqrt(window.lo * window.hi)
        return DistanceEstimate(v, (c * t, c / t), window, True, grid)

    def quotient(x: float, y: float) -> float:
        if abs(x - y) <= _DIAG_BAND * max(1.0, abs(x), abs(y)):
            return -math.inf
        return (m1(x, y) - m2(x, y)) / (x - y)

    value, arg, refined = _sup2d(quotient, window, grid)
    return DistanceEstimate(value, arg, window, refined, grid)


def _logistic(f: float) -> float:
    """1 / (1 + e^f), computed without overflow."""
    if f >= 0.0:
        t = math.exp(-f)
        return t / (1.0 + t)
    return 1.0 / (1.0 + math.exp(f))


def distance_via_phi(m1: MeanFunction, m2: MeanFunction, window: Interval,
                     grid: int = 64) -> DistanceEstimate:
    """Distance estimate through the log-ratio transforms of the operands.

    The difference quotient of two means rewrites exactly as

        (e^f1 - e^f2) / ((e^f1 + 1)(e^f2 + 1))
            = 1/(1 + e^f2) - 1/(1 + e^f1),

    with f1, f2 the transforms of the operands; the sup of this expression
    over the square window is the same distance, with no diagonal
    singularity to dodge.
    """
    _check_window(m1, m2, window, grid)
    f1 = phi(m1)
    f2 = phi(m2)

    def integrand(x: float, y: float) -> float:
        return _logistic(f2(x, y)) - _logistic(f1(x, y))

    value, arg, refined = _sup2d(integrand, window, grid)
    return DistanceEstimate(value, arg, window, refined, grid)


def _sup_phi(m: MeanFunction, window: Interval, grid: int) -> tuple[float, tuple[float, float]]:
    f = phi(m)
    value, arg, _ = _sup2d(lambda x, y: f(x, y), window, grid)
    return value, arg


def distance_to_arithmetic(m: MeanFunction, window: Interval,
                           grid: int = 64) -> DistanceEstimate:
    """d(M, A) through the bound s = sup phi(M): the distance is
    (e^s - 1) / (2(e^s + 1)), saturating at 1/2 for s above 700."""
    _check_window(m, None, window, grid)
    s, arg = _sup_phi(m, window, grid)
    if s > _EXP_SAT:
        value = 0.5
    else:
        value = 0.5 * math.tanh(0.5 * s)
    return DistanceEstimate(value, arg, window, True, grid)


def border_diagnostic(m: MeanFunction, windows: Sequence[Interval],
                      grid: int = 48) -> BorderDiagnostic:
    """sup phi(M) across nested, increasing windows, with a trend verdict.

    Windows must be nested (each contains the previous). The verdict is
    "growing" when every enlargement strictly increased the estimate,
    "bounded" when the estimates are flat, and "inconclusive" otherwise.
    """
    if len(windows) < 1:
        raise ValueError("need at least one window")
    for small, large in zip(windows, windows[1:]):
        if not large.contains_interval(small):
            raise DomainError(f"windows are not nested: {large} does not contain {small}")

    sups = [_sup_phi(m, w, grid)[0] for w in windows]
    eps = 1e-9 * max(1.0, abs(sups[-1]))
    diffs = [b - a for a, b in zip(sups, sups[1:])]
    if diffs and all(d > eps for d in diffs):
        trend = "growing"
    elif all(abs(d) <= eps for d in diffs):
        trend = "bounded"
    else:
        trend = "inconclusive"
    return BorderDiagnostic(sups[-1], tuple(windows), tuple(sups), trend)


class GhCertificate(NamedTuple):
    value: float
    quartic_residual: float
    argmax_t: float


def distance_gh_certificate() -> GhCertificate:
    """Certified estimate of d(G, H) with an algebraic cross-check.

    Maximizes the ratio-coordinate slope profile (t^2 - t)/((t+1)(t^2+1))
    over t > 0 by golden-section on log t, and evaluates the degree-4
    polynomial v^4 + 10v^3 + 3v^2 - 14v + 2 at the maximum as a residual.
    """
    u, value = golden_section_max(lambda s: _gh_slope(math.exp(s)),
                                  0.0, math.log(1e6), 1e-12)
    t = math.exp(u)
    v = value
    residual = abs(v ** 4 + 10.0 * v ** 3 + 3.0 * v ** 2 - 14.0 * v + 2.0)
    return GhCertificate(value, residual, t)
