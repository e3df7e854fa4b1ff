"""The abelian group of means and its transport to asymmetric maps.

Every mean ``M`` determines an asymmetric map through the log-ratio
transform

    phi(M)(x, y) = log(-(M(x,y) - x) / (M(x,y) - y)),   phi(M)(x, x) = 0,

and this transform is a bijection onto the asymmetric maps, with inverse

    phi_inverse(f)(x, y) = (x + y * e^f(x,y)) / (e^f(x,y) + 1).

Pulling pointwise addition of asymmetric maps back through ``phi`` makes
the means an abelian group whose neutral element is the arithmetic mean.
This module implements the transform, the group law ``star``, group
inverses and reflections, and the normal means built from positive weight
functions, together with the weight-ratio comparison test.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np

from .core import (
    DomainError,
    Interval,
    InvalidMeanError,
    MeanFunction,
    POSITIVE_REALS,
    is_builtin,
    make_arithmetic,
)

__all__ = [
    "AsymmetricFunction",
    "WeightFunction",
    "OrderRelation",
    "phi",
    "phi_inverse",
    "star",
    "group_inverse",
    "group_symmetry",
    "make_normal_mean",
    "random_normal_mean",
    "compare_normal",
    "classify_vs_arithmetic",
]

# Relative half-width of the diagonal guard band used by phi and by the
# closed forms whose factors vanish on the diagonal.
_DIAG_GUARD = 1e-12

# Beyond this magnitude e^f saturates the mean at an endpoint.
_EXP_CLIP = 700.0


def _near_diagonal(x: float, y: float) -> bool:
    return abs(x - y) <= _DIAG_GUARD * max(1.0, abs(x), abs(y))


@dataclass(frozen=True)
class AsymmetricFunction:
    """An evaluable map with f(x, y) = -f(y, x) on a square domain."""

    domain: Interval
    fn: Callable[[float, float], float] = field(repr=False)
    name: str = "f"

    def __call__(self, x: float, y: float) -> float:
        x, y = float(x), float(y)
        if not (self.domain.contains(x) and self.domain.contains(y)):
            raise DomainError(f"({x}, {y}) is outside the domain {self.domain} of {self.name}")
        if x == y:
            return 0.0
        return self.fn(x, y)

    def _combine(self, other: "AsymmetricFunction", cx: float, co: float,
                 name: str) -> "AsymmetricFunction":
        dom = self.domain.intersect(other.domain)
        if dom is None:
            raise DomainError(f"domains {self.domain} and {other.domain} do not overlap")
        f, g = self, other
        return AsymmetricFunction(dom, lambda x, y: cx * f(x, y) + co * g(x, y), name)

    def __add__(self, other: "AsymmetricFunction") -> "AsymmetricFunction":
        return self._combine(other, 1.0, 1.0, f"({self.name}+{other.name})")

    def __sub__(self, other: "AsymmetricFunction") -> "AsymmetricFunction":
        return self._combine(other, 1.0, -1.0, f"({self.name}-{other.name})")

    def __neg__(self) -> "AsymmetricFunction":
        f = self
        return AsymmetricFunction(self.domain, lambda x, y: -f(x, y), f"(-{self.name})")

    def __rmul__(self, c: float) -> "AsymmetricFunction":
        f = self
        c = float(c)
        return AsymmetricFunction(self.domain, lambda x, y: c * f(x, y), f"({c:g}*{self.name})")


@dataclass(frozen=True)
class WeightFunction:
    """A positive function of one variable; defines a normal mean."""

    domain: Interval
    fn: Callable[[float], float] = field(repr=False)
    name: str = "P"

    def __call__(self, t: float) -> float:
        t = float(t)
        if not self.domain.contains(t):
            raise DomainError(f"{t} is outside the domain {self.domain} of weight {self.name}")
        return self.fn(t)


class OrderRelation(enum.Enum):
    LESS_OR_EQUAL = "<="
    STRICTLY_LESS = "<"
    GREATER_OR_EQUAL = ">="
    STRICTLY_GREATER = ">"
    EQUAL = "=="
    INCOMPARABLE = "incomparable"


def phi(m: MeanFunction) -> AsymmetricFunction:
    """Log-ratio transform of a mean into an asymmetric map.

    Off the diagonal the mean axioms make -(M - x)/(M - y) strictly
    positive; a value of M equal to x or y (or outside [min, max]) is an
    axiom violation and raises InvalidMeanError. Within a relative band of
    1e-12 around the diagonal the value 0 is returned without evaluating M.
    """
    def fn(x: float, y: float) -> float:
        if _near_diagonal(x, y):
            return 0.0
        v = m(x, y)
        p = v - x
        q = v - y
        if p == 0.0 or q == 0.0 or (p > 0.0) == (q > 0.0):
            raise InvalidMeanError(
                f"{m.name}({x}, {y}) = {v} is not strictly between its arguments")
        return math.log(-p / q)

    return AsymmetricFunction(m.domain, fn, name=f"phi({m.name})")


def phi_inverse(f: AsymmetricFunction, name: Optional[str] = None) -> MeanFunction:
    """Mean with log-ratio transform ``f``.

    For |f| > 700 the exponential saturates and the exact limit value
    (y for +inf, x for -inf) is returned.
    """
    def fn(x: float, y: float) -> float:
        v = f(x, y)
        if v > _EXP_CLIP:
            return y
        if v < -_EXP_CLIP:
            return x
        e = math.exp(v)
        return (x + y * e) / (e + 1.0)

    return MeanFunction(name or f"phi_inv({f.name})", f.domain, fn, maps_into_domain=True)


def _common_domain(m1: MeanFunction, m2: MeanFunction) -> Interval:
    dom = m1.domain.intersect(m2.domain)
    if dom is None:
        raise DomainError(f"domains {m1.domain} and {m2.domain} do not overlap")
    return dom


def star(m1: MeanFunction, m2: MeanFunction) -> MeanFunction:
    """Group law on means: phi_inverse(phi(m1) + phi(m2)).

    Evaluated through the equivalent closed form

        [x (M1-y)(M2-y) + y (M1-x)(M2-x)] / [(M1-y)(M2-y) + (M1-x)(M2-x)],

    whose two denominator terms are both positive off the diagonal, so no
    cancellation occurs. Both operands are evaluated once per point.
    """
    dom = _common_domain(m1, m2)

    def fn(x: float, y: float) -> float:
        if _near_diagonal(x, y):
            return 0.5 * (x + y)
        a = m1(x, y)
        b = m2(x, y)
        w_y = (a - y) * (b - y)
        w_x = (a - x) * (b - x)
        return (x * w_y + y * w_x) / (w_y + w_x)

    return MeanFunction(f"({m1.name}*{m2.name})", dom, fn)


def group_inverse(m: MeanFunction) -> MeanFunction:
    """Inverse for the group law: the mean x + y - M with phi = -phi(M)."""
    def fn(x: float, y: float) -> float:
        return x + y - m(x, y)

    return MeanFunction(f"(2A-{m.name})", m.domain, fn, maps_into_domain=True)


def group_symmetry(m0: MeanFunction, m1: MeanFunction) -> MeanFunction:
    """Reflection of m1 through m0 in the group: phi_inverse(2 phi(m0) - phi(m1)).

    When m0 is recognized as a built-in the short closed forms are used
    (x + y - M for A, xy/M for G, xyM/((x+y)M - xy) for H), which behave
    better near the diagonal than the general rational form.
    """
    dom = _common_domain(m0, m1)

    if is_builtin(m0, "A"):
        def fn(x, y):
            return x + y - m1(x, y)
    elif is_builtin(m0, "G"):
        def fn(x, y):
            return x * y / m1(x, y)
    elif is_builtin(m0, "H"):
        def fn(x, y):
            v = m1(x, y)
            return x * y * v / ((x + y) * v - x * y)
    else:
        def fn(x, y):
            if _near_diagonal(x, y):
                return 0.5 * (x + y)
            v0 = m0(x, y)
            v1 = m1(x, y)
            # both denominator terms have the same sign off the diagonal
            a = (v1 - x) * (v0 - y) ** 2
            b = (v0 - x) ** 2 * (v1 - y)
            return (x * a - y * b) / (a - b)

    return MeanFunction(f"S[{m0.name}]({m1.name})", dom, fn)


def make_normal_mean(p: WeightFunction, name: Optional[str] = None) -> MeanFunction:
    """Normal mean (x P(x) + y P(y)) / (P(x) + P(y)) for a positive weight."""
    def fn(x: float, y: float) -> float:
        px = p(x)
        py = p(y)
        if not (px > 0.0 and py > 0.0) or math.isinf(px) or math.isinf(py):
            bad = x if not (px > 0.0 and math.isfinite(px)) else y
            raise InvalidMeanError(f"weight {p.name} is not positive and finite at {bad}")
        return (x * px + y * py) / (px + py)

    return MeanFunction(name or f"normal({p.name})", p.domain, fn,
                        is_continuous=None, maps_into_domain=True)


def random_normal_mean(rng: np.random.Generator, name: Optional[str] = None) -> MeanFunction:
    """A seeded random normal mean on (0, inf), weight t^a (1+t)^b."""
    a = float(rng.uniform(-1.0, 1.0))
    b = float(rng.uniform(-1.0, 1.0))
    weight = WeightFunction(POSITIVE_REALS, lambda t: t ** a * (1.0 + t) ** b,
                            name=f"t^{a:.3f}(1+t)^{b:.3f}")
    return make_normal_mean(weight, name=name or f"N[{a:.3f},{b:.3f}]")


def _classify_ratio(values: np.ndarray, rel_tol: float = 1e-10) -> OrderRelation:
    """Monotonicity class of a sampled sequence, with a flatness band.

    Consecutive differences within rel_tol (relative to the larger
    neighbour) count as flat; mixed rising and falling beyond the band is
    INCOMPARABLE. The sequence is read as the weight ratio P1/P2, so a
    falling ratio means the first mean is the smaller one.
    """
    diffs = np.diff(values)
    scale = np.maximum(1e-300, np.maximum(np.abs(values[1:]), np.abs(values[:-1])))
    up = bool(np.any(diffs > rel_tol * scale))
    down = bool(np.any(diffs < -rel_tol * scale))
    flat = bool(np.any(np.abs(diffs) <= rel_tol * scale))
    if up and down:
        return OrderRelation.INCOMPARABLE
    if not up and not down:
        return OrderRelation.EQUAL
    if down:
        return OrderRelation.LESS_OR_EQUAL if flat else OrderRelation.STRICTLY_LESS
    return OrderRelation.GREATER_OR_EQUAL if flat else OrderRelation.STRICTLY_GREATER


def compare_normal(p1: WeightFunction, p2: WeightFunction, window: Interval,
                   samples: int = 256) -> OrderRelation:
    """Order of the normal means of p1 and p2, from the ratio p1/p2.

    The ratio is sampled on a sorted grid over ``window``; a non-increasing
    ratio means M1 <= M2 everywhere, strictly decreasing means M1 < M2 off
    the diagonal, and symmetrically for the other direction. A constant
    ratio means the means are equal (weights are defined up to a positive
    factor), and mixed behavior returns INCOMPARABLE.
    """
    if samples < 2:
        raise ValueError("need at least two samples to compare")
    for p in (p1, p2):
        if not p.domain.contains_interval(window):
            raise DomainError(f"window {window} is not inside the domain of weight {p.name}")
    grid = np.linspace(window.lo, window.hi, samples)
    ratio = np.array([p1(float(t)) / p2(float(t)) for t in grid])
    return _classify_ratio(ratio)


def classify_vs_arithmetic(p: WeightFunction, window: Interval,
                           samples: int = 256) -> OrderRelation:
    """Position of the normal mean of ``p`` relative to the arithmetic mean.

    The arithmetic mean has constant weight, so this is compare_normal
    against the weight 1: a decreasing p gives a strictly sub-arithmetic
    mean, an increasing p a strictly super-arithmetic one.
    """
    one = WeightFunction(make_arithmetic().domain, lambda t: 1.0, name="1")
    return compare_normal(p, one, window, samples)
