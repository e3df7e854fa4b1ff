"""Two-variable mean functions and a sampled verifier for the mean axioms.

A mean on an interval ``I`` is a map ``M : I x I -> R`` that is symmetric,
lies between its arguments, and touches an argument only on the diagonal:

    i)   M(x, y) == M(y, x)
    ii)  min(x, y) <= M(x, y) <= max(x, y)
    iii) M(x, y) == x  implies  x == y

Means are represented behaviorally: an evaluation callable plus metadata.
All values in this package are immutable and evaluation is pure, so means
are safe to share across threads.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Optional

import numpy as np
from scipy.stats import qmc

DEFAULT_SEED = 7

__all__ = [
    "DEFAULT_SEED",
    "DomainError",
    "InvalidMeanError",
    "NumericalError",
    "ConvergenceError",
    "BracketError",
    "Interval",
    "POSITIVE_REALS",
    "ALL_REALS",
    "MeanFunction",
    "AxiomReport",
    "make_arithmetic",
    "make_geometric",
    "make_harmonic",
    "verify_axioms",
    "default_window",
    "sample_pairs",
]


class DomainError(ValueError):
    """An evaluation point or window lies outside the declared domain."""


class InvalidMeanError(ValueError):
    """A claimed mean violated the mean axioms where validity was required."""


class NumericalError(RuntimeError):
    """Base class for runtime numerical failures (exit code 2 in the CLI)."""


class ConvergenceError(NumericalError):
    """An iteration did not converge; carries the recorded trace."""

    def __init__(self, message: str, trace=None):
        super().__init__(message)
        self.trace = trace


class BracketError(NumericalError):
    """A bracketing solver found no sign change over its bracket."""


@dataclass(frozen=True)
class Interval:
    """A nonempty, non-degenerate real interval with per-endpoint flags.

    ``lo``/``hi`` may be ``-inf``/``+inf``; infinite endpoints must be open.
    Point intervals are rejected at construction.
    """

    lo: float
    hi: float
    lo_closed: bool = False
    hi_closed: bool = False

    def __post_init__(self):
        lo, hi = float(self.lo), float(self.hi)
        object.__setattr__(self, "lo", lo)
        object.__setattr__(self, "hi", hi)
        if math.isnan(lo) or math.isnan(hi):
            raise ValueError("interval endpoints must not be NaN")
        if not lo < hi:
            raise ValueError(f"empty or degenerate interval [{lo}, {hi}]")
        if math.isinf(lo) and self.lo_closed:
            raise ValueError("-inf endpoint cannot be closed")
        if math.isinf(hi) and self.hi_closed:
            raise ValueError("+inf endpoint cannot be closed")

    @staticmethod
    def closed(lo: float, hi: float) -> "Interval":
        return Interval(lo, hi, lo_closed=True, hi_closed=True)

    @staticmethod
    def open(lo: float, hi: float) -> "Interval":
        return Interval(lo, hi)

    @property
    def bounded(self) -> bool:
        return math.isfinite(self.lo) and math.isfinite(self.hi)

    def contains(self, t: float) -> bool:
        if math.isnan(t):
            return False
        lo_ok = t > self.lo or (self.lo_closed and t == self.lo)
        hi_ok = t < self.hi or (self.hi_closed and t == self.hi)
        return lo_ok and hi_ok

    def contains_interval(self, other: "Interval") -> bool:
        """Whether every point of ``other`` lies in this interval."""
        if other.lo < self.lo or (other.lo == self.lo and other.lo_closed and not self.lo_closed):
            return False
        if other.hi > self.hi or (other.hi == self.hi and other.hi_closed and not self.hi_closed):
            return False
        return True

    def intersect(self, other: "Interval") -> Optional["Interval"]:
        """Intersection, or None when it is empty or a single point."""
        if self.lo > other.lo or (self.lo == other.lo and not self.lo_closed):
            lo, lo_closed = self.lo, self.lo_closed
        else:
            lo, lo_closed = other.lo, other.lo_closed
        if self.hi < other.hi or (self.hi == other.hi and not self.hi_closed):
            hi, hi_closed = self.hi, self.hi_closed
        else:
            hi, hi_closed = other.hi, other.hi_closed
        if not lo < hi:
            return None
        return Interval(lo, hi, lo_closed, hi_closed)

    def __str__(self) -> str:
        left = "[" if self.lo_closed else "("
        right = "]" if self.hi_closed else ")"
        return f"{left}{self.lo:g}, {self.hi:g}{right}"


POSITIVE_REALS = Interval(0.0, math.inf)
ALL_REALS = Interval(-math.inf, math.inf)


@dataclass(frozen=True)
class MeanFunction:
    """An evaluable symmetric two-variable function on a square domain.

    ``fn`` is only consulted off the diagonal; exactly equal arguments
    return ``x`` without calling user code, which keeps the diagonal exact.
    Metadata flags use None for "unknown".
    """

    name: str
    domain: Interval
    fn: Callable[[float, float], float] = field(repr=False)
    is_monotone: Optional[bool] = None
    is_continuous: Optional[bool] = None
    maps_into_domain: Optional[bool] = None

    def __call__(self, x: float, y: float) -> float:
        x = float(x)
        y = float(y)
        if not (self.domain.contains(x) and self.domain.contains(y)):
            raise DomainError(f"({x}, {y}) is outside the domain {self.domain} of {self.name}")
        if x == y:
            return x
        return self.fn(x, y)


def _arithmetic_eval(x: float, y: float) -> float:
    return (x + y) / 2.0


def _geometric_eval(x: float, y: float) -> float:
    return math.sqrt(x * y)


def _harmonic_eval(x: float, y: float) -> float:
    return 2.0 * x * y / (x + y)


def make_arithmetic() -> MeanFunction:
    """The arithmetic mean (x + y)/2 on all of R."""
    return MeanFunction("A", ALL_REALS, _arithmetic_eval,
                        is_monotone=True, is_continuous=True, maps_into_domain=True)


def make_geometric() -> MeanFunction:
    """The geometric mean sqrt(x*y) on (0, +inf)."""
    return MeanFunction("G", POSITIVE_REALS, _geometric_eval,
                        is_monotone=True, is_continuous=True, maps_into_domain=True)


def make_harmonic() -> MeanFunction:
    """The harmonic mean 2xy/(x + y) on (0, +inf)."""
    return MeanFunction("H", POSITIVE_REALS, _harmonic_eval,
                        is_monotone=True, is_continuous=True, maps_into_domain=True)


def is_builtin(m: MeanFunction, name: str) -> bool:
    """Identity-based recognition of the built-in A, G and H means."""
    table = {"A": _arithmetic_eval, "G": _geometric_eval, "H": _harmonic_eval}
    return table.get(name) is getattr(m, "fn", None)


def default_window(domain: Interval) -> Interval:
    """Bounded sampling window for a domain.

    Positive domains get [1e-6, 1e6]; domains reaching below zero get
    [-1e3, 1e3]; both are clipped into the domain, nudging inward at open
    finite endpoints.
    """
    if domain.lo >= 0.0:
        lo, hi = 1e-6, 1e6
    else:
        lo, hi = -1e3, 1e3
    lo = max(lo, domain.lo)
    hi = min(hi, domain.hi)
    if not lo < hi:
        # domain lies outside the target range; fall back to the domain itself
        lo = domain.lo if math.isfinite(domain.lo) else hi - 1e6
        hi = domain.hi if math.isfinite(domain.hi) else lo + 1e6
    if lo == domain.lo and not domain.lo_closed:
        lo += 1e-6 * (hi - lo)
    if hi == domain.hi and not domain.hi_closed:
        hi -= 1e-6 * (hi - lo)
    return Interval.closed(lo, hi)


def sample_pairs(window: Interval, n: int, seed: int = DEFAULT_SEED,
                 min_gap: float = 0.0) -> np.ndarray:
    """Deterministic quasi-random pairs in ``window``^2, shape (n, 2).

    ``min_gap`` discards pairs with |x - y| <= min_gap * max(1, |x|, |y|),
    which identity tests use to stay clear of diagonal cancellation.
    """
    if not window.bounded:
        raise DomainError("sampling window must be bounded")
    if n < 1:
        raise ValueError("need at least one sample")
    sampler = qmc.Halton(d=2, scramble=True, seed=seed)
    out = []
    drawn = 0
    while len(out) < n:
        if drawn > 1000 * (n + 64):
            raise ValueError(f"min_gap={min_gap} rejects almost every pair in {window}")
        block = sampler.random(max(n, 64))
        drawn += len(block)
        pts = window.lo + (window.hi - window.lo) * block
        for x, y in pts:
            if abs(x - y) > min_gap * max(1.0, abs(x), abs(y)):
                out.append((x, y))
                if len(out) == n:
                    break
    return np.array(out)


@dataclass(frozen=True)
class AxiomReport:
    """Outcome of sampling the three mean axioms.

    Counterexamples are (axiom, x, y, observed) tuples; a false flag always
    comes with at least one counterexample for its axiom.
    """

    axiom_i_ok: bool
    axiom_ii_ok: bool
    axiom_iii_ok: bool
    counterexamples: tuple
    samples_used: int

    @property
    def all_ok(self) -> bool:
        return self.axiom_i_ok and self.axiom_ii_ok and self.axiom_iii_ok


def verify_axioms(m: MeanFunction, window: Interval, samples: int,
                  seed: int = DEFAULT_SEED, *, eps_strict: float = 1e-10,
                  symmetry_tol: float = 1e-9,
                  betweenness_slack: float = 1e-12) -> AxiomReport:
    """Check the three mean axioms on seeded quasi-random pairs in ``window``^2.

    This is a sampled verifier, not a proof: the betweenness and symmetry
    checks allow floating-point slack, and the strictness check only flags
    |M(x,y) - x| < eps_strict when |x - y| > 100 * eps_strict. Results are
    deterministic for a fixed seed and independent of any partitioning of
    the sample set across workers.
    """
    if samples < 1:
        raise ValueError("samples must be >= 1")
    if not m.domain.contains_interval(window):
        raise DomainError(f"window {window} is not inside the domain {m.domain} of {m.name}")

    pairs = sample_pairs(window, samples, seed)
    i_ok = ii_ok = iii_ok = True
    counterexamples: list = []
    cap = 8  # per axiom, keeps reports small

    def note(axiom: str, x: float, y: float, observed: float) -> None:
        if sum(1 for c in counterexamples if c[0] == axiom) < cap:
            counterexamples.append((axiom, x, y, observed))

    for x, y in pairs:
        x, y = float(x), float(y)
        mxy = m(x, y)
        myx = m(y, x)
        scale = max(1.0, abs(x), abs(y))
        if abs(mxy - myx) > symmetry_tol * scale:
            i_ok = False
            note("i", x, y, mxy - myx)
        lo, hi = min(x, y), max(x, y)
        if mxy < lo - betweenness_slack * scale or mxy > hi + betweenness_slack * scale:
            ii_ok = False
            note("ii", x, y, mxy)
        if abs(x - y) > 100.0 * eps_strict:
            if abs(mxy - x) < eps_strict or abs(mxy - y) < eps_strict:
                iii_ok = False
                note("iii", x, y, mxy)
    return AxiomReport(i_ok, ii_ok, iii_ok, tuple(counterexamples), len(pairs))
