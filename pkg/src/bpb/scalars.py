"""Scalar modes and exact threshold comparisons.

Exact mode keeps every value a ``fractions.Fraction`` and decides all
comparisons exactly, including comparisons against irrational thresholds of
the shape ``offset + coeff*sqrt(radicand)`` (see :class:`Surd`), which is the
only irrational shape the repair bounds ever need.  Approx mode works in
binary64 with one global slack ``tau``: every strict test ``x > t`` becomes
``x > t + tau`` so borderline inputs fail conservatively.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction

EXACT = "exact"
APPROX = "approx"

DEFAULT_TAU = 1e-12


def _sign(x):
    return (x > 0) - (x < 0)


@dataclass(frozen=True)
class Surd:
    """The value ``offset + coeff*sqrt(radicand)``, radicand >= 0.

    Supports the small amount of arithmetic the selection lemma needs
    (subtraction from a rational, division of a rational by a Surd, rational
    scaling); all of it stays inside the same quadratic extension.
    Comparisons against rational numbers are exact.
    """

    offset: Fraction
    coeff: Fraction
    radicand: Fraction

    def __post_init__(self):
        if self.radicand < 0:
            raise ValueError("negative radicand")

    def __float__(self):
        return float(self.offset) + float(self.coeff) * math.sqrt(float(self.radicand))

    def __rsub__(self, other):
        return Surd(other - self.offset, -self.coeff, self.radicand)

    def __mul__(self, other):
        return Surd(self.offset * other, self.coeff * other, self.radicand)

    __rmul__ = __mul__

    def __rtruediv__(self, other):
        # other / (a + b*sqrt(r)) rationalized by the conjugate.
        a, b, r = self.offset, self.coeff, self.radicand
        den = a * a - b * b * r
        if den == 0:
            raise ZeroDivisionError("surd has rational norm zero")
        return Surd(other * a / den, -other * b / den, r)

    # Rich comparisons against rational numbers (reflected forms cover
    # `rational < surd` etc., since Fraction returns NotImplemented).
    def __lt__(self, other):
        return surd_cmp(other, self) > 0

    def __le__(self, other):
        return surd_cmp(other, self) >= 0

    def __gt__(self, other):
        return surd_cmp(other, self) < 0

    def __ge__(self, other):
        return surd_cmp(other, self) <= 0


def surd_cmp(x, s):
    """Exact sign of ``x - s`` for rational x and Surd s."""
    d = x - s.offset
    c, r = s.coeff, s.radicand
    if c == 0 or r == 0:
        return _sign(d)
    if c > 0:
        if d < 0:
            return -1
        return _sign(d * d - c * c * r)
    if d >= 0:
        return 1
    return _sign(c * c * r - d * d)


@dataclass(frozen=True)
class Context:
    """Carries the scalar mode and comparison slack for one computation."""

    mode: str = EXACT
    tau: float = DEFAULT_TAU

    @property
    def is_exact(self):
        return self.mode == EXACT

    def convert(self, x):
        """Coerce a parsed rational into this context's scalar type."""
        if self.is_exact:
            return x if isinstance(x, Fraction) else Fraction(x)
        return float(x)

    def sqrt_bound(self, coeff, radicand, offset=0):
        """The threshold ``offset + coeff*sqrt(radicand)`` in this mode."""
        if self.is_exact:
            return Surd(Fraction(offset), Fraction(coeff), Fraction(radicand))
        return offset + coeff * math.sqrt(radicand)

    def cmp(self, x, t):
        """Sign of ``x - t``; in approx mode 0 within the tau deadband."""
        if self.is_exact:
            if isinstance(t, Surd):
                return surd_cmp(x, t)
            return _sign(x - t)
        d = float(x) - float(t)
        if abs(d) <= self.tau:
            return 0
        return _sign(d)

    def gt(self, x, t):
        return self.cmp(x, t) > 0

    def lt(self, x, t):
        return self.cmp(x, t) < 0

    def ge(self, x, t):
        return self.cmp(x, t) >= 0

    def le(self, x, t):
        return self.cmp(x, t) <= 0

    def eq(self, x, t):
        return self.cmp(x, t) == 0


EXACT_CONTEXT = Context(EXACT)
APPROX_CONTEXT = Context(APPROX)


def context_for(mode, tau=DEFAULT_TAU):
    if mode not in (EXACT, APPROX):
        raise ValueError(f"unknown scalar mode {mode!r}")
    return Context(mode, tau)


def parse_scalar(text, ctx=EXACT_CONTEXT):
    """Parse a 'p/q' or decimal literal into the context's scalar type."""
    return ctx.convert(Fraction(str(text)))


def format_scalar(x):
    """Canonical text form: lowest-terms 'p/q' for rationals, repr for floats."""
    if isinstance(x, Fraction):
        return str(x)
    if isinstance(x, int):
        return str(x)
    return repr(float(x))
