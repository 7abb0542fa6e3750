"""Finite atomic measure spaces, L1 densities, and the basic isometries."""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AlignmentError, DegenerateRestrictionError
from .scalars import EXACT_CONTEXT


@dataclass(frozen=True)
class MeasureSpace:
    """A finite list of strictly positive atom weights."""

    weights: tuple

    def __post_init__(self):
        object.__setattr__(self, "weights", tuple(self.weights))
        if not self.weights:
            raise ValueError("measure space needs at least one atom")
        for i, w in enumerate(self.weights):
            if not w > 0:
                raise ValueError(f"nonpositive atom weight at index {i}")

    @property
    def size(self):
        return len(self.weights)


@dataclass(frozen=True)
class Density:
    """An L1 element given by one real value per atom."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))


@dataclass(frozen=True)
class SignVector:
    """A +/-1 factor per atom; applying it twice is the identity."""

    signs: tuple

    def __post_init__(self):
        object.__setattr__(self, "signs", tuple(self.signs))
        for s in self.signs:
            if s not in (1, -1):
                raise ValueError("signs must be +1 or -1")


def check_aligned(space, f):
    if len(f.values) != space.size:
        raise AlignmentError(
            f"density has {len(f.values)} entries but space has {space.size} atoms"
        )


def l1_norm(space, f):
    """Weighted L1 norm: sum of weight_i * |f_i|."""
    check_aligned(space, f)
    return sum(w * abs(v) for w, v in zip(space.weights, f.values))


def l1_distance(space, f, g):
    check_aligned(space, f)
    check_aligned(space, g)
    return sum(w * abs(a - b) for w, a, b in zip(space.weights, f.values, g.values))


def _sign_of(v):
    # Zero entries get sign +1, which keeps sign_normalize total.
    return -1 if v < 0 else 1


def sign_normalize(f):
    """Split f into a sign isometry and its entrywise absolute value."""
    signs = tuple(_sign_of(v) for v in f.values)
    absf = tuple(abs(v) for v in f.values)
    return SignVector(signs), Density(absf)


def apply_signs(sv, f):
    """Multiply a density entrywise by a sign vector (an involution)."""
    if len(sv.signs) != len(f.values):
        raise AlignmentError("sign vector and density have different lengths")
    return Density(tuple(s * v for s, v in zip(sv.signs, f.values)))


def support(f):
    """Indices of the nonzero entries."""
    return tuple(i for i, v in enumerate(f.values) if v != 0)


def band_project(space, band, f):
    """Split f into its parts inside and outside an atom set.

    The split is norm-additive: ||f|| = ||inside|| + ||outside|| exactly.
    """
    check_aligned(space, f)
    band = frozenset(band)
    for i in band:
        if not 0 <= i < space.size:
            raise IndexError(f"atom index {i} out of range")
    inside = tuple(v if i in band else 0 * v for i, v in enumerate(f.values))
    outside = tuple(0 * v if i in band else v for i, v in enumerate(f.values))
    return Density(inside), Density(outside)


def restrict_normalize(space, f, band, ctx=EXACT_CONTEXT):
    """Restrict f to an atom set and rescale to unit norm."""
    inside, _ = band_project(space, band, f)
    mass = l1_norm(space, inside)
    if not ctx.gt(mass, 0):
        raise DegenerateRestrictionError("zero mass on restriction set")
    return Density(tuple(v / mass for v in inside.values))
