"""Convex-series selection: the index set where the values beat a cutoff.

Given a convex combination sum(alpha_i * c_i) > 1 - eta with |c_i| <= 1, the
indices with c_i > r retain total weight at least 1 - eta/(1 - r).  Every
repair pipeline uses this to discard the part of a decomposition that drags
the pairing down.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import InvariantViolationError, PreconditionError
from .scalars import EXACT_CONTEXT


@dataclass(frozen=True)
class SelectionResult:
    indices: tuple  # positions into the input lists, 0-based
    mass: object  # sum of alpha over the selected positions
    bound: object  # the guaranteed lower bound 1 - eta/(1-r)


def convex_series_select(alpha, c, eta, r, ctx=EXACT_CONTEXT):
    """Select A = {i : c_i > r} and certify its retained mass.

    The cutoff r may be rational or a Surd such as 1 - sqrt(eps); ties
    c_i == r are excluded.  Raises PreconditionError naming the first
    hypothesis that fails.
    """
    alpha = tuple(alpha)
    c = tuple(c)
    if len(alpha) != len(c):
        raise PreconditionError("alpha and c have different lengths")
    for i, a in enumerate(alpha):
        if not ctx.ge(a, 0):
            raise PreconditionError(f"alpha[{i}] >= 0 fails: {a}")
    total = sum(alpha)
    if not ctx.eq(total, 1):
        raise PreconditionError(f"sum(alpha) = 1 fails: {total}")
    for i, v in enumerate(c):
        if not ctx.le(abs(v), 1):
            raise PreconditionError(f"|c[{i}]| <= 1 fails: {v}")
    if not (ctx.lt(0, r) and ctx.gt(1, r)):
        raise PreconditionError(f"0 < r < 1 fails: {r}")
    pairing = sum(a * v for a, v in zip(alpha, c))
    if not ctx.gt(pairing, 1 - eta):
        raise PreconditionError(
            f"sum(alpha*c) > 1 - eta fails: {pairing} <= 1 - {eta}"
        )

    indices = tuple(i for i, v in enumerate(c) if ctx.gt(v, r))
    mass = sum(alpha[i] for i in indices) if indices else 0 * total
    bound = 1 - eta / (1 - r)
    if not ctx.ge(mass, bound):
        raise InvariantViolationError(
            f"selected mass {mass} fell below the guaranteed bound {bound}"
        )
    return SelectionResult(indices, mass, bound)
