"""Repair of near-attaining L1 -> Linf kernel operators.

The attainment-set construction takes a cell set M on the product of domain
atoms and codomain points together with a nonnegative unit density whose
image under the indicator kernel of M nearly reaches 1 somewhere, and builds
a nearby density that the indicator kernel sends exactly to 1 -- robustly, in
the sense that adding any contraction vanishing on M cannot spoil the
attainment.  The full pipeline selects a witness point, keeps the kernel
cells whose (sign-adjusted) values sit within eps^2/2 of 1, feeds that cell
set to the attainment construction, and snaps the kept cells to the exact
sign, landing within (10*eps, 2*eps) of the input pair.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import GateError, InvariantViolationError, PreconditionError
from .operators import (
    SupKernel,
    apply_l1linf,
    conjugate_sup,
    operator_distance,
    sup_image_norm,
    sup_norm,
)
from .report import AttainAtomWitness, RepairReport
from .scalars import EXACT_CONTEXT
from .selection import convex_series_select
from .spaces import (
    Density,
    MeasureSpace,
    apply_signs,
    check_aligned,
    l1_distance,
    l1_norm,
    sign_normalize,
    support,
)


def l1linf_gate(eps):
    """Entry threshold of the full pipeline: 1 - eps^8."""
    return 1 - eps**8


@dataclass(frozen=True)
class AttainmentSetWitness:
    """Output of the attainment-set construction."""

    g0: Density
    y0: int  # codomain point where the indicator kernel sends g0 to 1
    H_sets: tuple  # pairs (support atom j, atoms of H_j at y0)
    J: tuple  # support atoms selected into g0


def _sign_of(v):
    return -1 if v < 0 else 1


def _argmax_abs(values):
    best, at = None, 0
    for i, v in enumerate(values):
        if best is None or abs(v) > best:
            best, at = abs(v), i
    return at


def indicator_kernel(space: MeasureSpace, codomain_size: int, cells):
    """SupKernel whose matrix is the 0/1 indicator of a product-cell set."""
    cells = frozenset(cells)
    rows = tuple(
        tuple(1 if (i, t) in cells else 0 for t in range(codomain_size))
        for i in range(space.size)
    )
    return SupKernel(rows, space, codomain_size)


def density_point_attain(space, codomain_size, cells, f0, eps, ctx=EXACT_CONTEXT):
    """Build a unit density that the indicator kernel of `cells` maps to 1.

    Requires f0 nonnegative unit with ||chi_M f0||_inf > 1 - eps.  The output
    g0 satisfies ||f0 - g0|| < 4*sqrt(eps), (chi_M g0)(y0) = 1 exactly, and
    remains attaining for chi_M + phi for every kernel phi with
    ||phi||_inf <= 1 vanishing on the cell set.
    """
    if not (ctx.gt(eps, 0) and ctx.lt(eps, 1)):
        raise PreconditionError(f"epsilon must lie in (0, 1), got {eps}")
    check_aligned(space, f0)
    norm = l1_norm(space, f0)
    if not ctx.eq(norm, 1):
        raise PreconditionError(f"density norm must be 1, got {norm}")
    for i, v in enumerate(f0.values):
        if not ctx.ge(v, 0):
            raise PreconditionError(f"density must be nonnegative, entry {i} is {v}")

    cells = frozenset(cells)
    chi = indicator_kernel(space, codomain_size, cells)
    vals = apply_l1linf(chi, f0)
    observed = sup_image_norm(vals)
    gate = 1 - eps
    if not ctx.gt(observed, gate):
        raise GateError(
            f"requires ‖χ̂_M f₀‖_∞ > 1 − ε = {gate}, got {observed}",
            observed=observed,
            gate=gate,
        )

    # For nonnegative f0 the image values are the covered mass per point, so
    # the best point is the plain argmax (lowest index on ties).
    y0 = _argmax_abs(vals)

    supp = support(f0)
    alpha = [space.weights[j] * f0.values[j] for j in supp]
    h_sets = tuple((j, (j,) if (j, y0) in cells else ()) for j in supp)
    cvals = [
        sum(space.weights[a] for a in hs) / space.weights[j] for j, hs in h_sets
    ]
    sel = convex_series_select(alpha, cvals, eps, ctx.sqrt_bound(-1, eps, offset=1), ctx)
    chosen = tuple(supp[k] for k in sel.indices)

    mass = sel.mass
    g_vals = [0 * v for v in f0.values]
    h_lookup = dict(h_sets)
    for k, j in zip(sel.indices, chosen):
        hj = h_lookup[j]
        hj_mass = sum(space.weights[a] for a in hj)
        share = alpha[k] / mass
        for a in hj:
            g_vals[a] = share / hj_mass
    g0 = Density(tuple(g_vals))

    if not ctx.eq(l1_norm(space, g0), 1):
        raise InvariantViolationError("attainment density is not unit")
    at_y0 = apply_l1linf(chi, g0)[y0]
    if not ctx.eq(at_y0, 1):
        raise InvariantViolationError(f"(chi_M g0)(y0) is {at_y0}, not 1")
    dist = l1_distance(space, f0, g0)
    if not ctx.lt(dist, ctx.sqrt_bound(4, eps)):
        raise InvariantViolationError(f"||f0 - g0|| = {dist}, not < 4*sqrt(eps)")

    return AttainmentSetWitness(g0=g0, y0=y0, H_sets=h_sets, J=chosen)


def repair_l1linf(T, f, eps, ctx=EXACT_CONTEXT):
    """Full L1 -> Linf repair behind the gate ||Tf||_inf > 1 - eps^8.

    Requires eps in (0, 1/3).  Produces an attaining pair (g, S) with
    ||T - S|| < 2*eps and ||f - g|| < 10*eps; the witness names the codomain
    point and sign at which |Sg| = 1 exactly.
    """
    if not (ctx.gt(eps, 0) and ctx.lt(3 * eps, 1)):
        raise PreconditionError(f"epsilon must lie in (0, 1/3), got {eps}")
    n = sup_norm(T)
    if not ctx.eq(n, 1):
        raise PreconditionError(f"operator norm must be 1, got {n}")
    norm_f = l1_norm(T.domain, f)
    if not ctx.eq(norm_f, 1):
        raise PreconditionError(f"density norm must be 1, got {norm_f}")

    observed = sup_image_norm(apply_l1linf(T, f))
    gate = l1linf_gate(eps)
    if not ctx.gt(observed, gate):
        raise GateError(
            f"requires ‖Tf‖_∞ > 1 − ε⁸ = {gate}, got {observed}",
            observed=observed,
            gate=gate,
        )

    signs, f0 = sign_normalize(f)
    T1 = conjugate_sup(T, signs)
    vals = apply_l1linf(T1, f0)

    t_star = _argmax_abs(vals)
    sigma = _sign_of(vals[t_star])

    supp = support(f0)
    alpha = [T.domain.weights[j] * f0.values[j] for j in supp]
    cvals = [sigma * T1.matrix[j][t_star] for j in supp]
    sel = convex_series_select(alpha, cvals, eps**8, 1 - eps**4, ctx)
    chosen = tuple(supp[k] for k in sel.indices)

    mass = sel.mass
    f1_vals = [0 * v for v in f0.values]
    for k, j in zip(sel.indices, chosen):
        f1_vals[j] = (alpha[k] / mass) / T.domain.weights[j]
    f1 = Density(tuple(f1_vals))
    dist01 = l1_distance(T.domain, f0, f1)
    if not ctx.lt(dist01, 2 * eps**4):
        raise InvariantViolationError(f"||f0 - f1|| = {dist01}, not < 2*eps^4")

    k = T.codomain_size
    kept = frozenset(
        (w, t)
        for w in range(T.domain.size)
        for t in range(k)
        if ctx.gt(sigma * T1.matrix[w][t], 1 - eps**2 / 2)
    )
    covered = sum(
        T.domain.weights[j] * f1.values[j] for j in chosen if (j, t_star) in kept
    )
    if not ctx.ge(covered, 1 - 3 * eps**2):
        raise InvariantViolationError(
            f"kept cells cover only {covered} of the witness column, need >= 1 - 3*eps^2"
        )

    wit = density_point_attain(T.domain, k, kept, f1, 3 * eps**2, ctx)
    g0, y0 = wit.g0, wit.y0
    dist1g = l1_distance(T.domain, f1, g0)
    if not ctx.lt(dist1g, 8 * eps):
        raise InvariantViolationError(f"||f1 - g0|| = {dist1g}, not < 8*eps")

    snapped = sigma * (1 + 0 * T1.matrix[0][0])  # +/-1 in the ambient scalar type
    rows = tuple(
        tuple(
            snapped if (w, t) in kept else T1.matrix[w][t] for t in range(k)
        )
        for w in range(T.domain.size)
    )
    S1 = SupKernel(rows, T.domain, k, T.codomain)
    if not ctx.eq(sup_norm(S1), 1):
        raise InvariantViolationError("snapped kernel lost norm one")
    attained = apply_l1linf(S1, g0)[y0]
    if not ctx.eq(sigma * attained, 1):
        raise InvariantViolationError(f"(S g0)(y0) is {attained}, not {sigma}")

    S = conjugate_sup(S1, signs)
    g = apply_signs(signs, g0)
    if not ctx.eq(sigma * apply_l1linf(S, g)[y0], 1):
        raise InvariantViolationError("witness broke under sign conjugation")

    dist_T = operator_distance(T, S)
    dist_f = l1_distance(T.domain, f, g)
    if not ctx.lt(dist_T, 2 * eps):
        raise InvariantViolationError(f"||T - S|| = {dist_T}, not < 2*eps")
    if not ctx.lt(dist_f, 10 * eps):
        raise InvariantViolationError(f"||f - g|| = {dist_f}, not < 10*eps")

    steps = {
        "psi_signs": list(signs.signs),
        "t_star": t_star,
        "theta_sign": sigma,
        "J": list(chosen),
        "L": sorted(kept),
        "y0": y0,
        "H_sets": {j: list(hs) for j, hs in wit.H_sets},
        "J_attain": list(wit.J),
    }
    return RepairReport(
        law="l1linf",
        epsilon=eps,
        threshold=gate,
        observed=observed,
        g=g,
        S=S,
        witness=AttainAtomWitness(atom=y0, sign=sigma),
        dist_vector=dist_f,
        dist_operator=dist_T,
        steps=steps,
    )
