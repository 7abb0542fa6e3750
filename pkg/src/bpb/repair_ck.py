"""Repairs for real operators into C(K) with K a finite discrete set.

Both constructions pick the codomain point where |Tf| is largest and force
exact attainment there.  The clamp repair truncates every kernel entry to
[-(1 - eps/3), 1 - eps/3] and renormalizes, which pins the whole aligned
part of the witness column at exactly +/-1.  The bump repair leaves the
kernel untouched except on the witness column, where it raises the entries
of a high-value atom set all the way to the attained sign.  Both move the
operator and the density by strictly less than eps.

The "without loss of generality" sign convention of the underlying analysis
is made explicit: the witness carries the sign sigma at which |Tf| peaks,
and attainment means sigma * (Sg)(s0) = 1 exactly.
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
from .spaces import (
    apply_signs,
    l1_distance,
    l1_norm,
    restrict_normalize,
    sign_normalize,
)


def clamp_gate(eps):
    return 1 - eps**2 / 6


def bump_gate(eps):
    return 1 - eps**2 / 4


@dataclass(frozen=True)
class ClampParams:
    """Entrywise truncation to [-level, level] with level = 1 - eps/3."""

    level: object

    def apply(self, value):
        if value > self.level:
            return self.level
        if value < -self.level:
            return -self.level
        return value


@dataclass(frozen=True)
class BumpParams:
    """Witness column lift: rational q in (1 - 3*eps/4, 1 - eps/2), the
    selected point s0, and the atom set A whose entries get raised."""

    q: object
    s0: int
    atoms: tuple


def _sign_of(v):
    return -1 if v < 0 else 1


def _argmax_abs(values):
    best, at = None, 0
    for i, v in enumerate(values):
        if best is None or abs(v) > best:
            best, at = abs(v), i
    return at


def _common_checks(T, f, eps, ctx):
    if not (ctx.gt(eps, 0) and ctx.lt(eps, 1)):
        raise PreconditionError(f"epsilon must lie in (0, 1), got {eps}")
    n = sup_norm(T)
    if not ctx.eq(n, 1):
        raise PreconditionError(f"operator norm must be 1, got {n}")
    norm_f = l1_norm(T.domain, f)
    if not ctx.eq(norm_f, 1):
        raise PreconditionError(f"density norm must be 1, got {norm_f}")


def clamp_repair(T, f, eps, ctx=EXACT_CONTEXT):
    """Truncation repair behind the gate ||Tf||_inf > 1 - eps^2/6."""
    _common_checks(T, f, eps, ctx)
    Tf = apply_l1linf(T, f)
    observed = sup_image_norm(Tf)
    gate = clamp_gate(eps)
    if not ctx.gt(observed, gate):
        raise GateError(
            f"requires ‖Tf‖_∞ > 1 − ε²/6 = {gate}, got {observed}",
            observed=observed,
            gate=gate,
        )

    s0 = _argmax_abs(Tf)
    sigma = _sign_of(Tf[s0])
    params = ClampParams(level=1 - eps / 3)

    clamped = tuple(tuple(params.apply(v) for v in row) for row in T.matrix)
    clamped_norm = max(abs(v) for row in clamped for v in row)
    if not ctx.eq(clamped_norm, params.level):
        raise InvariantViolationError(
            f"clamped kernel norm is {clamped_norm}, not the clamp level {params.level}"
        )
    rows = tuple(tuple(v / params.level for v in row) for row in clamped)
    S = SupKernel(rows, T.domain, T.codomain_size, T.codomain)
    if not ctx.eq(sup_norm(S), 1):
        raise InvariantViolationError("renormalized kernel lost norm one")

    restriction = tuple(
        w
        for w in range(T.domain.size)
        if ctx.gt(sigma * _sign_of(f.values[w]) * T.matrix[w][s0], params.level)
    )
    if not restriction:
        raise InvariantViolationError(
            "restriction set came back empty; the near-attainment estimate forbids it"
        )
    g = restrict_normalize(T.domain, f, restriction, ctx)

    attained = apply_l1linf(S, g)[s0]
    if not ctx.eq(sigma * attained, 1):
        raise InvariantViolationError(f"(Sg)(s0) is {attained}, not {sigma}")
    dist_T = operator_distance(T, S)
    dist_f = l1_distance(T.domain, f, g)
    if not ctx.lt(dist_T, eps):
        raise InvariantViolationError(f"||T - S|| = {dist_T}, not < eps")
    if not ctx.lt(dist_f, eps):
        raise InvariantViolationError(f"||f - g|| = {dist_f}, not < eps")

    steps = {
        "s0": s0,
        "theta_sign": sigma,
        "clamp_level": params.level,
        "C": list(restriction),
    }
    return RepairReport(
        law="ck-clamp",
        epsilon=eps,
        threshold=gate,
        observed=observed,
        g=g,
        S=S,
        witness=AttainAtomWitness(atom=s0, sign=sigma),
        dist_vector=dist_f,
        dist_operator=dist_T,
        steps=steps,
    )


def bump_repair(T, f, eps, ctx=EXACT_CONTEXT):
    """Column-lift repair behind the gate ||Tf||_inf > 1 - eps^2/4."""
    _common_checks(T, f, eps, ctx)
    observed = sup_image_norm(apply_l1linf(T, f))
    gate = bump_gate(eps)
    if not ctx.gt(observed, gate):
        raise GateError(
            f"requires ‖Tf‖_∞ > 1 − ε²/4 = {gate}, got {observed}",
            observed=observed,
            gate=gate,
        )

    signs, f0 = sign_normalize(f)
    T1 = conjugate_sup(T, signs)
    vals = apply_l1linf(T1, f0)
    s0 = _argmax_abs(vals)
    sigma = _sign_of(vals[s0])

    # Midpoint of the admissible open interval; rational whenever eps is.
    q = 1 - 5 * eps / 8
    atoms = tuple(
        w for w in range(T.domain.size) if ctx.gt(sigma * T1.matrix[w][s0], q)
    )
    if not atoms:
        raise InvariantViolationError(
            "lift set came back empty; the near-attainment estimate forbids it"
        )
    params = BumpParams(q=q, s0=s0, atoms=atoms)

    lower_env = min(sigma * T1.matrix[w][s0] for w in atoms)
    upper_env = max(sigma * T1.matrix[w][s0] for w in atoms)
    if not (ctx.ge(lower_env, q) and ctx.gt(q, 1 - eps)):
        raise InvariantViolationError(
            f"envelope check failed: min over A is {lower_env}, q = {q}"
        )

    atom_set = frozenset(atoms)
    rows = tuple(
        tuple(
            v + sigma * (1 - sigma * v) if (w in atom_set and t == s0) else v
            for t, v in enumerate(row)
        )
        for w, row in enumerate(T1.matrix)
    )
    S1 = SupKernel(rows, T.domain, T.codomain_size, T.codomain)
    if not ctx.eq(sup_norm(S1), 1):
        raise InvariantViolationError("lifted kernel lost norm one")

    g0 = restrict_normalize(T.domain, f0, atoms, ctx)
    attained = apply_l1linf(S1, g0)[s0]
    if not ctx.eq(sigma * attained, 1):
        raise InvariantViolationError(f"(S g0)(s0) is {attained}, not {sigma}")

    S = conjugate_sup(S1, signs)
    g = apply_signs(signs, g0)
    if not ctx.eq(sigma * apply_l1linf(S, g)[s0], 1):
        raise InvariantViolationError("witness broke under sign conjugation")

    dist_T = operator_distance(T, S)
    dist_f = l1_distance(T.domain, f, g)
    if not ctx.lt(dist_T, eps):
        raise InvariantViolationError(f"||T - S|| = {dist_T}, not < eps")
    if not ctx.lt(dist_f, eps):
        raise InvariantViolationError(f"||f - g|| = {dist_f}, not < eps")

    steps = {
        "psi_signs": list(signs.signs),
        "s0": s0,
        "theta_sign": sigma,
        "q": q,
        "A": list(atoms),
        "envelope_min": lower_env,
        "envelope_max": upper_env,
    }
    return RepairReport(
        law="ck-bump",
        epsilon=eps,
        threshold=gate,
        observed=observed,
        g=g,
        S=S,
        witness=AttainAtomWitness(atom=s0, sign=sigma),
        dist_vector=dist_f,
        dist_operator=dist_T,
        steps=steps,
    )
