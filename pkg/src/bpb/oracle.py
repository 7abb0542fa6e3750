"""Independent brute-force verification and distance estimation.

Everything here deliberately avoids the closed-form norm formulas it is
meant to check: norms are recomputed over the extreme points of the unit
ball, attainment is re-derived from raw norms, and distances to the
attaining set are bracketed by an upper-bound local search and a sound
lower-bound certificate.  The modulus experiment only accepts sample pairs
whose lower bound certifies they really sit at distance >= eps, so its
minimum defect is a genuine empirical upper bound on the modulus.
"""

from __future__ import annotations

import random
from dataclasses import dataclass
from fractions import Fraction

from .errors import BpbError, SamplingFailureError
from .generate import modulus_pair
from .laws import get_law, laws_for_kind
from .operators import (
    DualVector,
    KernelMeasure,
    SupKernel,
    apply_l1l1,
    apply_l1linf,
    image_norm,
    operator_distance,
    operator_norm,
)
from .scalars import EXACT_CONTEXT
from .spaces import Density, MeasureSpace, l1_distance, l1_norm, restrict_normalize, support


@dataclass(frozen=True)
class PiCertificate:
    """Outcome of replaying the attainment conditions on a pair (g, S)."""

    attained: bool
    witness_vector: Density
    witness_functional: object  # DualVector for L1 targets, atom index otherwise
    residual: object  # | ||Sg|| - ||S|| |
    vector_defect: object  # | ||g|| - 1 |
    operator_defect: object  # | ||S|| - 1 |


@dataclass(frozen=True)
class ModulusEstimate:
    epsilon: object
    samples: int  # accepted sample count
    min_defect: object  # smallest 1 - ||Tf|| among accepted samples
    paper_bound: object  # documented lower bound for the modulus


@dataclass(frozen=True)
class ModulusSample:
    index: int
    defect: object
    est_dist: object  # certified lower bound on the distance to attainment
    accepted: bool


def extreme_point(space, i, sign=1):
    vals = [0 * w for w in space.weights]
    vals[i] = sign / space.weights[i]
    return Density(tuple(vals))


def brute_norm(op):
    """Operator norm as a maximum over the extreme points +/- delta_i / mu_i."""
    space = op.domain
    best = None
    for i in range(space.size):
        for sign in (1, -1):
            val = image_norm(op, extreme_point(space, i, sign))
            if best is None or val > best:
                best = val
    return best


def _sign_of(v):
    return -1 if v < 0 else 1


def _argmax_abs(values):
    best, at = None, 0
    for i, v in enumerate(values):
        if best is None or abs(v) > best:
            best, at = abs(v), i
    return at


def certify_pi(g, S, ctx=EXACT_CONTEXT):
    """Replay the three attainment conditions ||g|| = ||S|| = ||Sg|| = 1."""
    ng = l1_norm(S.domain, g)
    ns = operator_norm(S)
    nsg = image_norm(S, g)
    attained = ctx.eq(ng, 1) and ctx.eq(ns, 1) and ctx.eq(nsg, ns) and ctx.eq(nsg, 1)
    if isinstance(S, KernelMeasure):
        functional = DualVector(tuple(_sign_of(v) for v in apply_l1l1(S, g).values))
    elif isinstance(S, SupKernel):
        functional = _argmax_abs(apply_l1linf(S, g))
    else:
        values = [image_norm(c, g) for c in S.components]
        comp = values.index(max(values))
        functional = (comp, _argmax_abs(apply_l1linf(S.components[comp], g)))
    return PiCertificate(
        attained=attained,
        witness_vector=g,
        witness_functional=functional,
        residual=abs(nsg - ns),
        vector_defect=abs(ng - 1),
        operator_defect=abs(ns - 1),
    )


def _lower_bound_by_levels(levels, masses):
    """min over thresholds of max(1 - level, f-mass strictly below it).

    `levels` gives the per-atom quality (marginal density, or |column|
    value) and `masses` the |f|-mass per atom.  Any attaining pair must put
    its density on atoms of quality exactly 1, which costs whichever is
    larger: raising the quality of the support or dropping the mass outside.
    """
    order = sorted(range(len(levels)), key=lambda i: levels[i], reverse=True)
    total = sum(masses)
    best = None
    covered = 0 * total
    for rank, i in enumerate(order):
        covered = covered + masses[i]
        cand = max(1 - levels[i], total - covered)
        if best is None or cand < best:
            best = cand
    return best


def pi_lower_bound(f, T, ctx=EXACT_CONTEXT):
    """Sound lower bound on dist((f, T), attaining pairs).

    For L1 -> L1 kernels, attainment forces marginal density 1 on the
    support of the repaired density, so the operator must move by at least
    the density defect there while the vector must cover the mass outside.
    For sup-norm kernels the same argument runs columnwise.
    """
    masses = [w * abs(v) for w, v in zip(T.domain.weights, f.values)]
    if isinstance(T, KernelMeasure):
        return _lower_bound_by_levels(T.marginal_densities(), masses)
    if isinstance(T, SupKernel):
        best = None
        for t in range(T.codomain_size):
            levels = [abs(row[t]) for row in T.matrix]
            cand = _lower_bound_by_levels(levels, masses)
            if best is None or cand < best:
                best = cand
        return best
    return min(pi_lower_bound(f, c, ctx) for c in T.components)


def _fix_rows_kernel(T, g, members):
    """Cheapest kernel with unit marginal density and column-coherent signs
    on the support of g; rows off the support are left alone."""
    k = T.codomain.size
    sigma = []
    for j in range(k):
        s = sum(g.values[i] * T.matrix[i][j] for i in members)
        sigma.append(_sign_of(s) if s != 0 else 1)
    rows = [list(r) for r in T.matrix]
    for i in members:
        gi_sign = _sign_of(g.values[i])
        targets = [sigma[j] * gi_sign for j in range(k)]
        kept = [max(targets[j] * T.matrix[i][j], 0 * T.matrix[i][j]) for j in range(k)]
        aligned_mass = sum(kept)
        want = T.domain.weights[i]
        if aligned_mass == 0:
            new = [0 * v for v in rows[i]]
            new[0] = targets[0] * want
        elif aligned_mass >= want:
            new = [targets[j] * kept[j] * want / aligned_mass for j in range(k)]
        else:
            new = [targets[j] * kept[j] for j in range(k)]
            j_best = max(range(k), key=lambda j: kept[j])
            new[j_best] = new[j_best] + targets[j_best] * (want - aligned_mass)
        rows[i] = new
    return KernelMeasure(tuple(tuple(r) for r in rows), T.domain, T.codomain)


def _fix_column_sup(T, g, members, t, u):
    """Sup kernel agreeing with T except that column t attains at g."""
    rows = [list(r) for r in T.matrix]
    one = 1 + 0 * T.matrix[0][0]  # unit in the ambient scalar type
    for i in members:
        rows[i][t] = u * _sign_of(g.values[i]) * one
    return SupKernel(tuple(tuple(r) for r in rows), T.domain, T.codomain_size, T.codomain)


def _support_candidates(f, T, rng, extra):
    supp = support(f)
    cands = [supp]
    cands.extend((i,) for i in supp)
    if isinstance(T, KernelMeasure):
        dens = T.marginal_densities()
        order = sorted(supp, key=lambda i: dens[i], reverse=True)
        cands.extend(tuple(sorted(order[: r + 1])) for r in range(len(order)))
    for _ in range(extra):
        size = rng.randint(1, len(supp))
        cands.append(tuple(sorted(rng.sample(supp, size))))
    seen, out = set(), []
    for c in cands:
        if c and c not in seen:
            seen.add(c)
            out.append(c)
    return out


def dist_to_pi(f, T, budget=32, seed=0, ctx=EXACT_CONTEXT):
    """Upper bound on the distance from (f, T) to the attaining pairs.

    Runs a deterministic seeded search: snap moves onto extreme-point
    mixtures with the cheapest compatible operator fix, plus every repair
    pipeline that accepts the input on a fixed epsilon ladder.  `budget`
    controls how many extra random support subsets are tried; enlarging it
    can only lower the returned value.
    """
    if certify_pi(f, T, ctx).attained:
        return 0 * l1_norm(T.domain, f)

    rng = random.Random(seed)
    best = None

    def consider(g, S):
        nonlocal best
        cert = certify_pi(g, S, ctx)
        if not cert.attained:
            return
        d = max(l1_distance(T.domain, f, g), operator_distance(T, S))
        if best is None or d < best:
            best = d

    for members in _support_candidates(f, T, rng, extra=budget):
        g = restrict_normalize(T.domain, f, members, ctx)
        if isinstance(T, KernelMeasure):
            consider(g, _fix_rows_kernel(T, g, members))
        else:
            for t in range(T.codomain_size):
                for u in (1, -1):
                    consider(g, _fix_column_sup(T, g, members, t, u))

    kind = "l1" if isinstance(T, KernelMeasure) else "sup"
    for law in laws_for_kind(kind):
        for eps_text in law.eps_ladder:
            eps = ctx.convert(Fraction(eps_text))
            try:
                report = law.run(T, f, eps, ctx)
            except BpbError:
                continue
            d = max(report.dist_vector, report.dist_operator)
            if best is None or d < best:
                best = d
    return best


def empirical_modulus(kind, eps, dims, samples, seed, ctx=EXACT_CONTEXT):
    """Sample the defect 1 - ||Tf|| over pairs certified far from attainment.

    Returns (estimate, rows); each row records the defect, the certified
    lower bound on the pair's distance, and whether the pair was accepted
    (lower bound >= eps).  Raises SamplingFailureError when nothing is
    accepted.
    """
    law = get_law(kind)
    m, k = dims
    rng = random.Random(seed)
    rows = []
    min_defect = None
    accepted = 0
    for idx in range(samples):
        f, T = modulus_pair(rng, law.kind, m, k)
        if not ctx.is_exact:
            f = Density(tuple(float(v) for v in f.values))
            if isinstance(T, KernelMeasure):
                T = KernelMeasure(
                    tuple(tuple(float(v) for v in r) for r in T.matrix),
                    _float_space(T.domain),
                    _float_space(T.codomain),
                )
            else:
                T = SupKernel(
                    tuple(tuple(float(v) for v in r) for r in T.matrix),
                    _float_space(T.domain),
                    T.codomain_size,
                )
        defect = 1 - image_norm(T, f)
        lb = pi_lower_bound(f, T, ctx)
        ok = ctx.ge(lb, eps)
        rows.append(ModulusSample(index=idx, defect=defect, est_dist=lb, accepted=ok))
        if ok:
            accepted += 1
            if min_defect is None or defect < min_defect:
                min_defect = defect
    if accepted == 0:
        raise SamplingFailureError(
            f"no sample pair certified at distance >= {eps}", rows=rows
        )
    estimate = ModulusEstimate(
        epsilon=eps,
        samples=accepted,
        min_defect=min_defect,
        paper_bound=law.modulus_bound(eps),
    )
    return estimate, rows


def _float_space(space):
    return MeasureSpace(tuple(float(w) for w in space.weights))
