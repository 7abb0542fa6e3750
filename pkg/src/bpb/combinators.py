"""Structural reductions: band extension and componentwise linf-sum repair.

A repair obtained on a band (a subset of domain atoms) extends to the full
space by patching the repaired rows into the original operator and extending
the repaired density by zero; attainment and both distances survive
unchanged.  An operator into an linf-sum of sup-norm targets is repaired by
fixing a single component that clears its own gate and leaving the others
untouched.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AlignmentError, GateError, InvariantViolationError, PreconditionError
from .laws import get_law
from .operators import (
    KernelMeasure,
    SupKernel,
    image_norm,
    operator_distance,
    operator_norm,
    sup_norm,
)
from .report import ComponentWitness, RepairReport
from .scalars import EXACT_CONTEXT
from .spaces import Density, l1_norm


@dataclass(frozen=True)
class SumOperator:
    """Finite linf-sum of sup-kernel components over one domain space."""

    components: tuple

    def __post_init__(self):
        comps = tuple(self.components)
        object.__setattr__(self, "components", comps)
        if not comps:
            raise ValueError("sum operator needs at least one component")
        base = comps[0].domain.weights
        for c in comps:
            if not isinstance(c, SupKernel):
                raise TypeError("sum components must be sup kernels")
            if c.domain.weights != base:
                raise AlignmentError("sum components live over different domains")

    @property
    def domain(self):
        return self.components[0].domain


def component_kind(component):
    """'scalar' for one-point codomains (functionals), 'block' otherwise."""
    return "scalar" if component.codomain_size == 1 else "block"


DEFAULT_COMPONENT_LAWS = {"scalar": "ck-bump", "block": "l1linf"}


def band_extend_repair(T, band, g1, S1, ctx=EXACT_CONTEXT):
    """Extend an attaining pair from a band to the full domain.

    `band` lists the full-space atom indices of the band, in the order used
    by the inner pair (g1, S1).  Returns (g, S) on the full space with S
    agreeing with S1 on the band and with T off it.
    """
    band = tuple(band)
    if len(set(band)) != len(band):
        raise AlignmentError("band atoms must be distinct")
    for i in band:
        if not 0 <= i < T.domain.size:
            raise IndexError(f"atom index {i} out of range")
    expected = tuple(T.domain.weights[i] for i in band)
    if S1.domain.weights != expected:
        raise AlignmentError("inner operator's domain does not match the band weights")
    if isinstance(T, KernelMeasure) != isinstance(S1, KernelMeasure):
        raise AlignmentError("band operator kind differs from the full operator")
    if isinstance(T, KernelMeasure):
        if S1.codomain.weights != T.codomain.weights:
            raise AlignmentError("inner codomain differs from the full codomain")
    elif S1.codomain_size != T.codomain_size:
        raise AlignmentError("inner codomain size differs from the full codomain")

    if not ctx.eq(operator_norm(T), 1):
        raise PreconditionError("full operator must have norm one")
    if not ctx.eq(operator_norm(S1), 1):
        raise PreconditionError("inner pair not attaining: ||S1|| != 1")
    if not ctx.eq(l1_norm(S1.domain, g1), 1):
        raise PreconditionError("inner pair not attaining: ||g1|| != 1")
    if not ctx.eq(image_norm(S1, g1), 1):
        raise PreconditionError("inner pair not attaining: ||S1 g1|| != 1")

    rows = [tuple(r) for r in T.matrix]
    for pos, i in enumerate(band):
        rows[i] = tuple(S1.matrix[pos])
    g_vals = [0 * w for w in T.domain.weights]
    for pos, i in enumerate(band):
        g_vals[i] = g1.values[pos]
    g = Density(tuple(g_vals))

    if isinstance(T, KernelMeasure):
        S = KernelMeasure(tuple(rows), T.domain, T.codomain)
    else:
        S = SupKernel(tuple(rows), T.domain, T.codomain_size, T.codomain)

    if not ctx.eq(operator_norm(S), 1):
        raise InvariantViolationError("patched operator lost norm one")
    if not ctx.eq(image_norm(S, g), 1):
        raise InvariantViolationError("extension lost attainment")
    return g, S


def linf_sum_repair(T: SumOperator, f, eps, ctx=EXACT_CONTEXT, component_repairs=None):
    """Repair an operator into an linf-sum by fixing one component.

    Scans components in order and repairs the first whose image norm clears
    that component's own gate (scalar components gate at 1 - eps^2/4, blocks
    at 1 - eps^8); the rest are kept as they are.
    """
    laws = dict(DEFAULT_COMPONENT_LAWS)
    if component_repairs:
        laws.update(component_repairs)

    if not ctx.eq(operator_norm(T), 1):
        raise PreconditionError("sum operator must have norm one")
    if not ctx.eq(l1_norm(T.domain, f), 1):
        raise PreconditionError("density norm must be 1")

    chosen = None
    for j, comp in enumerate(T.components):
        law = get_law(laws[component_kind(comp)])
        gate = law.gate(eps)
        value = image_norm(comp, f)
        if ctx.gt(value, gate):
            chosen = (j, comp, law, gate, value)
            break
    if chosen is None:
        raise GateError(
            "no component above its gate: requires sup_j ‖T_j f‖ > 1 − η_j(ε)"
        )
    j_star, comp, law, gate, value = chosen

    inner = law.run(comp, f, eps, ctx)

    new_components = list(T.components)
    new_components[j_star] = inner.S
    for j, c in enumerate(new_components):
        if j != j_star and not ctx.le(sup_norm(c), 1):
            raise InvariantViolationError("an untouched component exceeded norm one")
    S = SumOperator(tuple(new_components))
    if not ctx.eq(operator_norm(S), 1):
        raise InvariantViolationError("patched sum lost norm one")
    if not ctx.eq(image_norm(S, inner.g), 1):
        raise InvariantViolationError("patched sum lost attainment")

    dist_operator = operator_distance(T, S)
    if not ctx.eq(dist_operator, inner.dist_operator):
        raise InvariantViolationError(
            "sum distance differs from the repaired component's distance"
        )

    steps = {
        "component": j_star,
        "component_law": law.name,
        "component_gates": [
            get_law(laws[component_kind(c)]).gate(eps) for c in T.components
        ],
        "inner": inner.steps,
    }
    return RepairReport(
        law="linf-sum",
        epsilon=eps,
        threshold=gate,
        observed=value,
        g=inner.g,
        S=S,
        witness=ComponentWitness(component=j_star, inner=inner.witness),
        dist_vector=inner.dist_vector,
        dist_operator=dist_operator,
        steps=steps,
    )
