"""Registry tying each repair family to its gate and promised bounds."""

from __future__ import annotations

from dataclasses import dataclass

from .repair_ck import bump_gate, bump_repair, clamp_gate, clamp_repair
from .repair_l1l1 import l1l1_gate, repair_l1l1
from .repair_l1linf import l1linf_gate, repair_l1linf
from .scalars import EXACT_CONTEXT


@dataclass(frozen=True)
class RepairLaw:
    name: str
    kind: str  # "l1" (kernel-measure target) or "sup" (sup-norm target)
    gate: object  # eps -> threshold the input norm must exceed strictly
    run: object  # (T, f, eps, ctx) -> RepairReport
    vector_bound: object  # eps, ctx -> promised bound on ||f - g||
    operator_bound: object  # eps, ctx -> promised bound on ||T - S||
    modulus_bound: object  # eps -> documented lower bound for the modulus
    eps_ladder: tuple  # default eps values tried by the distance estimator


def _surd4(eps, ctx):
    return ctx.sqrt_bound(4, eps)


LAWS = {
    "l1l1": RepairLaw(
        name="l1l1",
        kind="l1",
        gate=l1l1_gate,
        run=repair_l1l1,
        vector_bound=lambda eps, ctx: 4 * eps,
        operator_bound=_surd4,
        modulus_bound=lambda eps: eps**18 / (125 * 2**27),
        eps_ladder=("1/10", "1/4", "1/2", "3/4", "9/10"),
    ),
    "l1linf": RepairLaw(
        name="l1linf",
        kind="sup",
        gate=l1linf_gate,
        run=repair_l1linf,
        vector_bound=lambda eps, ctx: 10 * eps,
        operator_bound=lambda eps, ctx: 2 * eps,
        modulus_bound=lambda eps: (eps / 10) ** 8,
        eps_ladder=("1/10", "1/5", "3/10"),
    ),
    "ck-clamp": RepairLaw(
        name="ck-clamp",
        kind="sup",
        gate=clamp_gate,
        run=clamp_repair,
        vector_bound=lambda eps, ctx: eps,
        operator_bound=lambda eps, ctx: eps,
        modulus_bound=lambda eps: eps**2 / 6,
        eps_ladder=("1/10", "1/4", "1/2", "3/4", "9/10"),
    ),
    "ck-bump": RepairLaw(
        name="ck-bump",
        kind="sup",
        gate=bump_gate,
        run=bump_repair,
        vector_bound=lambda eps, ctx: eps,
        operator_bound=lambda eps, ctx: eps,
        modulus_bound=lambda eps: eps**2 / 4,
        eps_ladder=("1/10", "1/4", "1/2", "3/4", "9/10"),
    ),
}


def get_law(name):
    try:
        return LAWS[name]
    except KeyError:
        raise ValueError(f"unknown repair law {name!r}; choose from {sorted(LAWS)}") from None


def laws_for_kind(kind):
    return [law for law in LAWS.values() if law.kind == kind]


def check_bounds(law, eps, dist_vector, dist_operator, ctx=EXACT_CONTEXT):
    """True when both realized distances sit strictly under the law's bounds."""
    return ctx.lt(dist_vector, law.vector_bound(eps, ctx)) and ctx.lt(
        dist_operator, law.operator_bound(eps, ctx)
    )
