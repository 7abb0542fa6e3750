"""Constructive repair of near-norm-attaining operators on finite atomic
L1 spaces, with brute-force oracles certifying every output.

Operators are given by kernels: a signed mass matrix for L1 -> L1 targets,
a bounded matrix for L1 -> Linf and L1 -> C(K) targets.  Given a norm-one
operator and a unit density whose image norm clears a family-specific gate,
each repair produces an exactly attaining pair nearby, with quantitative
distance bounds that are re-checked at runtime and certifiable offline.
"""

from .combinators import SumOperator, band_extend_repair, linf_sum_repair
from .errors import (
    AlignmentError,
    BpbError,
    CertificationFailureError,
    ConstructionFailureError,
    DegenerateRestrictionError,
    GateError,
    InvariantViolationError,
    ParseError,
    PreconditionError,
    SamplingFailureError,
)
from .laws import LAWS, RepairLaw, get_law
from .operators import (
    DualVector,
    KernelMeasure,
    SupKernel,
    adjoint_point,
    apply_l1l1,
    apply_l1linf,
    conjugate_kernel,
    conjugate_sup,
    image_norm,
    kernel_norm,
    kernel_pairing,
    operator_distance,
    operator_norm,
    sup_norm,
)
from .oracle import (
    ModulusEstimate,
    PiCertificate,
    brute_norm,
    certify_pi,
    dist_to_pi,
    empirical_modulus,
    pi_lower_bound,
)
from .repair_ck import bump_repair, clamp_repair
from .repair_l1l1 import align_mass_step, normalize_density_step, repair_l1l1
from .repair_l1linf import AttainmentSetWitness, density_point_attain, repair_l1linf
from .report import AttainAtomWitness, AttainDualWitness, RepairReport
from .scalars import APPROX_CONTEXT, Context, EXACT_CONTEXT, Surd, context_for
from .selection import SelectionResult, convex_series_select
from .spaces import (
    Density,
    MeasureSpace,
    SignVector,
    apply_signs,
    band_project,
    l1_distance,
    l1_norm,
    restrict_normalize,
    sign_normalize,
)

__all__ = [name for name in dir() if not name.startswith("_")]
