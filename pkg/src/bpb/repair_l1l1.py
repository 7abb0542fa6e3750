"""Repair of near-attaining L1 -> L1 kernel operators.

The pipeline has two constructive stages.  The first rescales the kernel so
its marginal density is exactly 1 on the support of the (nonnegative) input
density, moving the operator by less than eps and the density by less than
3*eps.  The second aligns the signed mass of the kernel with a dual
certificate and concentrates the density on atoms where the misaligned mass
is small, after which the pair attains exactly; it moves the operator by
less than 3*sqrt(eps) and the density by less than 3*eps.  Chaining both
behind the entry gate ||Tf|| > 1 - eps^18/(5^3*2^27) yields an attaining
pair within (4*eps, 4*sqrt(eps)) of the input.

Every inequality the analysis promises is re-checked at runtime; a failure
raises InvariantViolationError because it can only mean a bug.
"""

from __future__ import annotations

from .errors import (
    ConstructionFailureError,
    GateError,
    InvariantViolationError,
    PreconditionError,
)
from .operators import (
    DualVector,
    apply_l1l1,
    conjugate_kernel,
    kernel_norm,
    kernel_pairing,
    KernelMeasure,
    operator_distance,
)
from .report import AttainDualWitness, RepairReport
from .scalars import EXACT_CONTEXT
from .selection import convex_series_select
from .spaces import Density, apply_signs, l1_distance, l1_norm, sign_normalize, support


def l1l1_gate(eps):
    """Entry threshold of the full pipeline: 1 - eps^18 / (5^3 * 2^27)."""
    return 1 - eps**18 / (125 * 2**27)


def _sign_of(v):
    return -1 if v < 0 else 1


def _check_norm_one(T, ctx):
    n = kernel_norm(T)
    if not ctx.eq(n, 1):
        raise PreconditionError(f"operator norm must be 1, got {n}")


def _check_unit(space, f, ctx, nonnegative=False):
    n = l1_norm(space, f)
    if not ctx.eq(n, 1):
        raise PreconditionError(f"density norm must be 1, got {n}")
    if nonnegative:
        for i, v in enumerate(f.values):
            if not ctx.ge(v, 0):
                raise PreconditionError(f"density must be nonnegative, entry {i} is {v}")


def _check_eps(eps, ctx):
    if not (ctx.gt(eps, 0) and ctx.lt(eps, 1)):
        raise PreconditionError(f"epsilon must lie in (0, 1), got {eps}")


def normalize_density_step(T, f0, eps, ctx=EXACT_CONTEXT):
    """Rescale rows so the marginal density is exactly 1 on supp(f1).

    Requires ||T|| = 1, f0 nonnegative unit, and the gate
    ||T f0|| > 1 - eps^3/2^6.  Returns (T_nu, f1, step_log) with
    ||T - T_nu|| < eps and ||f1 - f0|| < 3*eps.
    """
    _check_eps(eps, ctx)
    _check_norm_one(T, ctx)
    _check_unit(T.domain, f0, ctx, nonnegative=True)

    observed = l1_norm(T.codomain, apply_l1l1(T, f0))
    gate = 1 - eps**3 / 64
    if not ctx.gt(observed, gate):
        raise GateError(
            f"requires ‖Tf₀‖ > 1 − ε³/2⁶ = {gate}, got {observed}",
            observed=observed,
            gate=gate,
        )

    dens = T.marginal_densities()
    heavy = tuple(i for i in range(T.domain.size) if ctx.gt(dens[i], 1 - eps / 8))

    supp = support(f0)
    alpha = [T.domain.weights[i] * f0.values[i] for i in supp]
    cvals = [dens[i] for i in supp]
    sel = convex_series_select(alpha, cvals, eps**3 / 64, 1 - eps**2 / 64, ctx)
    chosen = tuple(supp[k] for k in sel.indices)

    # Each selected atom must already sit in the heavy-density set; the
    # averaging estimate forbids anything else.
    b_tilde = {}
    for j in chosen:
        if j not in heavy:
            raise InvariantViolationError(
                f"selected atom {j} has marginal density {dens[j]} outside the heavy set"
            )
        b_tilde[j] = (j,)

    mass = sel.mass
    f1_vals = [0 * v for v in f0.values]
    for k, j in zip(sel.indices, chosen):
        f1_vals[j] = (alpha[k] / mass) / T.domain.weights[j]
    f1 = Density(tuple(f1_vals))
    if not ctx.eq(l1_norm(T.domain, f1), 1):
        raise InvariantViolationError("renormalized density is not unit")

    rows = []
    for i, row in enumerate(T.matrix):
        if i in b_tilde:
            if not ctx.gt(dens[i], 0):
                raise InvariantViolationError(f"zero marginal density on selected atom {i}")
            rows.append(tuple(v / dens[i] for v in row))
        else:
            rows.append(row)
    T_nu = KernelMeasure(tuple(rows), T.domain, T.codomain)

    if not ctx.eq(kernel_norm(T_nu), 1):
        raise InvariantViolationError("rescaled kernel lost norm one")
    for j in chosen:
        if not ctx.eq(T_nu.marginal_density(j), 1):
            raise InvariantViolationError(f"marginal density not 1 on support atom {j}")
    dist_T = operator_distance(T, T_nu)
    if not ctx.lt(dist_T, eps):
        raise InvariantViolationError(f"operator moved by {dist_T}, not < {eps}")
    dist_f = l1_distance(T.domain, f0, f1)
    if not ctx.lt(dist_f, 3 * eps):
        raise InvariantViolationError(f"density moved by {dist_f}, not < 3*{eps}")

    frag = {
        "gate": gate,
        "observed": observed,
        "D": list(heavy),
        "J": list(chosen),
        "B_tilde": {j: list(v) for j, v in b_tilde.items()},
        "dist_operator": dist_T,
        "dist_vector": dist_f,
    }
    return T_nu, f1, frag


def align_mass_step(T, f, eps, ctx=EXACT_CONTEXT):
    """Align kernel signs with a dual certificate and force exact attainment.

    Requires ||T|| = 1, f nonnegative unit with marginal density exactly 1 on
    its support, and the gate ||T f|| > 1 - eps^6/2^7.  Returns
    (T_tilde, f_tilde, dual, step_log) with <T_tilde f_tilde, dual> = 1,
    ||T - T_tilde|| < 3*sqrt(eps) and ||f - f_tilde|| < 3*eps.
    """
    _check_eps(eps, ctx)
    _check_norm_one(T, ctx)
    _check_unit(T.domain, f, ctx, nonnegative=True)
    supp = support(f)
    for j in supp:
        if not ctx.eq(T.marginal_density(j), 1):
            raise PreconditionError(
                f"marginal density must be 1 on supp(f); atom {j} has {T.marginal_density(j)}"
            )

    Tf = apply_l1l1(T, f)
    observed = l1_norm(T.codomain, Tf)
    gate = 1 - eps**6 / 128
    if not ctx.gt(observed, gate):
        raise GateError(
            f"requires ‖T_ν f‖ > 1 − ε⁶/2⁷ = {gate}, got {observed}",
            observed=observed,
            gate=gate,
        )

    # Dual certificate fixed as the exact maximizer of the pairing.
    g = DualVector(tuple(_sign_of(v) for v in Tf.values))

    beta = [T.domain.weights[j] * f.values[j] for j in supp]
    cvals = [
        sum(g.values[y] * T.matrix[j][y] for y in range(T.codomain.size))
        / T.domain.weights[j]
        for j in supp
    ]
    sel = convex_series_select(beta, cvals, eps**6 / 128, 1 - eps**3 / 64, ctx)
    chosen = tuple(supp[k] for k in sel.indices)

    # Aligned cells of the signed kernel: g(y) * sign(nu(i,y)) = +1.  (The
    # general closeness test against sqrt(eps)/2^{3/2} collapses to this for
    # real signs, since the product is either +1 or -1.)
    n, k = T.domain.size, T.codomain.size
    aligned = frozenset(
        (i, y)
        for i in range(n)
        for y in range(k)
        if T.matrix[i][y] != 0 and g.values[y] * _sign_of(T.matrix[i][y]) == 1
    )
    var_f = [
        sum(abs(T.matrix[i][y]) for y in range(k) if (i, y) not in aligned)
        for i in range(n)
    ]
    var_c = [
        sum(abs(T.matrix[i][y]) for y in range(k) if (i, y) in aligned)
        for i in range(n)
    ]
    dens_f = [var_f[i] / T.domain.weights[i] for i in range(n)]
    dens_c = [var_c[i] / T.domain.weights[i] for i in range(n)]

    steps = {
        "gate": gate,
        "observed": observed,
        "J": list(chosen),
        "C": sorted(aligned),
        "g_certificate": list(g.values),
    }

    b_tilde = {}
    for j in chosen:
        if not ctx.le(dens_f[j], eps * eps / 4):
            raise InvariantViolationError(
                f"misaligned density {dens_f[j]} on atom {j} exceeds eps^2/4"
            )
        if ctx.le(dens_f[j], eps / 2) and ctx.gt(dens_c[j], 0):
            b_tilde[j] = (j,)
        else:
            raise ConstructionFailureError(
                f"filtered attainment set emptied out at atom {j}", steps=steps
            )
        # The retained measure must be at least (1 - eps/2) of the original.
        if not ctx.ge(T.domain.weights[j], (1 - eps / 2) * T.domain.weights[j]):
            raise InvariantViolationError("retained set measure fell below (1 - eps/2)")

    g_tilde = DualVector(
        tuple(v / abs(v) if v != 0 else 1 for v in g.values)
    )

    mass = sel.mass
    ft_vals = [0 * v for v in f.values]
    for kk, j in zip(sel.indices, chosen):
        ft_vals[j] = (beta[kk] / mass) / T.domain.weights[j]
    f_tilde = Density(tuple(ft_vals))

    rows = []
    for i, row in enumerate(T.matrix):
        if i in b_tilde:
            new_row = []
            for y in range(k):
                v = row[y]
                if (i, y) in aligned:
                    new_row.append(g_tilde.values[y] * _sign_of(v) * v / dens_c[i])
                else:
                    new_row.append(0 * v)
            rows.append(tuple(new_row))
        else:
            rows.append(row)
    T_tilde = KernelMeasure(tuple(rows), T.domain, T.codomain)

    if not ctx.eq(kernel_norm(T_tilde), 1):
        raise InvariantViolationError("aligned kernel lost norm one")
    pairing = kernel_pairing(T_tilde, f_tilde, g_tilde)
    if not ctx.eq(pairing, 1):
        raise InvariantViolationError(f"dual pairing is {pairing}, not 1")
    image = l1_norm(T.codomain, apply_l1l1(T_tilde, f_tilde))
    if not ctx.eq(image, 1):
        raise InvariantViolationError(f"||T_tilde f_tilde|| is {image}, not 1")
    dist_T = operator_distance(T, T_tilde)
    if not ctx.lt(dist_T, ctx.sqrt_bound(3, eps)):
        raise InvariantViolationError(f"operator moved by {dist_T}, not < 3*sqrt(eps)")
    dist_f = l1_distance(T.domain, f, f_tilde)
    if not ctx.lt(dist_f, 3 * eps):
        raise InvariantViolationError(f"density moved by {dist_f}, not < 3*{eps}")

    steps["B_tilde"] = {j: list(v) for j, v in b_tilde.items()}
    steps["g_tilde"] = list(g_tilde.values)
    steps["dist_operator"] = dist_T
    steps["dist_vector"] = dist_f
    return T_tilde, f_tilde, g_tilde, steps


def repair_l1l1(T, f, eps, ctx=EXACT_CONTEXT):
    """Full L1 -> L1 repair behind the gate ||Tf|| > 1 - eps^18/(5^3*2^27).

    Produces an exactly attaining pair (g, S) with ||f - g|| < 4*eps and
    ||T - S|| < 4*sqrt(eps), certified by a dual vector.
    """
    _check_eps(eps, ctx)
    _check_norm_one(T, ctx)
    _check_unit(T.domain, f, ctx)

    observed = l1_norm(T.codomain, apply_l1l1(T, f))
    gate = l1l1_gate(eps)
    if not ctx.gt(observed, gate):
        raise GateError(
            f"requires ‖Tf‖ > 1 − ε¹⁸/(5³·2²⁷) = {gate}, got {observed}",
            observed=observed,
            gate=gate,
        )

    signs, f0 = sign_normalize(f)
    T1 = conjugate_kernel(T, signs)

    eps1 = eps**6 / 640
    try:
        T_nu, f1, frag_norm = normalize_density_step(T1, f0, eps1, ctx)
    except GateError as exc:  # same gate value; a failure here is a bug
        raise InvariantViolationError(f"inner density gate failed: {exc}") from exc

    chain = l1_norm(T.codomain, apply_l1l1(T_nu, f1))
    if not ctx.ge(chain, observed - 4 * eps1):
        raise InvariantViolationError(
            f"triangle chain broke: ||T_nu f1|| = {chain} < {observed} - 4*eps1"
        )
    if not ctx.gt(chain, 1 - eps**6 / 128):
        raise InvariantViolationError(
            f"chained gate failed: ||T_nu f1|| = {chain} at eps = {eps}"
        )

    T_tilde, f_tilde, g_dual, frag_align = align_mass_step(T_nu, f1, eps, ctx)

    S = conjugate_kernel(T_tilde, signs)
    g = apply_signs(signs, f_tilde)

    if not ctx.eq(kernel_pairing(S, g, g_dual), 1):
        raise InvariantViolationError("witness pairing broke under sign conjugation")
    dist_f = l1_distance(T.domain, f, g)
    dist_T = operator_distance(T, S)
    if not ctx.lt(dist_f, 4 * eps):
        raise InvariantViolationError(f"||f - g|| = {dist_f}, not < 4*eps")
    if not ctx.lt(dist_T, ctx.sqrt_bound(4, eps)):
        raise InvariantViolationError(f"||T - S|| = {dist_T}, not < 4*sqrt(eps)")

    steps = {
        "psi_signs": list(signs.signs),
        "epsilon1": eps1,
        "normalize": frag_norm,
        "align": frag_align,
    }
    return RepairReport(
        law="l1l1",
        epsilon=eps,
        threshold=gate,
        observed=observed,
        g=g,
        S=S,
        witness=AttainDualWitness(g_dual),
        dist_vector=dist_f,
        dist_operator=dist_T,
        steps=steps,
    )
