"""Seeded random instance generation, exact-rational throughout.

Gated instances are built backwards: construct a pair that attains exactly
(unit-density rows or a fully aligned column on the support of the density),
then perturb strictly inside the requested gate radius so the input is
genuinely non-attaining but still repairable.  All randomness flows through
an explicit ``random.Random`` so identical seeds reproduce identical
instances bit for bit.
"""

from __future__ import annotations

from fractions import Fraction

from .errors import PreconditionError
from .operators import KernelMeasure, SupKernel
from .scalars import EXACT_CONTEXT
from .spaces import Density, MeasureSpace


def random_space(rng, n):
    return MeasureSpace(tuple(Fraction(rng.randint(1, 8), 8) for _ in range(n)))


def random_unit_density(rng, space, supp=None, signed=True):
    """Unit-norm density supported on `supp` (default: all atoms)."""
    n = space.size
    supp = tuple(range(n)) if supp is None else tuple(supp)
    raw = {i: Fraction(rng.randint(1, 9)) for i in supp}
    mass = sum(space.weights[i] * raw[i] for i in supp)
    vals = [Fraction(0)] * n
    for i in supp:
        s = rng.choice((1, -1)) if signed else 1
        vals[i] = s * raw[i] / mass
    return Density(tuple(vals))


def _random_row(rng, k, smallest=0):
    row = [Fraction(rng.randint(smallest, 9)) for _ in range(k)]
    if not any(row):
        row[rng.randrange(k)] = Fraction(rng.randint(1, 9))
    return row


def _choose_support(rng, n):
    size = rng.randint(1, n)
    return tuple(sorted(rng.sample(range(n), size)))


def attaining_kernel_pair(rng, m1, m2, supp=None, signed=True):
    """(T, f) with ||T|| = ||f|| = ||Tf|| = 1 exactly.

    Rows on supp(f) have marginal density exactly 1 with column-coherent
    signs, so no cancellation happens; off-support rows get density <= 1.
    """
    n, k = m1.size, m2.size
    supp = _choose_support(rng, n) if supp is None else tuple(supp)
    f = random_unit_density(rng, m1, supp, signed=signed)
    col_signs = [rng.choice((1, -1)) if signed else 1 for _ in range(k)]
    rows = []
    for i in range(n):
        if i in supp:
            raw = _random_row(rng, k)
            total = sum(raw)
            sign_i = -1 if f.values[i] < 0 else 1
            rows.append(
                tuple(
                    col_signs[j] * sign_i * raw[j] * m1.weights[i] / total
                    for j in range(k)
                )
            )
        else:
            raw = _random_row(rng, k)
            total = sum(raw)
            scale = Fraction(rng.randint(0, 8), 8)
            rows.append(tuple(scale * raw[j] * m1.weights[i] / total for j in range(k)))
    return KernelMeasure(tuple(rows), m1, m2), f


def perturbed_kernel_instance(rng, m1, m2, radius, signed=True):
    """Gated kernel instance: attaining pair with rows shrunk within `radius`.

    Guarantees ||T|| = 1, ||f|| = 1 and 1 - radius < ||Tf|| <= 1.
    """
    T, f = attaining_kernel_pair(rng, m1, m2, signed=signed)
    supp = [i for i, v in enumerate(f.values) if v != 0]
    keep = rng.choice(supp)  # left exact so the norm stays 1
    rows = list(T.matrix)
    for i in supp:
        if i == keep:
            continue
        delta = radius * Fraction(rng.randint(0, 8), 16)
        rows[i] = tuple(v * (1 - delta) for v in rows[i])
    return KernelMeasure(tuple(rows), m1, m2), f


def lemma33_instance(rng, m1, m2, eps):
    """Nonnegative gated input for the density-normalization step."""
    radius = eps**3 / Fraction(64)
    T, f = perturbed_kernel_instance(rng, m1, m2, radius, signed=False)
    return T, f


def lemma34_instance(rng, m1, m2, eps):
    """Gated input for the mass-alignment step.

    Keeps marginal density exactly 1 on supp(f) while flipping one kernel
    cell of a support row to the wrong sign.  Moving the displaced magnitude
    into a sibling cell of the same row preserves the row variation, and
    capping the flipped magnitude keeps the pairing above 1 - eps^6/2^7.
    """
    radius = eps**6 / Fraction(128)
    n, k = m1.size, m2.size
    supp = _choose_support(rng, n)
    f = random_unit_density(rng, m1, supp, signed=False)
    col_signs = [rng.choice((1, -1)) for _ in range(k)]
    rows = []
    for i in range(n):
        if i in supp:
            raw = _random_row(rng, k, smallest=1)
            total = sum(raw)
            rows.append(
                [col_signs[j] * raw[j] * m1.weights[i] / total for j in range(k)]
            )
        else:
            raw = _random_row(rng, k)
            total = sum(raw)
            scale = Fraction(rng.randint(0, 8), 8)
            rows.append([scale * raw[j] * m1.weights[i] / total for j in range(k)])
    if k >= 2:
        i0 = rng.choice(supp)
        j_mis, j_keep = rng.sample(range(k), 2)
        # |Tf| drops by at most 2*f(i0)*w, so cap w strictly inside the gate.
        cap = radius / (4 * f.values[i0])
        w = min(cap * Fraction(rng.randint(1, 8), 16), abs(rows[i0][j_mis]))
        moved = abs(rows[i0][j_mis]) - w
        sign_keep = -1 if rows[i0][j_keep] < 0 else 1
        rows[i0][j_keep] += sign_keep * moved
        rows[i0][j_mis] = -col_signs[j_mis] * w
    T = KernelMeasure(tuple(tuple(r) for r in rows), m1, m2)
    return T, f


def attaining_sup_pair(rng, mu, k, supp=None, signed=True):
    """(T, f) attaining for a sup-norm target: one fully aligned column."""
    n = mu.size
    supp = _choose_support(rng, n) if supp is None else tuple(supp)
    f = random_unit_density(rng, mu, supp, signed=signed)
    t0 = rng.randrange(k)
    s0 = rng.choice((1, -1)) if signed else 1
    rows = []
    for i in range(n):
        row = [Fraction(rng.randint(-8, 8), 8) if signed else Fraction(rng.randint(0, 8), 8) for _ in range(k)]
        if i in supp:
            sign_i = -1 if f.values[i] < 0 else 1
            row[t0] = s0 * sign_i
        rows.append(tuple(row))
    return SupKernel(tuple(rows), mu, k), f, t0, s0


def perturbed_sup_instance(rng, mu, k, radius, signed=True):
    """Gated sup-kernel instance: aligned column pulled in within `radius`."""
    T, f, t0, s0 = attaining_sup_pair(rng, mu, k, signed=signed)
    supp = [i for i, v in enumerate(f.values) if v != 0]
    keep = rng.choice(supp)
    rows = [list(r) for r in T.matrix]
    for i in supp:
        if i == keep:
            continue
        delta = radius * Fraction(rng.randint(0, 8), 16)
        rows[i][t0] = rows[i][t0] * (1 - delta)
    return SupKernel(tuple(tuple(r) for r in rows), mu, k), f


def gated_instance(rng, law, m, k, eps):
    """Dispatch a gated (T, f) for one of the four repair laws."""
    if law.name == "l1l1":
        m1, m2 = random_space(rng, m), random_space(rng, k)
        return perturbed_kernel_instance(rng, m1, m2, 1 - law.gate(eps))
    if law.name == "l1linf" and not 3 * eps < 1:
        raise PreconditionError(f"epsilon must lie in (0, 1/3), got {eps}")
    mu = random_space(rng, m)
    return perturbed_sup_instance(rng, mu, k, 1 - law.gate(eps))


def modulus_pair(rng, kind, m, k):
    """Broad-spectrum sample pair with ||T|| = 1 and ||f|| = 1.

    Half the time the density is steered away from the strong rows/columns
    so pairs far from attainment show up often.
    """
    if kind == "l1":
        m1, m2 = random_space(rng, m), random_space(rng, k)
        rows = []
        densities = [Fraction(rng.randint(0, 8), 8) for _ in range(m)]
        top = rng.randrange(m)
        densities[top] = Fraction(1)
        for i in range(m):
            raw = _random_row(rng, k)
            total = sum(raw)
            signs = [rng.choice((1, -1)) for _ in range(k)]
            rows.append(
                tuple(
                    signs[j] * densities[i] * raw[j] * m1.weights[i] / total
                    for j in range(k)
                )
            )
        T = KernelMeasure(tuple(rows), m1, m2)
        supp = None
        if m > 1 and rng.random() < 0.5:
            others = [i for i in range(m) if i != top]
            supp = _choose_support(rng, len(others))
            supp = tuple(others[i] for i in supp)
        f = random_unit_density(rng, m1, supp)
        return f, T
    mu = random_space(rng, m)
    rows = [[Fraction(rng.randint(-8, 8), 8) for _ in range(k)] for _ in range(m)]
    top = rng.randrange(m)
    rows[top][rng.randrange(k)] = Fraction(rng.choice((1, -1)))
    T = SupKernel(tuple(tuple(r) for r in rows), mu, k)
    supp = None
    if m > 1 and rng.random() < 0.5:
        others = [i for i in range(m) if i != top]
        sub = _choose_support(rng, len(others))
        supp = tuple(others[i] for i in sub)
    f = random_unit_density(rng, mu, supp)
    return f, T
