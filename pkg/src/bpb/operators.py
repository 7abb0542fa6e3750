"""Kernel representations of operators out of a finite atomic L1 space.

Two kinds are supported.  A :class:`KernelMeasure` is a signed mass matrix on
the product of domain and codomain atoms and represents an L1 -> L1 operator;
its norm is the largest row variation divided by the domain atom weight.  A
:class:`SupKernel` is a bounded matrix and represents an L1 -> Linf operator
(equivalently L1 -> C(K) with K the finite codomain index set); its norm is
the largest absolute entry, and codomain weights, when present, are ignored
by all norms.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import AlignmentError
from .spaces import Density, MeasureSpace, SignVector, check_aligned, l1_norm


@dataclass(frozen=True)
class KernelMeasure:
    """Signed masses nu(i, j) of the product atoms {i} x {j}."""

    matrix: tuple
    domain: MeasureSpace
    codomain: MeasureSpace

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.matrix)
        object.__setattr__(self, "matrix", rows)
        if len(rows) != self.domain.size:
            raise AlignmentError("kernel row count differs from domain atom count")
        for r in rows:
            if len(r) != self.codomain.size:
                raise AlignmentError("kernel column count differs from codomain atom count")

    def row_variation(self, i):
        """Total variation of row i: sum_j |nu(i, j)|."""
        return sum(abs(v) for v in self.matrix[i])

    def marginal_density(self, i):
        """Row variation divided by the domain weight of atom i."""
        return self.row_variation(i) / self.domain.weights[i]

    def marginal_densities(self):
        return tuple(self.marginal_density(i) for i in range(self.domain.size))


@dataclass(frozen=True)
class SupKernel:
    """Bounded matrix h(omega, t) over domain atoms x codomain points."""

    matrix: tuple
    domain: MeasureSpace
    codomain_size: int
    codomain: MeasureSpace | None = None

    def __post_init__(self):
        rows = tuple(tuple(r) for r in self.matrix)
        object.__setattr__(self, "matrix", rows)
        if len(rows) != self.domain.size:
            raise AlignmentError("kernel row count differs from domain atom count")
        if self.codomain_size < 1:
            raise ValueError("codomain needs at least one atom")
        for r in rows:
            if len(r) != self.codomain_size:
                raise AlignmentError("kernel column count differs from codomain size")
        if self.codomain is not None and self.codomain.size != self.codomain_size:
            raise AlignmentError("optional codomain weights disagree with codomain size")


@dataclass(frozen=True)
class DualVector:
    """A functional on the codomain; norming when its sup norm is <= 1."""

    values: tuple

    def __post_init__(self):
        object.__setattr__(self, "values", tuple(self.values))


def kernel_norm(T):
    """Operator norm of an L1 -> L1 kernel: max marginal density."""
    return max(T.marginal_densities())


def apply_l1l1(T, f):
    """Image density (Tf)(j) = sum_i f_i nu(i, j) / m2(j)."""
    check_aligned(T.domain, f)
    cols = range(T.codomain.size)
    sums = [sum(f.values[i] * T.matrix[i][j] for i in range(T.domain.size)) for j in cols]
    return Density(tuple(s / w for s, w in zip(sums, T.codomain.weights)))


def kernel_pairing(T, f, g):
    """Duality pairing <Tf, g> = sum_ij f_i nu(i, j) g_j."""
    check_aligned(T.domain, f)
    if len(g.values) != T.codomain.size:
        raise AlignmentError("dual vector does not match codomain")
    return sum(
        f.values[i] * T.matrix[i][j] * g.values[j]
        for i in range(T.domain.size)
        for j in range(T.codomain.size)
    )


def sup_norm(T):
    """Operator norm of an L1 -> Linf kernel: max |h(omega, t)|."""
    return max(abs(v) for row in T.matrix for v in row)


def apply_l1linf(T, f):
    """Values (Tf)(t) = sum_omega mu(omega) h(omega, t) f(omega) over K."""
    check_aligned(T.domain, f)
    mu = T.domain.weights
    return tuple(
        sum(mu[i] * T.matrix[i][t] * f.values[i] for i in range(T.domain.size))
        for t in range(T.codomain_size)
    )


def sup_image_norm(values):
    return max(abs(v) for v in values)


def adjoint_point(T, s):
    """Column h(., s), the adjoint image of the point evaluation at s."""
    if not 0 <= s < T.codomain_size:
        raise IndexError(f"codomain index {s} out of range")
    return tuple(row[s] for row in T.matrix)


def conjugate_kernel(T, sv: SignVector):
    """Compose an L1 -> L1 kernel with a domain sign isometry (row signs)."""
    if len(sv.signs) != T.domain.size:
        raise AlignmentError("sign vector does not match kernel domain")
    rows = tuple(tuple(s * v for v in row) for s, row in zip(sv.signs, T.matrix))
    return KernelMeasure(rows, T.domain, T.codomain)


def conjugate_sup(T, sv: SignVector):
    """Compose an L1 -> Linf kernel with a domain sign isometry."""
    if len(sv.signs) != T.domain.size:
        raise AlignmentError("sign vector does not match kernel domain")
    rows = tuple(tuple(s * v for v in row) for s, row in zip(sv.signs, T.matrix))
    return SupKernel(rows, T.domain, T.codomain_size, T.codomain)


def _is_sum(op):
    return hasattr(op, "components")


def operator_norm(op):
    """Norm for either kernel kind, or an linf-sum of sup kernels."""
    if _is_sum(op):
        return max(operator_norm(c) for c in op.components)
    if isinstance(op, KernelMeasure):
        return kernel_norm(op)
    return sup_norm(op)


def image_norm(op, f):
    """Codomain norm of op(f)."""
    if _is_sum(op):
        return max(image_norm(c, f) for c in op.components)
    if isinstance(op, KernelMeasure):
        return l1_norm(op.codomain, apply_l1l1(op, f))
    return sup_image_norm(apply_l1linf(op, f))


def operator_distance(a, b):
    """Norm of a - b for two operators of the same kind and shape."""
    if _is_sum(a) or _is_sum(b):
        if not (_is_sum(a) and _is_sum(b)) or len(a.components) != len(b.components):
            raise AlignmentError("sum operators have different component lists")
        return max(operator_distance(x, y) for x, y in zip(a.components, b.components))
    if isinstance(a, KernelMeasure) != isinstance(b, KernelMeasure):
        raise AlignmentError("cannot compare kernels of different kinds")
    if isinstance(a, KernelMeasure):
        if a.domain.weights != b.domain.weights or a.codomain.weights != b.codomain.weights:
            raise AlignmentError("kernels live over different spaces")
        diff = tuple(
            tuple(x - y for x, y in zip(ra, rb)) for ra, rb in zip(a.matrix, b.matrix)
        )
        return kernel_norm(KernelMeasure(diff, a.domain, a.codomain))
    if a.domain.weights != b.domain.weights or a.codomain_size != b.codomain_size:
        raise AlignmentError("kernels live over different spaces")
    return max(
        abs(x - y) for ra, rb in zip(a.matrix, b.matrix) for x, y in zip(ra, rb)
    )
