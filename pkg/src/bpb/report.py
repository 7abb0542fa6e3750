"""Result bundle produced by every repair pipeline."""

from __future__ import annotations

from dataclasses import dataclass

from .operators import DualVector
from .spaces import Density


@dataclass(frozen=True)
class AttainDualWitness:
    """Attainment certificate for L1 -> L1 targets: <Sg, dual> = 1."""

    dual: DualVector


@dataclass(frozen=True)
class AttainAtomWitness:
    """Attainment certificate for sup-norm targets: sign * (Sg)(atom) = 1."""

    atom: int
    sign: int


@dataclass(frozen=True)
class ComponentWitness:
    """Attainment inside component `component` of an linf-sum."""

    component: int
    inner: object


@dataclass(frozen=True)
class RepairReport:
    """Repaired pair (g, S) plus everything needed to re-check it."""

    law: str
    epsilon: object
    threshold: object  # the gate 1 - eta(epsilon) the input had to beat
    observed: object  # the input norm ||Tf|| that beat it
    g: Density
    S: object  # KernelMeasure | SupKernel | SumOperator
    witness: object
    dist_vector: object  # ||f - g||_1
    dist_operator: object  # ||T - S||
    steps: dict  # log of the sets and choices made along the way
