"""JSON instance and result files.

An instance file is a single JSON document holding the scalar mode, the
domain weights, a codomain description, the operator matrix, the input
density, and epsilon.  Rationals are written as lowest-terms "p/q" strings
so exact instances survive the round trip; approx-mode values are decimal
literals.  A result file embeds the instance it came from plus the repaired
pair, witness, distances, and step log.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction

from .errors import ParseError
from .operators import DualVector, KernelMeasure, SupKernel
from .report import AttainAtomWitness, AttainDualWitness, ComponentWitness
from .scalars import APPROX, EXACT, EXACT_CONTEXT, Surd, format_scalar
from .spaces import Density, MeasureSpace

CODOMAIN_KINDS = ("l1", "linf", "ck")


@dataclass(frozen=True)
class InstanceFile:
    scalar_mode: str
    domain_weights: tuple
    codomain_kind: str
    codomain_weights: tuple | None
    codomain_atoms: int | None
    operator: tuple
    vector: tuple
    epsilon: Fraction


def _fraction(field, raw):
    try:
        return Fraction(str(raw))
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"{field}: malformed rational {raw!r}") from None


def _scalar_list(field, raw):
    if not isinstance(raw, list) or not raw:
        raise ParseError(f"{field}: expected a nonempty list")
    return tuple(_fraction(f"{field}[{i}]", v) for i, v in enumerate(raw))


def parse_instance(text):
    """Parse instance JSON; errors carry the offending field or line."""
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level: expected a JSON object")

    for key in ("scalar_mode", "domain_weights", "codomain", "operator", "vector", "epsilon"):
        if key not in doc:
            raise ParseError(f"{key}: missing field")

    mode = doc["scalar_mode"]
    if mode not in (EXACT, APPROX):
        raise ParseError(f"scalar_mode: expected 'exact' or 'approx', got {mode!r}")

    weights = _scalar_list("domain_weights", doc["domain_weights"])
    for i, w in enumerate(weights):
        if not w > 0:
            raise ParseError(f"domain_weights[{i}]: nonpositive atom weight")

    cod = doc["codomain"]
    if not isinstance(cod, dict) or "kind" not in cod:
        raise ParseError("codomain: expected an object with a 'kind' field")
    kind = cod["kind"]
    if kind not in CODOMAIN_KINDS:
        raise ParseError(f"codomain.kind: expected one of {CODOMAIN_KINDS}, got {kind!r}")
    cod_weights = None
    cod_atoms = None
    if "weights" in cod:
        cod_weights = _scalar_list("codomain.weights", cod["weights"])
        for i, w in enumerate(cod_weights):
            if not w > 0:
                raise ParseError(f"codomain.weights[{i}]: nonpositive atom weight")
        cod_atoms = len(cod_weights)
    if "atoms" in cod:
        if not isinstance(cod["atoms"], int) or cod["atoms"] < 1:
            raise ParseError("codomain.atoms: expected a positive integer")
        if cod_atoms is not None and cod_atoms != cod["atoms"]:
            raise ParseError("codomain: atoms and weights disagree")
        cod_atoms = cod["atoms"]
    if kind == "l1" and cod_weights is None:
        raise ParseError("codomain.weights: required for kind 'l1'")
    if cod_atoms is None:
        raise ParseError("codomain: needs 'atoms' or 'weights'")

    op_raw = doc["operator"]
    if not isinstance(op_raw, list) or not op_raw:
        raise ParseError("operator: expected a nonempty matrix")
    if len(op_raw) != len(weights):
        raise ParseError(
            f"operator: {len(op_raw)} rows for {len(weights)} domain atoms"
        )
    rows = []
    for i, row in enumerate(op_raw):
        if not isinstance(row, list) or len(row) != cod_atoms:
            raise ParseError(f"operator[{i}]: ragged matrix row")
        rows.append(tuple(_fraction(f"operator[{i}][{j}]", v) for j, v in enumerate(row)))

    vector = _scalar_list("vector", doc["vector"])
    if len(vector) != len(weights):
        raise ParseError(f"vector: {len(vector)} entries for {len(weights)} atoms")

    eps = _fraction("epsilon", doc["epsilon"])

    return InstanceFile(
        scalar_mode=mode,
        domain_weights=weights,
        codomain_kind=kind,
        codomain_weights=cod_weights,
        codomain_atoms=cod_atoms,
        operator=tuple(rows),
        vector=vector,
        epsilon=eps,
    )


def instance_to_dict(inst):
    cod = {"kind": inst.codomain_kind}
    if inst.codomain_weights is not None:
        cod["weights"] = [format_scalar(w) for w in inst.codomain_weights]
    if inst.codomain_kind != "l1":
        cod["atoms"] = inst.codomain_atoms
    return {
        "scalar_mode": inst.scalar_mode,
        "domain_weights": [format_scalar(w) for w in inst.domain_weights],
        "codomain": cod,
        "operator": [[format_scalar(v) for v in row] for row in inst.operator],
        "vector": [format_scalar(v) for v in inst.vector],
        "epsilon": format_scalar(inst.epsilon),
    }


def serialize_instance(inst):
    return json.dumps(instance_to_dict(inst), indent=2, sort_keys=True) + "\n"


def build_instance(inst, ctx):
    """Materialize (T, f, eps) from a parsed instance in the given mode."""
    conv = ctx.convert
    domain = MeasureSpace(tuple(conv(w) for w in inst.domain_weights))
    f = Density(tuple(conv(v) for v in inst.vector))
    matrix = tuple(tuple(conv(v) for v in row) for row in inst.operator)
    if inst.codomain_kind == "l1":
        codomain = MeasureSpace(tuple(conv(w) for w in inst.codomain_weights))
        T = KernelMeasure(matrix, domain, codomain)
    else:
        codomain = None
        if inst.codomain_weights is not None:
            codomain = MeasureSpace(tuple(conv(w) for w in inst.codomain_weights))
        T = SupKernel(matrix, domain, inst.codomain_atoms, codomain)
    return T, f, conv(inst.epsilon)


def instance_from_objects(T, f, eps, mode=EXACT):
    """Wrap in-memory objects back into an InstanceFile."""
    frac = Fraction
    if isinstance(T, KernelMeasure):
        kind, cod_weights, cod_atoms = "l1", tuple(map(frac, T.codomain.weights)), T.codomain.size
    else:
        kind = "linf" if T.codomain is not None else "ck"
        cod_weights = tuple(map(frac, T.codomain.weights)) if T.codomain else None
        cod_atoms = T.codomain_size
    return InstanceFile(
        scalar_mode=mode,
        domain_weights=tuple(map(frac, T.domain.weights)),
        codomain_kind=kind,
        codomain_weights=cod_weights,
        codomain_atoms=cod_atoms,
        operator=tuple(tuple(map(frac, row)) for row in T.matrix),
        vector=tuple(map(frac, f.values)),
        epsilon=frac(eps),
    )


def jsonify(value):
    """Recursively convert a step log into JSON-safe primitives."""
    if isinstance(value, Fraction):
        return format_scalar(value)
    if isinstance(value, Surd):
        return float(value)
    if isinstance(value, dict):
        return {str(k): jsonify(v) for k, v in value.items()}
    if isinstance(value, (list, tuple, set, frozenset)):
        items = sorted(value) if isinstance(value, (set, frozenset)) else value
        return [jsonify(v) for v in items]
    if isinstance(value, float):
        return repr(value)
    return value


def witness_to_dict(witness):
    if isinstance(witness, AttainDualWitness):
        return {"kind": "dual", "values": [format_scalar(v) for v in witness.dual.values]}
    if isinstance(witness, AttainAtomWitness):
        return {"kind": "atom", "atom": witness.atom, "sign": witness.sign}
    if isinstance(witness, ComponentWitness):
        return {
            "kind": "component",
            "component": witness.component,
            "inner": witness_to_dict(witness.inner),
        }
    raise TypeError(f"unknown witness type {type(witness)!r}")


def witness_from_dict(doc, ctx):
    if not isinstance(doc, dict) or "kind" not in doc:
        raise ParseError("witness: expected an object with a 'kind' field")
    if doc["kind"] == "dual":
        vals = _scalar_list("witness.values", doc["values"])
        return AttainDualWitness(DualVector(tuple(ctx.convert(v) for v in vals)))
    if doc["kind"] == "atom":
        return AttainAtomWitness(atom=int(doc["atom"]), sign=int(doc["sign"]))
    raise ParseError(f"witness.kind: unsupported kind {doc['kind']!r}")


def serialize_result(report, inst):
    doc = {
        "law": report.law,
        "epsilon": format_scalar(report.epsilon),
        "threshold": format_scalar(report.threshold),
        "observed": format_scalar(report.observed),
        "instance": instance_to_dict(inst),
        "g": [format_scalar(v) for v in report.g.values],
        "S": [[format_scalar(v) for v in row] for row in report.S.matrix],
        "witness": witness_to_dict(report.witness),
        "dist_vector": format_scalar(report.dist_vector),
        "dist_operator": format_scalar(report.dist_operator),
        "steps": jsonify(report.steps),
    }
    return json.dumps(doc, indent=2, sort_keys=True) + "\n"


@dataclass(frozen=True)
class ResultFile:
    law: str
    epsilon: Fraction
    threshold: Fraction
    observed: Fraction
    instance: InstanceFile
    g: tuple
    S: tuple
    witness: dict
    dist_vector: Fraction
    dist_operator: Fraction
    steps: dict


def parse_result(text):
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise ParseError(f"line {exc.lineno}, column {exc.colno}: {exc.msg}") from None
    if not isinstance(doc, dict):
        raise ParseError("top level: expected a JSON object")
    for key in (
        "law",
        "epsilon",
        "threshold",
        "observed",
        "instance",
        "g",
        "S",
        "witness",
        "dist_vector",
        "dist_operator",
    ):
        if key not in doc:
            raise ParseError(f"{key}: missing field")
    inst = parse_instance(json.dumps(doc["instance"]))
    g = _scalar_list("g", doc["g"])
    if not isinstance(doc["S"], list) or not doc["S"]:
        raise ParseError("S: expected a nonempty matrix")
    S_rows = []
    for i, row in enumerate(doc["S"]):
        if not isinstance(row, list) or len(row) != inst.codomain_atoms:
            raise ParseError(f"S[{i}]: ragged matrix row")
        S_rows.append(tuple(_fraction(f"S[{i}][{j}]", v) for j, v in enumerate(row)))
    if len(S_rows) != len(inst.domain_weights):
        raise ParseError("S: row count differs from domain atom count")
    return ResultFile(
        law=doc["law"],
        epsilon=_fraction("epsilon", doc["epsilon"]),
        threshold=_fraction("threshold", doc["threshold"]),
        observed=_fraction("observed", doc["observed"]),
        instance=inst,
        g=g,
        S=tuple(S_rows),
        witness=doc["witness"],
        dist_vector=_fraction("dist_vector", doc["dist_vector"]),
        dist_operator=_fraction("dist_operator", doc["dist_operator"]),
        steps=doc.get("steps", {}),
    )


def build_result_objects(result, ctx=EXACT_CONTEXT):
    """Materialize (T, f, eps, g, S, witness) from a parsed result."""
    T, f, eps = build_instance(result.instance, ctx)
    g = Density(tuple(ctx.convert(v) for v in result.g))
    matrix = tuple(tuple(ctx.convert(v) for v in row) for row in result.S)
    if isinstance(T, KernelMeasure):
        S = KernelMeasure(matrix, T.domain, T.codomain)
    else:
        S = SupKernel(matrix, T.domain, T.codomain_size, T.codomain)
    witness = witness_from_dict(result.witness, ctx)
    return T, f, eps, g, S, witness
