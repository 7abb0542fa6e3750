"""Command line interface.

Subcommands: repair, gen, certify, modulus, norm.  All commands are pure
functions of their arguments, the seed, and the input bytes; output files
are written atomically (write to a temp file, then rename).  Exit codes:
0 success, 1 IO/parse error, 2 gate or precondition failure, 3 violated
invariant or failed certification.  The environment variable
BPB_SCALAR_MODE overrides the scalar_mode of any input file.
"""

from __future__ import annotations

import argparse
import os
import random
import sys
import tempfile
from fractions import Fraction

from .errors import (
    CertificationFailureError,
    ConstructionFailureError,
    InvariantViolationError,
    ParseError,
    PreconditionError,
    SamplingFailureError,
)
from .generate import gated_instance
from .instances import (
    build_instance,
    build_result_objects,
    instance_from_objects,
    parse_instance,
    parse_result,
    serialize_instance,
    serialize_result,
)
from .laws import check_bounds, get_law
from .operators import (
    KernelMeasure,
    apply_l1linf,
    image_norm,
    kernel_pairing,
    operator_distance,
    operator_norm,
)
from .oracle import certify_pi, empirical_modulus
from .report import AttainAtomWitness, AttainDualWitness
from .scalars import EXACT, context_for, format_scalar
from .spaces import l1_distance, l1_norm

CSV_HEADER = "epsilon,sample,defect,est_dist,accepted"


def _atomic_write(path, text):
    directory = os.path.dirname(os.path.abspath(path)) or "."
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".bpb-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as handle:
            handle.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _context_for_instance(inst):
    mode = os.environ.get("BPB_SCALAR_MODE", inst.scalar_mode)
    if mode not in ("exact", "approx"):
        raise ParseError(f"BPB_SCALAR_MODE: expected 'exact' or 'approx', got {mode!r}")
    return context_for(mode)


def _parse_dims(text):
    parts = text.lower().split("x")
    if len(parts) != 2:
        raise ParseError(f"--dims: expected MxN, got {text!r}")
    try:
        m, k = int(parts[0]), int(parts[1])
    except ValueError:
        raise ParseError(f"--dims: expected MxN integers, got {text!r}") from None
    if m < 1 or k < 1:
        raise ParseError("--dims: dimensions must be positive")
    return m, k


def _parse_eps(text):
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise ParseError(f"--eps: malformed rational {text!r}") from None


def cmd_repair(args):
    law = get_law(args.law)
    inst = parse_instance(_read(args.input))
    ctx = _context_for_instance(inst)
    T, f, eps = build_instance(inst, ctx)
    report = law.run(T, f, eps, ctx)
    _atomic_write(args.output, serialize_result(report, inst))
    print(
        f"repaired with {law.name}: ‖f−g‖₁ = {format_scalar(report.dist_vector)}, "
        f"‖T−S‖ = {format_scalar(report.dist_operator)}"
    )
    return 0


def cmd_gen(args):
    law = get_law(args.law)
    m, k = _parse_dims(args.dims)
    eps = _parse_eps(args.eps)
    if not 0 < eps < 1:
        raise PreconditionError(f"epsilon must lie in (0, 1), got {eps}")
    rng = random.Random(args.seed)
    T, f = gated_instance(rng, law, m, k, eps)
    inst = instance_from_objects(T, f, eps, mode=EXACT)
    _atomic_write(args.output, serialize_instance(inst))
    print(f"generated gated {law.name} instance at eps = {format_scalar(eps)}")
    return 0


def _certify_checks(result, ctx):
    law = get_law(result.law)
    T, f, eps, g, S, witness = build_result_objects(result, ctx)
    failures = []

    gate = law.gate(eps)
    if not ctx.eq(ctx.convert(result.threshold), gate):
        failures.append("recorded threshold differs from the law's gate")
    observed = image_norm(T, f)
    if not ctx.eq(observed, ctx.convert(result.observed)):
        failures.append("recorded ‖Tf‖ differs from recomputation")
    if not ctx.gt(observed, gate):
        failures.append("input does not clear the gate")

    if not ctx.eq(l1_norm(S.domain, g), 1):
        failures.append("‖g‖₁ ≠ 1")
    if not ctx.eq(operator_norm(S), 1):
        failures.append("‖S‖ ≠ 1")
    if not ctx.eq(image_norm(S, g), 1):
        failures.append("‖Sg‖ ≠ 1")
    if not certify_pi(g, S, ctx).attained:
        failures.append("pair fails attainment replay")

    if isinstance(witness, AttainDualWitness):
        if not isinstance(S, KernelMeasure):
            failures.append("dual witness on a sup-norm target")
        else:
            if any(abs(v) > 1 for v in witness.dual.values):
                failures.append("witness functional exceeds the unit ball")
            if not ctx.eq(kernel_pairing(S, g, witness.dual), 1):
                failures.append("⟨Sg, g̃⟩ ≠ 1")
    elif isinstance(witness, AttainAtomWitness):
        if isinstance(S, KernelMeasure):
            failures.append("atom witness on an L1 target")
        else:
            value = apply_l1linf(S, g)[witness.atom]
            if not ctx.eq(witness.sign * value, 1):
                failures.append("witness atom does not attain")

    dv = l1_distance(T.domain, f, g)
    do = operator_distance(T, S)
    if not ctx.eq(dv, ctx.convert(result.dist_vector)):
        failures.append("recorded ‖f−g‖₁ differs from recomputation")
    if not ctx.eq(do, ctx.convert(result.dist_operator)):
        failures.append("recorded ‖T−S‖ differs from recomputation")
    if not check_bounds(law, eps, dv, do, ctx):
        failures.append("distances exceed the law's promised bounds")
    return failures


def cmd_certify(args):
    result = parse_result(_read(args.input))
    ctx = _context_for_instance(result.instance)
    failures = _certify_checks(result, ctx)
    if failures:
        raise CertificationFailureError("; ".join(failures))
    print(f"certified: {result.law} result attains with distances within bounds")
    return 0


def cmd_modulus(args):
    law = get_law(args.law)
    m, k = _parse_dims(args.dims)
    eps = _parse_eps(args.eps)
    ctx = context_for(os.environ.get("BPB_SCALAR_MODE", EXACT))
    estimate, rows = empirical_modulus(law.name, eps, (m, k), args.samples, args.seed, ctx)
    lines = [CSV_HEADER]
    for row in rows:
        lines.append(
            ",".join(
                (
                    format_scalar(eps),
                    str(row.index),
                    format_scalar(row.defect),
                    format_scalar(row.est_dist),
                    "1" if row.accepted else "0",
                )
            )
        )
    _atomic_write(args.csv, "\n".join(lines) + "\n")
    print(
        f"accepted {estimate.samples}/{args.samples} samples; "
        f"min defect {format_scalar(estimate.min_defect)} ≥ "
        f"documented bound {format_scalar(estimate.paper_bound)}"
    )
    if estimate.min_defect < estimate.paper_bound:
        raise InvariantViolationError(
            "sampled defect fell below the documented modulus bound"
        )
    return 0


def cmd_norm(args):
    inst = parse_instance(_read(args.input))
    ctx = _context_for_instance(inst)
    T, _, _ = build_instance(inst, ctx)
    print(format_scalar(operator_norm(T)))
    return 0


def _read(path):
    with open(path, "r") as handle:
        return handle.read()


def _parser():
    parser = argparse.ArgumentParser(
        prog="bpb",
        description="Repair near-norm-attaining kernel operators on finite atomic L1 spaces.",
    )
    sub = parser.add_subparsers(dest="command", required=True)
    laws = ("l1l1", "l1linf", "ck-clamp", "ck-bump")

    p = sub.add_parser("repair", help="repair a gated instance")
    p.add_argument("--law", required=True, choices=laws)
    p.add_argument("--input", required=True)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_repair)

    p = sub.add_parser("gen", help="generate a gated instance")
    p.add_argument("--law", required=True, choices=laws)
    p.add_argument("--dims", required=True, help="domain x codomain atoms, e.g. 3x2")
    p.add_argument("--eps", required=True)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--output", required=True)
    p.set_defaults(func=cmd_gen)

    p = sub.add_parser("certify", help="re-validate a result file")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_certify)

    p = sub.add_parser("modulus", help="empirical modulus experiment")
    p.add_argument("--law", required=True, choices=laws)
    p.add_argument("--eps", required=True)
    p.add_argument("--dims", required=True)
    p.add_argument("--samples", required=True, type=int)
    p.add_argument("--seed", required=True, type=int)
    p.add_argument("--csv", required=True)
    p.set_defaults(func=cmd_modulus)

    p = sub.add_parser("norm", help="print the operator norm of an instance")
    p.add_argument("--input", required=True)
    p.set_defaults(func=cmd_norm)

    return parser


def main(argv=None):
    parser = _parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except ParseError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except OSError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except SamplingFailureError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except PreconditionError as exc:  # includes gate failures
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except (InvariantViolationError, ConstructionFailureError, CertificationFailureError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 3


if __name__ == "__main__":
    sys.exit(main())
