"""Command-line front end.

Exit codes: 0 when every check passes, 1 when a counterexample is found
(the report is still complete), 2 on usage or input errors.
"""

from __future__ import annotations

import argparse
import json
import sys
import time

from . import cm_operad, envelope, fincat, finset, semantics
from .dot import write_dot
from .verdict import Verdict, jsonable

EXIT_PASS, EXIT_COUNTEREXAMPLE, EXIT_USAGE = 0, 1, 2


class UsageError(ValueError):
    pass


def _positive(text: str) -> int:
    value = int(text)
    if value < 1:
        raise argparse.ArgumentTypeError(f"expected an integer >= 1, got {value}")
    return value


def _natural(text: str) -> int:
    value = int(text)
    if value < 0:
        raise argparse.ArgumentTypeError(f"expected an integer >= 0, got {value}")
    return value


def _colors(text: str) -> list[str]:
    return [c.strip() for c in text.split(",") if c.strip()]


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("json", "text"), default="json")
    common.add_argument("--dot", metavar="PATH",
                        help="write the constructed category as a DOT digraph")
    common.add_argument("--timing", action="store_true",
                        help="include wall_time (makes reports non-reproducible)")

    variant = argparse.ArgumentParser(add_help=False)
    variant.add_argument("--variant", choices=[v.value for v in cm_operad.Variant],
                         default="strengthened")

    parser = argparse.ArgumentParser(prog="opcheck", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    verify = sub.add_parser("verify", help="run an exhaustive verifier")
    vsub = verify.add_subparsers(dest="target", required=True)

    p = vsub.add_parser("operad", parents=[common, variant])
    p.add_argument("--max-size", type=_positive, default=3)
    p.add_argument("--inert-only", action="store_true",
                   help="check hom decomposition over inert base maps only")
    p.add_argument("--up-to-equivalence", action="store_true")

    p = vsub.add_parser("envelope", parents=[common, variant])
    p.add_argument("--max-size", type=_natural, default=2)
    p.add_argument("--shape-bound", type=_natural, default=2)
    p.add_argument("--coherence", choices=envelope.COHERENCES, default="commuting")

    p = vsub.add_parser("phi", parents=[common, variant])
    p.add_argument("--max-size", type=_positive, default=3)

    p = vsub.add_parser("segal", parents=[common, variant])
    p.add_argument("--arity", type=_natural, default=2)
    p.add_argument("--up-to-equivalence", action="store_true")

    p = vsub.add_parser("closure", parents=[common, variant])
    p.add_argument("--max-size", type=_positive, default=3)

    p = vsub.add_parser("factorization", parents=[common])
    p.add_argument("--max-size", type=_natural, default=3)

    p = sub.add_parser("mul", parents=[common, variant], help="list multimorphisms")
    p.add_argument("--inputs", type=_colors, default=[])
    p.add_argument("--output", choices=sorted(cm_operad.COLORS), required=True)

    p = sub.add_parser("functor", parents=[common], help="build and check A_{E,M}")
    p.add_argument("--algebra", required=True,
                   help="algebra JSON path or a bundled name")
    p.add_argument("--max-size", type=_natural, default=3)
    p.add_argument("--check", type=_colors, default=["functoriality", "cardinality", "cube"])

    p = sub.add_parser("map", parents=[common], help="classify and factorize a pointed map")
    p.add_argument("map", help='notation "<m>-><n>:i1,...,im", 0 = basepoint')

    p = sub.add_parser("hom", parents=[common, variant], help="list CM morphisms")
    p.add_argument("hom_source", metavar="SOURCE", help='CM object such as "(2|1,2)"')
    p.add_argument("hom_target", metavar="TARGET")
    return parser


def _report(args, verdict: Verdict, bounds: dict, **extra) -> dict:
    echo = {k: v for k, v in sorted(vars(args).items())
            if k not in {"format", "dot", "timing"}}
    report = {"command": jsonable(echo),
              "variant": getattr(args, "variant", None),
              "bounds": bounds}
    report.update(verdict.to_json())
    report.update(jsonable(extra))
    return report


def _dump(args, category) -> None:
    if args.dot:
        write_dot(category, args.dot)


def cmd_verify_operad(args):
    p = cm_operad.build_cm_truncation(args.max_size, args.variant)
    _dump(args, p.total)
    verdict = fincat.check_operad_axioms(p, up_to_equivalence=args.up_to_equivalence,
                                         inert_only=args.inert_only)
    return _report(args, verdict, {"max_size": args.max_size})


def cmd_verify_envelope(args):
    if args.dot:
        _dump(args, envelope.build_envelope(args.max_size, args.shape_bound,
                                            args.variant, args.coherence).total)
    verdict = envelope.verify_envelope_iso(args.max_size, args.shape_bound,
                                           args.variant, args.coherence)
    return _report(args, verdict, {"max_size": args.max_size,
                                   "shape_bound": args.shape_bound})


def cmd_verify_phi(args):
    if args.dot:
        _dump(args, cm_operad.build_cm_truncation(args.max_size, args.variant).total)
    verdict = cm_operad.phi_check(args.max_size, args.variant)
    return _report(args, verdict, {"max_size": args.max_size})


def cmd_verify_segal(args):
    fiber, functor = cm_operad.segal_fiber(args.arity, args.variant)
    _dump(args, fiber)
    check = (fincat.categories_equivalent if args.up_to_equivalence
             else fincat.categories_isomorphic)
    verdict = check(functor)
    return _report(args, verdict, {"arity": args.arity},
                   fiber_objects=len(fiber.objects), fiber_arrows=len(fiber.arrows))


def cmd_verify_closure(args):
    if args.dot:
        _dump(args, cm_operad.build_cm_truncation(args.max_size, args.variant).total)
    verdict = cm_operad.closure_check(args.max_size, args.variant)
    return _report(args, verdict, {"max_size": args.max_size})


def cmd_verify_factorization(args):
    n = args.max_size
    count = 0
    verdict = None
    for m in range(n + 1):
        for k in range(n + 1):
            for f in finset.enumerate_maps(finset.PointedSet(m), finset.PointedSet(k)):
                count += 1
                v = finset.check_factorization_unique(f)
                if not v and verdict is None:
                    verdict = v
    if verdict is None:
        verdict = Verdict.passed("factorization_unique", maps=count)
    return _report(args, verdict, {"max_size": n})


def cmd_mul(args):
    arrows = cm_operad.mul_set(args.inputs, args.output, args.variant)
    verdict = Verdict.passed("mul", count=len(arrows))
    return _report(args, verdict, {"arity": len(args.inputs)},
                   count=len(arrows), multimorphisms=arrows)


def cmd_functor(args):
    E, M = semantics.load_algebra(args.algebra)
    known = {"functoriality", "cardinality", "cube"}
    unknown = set(args.check) - known
    if unknown:
        raise UsageError(f"unknown checks {sorted(unknown)}; choose from {sorted(known)}")
    if args.dot:
        _dump(args, fincat.fstar_category(args.max_size))
    verdicts = {"algebra": semantics.check_algebra(E, M)}
    if verdicts["algebra"]:
        A = semantics.build_A(E, M, args.max_size)
        if "functoriality" in args.check:
            verdicts["functoriality"] = semantics.check_functoriality(A)
        if "cardinality" in args.check:
            verdicts["cardinality"] = semantics.check_cardinality(A, E, M)
        if "cube" in args.check:
            verdicts["cube"] = _all_cubes(E, M, args.max_size)
    failed = [v for v in verdicts.values() if not v]
    summary = {name: v.to_json() for name, v in verdicts.items()}
    verdict = failed[0] if failed else Verdict.passed("functor", checks=sorted(verdicts))
    return _report(args, verdict, {"max_size": args.max_size}, checks=summary)


def _all_cubes(E, M, bound: int) -> Verdict:
    import itertools

    count = 0
    for n in range(1, bound + 1):
        for k in range(n + 1):
            for marked in itertools.combinations(range(1, n + 1), k):
                v = semantics.check_inert_cube_limit(E, M, finset.PointedSet(n), marked)
                if not v:
                    return v
                count += 1
    return Verdict.passed("cube_limit", cubes=count)


def cmd_map(args):
    f = finset.parse_map(args.map)
    inert, active = finset.classify(f)
    i, a = finset.factorize(f)
    verdict = finset.check_factorization_unique(f)
    return _report(args, verdict, {}, map=f, inert=inert, active=active,
                   factorization={"inert": i, "active": a})


def cmd_hom(args):
    src = cm_operad.parse_cm_object(args.hom_source)
    tgt = cm_operad.parse_cm_object(args.hom_target)
    arrows = [cm_operad.CMMorphism(f, src, tgt, cm_operad.as_variant(args.variant))
              for f in finset.enumerate_maps(src.base, tgt.base)
              if cm_operad.is_cm_morphism(f, src, tgt, args.variant)]
    return _report(args, Verdict.passed("hom", count=len(arrows)), {},
                   count=len(arrows), morphisms=arrows)


COMMANDS = {
    ("verify", "operad"): cmd_verify_operad,
    ("verify", "envelope"): cmd_verify_envelope,
    ("verify", "phi"): cmd_verify_phi,
    ("verify", "segal"): cmd_verify_segal,
    ("verify", "closure"): cmd_verify_closure,
    ("verify", "factorization"): cmd_verify_factorization,
    ("mul", None): cmd_mul,
    ("functor", None): cmd_functor,
    ("map", None): cmd_map,
    ("hom", None): cmd_hom,
}


def _text(report: dict) -> str:
    lines = [f"verdict: {report['verdict']} ({report['check']})"]
    skip = {"verdict", "check", "command", "wall_time"}
    for key, value in report.items():
        if key not in skip and value is not None:
            lines.append(f"{key}: {json.dumps(value, sort_keys=True)}")
    if "wall_time" in report:
        lines.append(f"wall_time: {report['wall_time']:.3f}s")
    return "\n".join(lines)


def run(argv=None) -> tuple[int, str]:
    parser = build_parser()
    args = parser.parse_args(argv)
    handler = COMMANDS[(args.command, args.target if args.command == "verify" else None)]
    start = time.perf_counter()
    try:
        report = handler(args)
    except (ValueError, FileNotFoundError, KeyError) as exc:
        return EXIT_USAGE, json.dumps({"error": str(exc)}, sort_keys=True)
    if args.timing:
        report["wall_time"] = time.perf_counter() - start
    code = EXIT_PASS if report["verdict"] == "pass" else EXIT_COUNTEREXAMPLE
    if args.format == "text":
        return code, _text(report)
    return code, json.dumps(report, sort_keys=True, indent=2)


def main(argv=None) -> int:
    try:
        code, text = run(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    stream = sys.stderr if code == EXIT_USAGE else sys.stdout
    print(text, file=stream)
    return code


if __name__ == "__main__":
    sys.exit(main())
