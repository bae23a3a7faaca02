"""Command line front end.

Exit codes: 0 success, 1 verification failure, 2 input error,
3 precondition error, 4 result/family label mismatch.
"""

from __future__ import annotations

import argparse
import logging
import re
import sys
from pathlib import Path

from . import serialize
from .decomp import STRATEGIES, decompose, impossibility_certificate, verify_ledger
from .errors import FrameDecompError, InputError
from .frames import spectral_report
from .linops import Tolerances
from .zoo import GeneratorSpec, generate

log = logging.getLogger("framedecomp")

EXIT_OK = 0
EXIT_FAIL = 1
EXIT_INPUT = 2
EXIT_PRECONDITION = 3
EXIT_LABEL_MISMATCH = 4


def parse_blocks(text: str) -> list:
    """Parse ``"1-2;3,4;5-8"`` into ``[[1, 2], [3, 4], [5, 6, 7, 8]]``."""
    blocks = []
    for chunk in text.split(";"):
        chunk = chunk.strip()
        if not chunk:
            continue
        block = []
        for item in chunk.split(","):
            item = item.strip()
            m = re.fullmatch(r"(-?\d+)(?:\s*-\s*(-?\d+))?", item)
            if not m:
                raise InputError(f"bad block item {item!r}")
            lo = int(m.group(1))
            hi = int(m.group(2)) if m.group(2) is not None else lo
            if hi < lo:
                raise InputError(f"empty range {item!r}")
            block.extend(range(lo, hi + 1))
        blocks.append(block)
    if not blocks:
        raise InputError("no blocks given")
    return blocks


def _read_text(path: str) -> str:
    if path == "-":
        return sys.stdin.read()
    try:
        return Path(path).read_text()
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc.strerror}") from None


def _read_family(path: str):
    return serialize.family_from_dict(serialize.loads(_read_text(path)))


def _emit(doc, output) -> None:
    text = serialize.dumps(doc)
    if output in (None, "-"):
        sys.stdout.write(text)
    else:
        Path(output).write_text(text)


def cmd_gen(args, tol) -> int:
    kind = args.kind.replace("-", "_")
    spec = GeneratorSpec(kind=kind, n=args.n, dim=args.dim, copies=args.copies,
                         bessel=args.bessel, seed=args.seed)
    _emit(serialize.family_to_dict(generate(spec)), args.output)
    return EXIT_OK


def cmd_analyze(args, tol) -> int:
    F = _read_family(args.family)
    _emit(serialize.report_to_dict(spectral_report(F, tol)), args.output)
    return EXIT_OK


def cmd_decompose(args, tol) -> int:
    F = _read_family(args.family)
    result = decompose(F, args.epsilon, args.strategy, tol, args.start_index, args.allow_non_unit)
    check = verify_ledger(F, result, tol)
    if not check.ok:
        log.error("refusing to write unverified result: %s", check.violation)
        return EXIT_FAIL
    _emit(serialize.result_to_dict(result), args.output)
    return EXIT_OK


def cmd_verify(args, tol) -> int:
    F = _read_family(args.family)
    result = serialize.result_from_dict(serialize.loads(_read_text(args.result)))
    if sorted(result.part_1 + result.part_2) != sorted(F.labels):
        _emit({"ok": False, "violation": {"check": "labels",
                                          "detail": "result was not produced for this family"}},
              args.output)
        return EXIT_LABEL_MISMATCH
    check = verify_ledger(F, result, tol)
    _emit({"ok": check.ok, "violation": check.violation}, args.output)
    return EXIT_OK if check.ok else EXIT_FAIL


def cmd_certify(args, tol) -> int:
    F = _read_family(args.family)
    cert = impossibility_certificate(F, parse_blocks(args.blocks), args.epsilon, tol)
    _emit(serialize.certificate_to_dict(cert), args.output)
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(
        prog="framedecomp",
        description="Two-part orthogonal-block decompositions of unit-norm Bessel families.")
    p.add_argument("-v", "--verbose", action="store_true")
    sub = p.add_subparsers(dest="command", required=True)

    def with_output(sp):
        sp.add_argument("-o", "--output", default=None, help="output path (default: stdout)")
        return sp

    g = with_output(sub.add_parser("gen", help="generate a family"))
    g.add_argument("--kind", required=True,
                   choices=["shift-pair", "dyadic-reorder", "union-onb", "random-bessel"])
    g.add_argument("--n", type=int)
    g.add_argument("--dim", type=int)
    g.add_argument("--copies", type=int)
    g.add_argument("--bessel", type=float)
    g.add_argument("--seed", type=int)
    g.set_defaults(func=cmd_gen)

    a = with_output(sub.add_parser("analyze", help="frame/Riesz/Bessel bounds of a family"))
    a.add_argument("family", help="family JSON path, or - for stdin")
    a.set_defaults(func=cmd_analyze)

    d = with_output(sub.add_parser("decompose", help="split a family into two parts"))
    d.add_argument("family")
    d.add_argument("--epsilon", type=float, required=True)
    d.add_argument("--strategy", choices=STRATEGIES, default="ordered")
    d.add_argument("--allow-non-unit", action="store_true")
    d.add_argument("--start-index", type=int, default=1,
                   help="1-based position of the first block (greedy only)")
    d.set_defaults(func=cmd_decompose)

    v = with_output(sub.add_parser("verify", help="re-check a decomposition report"))
    v.add_argument("family")
    v.add_argument("result")
    v.set_defaults(func=cmd_verify)

    c = with_output(sub.add_parser("certify", help="certificate that a block structure is impossible"))
    c.add_argument("family")
    c.add_argument("--blocks", required=True, help='e.g. "1-2;3-4;5-8"')
    c.add_argument("--epsilon", type=float, required=True)
    c.set_defaults(func=cmd_certify)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code else EXIT_OK
    logging.basicConfig(level=logging.DEBUG if args.verbose else logging.WARNING,
                        format="%(name)s: %(levelname)s: %(message)s")
    try:
        tol = Tolerances.from_env()
        return args.func(args, tol)
    except FrameDecompError as exc:
        precondition = getattr(exc, "precondition", None)
        tag = f" [{precondition}]" if precondition else ""
        print(f"framedecomp: error{tag}: {exc}", file=sys.stderr)
        return exc.exit_code


if __name__ == "__main__":
    sys.exit(main())
