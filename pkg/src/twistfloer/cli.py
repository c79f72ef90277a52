"""Command-line interface: ``twistfloer <command> [options]``."""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction

from .complexes import FreeField, Tower, UTorsion, complex_from_dict, homology
from .errors import ParseError, ShapeError, TwistFloerError
from .excision import DerivationLog, FamilySpec, compute_family
from .matrix import RingMatrix, signature, smith_normal_form
from .notation import format_grading, parse_coefficient
from .rings import ZZ, TwistClass, ring_from_name
from .verify import format_table, run_sweep

try:
    import tomllib
except ModuleNotFoundError:  # Python < 3.11
    import tomli as tomllib

FAMILY_COMMANDS = ("twist-knot", "whitehead", "borromean", "two-bridge")


# ---------------------------------------------------------------------------
# input documents


def load_document(path):
    """Read a TOML or JSON document; syntax errors become ParseError with a position."""
    with open(path, "rb") as fh:
        raw = fh.read()
    text = raw.decode("utf-8")
    if path.endswith(".toml"):
        try:
            return tomllib.loads(text), text
        except tomllib.TOMLDecodeError as exc:
            line, col = _toml_position(exc)
            raise ParseError(str(exc).split(" (at")[0], line, col) from None
    try:
        return json.loads(text), text
    except json.JSONDecodeError as exc:
        raise ParseError(exc.msg, exc.lineno, exc.colno) from None


def _toml_position(exc):
    msg = str(exc)
    # tomli messages end in "(at line L, column C)"
    if "line " in msg and "column " in msg:
        try:
            tail = msg.rsplit("(at line ", 1)[1]
            line, col = tail.rstrip(")").split(", column ")
            return int(line), int(col)
        except (IndexError, ValueError):
            pass
    return None, None


def _family_spec(args):
    doc = {}
    if args.input:
        doc, _ = load_document(args.input)
        if not isinstance(doc, dict):
            raise ParseError("a family document must be a table/object")
    doc = dict(doc)
    doc.setdefault("family", args.command)
    for key in ("m", "n", "clasp", "d", "omega"):
        val = getattr(args, key, None)
        if val is not None:
            doc[key] = val
    if "n" not in doc:
        raise ParseError("missing parameter n (use --n)")
    return FamilySpec.from_dict(doc)


def _parse_matrix(doc, ring, text=None):
    if not isinstance(doc, list) or not doc or not all(isinstance(r, list) for r in doc):
        raise ParseError("a matrix is a non-empty list of rows")
    ncols = len(doc[0])
    rows = []
    for r in doc:
        if len(r) != ncols:
            raise ShapeError("matrix rows have different lengths")
        rows.append([parse_coefficient(x if isinstance(x, str) else int(x), ring) for x in r])
    return RingMatrix(ring, rows, ncols)


# ---------------------------------------------------------------------------
# reports


def module_markdown(title, module, log=None):
    lines = [f"# {title}", "", f"HF+ = {module.describe()}", ""]
    lines += ["| summand | ring | rank | grading |", "|---|---|---|---|"]
    for s in module:
        if isinstance(s, FreeField):
            kind = "free over U" if s.u_free else "vector space"
            lines.append(f"| {kind} | {s.ring} | {s.rank} | {format_grading(s.grading)} |")
        elif isinstance(s, UTorsion):
            lines.append(f"| U-torsion, length {s.k} | {s.ring} | {s.rank} | top {format_grading(s.top)} |")
        elif isinstance(s, Tower):
            lines.append(f"| tower | {s.ring} | 1 | bottom {format_grading(s.bottom)} |")
        else:
            lines.append(f"| cyclic {s.annihilator} | {s.ring} | {s.rank} | {format_grading(s.grading)} |")
    for note in module.notes:
        lines += ["", f"Assumption: {note}"]
    if log is not None and log.steps:
        lines += ["", "## Derivation", "", "| step | anchor | input | output |", "|---|---|---|---|"]
        for st in log.steps:
            lines.append(f"| {st['step']} | {st['anchor']} | {st['input_summary']} | {st['output_summary']} |")
    return "\n".join(lines)


def _emit(text, args):
    if getattr(args, "out", None):
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text + "\n")
    else:
        print(text)


# ---------------------------------------------------------------------------
# commands


def cmd_family(args):
    spec = _family_spec(args)
    log = DerivationLog(spec.to_request())
    module = compute_family(spec, log)
    if args.log:
        with open(args.log, "w", encoding="utf-8") as fh:
            fh.write(log.to_json() + "\n")
    if args.format == "json":
        _emit(module.to_json(), args)
    else:
        params = ", ".join(f"{k}={v}" for k, v in spec.to_request().items() if k != "family")
        _emit(module_markdown(f"{spec.variant} ({params})", module, log), args)
    return 0


def cmd_verify(args):
    only = None
    if args.only:
        only = {int(x) for x in args.only.split(",") if x.strip()}
    results = run_sweep(only)
    _emit(format_table(results, args.format), args)
    return 0 if all(r.passed for r in results) else 2


def cmd_snf(args):
    if args.input:
        doc, text = load_document(args.input)
        ring = ring_from_name(doc.get("ring", "ZZ")) if isinstance(doc, dict) else ZZ
        mdoc = doc.get("matrix") if isinstance(doc, dict) else doc
    elif args.matrix:
        try:
            mdoc = json.loads(args.matrix)
        except json.JSONDecodeError as exc:
            raise ParseError(exc.msg, exc.lineno, exc.colno) from None
        ring = ring_from_name(args.ring)
    else:
        raise ParseError("snf needs --matrix or --input")
    m = _parse_matrix(mdoc, ring)
    res = smith_normal_form(m)
    fmt = ring.format
    report = {"ring": ring.name, "diagonal": [fmt(d) for d in res.diagonal], "rank": res.rank}
    if ring == ZZ and m.nrows == m.ncols and m == m.transpose():
        report["signature"] = signature(m)
    if args.format == "json":
        _emit(json.dumps(report), args)
    else:
        lines = [f"diag({', '.join(report['diagonal'])})", f"rank {res.rank}"]
        if "signature" in report:
            lines.append(f"signature {report['signature']}")
        _emit("\n".join(lines), args)
    return 0


def cmd_complex_homology(args):
    doc, text = load_document(args.input)
    c = complex_from_dict(doc, text)
    module = homology(c)
    if args.format == "json":
        _emit(module.to_json(), args)
    else:
        _emit(module_markdown(f"homology of {args.input} over {c.ring.name}", module), args)
    return 0


# ---------------------------------------------------------------------------
# parser


def _fraction(text):
    try:
        return str(Fraction(text))
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not an exact rational number: {text!r}") from None


def build_parser():
    p = argparse.ArgumentParser(prog="twistfloer", description="Twisted Heegaard Floer computations for twist-knot families.")
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp):
        sp.add_argument("--format", choices=("markdown", "json"), default="markdown")
        sp.add_argument("--out", help="write the report to FILE instead of standard output")

    for name in FAMILY_COMMANDS:
        sp = sub.add_parser(name, help=f"twisted HF+ of 0-surgery on the {name} family")
        sp.add_argument("--n", type=int)
        if name in ("borromean", "two-bridge"):
            sp.add_argument("--m", type=int)
        if name == "two-bridge":
            sp.add_argument("--clasp", type=int, choices=(1, -1))
        sp.add_argument("--d", type=_fraction, help="weight of the twisting class (default 1)")
        sp.add_argument("--omega", help="free-form label for the twisting class")
        sp.add_argument("--input", help="TOML or JSON document with the family parameters")
        sp.add_argument("--log", help="write the derivation log (JSON) to FILE")
        common(sp)
        sp.set_defaults(func=cmd_family)

    sp = sub.add_parser("verify", help="run the acceptance sweep")
    sp.add_argument("--only", help="comma-separated criterion numbers")
    common(sp)
    sp.set_defaults(func=cmd_verify)

    sp = sub.add_parser("snf", help="Smith normal form of a matrix")
    sp.add_argument("--matrix", help='JSON rows, e.g. "[[-1,1],[1,0]]"')
    sp.add_argument("--ring", default="ZZ")
    sp.add_argument("--input", help="TOML or JSON document with keys ring and matrix")
    common(sp)
    sp.set_defaults(func=cmd_snf)

    sp = sub.add_parser("complex-homology", help="homology of a chain complex given as JSON")
    sp.add_argument("input")
    common(sp)
    sp.set_defaults(func=cmd_complex_homology)
    return p


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except TwistFloerError as exc:
        print(json.dumps(exc.to_dict()), file=sys.stderr)
        return 1
    except OSError as exc:
        print(json.dumps({"error": "io", "message": str(exc)}), file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
