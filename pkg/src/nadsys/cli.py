"""Command-line driver.

Exit codes: 0 when every query succeeded, 1 for parse diagnostics or a
failed query, 2 when a fixture of ``verify-paper`` fails.
"""

from __future__ import annotations

import argparse
import json
import sys
from fractions import Fraction
from pathlib import Path
from typing import Optional, Sequence

from .dsl import DSLError, Query, SystemSpec, parse
from .runner import QueryError, run, to_csv, to_json

EXIT_OK, EXIT_DIAGNOSTICS, EXIT_FIXTURE = 0, 1, 2


def _rational(text: str) -> Fraction:
    try:
        return Fraction(text)
    except (ValueError, ZeroDivisionError):
        raise argparse.ArgumentTypeError(f"not a rational: {text!r}") from None


def _common(p: argparse.ArgumentParser) -> None:
    p.add_argument("--horizon", type=int, help="number of steps to evaluate")
    p.add_argument("--depth", type=int, help="dyadic grid depth for classify")
    p.add_argument("--family", choices=["infinite", "cofinite", "syndetic", "thick",
                                        "density"])
    p.add_argument("--density-threshold", type=_rational, dest="threshold",
                   help="positive-density cutoff, as a rational such as 1/100")
    p.add_argument("--format", choices=["json", "csv"], default="json")


def build_parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="nadsys", description=__doc__.splitlines()[0])
    sub = ap.add_subparsers(dest="command", required=True)

    p = sub.add_parser("check", help="parse a file and report diagnostics")
    p.add_argument("file")

    p = sub.add_parser("run", help="run every query in a file")
    p.add_argument("file")
    _common(p)

    p = sub.add_parser("verify-paper", help="run the built-in fixture suite")
    _common(p)

    p = sub.add_parser("compose", help="compose maps (outermost first) or a sequence prefix")
    p.add_argument("file")
    p.add_argument("names", nargs="+")
    p.add_argument("-n", type=int, help="prefix length when composing a sequence")
    _common(p)

    p = sub.add_parser("hitset", help="hit set of SEQ from set U to set V")
    p.add_argument("file")
    p.add_argument("seq")
    p.add_argument("U")
    p.add_argument("V")
    _common(p)

    p = sub.add_parser("classify", help="classify a sequence over a grid of open sets")
    p.add_argument("file")
    p.add_argument("seq")
    p.add_argument("--property", choices=["transitive", "mixing", "ergodic"],
                   default="transitive")
    _common(p)
    return ap


def _load(path: str) -> SystemSpec:
    text = sys.stdin.read() if path == "-" else Path(path).read_text()
    return parse(text)


def _overrides(args) -> dict:
    return {k: getattr(args, k, None) for k in ("horizon", "depth", "family", "threshold")}


def _emit(reports, fmt: str) -> None:
    sys.stdout.write(to_csv(reports) if fmt == "csv" else to_json(reports))


def _adhoc(spec: SystemSpec, q: Query) -> SystemSpec:
    return SystemSpec(spec.maps, spec.seqs, spec.sets, spec.options, [q])


def _resolve_names(spec: SystemSpec, args) -> Optional[str]:
    """Check command-line names against the file, like the parser does."""
    maps = {m.name for m in spec.maps}
    seqs = {s.name for s in spec.seqs}
    sets = {s.name for s in spec.sets}
    if args.command == "hitset":
        wanted = [(args.seq, seqs, "seq"), (args.U, sets, "set"), (args.V, sets, "set")]
    elif args.command == "classify":
        wanted = [(args.seq, seqs, "seq")]
    elif len(args.names) == 1 and args.names[0] in seqs:
        if args.n is None:
            return "composing a sequence needs -n"
        wanted = []
    else:
        wanted = [(n, maps, "map") for n in args.names]
    for name, pool, kind in wanted:
        if name not in pool:
            return f"unknown {kind} name {name!r}"
    return None


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "verify-paper":
            from .fixtures import verify_paper

            kw = {k: v for k, v in (("horizon", args.horizon), ("depth", args.depth))
                  if v is not None}
            report = verify_paper(**kw)
            if args.format == "json":
                sys.stdout.write(json.dumps(report.to_json(), sort_keys=True, indent=2) + "\n")
            else:
                sys.stdout.write("\n".join(report.lines()) + "\n")
            return EXIT_OK if report.ok else EXIT_FIXTURE

        spec = _load(args.file)
        if args.command == "check":
            print(f"ok: {len(spec.maps)} maps, {len(spec.seqs)} sequences, "
                  f"{len(spec.sets)} sets, {len(spec.queries)} queries")
            return EXIT_OK
        if args.command != "run":
            problem = _resolve_names(spec, args)
            if problem:
                print(f"error: {problem}", file=sys.stderr)
                return EXIT_DIAGNOSTICS
            if args.command == "hitset":
                q = Query("hitset", (args.seq, args.U, args.V))
            elif args.command == "classify":
                q = Query("classify", (args.property, args.seq))
            else:
                opts = (("n", args.n),) if args.n is not None else ()
                q = Query("compose", tuple(args.names), opts)
            spec = _adhoc(spec, q)
        reports = run(spec, _overrides(args))
        _emit(reports, args.format)
        fixture_failed = any(r["query"]["kind"] == "verify-paper" and r["result"]["failed"]
                             for r in reports)
        return EXIT_FIXTURE if fixture_failed else EXIT_OK
    except DSLError as e:
        for d in e.diagnostics:
            print(f"{getattr(args, 'file', '-')}:{d}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except QueryError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIAGNOSTICS
    except OSError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_DIAGNOSTICS


if __name__ == "__main__":
    sys.exit(main())
