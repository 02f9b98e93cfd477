"""Command-line front end.

Subcommands: enumerate, orbits, prob, fibers, encode. Output formats:
table (default), json (canonical: sorted keys, compact separators), csv.
Exit codes: 0 success, 1 expectation failure, 2 resource cap exceeded,
3 input error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import os
import sys
import time
from dataclasses import dataclass
from fractions import Fraction
from itertools import permutations

from .enumeration import (
    CapExceededError,
    StrictTableError,
    count_parking,
    expected_parking_count,
    orbit_audit,
)
from .forests import (
    encode,
    fiber_count,
    fiber_counts_brute,
    iter_tree_shapes,
    pair_to_json,
    shape_count,
    total_displacement,
)
from .probabilistic import (
    orbit_parking_mass,
    parking_probability,
    parse_prob_spec,
    total_parking_mass,
)
from .procedures import load_dir_table, parse_proc_spec, table_procedure

DETERMINISTIC_CAP = 7
PROBABILISTIC_CAP = 5


class InputError(ValueError):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):  # map argparse's own failures to exit 3
        raise InputError(message)


@dataclass
class Report:
    command: str
    params: dict
    results: dict
    elapsed_s: float
    failed_expectation: bool = False


def frac_str(x: Fraction) -> str:
    x = Fraction(x)
    return f"{x.numerator}/{x.denominator}"


def word_str(word) -> str:
    return ",".join(str(a) for a in word)


def canonical_json(obj) -> str:
    return json.dumps(obj, sort_keys=True, separators=(",", ":")) + "\n"


def render(report: Report, fmt: str) -> str:
    doc = {
        "command": report.command,
        "params": report.params,
        "results": report.results,
        "elapsed_s": report.elapsed_s,
    }
    if fmt == "json":
        return canonical_json(doc)
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        writer.writerow(["key", "value"])
        for key, value in sorted(report.params.items()):
            writer.writerow([f"params.{key}", value])
        for key, value in sorted(report.results.items()):
            if isinstance(value, list):
                for i, item in enumerate(value):
                    writer.writerow([f"{key}[{i}]", json.dumps(item, sort_keys=True)])
            else:
                writer.writerow([key, value])
        return buf.getvalue()
    lines = [f"{report.command}  " + " ".join(f"{k}={v}" for k, v in report.params.items())]
    for key, value in report.results.items():
        if isinstance(value, list):
            lines.append(f"{key}:")
            lines.extend(f"  {json.dumps(item, sort_keys=True)}" for item in value)
        else:
            lines.append(f"{key}: {value}")
    lines.append(f"elapsed_s: {report.elapsed_s}")
    return "\n".join(lines) + "\n"


def _resolve_proc(args):
    if getattr(args, "proc_file", None):
        return table_procedure(load_dir_table(args.proc_file), strict=args.strict)
    if not args.proc:
        raise InputError("one of --proc / --proc-file is required")
    return parse_proc_spec(args.proc)


def _cap(args, default: int) -> int | None:
    return None if args.cap_unsafe else default


def _parse_word(text: str) -> tuple[int, ...]:
    try:
        return tuple(int(x) for x in text.split(","))
    except ValueError as e:
        raise InputError(f"bad word {text!r}: {e}") from None


# ---------------------------------------------------------------------------
# handlers


def cmd_enumerate(args) -> Report:
    p = _resolve_proc(args)
    t0 = time.perf_counter()
    count = count_parking(p, args.r, cap=_cap(args, DETERMINISTIC_CAP), jobs=args.jobs)
    expected = expected_parking_count(args.r)
    results = {"count": count, "expected_universal": expected, "universal": count == expected}
    return Report(
        command="enumerate",
        params={"proc": p.name, "r": args.r},
        results=results,
        elapsed_s=round(time.perf_counter() - t0, 6),
        failed_expectation=args.expect_universal and count != expected,
    )


def cmd_orbits(args) -> Report:
    p = _resolve_proc(args)
    t0 = time.perf_counter()
    report = orbit_audit(p, args.r, cap=_cap(args, DETERMINISTIC_CAP), jobs=args.jobs)
    results = {
        "orbit_count": report.orbit_count,
        "parking_total": report.parking_total,
        "histogram": {str(k): v for k, v in report.histogram.items()},
        "violations": [
            {
                "representative": word_str(v.representative),
                "members": [word_str(w) for w in v.members],
                "parking_count": v.parking_count,
                "parking_words": [word_str(w) for w in v.parking_words],
            }
            for v in report.violations
        ],
        "all_one": report.all_one,
    }
    return Report(
        command="orbits",
        params={"proc": p.name, "r": args.r},
        results=results,
        elapsed_s=round(time.perf_counter() - t0, 6),
    )


def cmd_prob(args) -> Report:
    if (args.word is None) == (args.mass is None):
        raise InputError("exactly one of --word / --mass is required")
    pp = parse_prob_spec(args.proc) if args.proc else None
    if pp is None:
        raise InputError("--proc is required")
    t0 = time.perf_counter()
    params = {"proc": pp.name}
    results = {}
    if args.word is not None:
        word = _parse_word(args.word)
        params["word"] = word_str(word)
        results["parking_probability"] = frac_str(parking_probability(pp, word))
    else:
        params["mass_r"] = args.mass
        cap = _cap(args, PROBABILISTIC_CAP)
        results["total_parking_mass"] = frac_str(total_parking_mass(pp, args.mass, cap=cap))
        results["expected_universal"] = expected_parking_count(args.mass)
        if args.per_orbit:
            results["orbit_mass"] = {
                word_str(rep): frac_str(m)
                for rep, m in sorted(orbit_parking_mass(pp, args.mass, cap=cap).items())
            }
    return Report(
        command="prob",
        params=params,
        results=results,
        elapsed_s=round(time.perf_counter() - t0, 6),
    )


def cmd_fibers(args) -> Report:
    p = _resolve_proc(args)
    if not (p.is_memoryless and p.is_locally_decided):
        raise InputError(f"{p.name} is not memoryless+locally decided; no fiber formula")
    cap = _cap(args, DETERMINISTIC_CAP)
    if cap is not None and args.r > cap:
        raise CapExceededError(f"r={args.r} exceeds cap {cap}")
    t0 = time.perf_counter()
    brute = fiber_counts_brute(p, args.r)
    if args.sigma:
        sigmas = [_parse_word(args.sigma)]
    else:
        sigmas = sorted(permutations(range(1, args.r + 1)))
    table = [
        {
            "sigma": word_str(s),
            "formula": fiber_count(p, s),
            "brute": brute.get(tuple(s), 0),
        }
        for s in sigmas
    ]
    shape_counts = sorted(
        (shape_count(p, t) for t in iter_tree_shapes(args.r)), reverse=True
    )
    results = {
        "fibers": table,
        "formula_total": sum(row["formula"] for row in table),
        "shape_counts": shape_counts,
        "shape_total": sum(shape_counts),
    }
    return Report(
        command="fibers",
        params={"proc": p.name, "r": args.r, "sigma": args.sigma or ""},
        results=results,
        elapsed_s=round(time.perf_counter() - t0, 6),
    )


def cmd_encode(args) -> Report:
    p = _resolve_proc(args)
    word = _parse_word(args.word)
    t0 = time.perf_counter()
    pair = encode(p, word)
    results = dict(pair_to_json(pair))
    results["displacement"] = total_displacement(p, word)
    return Report(
        command="encode",
        params={"proc": p.name, "word": word_str(word)},
        results=results,
        elapsed_s=round(time.perf_counter() - t0, 6),
    )


# ---------------------------------------------------------------------------
# parser


def build_parser() -> _Parser:
    parser = _Parser(prog="parkline", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(sp, word=False, r=False):
        sp.add_argument("--proc", help="procedure spec, e.g. right, naples:k=2, kw:q=1/2")
        sp.add_argument("--proc-file", help="path to a direction-table JSON document")
        sp.add_argument("--strict", action="store_true", help="refuse r beyond the table's r_max")
        sp.add_argument("--format", choices=("table", "json", "csv"), default="table")
        sp.add_argument("--jobs", type=int, default=int(os.environ.get("PARKING_JOBS", "1")))
        sp.add_argument("--cap-unsafe", action="store_true", help="disable the exhaustive-size cap")
        if r:
            sp.add_argument("--r", type=int, required=True)
        if word:
            sp.add_argument("--word", help="comma-separated letters, e.g. 1,2,1")

    sp = sub.add_parser("enumerate", help="count parking words of length r")
    common(sp, r=True)
    sp.add_argument("--expect-universal", action="store_true",
                    help="exit 1 unless the count equals (r+1)^(r-1)")
    sp.set_defaults(handler=cmd_enumerate)

    sp = sub.add_parser("orbits", help="parking words per cyclic orbit")
    common(sp, r=True)
    sp.set_defaults(handler=cmd_orbits)

    sp = sub.add_parser("prob", help="exact parking probabilities")
    common(sp, word=True)
    sp.add_argument("--mass", type=int, help="sum parking probabilities over all words of this length")
    sp.add_argument("--per-orbit", action="store_true", help="also report per-orbit masses")
    sp.set_defaults(handler=cmd_prob)

    sp = sub.add_parser("fibers", help="outcome fiber sizes: formula vs brute force")
    common(sp, r=True)
    sp.add_argument("--sigma", help="restrict to one outcome permutation, e.g. 1,2,3")
    sp.set_defaults(handler=cmd_fibers)

    sp = sub.add_parser("encode", help="forest pair of one run")
    common(sp, word=True)
    sp.set_defaults(handler=cmd_encode)

    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        if getattr(args, "word", None) is None and args.command == "encode":
            raise InputError("--word is required")
        report = args.handler(args)
    except CapExceededError as e:
        print(f"error: {e}", file=sys.stderr)
        return 2
    except (InputError, StrictTableError, ValueError, OSError, KeyError) as e:
        print(f"error: {e}", file=sys.stderr)
        return 3
    sys.stdout.write(render(report, args.format))
    return 1 if report.failed_expectation else 0


if __name__ == "__main__":  # pragma: no cover
    sys.exit(main())
