"""Command-line entry point: membership, factorization, enumeration and verification."""

import argparse
import json
import random
import sys
from pathlib import Path
from typing import Optional

import pandas as pd

from .closure import (
    BRUTE_FORCE_CAP,
    CLOSURE_CAP,
    brute_force_icn,
    close,
    irredundancy,
    prg3_conditions,
    rank_search_small,
    verify_generating,
)
from .core import (
    PartialInjection,
    enumerate_all_partial_injections,
    from_json,
    log_error,
    sort_key,
    to_json,
)
from .crown import (
    CrownPoset,
    NotMemberError,
    is_member_prop1,
    is_order_preserving,
)
from .factorize import (
    FactorizationError,
    FactorizationTrace,
    clear_deviations,
    factorize,
    recorded_deviations,
)
from .generators import (
    eval_word,
    expected_rank,
    format_word,
    generator_catalog,
    parse_token,
    parse_word,
)
from .identities import deviations, identity_suite, suite_passes, summary_frame
from .write import write_deviations, write_jsonl, write_report

_DEFAULT_SEED = 1729
_DEFAULT_SAMPLES = 10_000

EXIT_OK = 0
EXIT_NEGATIVE = 1
EXIT_USAGE = 2


class UsageError(ValueError):
    """Bad flag combination or unreadable input."""


# ---------------------------------------------------------------------------
# Input helpers
# ---------------------------------------------------------------------------

def _read_source(value: str) -> str:
    """Inline text, or the contents of a file when prefixed with '@'."""
    if value.startswith("@"):
        path = Path(value[1:])
        if not path.exists():
            raise UsageError(f"input file {path} does not exist")
        return path.read_text()
    return value


def _load_map(args: argparse.Namespace) -> PartialInjection:
    try:
        obj = json.loads(_read_source(args.map))
    except json.JSONDecodeError as e:
        raise UsageError(f"--map is not valid JSON: {e}") from e
    return from_json(obj, args.n)


def _load_input(args: argparse.Namespace) -> PartialInjection:
    """The map given by exactly one of --map / --word."""
    if (args.map is None) == (getattr(args, "word", None) is None):
        raise UsageError("give exactly one of --map and --word")
    if args.map is not None:
        return _load_map(args)
    if args.n is None:
        raise UsageError("--word needs --n")
    return eval_word(parse_word(_read_source(args.word), args.n), args.n)


def _require_n(args: argparse.Namespace) -> int:
    if args.n is None:
        raise UsageError(f"{args.command} needs --n")
    if args.n < 2 or args.n % 2:
        raise UsageError(f"--n must be even and >= 2, got {args.n}")
    return args.n


def _caps(args: argparse.Namespace) -> tuple[int, int]:
    """Brute-force and closure caps, raised by --cap-override."""
    if args.cap_override is None:
        return BRUTE_FORCE_CAP, CLOSURE_CAP
    log_error(f"caps raised to n={args.cap_override}; memory use grows factorially")
    return max(BRUTE_FORCE_CAP, args.cap_override), max(CLOSURE_CAP, args.cap_override)


def _generators(n: int, drop: list[str]) -> dict:
    gens = generator_catalog(n).g
    for token in drop:
        sym, _ = parse_token(token)
        if sym not in gens:
            raise UsageError(f"--drop {token}: not a generator for n={n}")
        del gens[sym]
    return gens


def _progress(args: argparse.Namespace, msg: str) -> None:
    if args.format == "text":
        print(msg)


def _emit(args: argparse.Namespace, payload: dict, text: str) -> None:
    """Print in the requested format and write --out when given."""
    if args.out:
        write_report(args.out, payload)
    if args.format == "text":
        print(text)
    else:
        print(json.dumps(payload, sort_keys=True, indent=None if args.format == "jsonl" else 2))


# ---------------------------------------------------------------------------
# Subcommands
# ---------------------------------------------------------------------------

def cmd_member(args: argparse.Namespace) -> int:
    a = _load_map(args)
    report = is_member_prop1(CrownPoset(a.n), a)
    payload = {"input": to_json(a), **report.to_json()}
    if report.member:
        text = f"{a} is in IC_{a.n}"
    else:
        text = f"{a} is not in IC_{a.n}: condition ({report.violated}) fails at {report.witness}"
    _emit(args, payload, text)
    return EXIT_OK if report.member else EXIT_NEGATIVE


def cmd_factorize(args: argparse.Namespace) -> int:
    a = _load_input(args)
    try:
        trace = factorize(a, with_oracle=args.oracle)
    except NotMemberError as e:
        print(json.dumps(e.report.to_json(), sort_keys=True), file=sys.stderr)
        return EXIT_NEGATIVE

    # never print a word that does not evaluate back to the input
    if eval_word(trace.word, a.n) != a:
        raise FactorizationError(f"word for {a} failed re-evaluation", trace)

    text = trace.text or "(empty word)"
    if args.trace:
        lines = [text] + [f"  {s.rule:<16} {format_word(s.word):<40} {s.value}" for s in trace.steps]
        text = "\n".join(lines)
    _emit(args, trace.to_json(), text)
    return EXIT_OK


def _pci_count(n: int, cap: int) -> int:
    p = CrownPoset(n)
    return sum(1 for a in enumerate_all_partial_injections(n, cap=cap) if is_order_preserving(p, a))


def cmd_count(args: argparse.Namespace) -> int:
    n = _require_n(args)
    brute_cap, closure_cap = _caps(args)
    _progress(args, f"Enumerating IC_{n} by brute force...")
    oracle = len(brute_force_icn(n, cap=brute_cap))
    _progress(args, f"Closing G({n})...")
    closure = close(generator_catalog(n).g, threads=args.threads, cap=closure_cap)
    pci = _pci_count(n, brute_cap)
    payload = {
        "n": n,
        "oracle": oracle,
        "closure": len(closure),
        "order_preserving": pci,
        "equal": oracle == len(closure),
        "census": {str(k): v for k, v in closure.census.items()},
    }
    text = f"|IC_{n}|: oracle {oracle}, closure {len(closure)} ({'=' if payload['equal'] else '!='}); " \
           f"order-preserving maps {pci}"
    _emit(args, payload, text)
    return EXIT_OK if payload["equal"] else EXIT_NEGATIVE


def _elements(args: argparse.Namespace, n: int) -> list[PartialInjection]:
    """IC_n in sorted order: brute force for small n, else the closure of G(n)."""
    brute_cap, closure_cap = _caps(args)
    if n <= min(brute_cap, 6):
        return sorted(brute_force_icn(n, cap=brute_cap), key=sort_key)
    return close(generator_catalog(n).g, threads=args.threads, cap=closure_cap).sorted_elements()


def cmd_enum(args: argparse.Namespace) -> int:
    n = _require_n(args)
    records = [to_json(a) for a in _elements(args, n)]
    if args.out:
        write_jsonl(args.out, records)
    else:
        for r in records:
            print(json.dumps(r, sort_keys=True, separators=(",", ":")))
    return EXIT_OK


def cmd_close(args: argparse.Namespace) -> int:
    n = _require_n(args)
    _, closure_cap = _caps(args)
    gens = _generators(n, args.drop)
    _progress(args, f"Closing {len(gens)} generators for n={n}...")
    result = close(gens, threads=args.threads, cap=closure_cap, n=n)
    if args.format == "jsonl":
        records = [to_json(a) for a in result.sorted_elements()]
        if args.out:
            write_jsonl(args.out, records)
        else:
            for r in records:
                print(json.dumps(r, sort_keys=True, separators=(",", ":")))
        return EXIT_OK
    payload = {
        "n": n,
        "generators": [str(s) for s in gens],
        "size": len(result),
        "census": {str(k): v for k, v in result.census.items()},
        "stats": result.stats,
    }
    text = f"{len(result)} elements\n" + result.census_frame().to_string(index=False)
    _emit(args, payload, text)
    return EXIT_OK


def cmd_prg3(args: argparse.Namespace) -> int:
    n = _require_n(args)
    gens = _generators(n, args.drop)
    report = prg3_conditions(gens, threads=args.threads)
    text = report.frame().to_string(index=False)
    if report.generates is not None:
        text += f"\ngenerates IC_{n}: {report.generates}"
    _emit(args, report.to_json(), text)
    return EXIT_OK if report.passed else EXIT_NEGATIVE


def _trace_ok(trace: FactorizationTrace) -> bool:
    """Word evaluates to the input; |chi| drops by one per step; Dom of beta is constant."""
    if eval_word(trace.word, trace.input.n) != trace.input:
        return False
    chi_steps = trace.chi_sizes
    if any(b != a - 1 for a, b in zip(chi_steps, chi_steps[1:])):
        return False
    return len(set(trace.beta_domains)) <= 1


def _round_trip(args: argparse.Namespace, n: int) -> dict:
    elements = _elements(args, n)
    if n > 6 and len(elements) > args.samples:
        elements = random.Random(args.seed).sample(elements, args.samples)
    failures = []
    for a in elements:
        try:
            trace = factorize(a, with_oracle=True)
            ok = _trace_ok(trace)
        except FactorizationError as e:
            log_error(f"factorization of {a} failed: {e}")
            ok = False
        if not ok:
            failures.append(to_json(a))
    return {"checked": len(elements), "failures": failures[:20], "failed": len(failures)}


def cmd_verify(args: argparse.Namespace) -> int:
    n = _require_n(args)
    if n > BRUTE_FORCE_CAP and args.cap_override is None:
        raise UsageError(f"verify runs up to n={BRUTE_FORCE_CAP}; use --cap-override for more")
    clear_deviations()
    rows = []
    details: dict = {}

    _progress(args, f"Checking that G({n}) generates IC_{n}...")
    gen = verify_generating(n, threads=args.threads)
    rows.append({"check": "generation", "passed": gen.equal, "detail": f"{gen.generated}/{gen.expected}"})
    details["generation"] = gen.to_json()

    size = len(generator_catalog(n).g)
    rows.append({"check": "rank", "passed": size == expected_rank(n), "detail": f"|G| = {size}"})

    _progress(args, "Dropping each generator in turn...")
    entries = irredundancy(n, threads=args.threads)
    rows.append({"check": "irredundancy", "passed": all(e.proper for e in entries),
                 "detail": f"{sum(e.proper for e in entries)}/{len(entries)} proper"})
    details["irredundancy"] = [e.to_json() for e in entries]

    devs: list[dict] = []
    if n == 2:
        minimal = rank_search_small(n)
        rows.append({"check": "minimal-rank", "passed": minimal == 3, "detail": f"rank = {minimal}"})
    else:
        report = prg3_conditions(generator_catalog(n).g, threads=args.threads)
        rows.append({"check": "prg3", "passed": report.passed,
                     "detail": ",".join(c.name for c in report.conditions if not c.passed) or "all"})
        details["prg3"] = report.to_json()

        _progress(args, "Evaluating the product formulas...")
        results = identity_suite(n)
        found = deviations(results)
        devs = [d.to_json() for d in found]
        summary = summary_frame(results)
        rows.append({"check": "identities", "passed": suite_passes(found),
                     "detail": f"{int(summary['holding'].sum())}/{int(summary['checked'].sum())} hold"})
        details["identities"] = summary.to_dict(orient="records")

    _progress(args, "Factorizing elements...")
    rt = _round_trip(args, n)
    rows.append({"check": "round-trip", "passed": rt["failed"] == 0,
                 "detail": f"{rt['checked'] - rt['failed']}/{rt['checked']}"})
    details["round_trip"] = rt

    devs += recorded_deviations()
    matrix = pd.DataFrame(rows, columns=["check", "passed", "detail"])
    passed = bool(matrix["passed"].all())
    payload = {"n": n, "passed": passed, "checks": matrix.to_dict(orient="records"),
               "details": details, "deviations": devs}
    if args.out:
        write_deviations(args.out, devs)
    _emit(args, payload, matrix.to_string(index=False))
    return EXIT_OK if passed else EXIT_NEGATIVE


_COMMANDS = {
    "member": cmd_member,
    "factorize": cmd_factorize,
    "verify": cmd_verify,
    "count": cmd_count,
    "enum": cmd_enum,
    "close": cmd_close,
    "prg3": cmd_prg3,
}


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--n", type=int, default=None, help="Ground set size (even)")
    common.add_argument(
        "--format",
        choices=("text", "json", "jsonl"),
        default="text",
        help="Output format (default: text)",
    )
    common.add_argument("--out", type=str, default=None, help="Also write the report to this file")
    common.add_argument("--threads", type=int, default=1, help="Closure worker threads (default: 1)")
    common.add_argument(
        "--seed",
        type=int,
        default=_DEFAULT_SEED,
        help=f"Seed for sampled checks (default: {_DEFAULT_SEED})",
    )
    common.add_argument(
        "--cap-override",
        type=int,
        default=None,
        help="Raise the brute-force and closure size caps to this n",
    )

    parser = argparse.ArgumentParser(description="Partial automorphisms of the crown poset")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("member", parents=[common], help="Test membership in IC_n")
    p.add_argument("--map", required=True, help='JSON map, e.g. \'{"n":6,"map":[3,4,null,...]}\', or @file')

    p = sub.add_parser("factorize", parents=[common], help="Write a member as a word over G")
    p.add_argument("--map", default=None, help="JSON map or @file")
    p.add_argument("--word", default=None, help="Word text or @file; factorizes its value")
    p.add_argument("--trace", action="store_true", help="Print the step list in text mode")
    p.add_argument("--oracle", action="store_true", help="Also compute a shortest word by closure search")

    p = sub.add_parser("verify", parents=[common], help="Run every check for one n")
    p.add_argument(
        "--samples",
        type=int,
        default=_DEFAULT_SAMPLES,
        help=f"Random elements factorized when n > 6 (default: {_DEFAULT_SAMPLES})",
    )

    sub.add_parser("count", parents=[common], help="Compare |IC_n| from brute force and closure")
    sub.add_parser("enum", parents=[common], help="Stream the elements of IC_n as JSON lines")

    for name, helptext in (("close", "Close the generating set, optionally with generators dropped"),
                           ("prg3", "Check the per-rank lower-bound conditions")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("--drop", action="append", default=[], help="Generator token to remove, e.g. H1")

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    """
    Parse arguments and run one subcommand.

    Returns:
        0 on success (or membership), 1 on a negative verdict, 2 on usage errors
    """
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return EXIT_OK if e.code in (0, None) else EXIT_USAGE

    try:
        return _COMMANDS[args.command](args)
    except ValueError as e:
        print(f"error: {e}", file=sys.stderr)
        return EXIT_USAGE
    except FactorizationError as e:
        log_error(f"factorization failed: {e}")
        if e.trace is not None:
            print(json.dumps(e.trace.to_json(), sort_keys=True), file=sys.stderr)
        return EXIT_NEGATIVE


if __name__ == "__main__":
    sys.exit(main())
