"""Command-line entry point: ``machinlike <subcommand> ...``.

Exit status is 0 on success, 1 on bad input and 2 on internal failure.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys
from decimal import Decimal
from fractions import Fraction
from pathlib import Path

import mpmath

from . import __version__
from .errors import DigitCapExceeded, InvalidInput, MachinError, NotCertified
from .exact import format_lambda, lehmer_measure, parse_relation, verify_exact
from .extend import ExtendConfig, Step, alferov_relation, truncate_and_extend
from .numeric import arctan_real, pi_real
from .pipeline import PipelineConfig, pipeline_run
from .pslq import PslqProblem, default_max_iterations, pslq_find
from .search import SearchConfig, subset_search
from .sieve import PrimeSet, candidates_from_xs, enumerate_candidates
from .store import (
    InsertResult,
    RelationRecord,
    RelationStore,
    Source,
    import_relations,
    leaderboard,
    relation_from_json,
)

DEFAULT_STORE = "relations.jsonl"

log = logging.getLogger("machinlike")


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    # bad arguments are input errors: exit 1, not argparse's 2
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(1, f"{self.prog}: error: {message}\n")


def _int_list(text: str) -> list[int]:
    try:
        return [int(v) for v in text.replace(" ", "").split(",") if v]
    except ValueError:
        raise argparse.ArgumentTypeError(f"expected comma-separated integers, got {text!r}")


def _out(obj) -> None:
    print(json.dumps(obj, separators=(",", ":")))


def _open_store(args, required: bool) -> RelationStore | None:
    path = args.store
    if path is None:
        if not required:
            return None
        path = DEFAULT_STORE
    return RelationStore(path)


def _search_config(args) -> SearchConfig:
    return SearchConfig(
        min_x=args.min_x,
        max_subset_size=args.max_terms,
        min_subset_size=args.min_terms,
        precision_bits=args.precision,
        coeff_bound=args.coeff_bits,
        iteration_factor=args.iteration_factor,
        stale_iteration_cap=args.stale_cap,
        consecutive_failure_cap=args.failure_cap,
        skip_supersets=args.skip_supersets,
        jobs=args.jobs,
    )


def _read_relation(args):
    if getattr(args, "relation_file", None):
        text = Path(args.relation_file).read_text().strip()
        if text.startswith("{"):
            return relation_from_json(json.loads(text.splitlines()[0]))
        return parse_relation(text.splitlines()[0])
    if not args.relation:
        raise UsageError("give a relation or --relation-file")
    return parse_relation(args.relation)


# ---------------------------
# Subcommands
# ---------------------------

def cmd_sieve(args) -> int:
    numerators = (1, 2) if args.two_over else (1,)
    cands = enumerate_candidates(PrimeSet.of(args.primes), args.max_x, numerators)
    for c in cands:
        if args.json:
            _out(c.to_json())
        else:
            print(f"{c.label()}\t{c.factor_string()}")
    return 0


def _parse_value(line: str, bits: int):
    s = line.strip().lower()
    if s in ("pi", "π"):
        return pi_real(bits)
    if s.startswith("atan") or s.startswith("arctan"):
        arg = s.split(None, 1)[1] if " " in s else s[s.index("(") + 1:s.rindex(")")]
        return arctan_real(Fraction(arg.strip("() ")), bits)
    if s.startswith("acot"):
        arg = s.split(None, 1)[1] if " " in s else s[s.index("(") + 1:s.rindex(")")]
        return arctan_real(1 / Fraction(arg.strip("() ")), bits)
    with mpmath.workprec(bits + 32):
        return mpmath.mpf(s)


def cmd_pslq(args) -> int:
    lines = [ln for ln in Path(args.values_file).read_text().splitlines()
             if ln.strip() and not ln.lstrip().startswith("#")]
    values = [_parse_value(ln, args.precision + 32) for ln in lines]
    threshold = None
    if args.threshold_bits is not None:
        threshold = mpmath.ldexp(mpmath.mpf(1), -args.threshold_bits)
    problem = PslqProblem(values, args.precision,
                          max_iterations=default_max_iterations(len(values), args.iteration_factor),
                          coeff_bound=args.coeff_bits, detection_threshold=threshold)
    _out(pslq_find(problem).to_json())
    return 0


def cmd_search(args) -> int:
    P = PrimeSet.of(args.primes)
    if args.candidates:
        cands = candidates_from_xs(args.candidates, P)
    elif args.max_x:
        cands = enumerate_candidates(P, args.max_x, (1, 2) if args.two_over else (1,))
    else:
        raise UsageError("give --max-x or --candidates")
    result = subset_search(cands, P, _search_config(args))
    store = _open_store(args, required=False)
    for rel in result.relations:
        rec = RelationRecord.create(rel, Source.PSLQ, P.primes)
        if store is not None:
            store.insert(rec)
        print(rec.to_line())
    report = result.report.to_json()
    report["zero_relations_found"] = [r.render() for r in result.zero_relations] if args.zeros else None
    print(json.dumps({"report": report}), file=sys.stderr)
    return 0


def _trace_json(trace: list[Step]) -> list[dict]:
    return [s.to_json() for s in trace]


def cmd_extend(args) -> int:
    cfg = ExtendConfig(strategy=args.strategy, digit_cap_bits=args.digit_cap)
    trace: list[Step] = []
    try:
        if args.extend_cmd == "complete":
            rel = alferov_relation(args.m, args.q0, cfg, trace)
            source = Source.ALFEROV
        else:
            rel = truncate_and_extend(_read_relation(args), args.keep, cfg, trace)
            source = Source.TRUNCATE_EXTEND
    except DigitCapExceeded as exc:
        _out({"error": "DigitCapExceeded", "message": str(exc), "partial_terms": len(exc.partial),
              "trace": _trace_json(trace)})
        return 1
    rec = RelationRecord.create(rel, source)
    store = _open_store(args, required=False)
    if store is not None:
        store.insert(rec)
    out = rec.to_json()
    if args.trace:
        out["trace"] = _trace_json(trace)
    _out(out) if args.json else print(f"{format_lambda(rec.lambda_)}\t{rel.render()}")
    if args.trace and not args.json:
        for i, s in enumerate(trace, 1):
            print(f"step {i}: a_bits={s.a_bits} b_bits={s.b_bits} sign={s.sign:+d} choice={s.choice}")
    return 0


def cmd_verify(args) -> int:
    rel = _read_relation(args)
    rep = verify_exact(rel)
    u = rep.u
    u_text = None if u is None else (str(u) if len(str(u)) <= 80 else f"<{len(str(u))} chars>")
    out = {"valid": rep.valid, "k": rep.k, "stated_k": rel.k, "u": u_text,
           "residual_bits": rep.residual_bits, "lambda": format_lambda(lehmer_measure(rel), 10)}
    if args.json:
        _out(out)
    else:
        print(("VALID" if rep.valid else "INVALID") + f"  k={rep.k}  lambda={out['lambda']}  u={u_text}")
    return 0 if rep.valid else 1


def cmd_lehmer(args) -> int:
    rel = _read_relation(args)
    lam = lehmer_measure(rel)
    print(format_lambda(lam, args.places))
    return 0


def cmd_import(args) -> int:
    store = _open_store(args, required=True)
    rejections: list[tuple[int, str]] = []
    n = import_relations(store, args.path, args.format, rejections)
    out = {"inserted": n, "rejected": [{"line": ln, "reason": r} for ln, r in rejections],
           "store_size": len(store)}
    _out(out) if args.json else print(f"inserted {n}, rejected {len(rejections)}, store has {len(store)}")
    return 0


def cmd_export(args) -> int:
    store = _open_store(args, required=True)
    n = store.export(args.path)
    print(n)
    return 0


def cmd_leaderboard(args) -> int:
    board = leaderboard(_open_store(args, required=True))
    if args.json:
        for n, rec in sorted(board.best_by_terms.items()):
            _out({"terms": n, **rec.to_json()})
    else:
        text = board.render()
        if text:
            print(text)
    return 0


def cmd_pipeline(args) -> int:
    cfg = PipelineConfig(
        max_x=args.max_x,
        candidates=args.candidates,
        numerators=(1, 2) if args.two_over else (1,),
        search=_search_config(args),
        expand_two_over=not args.no_expand,
        truncate_sweep=args.truncate_sweep,
        extend=ExtendConfig(strategy=args.strategy, digit_cap_bits=args.digit_cap),
        lambda_max=Decimal(args.lambda_max) if args.lambda_max else None,
    )
    store = _open_store(args, required=True)
    report, store = pipeline_run(PrimeSet.of(args.primes), cfg, store)
    if args.json:
        _out(report.to_json())
    else:
        print(f"candidates: {' '.join(report.candidates)}")
        print(f"viable: {report.viable}  found: {report.found}  inserted: {report.inserted}  "
              f"expanded: {report.expanded}  extended: {report.extended}  ({report.elapsed:.1f}s)")
        board = leaderboard(store).render()
        if board:
            print(board)
    return 0


# ---------------------------
# Parser
# ---------------------------

def _add_search_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--primes", type=_int_list, required=True, help="comma-separated primes = 1 mod 4")
    p.add_argument("--max-x", type=int, help="largest x (norm bound x^2+1)")
    p.add_argument("--candidates", type=_int_list, help="explicit x list instead of sieving")
    p.add_argument("--two-over", action="store_true", help="also sieve arctan(2/x) candidates")
    p.add_argument("--min-terms", type=int, default=2)
    p.add_argument("--max-terms", type=int, default=None)
    p.add_argument("--min-x", type=int, default=None, help="discard candidates below this x")
    p.add_argument("--coeff-bits", type=int, default=32)
    p.add_argument("--iteration-factor", type=float, default=1.0)
    p.add_argument("--stale-cap", type=int, default=None)
    p.add_argument("--failure-cap", type=int, default=None)
    p.add_argument("--skip-supersets", action="store_true")


def _add_extend_opts(p: argparse.ArgumentParser) -> None:
    p.add_argument("--digit-cap", type=int, default=1000, help="cap on remainder denominators, in bits")
    p.add_argument("--strategy", choices=["MinRemainder", "MinNumeratorAfterGcd"], default="MinRemainder")


def _global_opts(suppress: bool) -> argparse.ArgumentParser:
    def d(value):
        return argparse.SUPPRESS if suppress else value

    p = _Parser(add_help=False)
    p.add_argument("--precision", type=int, default=d(1024), help="working precision in bits")
    p.add_argument("--jobs", type=int, default=d(1))
    p.add_argument("--store", default=d(None), help=f"JSONL relation store (default {DEFAULT_STORE})")
    p.add_argument("--json", action="store_true", default=d(False), help="machine-readable output")
    p.add_argument("-v", "--verbose", action="store_true", default=d(False))
    return p


def build_parser() -> argparse.ArgumentParser:
    top = _global_opts(suppress=False)
    # subcommands accept the same flags; SUPPRESS keeps them from
    # clobbering values given before the subcommand name
    common = _global_opts(suppress=True)

    parser = _Parser(prog="machinlike", parents=[top],
                                     description="Search, certify and extend Machin-like arctangent relations.")
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("sieve", parents=[common], help="list x with x^2+1 smooth over the primes")
    p.add_argument("--primes", type=_int_list, required=True)
    p.add_argument("--max-x", type=int, required=True)
    p.add_argument("--two-over", action="store_true")
    p.set_defaults(func=cmd_sieve)

    p = sub.add_parser("pslq", parents=[common], help="integer relation among values in a file")
    p.add_argument("--values-file", required=True, help="one decimal, 'pi' or 'atan a/b' per line")
    p.add_argument("--coeff-bits", type=int, default=128)
    p.add_argument("--threshold-bits", type=int, default=None)
    p.add_argument("--iteration-factor", type=float, default=1.0)
    p.set_defaults(func=cmd_pslq)

    p = sub.add_parser("search", parents=[common], help="subset search with PSLQ")
    _add_search_opts(p)
    p.add_argument("--zeros", action="store_true", help="include zero relations in the report")
    p.set_defaults(func=cmd_search)

    p = sub.add_parser("extend", parents=[common], help="Alferov completion and truncate-and-extend")
    esub = p.add_subparsers(dest="extend_cmd", required=True)
    pc = esub.add_parser("complete", parents=[common])
    pc.add_argument("--m", type=int, required=True)
    pc.add_argument("--q0", type=int, required=True)
    pc.add_argument("--trace", action="store_true")
    _add_extend_opts(pc)
    pt = esub.add_parser("truncate", parents=[common])
    pt.add_argument("--relation-file", required=True)
    pt.add_argument("--keep", type=int, required=True)
    pt.add_argument("--trace", action="store_true")
    _add_extend_opts(pt)
    p.set_defaults(func=cmd_extend)

    for name, func, helptext in (("verify", cmd_verify, "certify a relation exactly"),
                                 ("lehmer", cmd_lehmer, "Lehmer measure of a relation")):
        p = sub.add_parser(name, parents=[common], help=helptext)
        p.add_argument("relation", nargs="?", help='e.g. "π/4 = 4[5]-1[239]"')
        p.add_argument("--relation-file")
        if name == "lehmer":
            p.add_argument("--places", type=int, default=4)
        p.set_defaults(func=func)

    p = sub.add_parser("import", parents=[common], help="certify and add relations from a file")
    p.add_argument("path")
    p.add_argument("--format", choices=["jsonl", "text"], default=None)
    p.set_defaults(func=cmd_import)

    p = sub.add_parser("export", parents=[common], help="write the store as sorted JSONL")
    p.add_argument("path")
    p.set_defaults(func=cmd_export)

    p = sub.add_parser("leaderboard", parents=[common], help="best relation per term count")
    p.set_defaults(func=cmd_leaderboard)

    p = sub.add_parser("pipeline", parents=[common], help="sieve, search, extend and store")
    _add_search_opts(p)
    _add_extend_opts(p)
    p.add_argument("--no-expand", action="store_true", help="skip arctan(2/a) expansion")
    p.add_argument("--truncate-sweep", action="store_true")
    p.add_argument("--lambda-max", default=None)
    p.set_defaults(func=cmd_pipeline)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    try:
        return args.func(args)
    except (UsageError, InvalidInput, NotCertified, FileNotFoundError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except MachinError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    except Exception as exc:  # noqa: BLE001
        log.exception("internal failure")
        print(f"internal error: {exc}", file=sys.stderr)
        return 2


if __name__ == "__main__":
    sys.exit(main())
