"""Command-line front end.

Exit codes: 0 success / property holds, 1 property fails (or search found
nothing), 2 usage or input error, 3 infeasible pattern size, 4 teaching cap
exceeded, 5 enumeration budget exceeded.

JSON on stdout is the canonical output; ``--csv`` and ``--table`` render the
same payload. Progress goes to stderr.
"""

import argparse
import csv
import io
import json
import logging
import sys
import time
from pathlib import Path

from . import bounds, kernels, sk, teaching
from .errors import BudgetExceeded, CapExceeded, PatternTooLarge
from .qr import build_qr
from .tournament import parse_edge_list, random_tournament, to_dot, to_edge_list

log = logging.getLogger("qrteach")

EXIT_OK = 0
EXIT_FAILS = 1
EXIT_USAGE = 2
EXIT_INFEASIBLE = 3
EXIT_CAP = 4
EXIT_BUDGET = 5


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# sources


def load_source(source):
    """``qr:P``, ``random:N:SEED`` or a file path.

    Returns ``(tournament or None, concept class or None)``; a file whose
    header has two numbers is read as a concept matrix.
    """
    if source.startswith("qr:"):
        return build_qr(_int(source[3:], "p")), None
    if source.startswith("random:"):
        parts = source.split(":")
        if len(parts) != 3:
            raise UsageError("random source must look like random:N:SEED")
        return random_tournament(_int(parts[1], "n"), _int(parts[2], "seed")), None
    path = Path(source)
    if not path.is_file():
        raise UsageError(f"no such source {source!r} (expected qr:P, random:N:SEED or a file)")
    text = path.read_text()
    first = next((ln for ln in text.splitlines() if ln.strip() and not ln.lstrip().startswith("#")), "")
    if len(first.split()) == 2:
        return None, teaching.parse_concept_matrix(text)
    return parse_edge_list(text), None


def _int(text, name):
    try:
        return int(text)
    except ValueError:
        raise UsageError(f"{name} must be an integer, got {text!r}") from None


# ---------------------------------------------------------------------------
# rendering


def flatten(payload, prefix=""):
    """Dotted-key view of a payload; lists become JSON strings."""
    flat = {}
    for key, value in payload.items():
        name = f"{prefix}{key}"
        if isinstance(value, dict):
            flat.update(flatten(value, name + "."))
        elif isinstance(value, list):
            flat[name] = json.dumps(value)
        else:
            flat[name] = value
    return flat


def render(report, fmt):
    if fmt == "json":
        return json.dumps(report, indent=2) + "\n"
    result = report["result"]
    if fmt == "csv":
        buf = io.StringIO()
        writer = csv.writer(buf, lineterminator="\n")
        rows = result.get("rows")
        if isinstance(rows, list) and rows and all(isinstance(r, dict) for r in rows):
            cols = list(rows[0])
            writer.writerow(cols)
            for row in rows:
                writer.writerow([row[c] for c in cols])
        else:
            writer.writerow(["key", "value"])
            for key, value in flatten(result).items():
                writer.writerow([key, json.dumps(value)])
        return buf.getvalue()
    lines = [f"# {report['command']}  ({report['elapsed_ms']} ms)"]
    for key, value in flatten(result).items():
        lines.append(f"{key:32s} {value}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# commands; each returns (result payload, exit code)


def cmd_qr(args):
    t = build_qr(args.p)
    out_deg = sorted(set(int(d) for d in t.out_degrees()))
    in_deg = sorted(set(int(d) for d in t.in_degrees()))
    half = (args.p - 1) // 2
    result = {
        "p": args.p,
        "order": t.order,
        "edges": len(t.edges()),
        "out_degrees": out_deg,
        "in_degrees": in_deg,
        "regular": out_deg == [half] and in_deg == [half],
    }
    if args.dot:
        Path(args.dot).write_text(to_dot(t, name=f"QR{args.p}"))
        result["dot"] = args.dot
    if args.edges_out:
        Path(args.edges_out).write_text(to_edge_list(t))
        result["edge_list"] = args.edges_out
    return result, EXIT_OK


def cmd_check(args):
    t, cls = load_source(args.source)
    if t is None:
        raise UsageError("check needs a tournament source, not a concept matrix")
    variant = _variant(args)
    if t.order - 1 <= args.k < t.order:
        # one candidate left per pattern: the property is impossible
        raise PatternTooLarge(f"k = {args.k} leaves a single candidate witness in a tournament of order {t.order}")
    log.info("scanning %d patterns", sk.total_patterns(t.order, args.k, variant != sk.WEAK))
    verdict = sk.check_property(
        t, variant, args.k, args.m, full_report=args.full, threads=args.threads, backend=args.backend
    )
    result = {"source": args.source, "order": t.order, **verdict.as_dict()}
    return result, EXIT_OK if verdict.holds else EXIT_FAILS


def _variant(args):
    if args.weak:
        if args.m != 1:
            raise UsageError("-m only applies to the strong property")
        return sk.WEAK
    return sk.STRONG_M if args.m != 1 else sk.STRONG


def cmd_teach(args):
    t, cls = load_source(args.source)
    if cls is None:
        cls = teaching.induced_class(t)
    wanted = {name for name in ("td", "rtd", "nctd") if getattr(args, name)} or {"td", "rtd", "nctd"}
    result = {"source": args.source, "domain_size": cls.domain_size, "concepts": len(cls), "cap": args.cap}
    capped = False

    if "td" in wanted:
        per = []
        for i in range(len(cls)):
            log.info("teaching set for concept %d/%d", i + 1, len(cls))
            per.append(teaching.teaching_dim(i, cls, args.cap))
        finite = [r.dimension for r in per if not r.exceeds_cap]
        exceeded = any(r.exceeds_cap for r in per)
        capped |= exceeded
        result["td"] = {
            "per_concept": [r.as_dict() for r in per],
            "td_min": min(finite) if finite else None,
            "td_min_lower_bound": min(finite) if finite else args.cap + 1,
            "td_max": None if exceeded else max(finite),
            "cap_exceeded": exceeded,
        }
    if "rtd" in wanted:
        try:
            result["rtd"] = {**teaching.rtd(cls, args.cap).as_dict(), "cap_exceeded": False}
        except CapExceeded as exc:
            capped = True
            result["rtd"] = {"rtd": None, "layers": [], "cap_exceeded": True, "lower_bound": exc.lower_bound}
    if "nctd" in wanted:
        if t is None:
            result["nctd"] = {"value": None, "note": "only available for tournament sources"}
        else:
            teacher = teaching.canonical_nc_teacher(t)
            valid, _ = teaching.verify_nc_teacher(cls, teacher)
            result["nctd"] = {
                "value": teaching.nctd_of_induced(t),
                "canonical_teacher_valid": valid,
                "teacher": teacher.as_dict(),
            }
    result["cap_exceeded"] = capped
    return result, EXIT_CAP if capped else EXIT_OK


def cmd_bounds(args):
    if not 1 <= args.k_max <= bounds.BOUNDS_K_MAX:
        raise UsageError(f"k_max must be in 1..{bounds.BOUNDS_K_MAX}")
    rows = bounds.bounds_table(args.k_max)
    payload = [dict(zip(bounds.CSV_COLUMNS, row.as_tuple())) for row in rows]
    chain = all(r.lower <= r.f_upper <= r.F_upper for r in rows)
    return {"rows": payload, "chain_holds": chain}, EXIT_OK


def cmd_search(args):
    variant = _variant(args)
    if args.mode == "exhaustive":
        if args.nmax is None:
            raise UsageError("exhaustive search needs --nmax")
        if variant == sk.STRONG_M:
            raise UsageError("exhaustive search supports --weak or --strong only")
        log.info("exhaustive search k=%d up to order %d", args.k, args.nmax)
        outcome = bounds.exhaustive_min_order(
            args.k, variant, args.nmax, symmetry_cut=args.symmetry_cut, threads=args.threads, backend=args.backend
        )
    else:
        if args.n is None:
            raise UsageError("random search needs -n")
        log.info("random search n=%d k=%d trials=%d", args.n, args.k, args.trials)
        outcome = bounds.random_search(args.n, args.k, variant, args.m, args.trials, args.seed)
    result = {"mode": args.mode, **outcome.as_dict()}
    if outcome.found and args.export:
        text = to_edge_list(outcome.witness)
        again = parse_edge_list(text)
        if not sk.check_property(again, outcome.variant, outcome.k, outcome.m).holds:
            raise AssertionError("witness failed re-verification before export")
        Path(args.export).write_text(text)
        result["exported"] = args.export
    return result, EXIT_OK if outcome.found else EXIT_FAILS


# ---------------------------------------------------------------------------
# argument parsing


def build_parser():
    common = argparse.ArgumentParser(add_help=False)
    fmt = common.add_mutually_exclusive_group()
    fmt.add_argument("--json", dest="format", action="store_const", const="json")
    fmt.add_argument("--csv", dest="format", action="store_const", const="csv")
    fmt.add_argument("--table", dest="format", action="store_const", const="table")
    common.add_argument("-v", "--verbose", action="store_true", help="progress on stderr")
    common.set_defaults(format="json")

    workers = argparse.ArgumentParser(add_help=False)
    workers.add_argument("--threads", type=int, default=None, help="worker hint (default $QRTEACH_THREADS or 1)")
    workers.add_argument("--backend", choices=("numba", "numpy"), default=None)

    prop = argparse.ArgumentParser(add_help=False)
    which = prop.add_mutually_exclusive_group(required=True)
    which.add_argument("--weak", action="store_true")
    which.add_argument("--strong", action="store_true")
    prop.add_argument("-k", type=int)
    prop.add_argument("-m", type=int, default=1, help="required witnesses per pattern (strong only)")

    parser = argparse.ArgumentParser(prog="qrteach", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("qr", parents=[common], help="build a quadratic-residue tournament")
    p.add_argument("p", type=int)
    p.add_argument("--dot", metavar="FILE")
    p.add_argument("--edges", dest="edges_out", metavar="FILE")
    p.set_defaults(func=cmd_qr)

    p = sub.add_parser("check", parents=[common, workers, prop], help="decide an S_k property")
    p.add_argument("source", help="qr:P, random:N:SEED or an edge-list file")
    p.add_argument("--full", action="store_true", help="scan every pattern for the exact min_count")
    p.set_defaults(func=cmd_check)

    p = sub.add_parser("teach", parents=[common], help="teaching dimensions of the induced class")
    p.add_argument("source", help="qr:P, random:N:SEED, an edge-list or a concept-matrix file")
    p.add_argument("--td", action="store_true")
    p.add_argument("--rtd", action="store_true")
    p.add_argument("--nctd", action="store_true")
    p.add_argument("--cap", type=int, default=teaching.DEFAULT_CAP)
    p.set_defaults(func=cmd_teach)

    p = sub.add_parser("bounds", parents=[common], help="bound formulas for k = 1..K_MAX")
    p.add_argument("k_max", type=int)
    p.set_defaults(func=cmd_bounds)

    p = sub.add_parser("search", parents=[common, workers, prop], help="search for S_k tournaments")
    p.add_argument("mode", choices=("exhaustive", "random"))
    p.add_argument("-n", type=int)
    p.add_argument("--nmax", type=int)
    p.add_argument("--trials", type=int, default=100)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--export", metavar="FILE", help="write the witness as an edge list")
    cut = p.add_mutually_exclusive_group()
    cut.add_argument("--symmetry-cut", dest="symmetry_cut", action="store_true", default=None)
    cut.add_argument("--no-symmetry-cut", dest="symmetry_cut", action="store_false")
    p.set_defaults(func=cmd_search)
    return parser


def _parameters(args):
    skip = {"func", "format", "verbose"}
    return {k: v for k, v in vars(args).items() if k not in skip}


def _setup_logging(verbose):
    # own handler so progress reaches stderr even when the root logger is configured
    handler = logging.StreamHandler(sys.stderr)
    handler.setFormatter(logging.Formatter("%(message)s"))
    log.handlers[:] = [handler]
    log.propagate = False
    log.setLevel(logging.INFO if verbose else logging.WARNING)


def main(argv=None):
    parser = build_parser()
    args = parser.parse_args(argv)
    _setup_logging(args.verbose)
    if getattr(args, "backend", None) is None and hasattr(args, "backend"):
        args.backend = kernels.DEFAULT_BACKEND
    if args.command in ("check", "search") and args.k is None:
        parser.error("-k is required")

    start = time.perf_counter()
    try:
        result, code = args.func(args)
    except UsageError as exc:
        print(f"qrteach: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except PatternTooLarge as exc:
        print(f"qrteach: infeasible pattern: {exc}", file=sys.stderr)
        return EXIT_INFEASIBLE
    except BudgetExceeded as exc:
        print(f"qrteach: budget exceeded: {exc}", file=sys.stderr)
        return EXIT_BUDGET
    except CapExceeded as exc:
        print(f"qrteach: cap exceeded: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (ValueError, OSError) as exc:
        print(f"qrteach: {exc}", file=sys.stderr)
        return EXIT_USAGE
    report = {
        "command": args.command,
        "parameters": _parameters(args),
        "result": result,
        "exit_code": code,
        "elapsed_ms": int(round((time.perf_counter() - start) * 1000)),
    }
    sys.stdout.write(render(report, args.format))
    return code


if __name__ == "__main__":
    sys.exit(main())
