"""Command-line entry point: ``tassembly {asi,tai,verify,mine,gain,bench}``.

Every option can also be set through an environment variable named
``TASSEMBLY_<OPTION>`` (for example ``TASSEMBLY_TIME_BUDGET=30``); explicit
flags win over the environment.

Exit codes: 0 ok, 1 invalid certificate (or a failing bench row), 2 input
error, 3 unproved result under ``--require-proved``.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path
from typing import Optional

from .heuristics import WORKING, TARGET, InvalidFiller, gain_report, greedy_heuristic, mine_templates
from .plan import CertificateError, parse_plan, serialize_plan, verify_plan
from .search import (
    PROVED,
    UPPER_BOUND_ONLY,
    SearchConfig,
    SearchResult,
    asi_exact,
    greedy_concat_upper,
    tai_search,
)
from .universe import WILDCARD, AssemblyError, build_target

EXIT_OK, EXIT_INVALID, EXIT_INPUT, EXIT_UNPROVED = 0, 1, 2, 3
ENV_PREFIX = "TASSEMBLY_"
DEFAULT_MAX_EXACT_LENGTH = 64


class InputError(Exception):
    pass


# -- input ingestion ------------------------------------------------------------


def read_fasta(text: str) -> list[tuple[str, str]]:
    records, name, seq = [], None, []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.strip()
        if not line or line.startswith(";"):
            continue
        if line.startswith(">"):
            if name is not None:
                records.append((name, "".join(seq)))
            name, seq = line[1:].strip() or f"record{len(records) + 1}", []
        else:
            if name is None:
                raise InputError(f"FASTA line {lineno}: sequence data before the first header")
            if any(ch.isspace() for ch in line):
                raise InputError(f"FASTA line {lineno}: whitespace inside a sequence")
            seq.append(line)
    if name is not None:
        records.append((name, "".join(seq)))
    if not records:
        raise InputError("FASTA input has no records")
    return records


def read_lines(text: str) -> list[tuple[str, str]]:
    out = []
    for lineno, line in enumerate(text.splitlines(), start=1):
        line = line.split("#", 1)[0].strip()
        if line:
            out.append((f"line{lineno}", line))
    if not out:
        raise InputError("input file has no targets")
    return out


def collect_targets(args) -> list[tuple[str, str]]:
    """Return ``(identifier, target)`` pairs from the positional/--file/--fasta inputs."""
    found: list[tuple[str, str]] = []
    if args.fasta:
        found += read_fasta(_read(args.fasta))
    if args.file:
        found += read_lines(_read(args.file))
    if args.input is not None:
        path = Path(args.input)
        if args.input and path.is_file():
            text = _read(args.input)
            found += read_fasta(text) if text.lstrip().startswith(">") else read_lines(text)
        else:
            found.append((args.input, args.input))
    if not found:
        raise InputError("no target given (positional string, --file or --fasta)")
    for ident, w in found:
        try:
            build_target(w)
        except AssemblyError as exc:
            raise InputError(f"{ident}: {exc}") from None
    return found


def _read(path: str) -> str:
    try:
        return Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise InputError(f"cannot read {path}: {exc}") from None


# -- configuration --------------------------------------------------------------


def _env_bool(v: str) -> bool:
    return v.strip().lower() in ("1", "true", "yes", "on")


_ENV_TYPES = {
    "time_budget": float,
    "node_budget": int,
    "max_cost": int,
    "template_max_len": int,
    "template_max_stars": int,
    "jobs": int,
    "max_exact_length": int,
    "seed": int,
    "no_adjacent_stars": _env_bool,
    "template_fillers": _env_bool,
    "require_proved": _env_bool,
    "nondeterministic": _env_bool,
    "with_asi": _env_bool,
    "heuristic_only": _env_bool,
    "quick": _env_bool,
    "trace": _env_bool,
    "all": _env_bool,
    "json": str,
    "emit_plan": str,
    "occurrence_scope": str,
    "proxy": str,
}


def apply_environment(args, environ=os.environ) -> None:
    """Fill options left unset on the command line from ``TASSEMBLY_*`` variables."""
    for dest, conv in _ENV_TYPES.items():
        if not hasattr(args, dest) or getattr(args, dest) not in (None, False):
            continue
        raw = environ.get(ENV_PREFIX + dest.upper())
        if raw is None:
            continue
        try:
            setattr(args, dest, conv(raw))
        except ValueError:
            raise InputError(f"{ENV_PREFIX}{dest.upper()}={raw!r} is not a valid value") from None


def config_from_args(args) -> SearchConfig:
    try:
        return SearchConfig(
            max_cost=args.max_cost,
            template_max_len=args.template_max_len,
            template_max_stars=4 if args.template_max_stars is None else args.template_max_stars,
            allow_adjacent_stars=not args.no_adjacent_stars,
            allow_template_fillers=bool(args.template_fillers),
            deterministic=not args.nondeterministic,
            parallelism=args.jobs or 1,
            time_budget=args.time_budget,
            node_budget=args.node_budget,
        )
    except ValueError as exc:
        raise InputError(str(exc)) from None


# -- reports --------------------------------------------------------------------


def _certificate_checked(plan) -> str:
    text = serialize_plan(plan)
    report = verify_plan(parse_plan(text))
    if not report.valid or report.cost != plan.cost:
        raise RuntimeError(f"refusing to report an unverifiable certificate: {report}")
    return text


def run_report(ident: str, mode: str, cfg: SearchConfig, asi: Optional[SearchResult] = None,
               tai: Optional[SearchResult] = None, notes=()) -> dict:
    """Structured report for one target; every certificate is re-verified first."""
    out: dict = {"input": ident, "mode": mode}
    certificates = {}
    nodes, elapsed = 0, 0.0
    if asi is not None:
        out["asi"] = asi.value
        out["asi_proved"] = asi.proved
        certificates["asi"] = _certificate_checked(asi.witness)
        nodes += asi.nodes_expanded
        elapsed += asi.elapsed
    if tai is not None:
        out["tai_upper"] = tai.value
        out["tai_proved"] = tai.proved
        certificates["tai"] = _certificate_checked(tai.witness)
        nodes += tai.nodes_expanded
        elapsed += tai.elapsed
    if asi is not None and tai is not None:
        out["gap"] = asi.value - tai.value
    out["certificates"] = certificates
    out["nodes_expanded"] = nodes
    out["notes"] = list(notes)
    out["config"] = cfg.to_dict()
    out["elapsed_ms"] = round(elapsed * 1000.0, 3)
    return out


def _heuristic_result(plan) -> SearchResult:
    return SearchResult(plan.cost, plan, UPPER_BOUND_ONLY)


def _write_outputs(args, reports: list[dict]) -> None:
    if getattr(args, "json", None):
        Path(args.json).write_text(json.dumps(reports, indent=2) + "\n", encoding="utf-8")
    if getattr(args, "emit_plan", None):
        path = Path(args.emit_plan)
        certs = [(r["input"], key, text) for r in reports for key, text in r["certificates"].items()]
        if len(certs) == 1:
            path.write_text(certs[0][2], encoding="utf-8")
        else:
            for i, (_, key, text) in enumerate(certs, start=1):
                path.with_name(f"{path.stem}-{i}-{key}{path.suffix}").write_text(text, encoding="utf-8")


def _print_table(rows: list[list], header: list[str], out=None) -> None:
    out = out or sys.stdout
    cells = [header] + [[str(c) for c in row] for row in rows]
    widths = [max(len(r[i]) for r in cells) for i in range(len(header))]
    for n, row in enumerate(cells):
        print("  ".join(c.ljust(widths[i]) for i, c in enumerate(row)).rstrip(), file=out)
        if n == 0:
            print("  ".join("-" * wd for wd in widths), file=out)


def _flag(result: Optional[SearchResult]) -> str:
    if result is None:
        return "-"
    return "proved" if result.proved else "upper bound"


# -- subcommands ----------------------------------------------------------------


def cmd_asi(args) -> int:
    cfg = config_from_args(args)
    cap = args.max_exact_length or DEFAULT_MAX_EXACT_LENGTH
    reports, unproved = [], False
    for ident, w in collect_targets(args):
        notes = []
        if len(w) > cap:
            notes.append(f"length {len(w)} exceeds --max-exact-length {cap}; heuristic upper bound only")
            print(f"warning: {ident}: {notes[-1]}", file=sys.stderr)
            result = _heuristic_result(greedy_concat_upper(w))
        else:
            result = asi_exact(w, cfg)
        unproved |= not result.proved
        reports.append(run_report(ident, "canonical", cfg, asi=result, notes=notes))
    _print_table([[r["input"], r["asi"], "proved" if r["asi_proved"] else "upper bound"] for r in reports],
                 ["input", "asi", "status"])
    _write_outputs(args, reports)
    return EXIT_UNPROVED if unproved and args.require_proved else EXIT_OK


def cmd_tai(args) -> int:
    cfg = config_from_args(args)
    cap = args.max_exact_length or DEFAULT_MAX_EXACT_LENGTH
    scope = args.occurrence_scope or WORKING
    reports, unproved = [], False
    for ident, w in collect_targets(args):
        notes = []
        heuristic = bool(args.heuristic_only)
        if len(w) > cap and not heuristic:
            notes.append(f"length {len(w)} exceeds --max-exact-length {cap}; heuristic upper bound only")
            print(f"warning: {ident}: {notes[-1]}", file=sys.stderr)
            heuristic = True
        if heuristic:
            tai = _heuristic_result(greedy_heuristic(w, cfg, args.proxy, occurrence_scope=scope))
        else:
            tai = tai_search(w, cfg)
        asi = None
        if args.with_asi:
            asi = asi_exact(w, cfg) if len(w) <= cap else _heuristic_result(greedy_concat_upper(w))
            unproved |= not asi.proved
        unproved |= not tai.proved
        reports.append(run_report(ident, "templated", cfg, asi=asi, tai=tai, notes=notes))
    rows = []
    for r in reports:
        rows.append([r["input"], r.get("asi", "-"), r["tai_upper"],
                     "proved" if r["tai_proved"] else "upper bound", r.get("gap", "-")])
    _print_table(rows, ["input", "asi", "tai_upper", "tai_status", "gap"])
    _write_outputs(args, reports)
    return EXIT_UNPROVED if unproved and args.require_proved else EXIT_OK


def cmd_verify(args) -> int:
    text = _read(args.certificate)
    try:
        plan = parse_plan(text)
    except CertificateError as exc:
        print(f"syntax error: {exc}", file=sys.stderr)
        return EXIT_INPUT
    report = verify_plan(plan)
    payload = report.to_dict(with_trace=bool(args.trace))
    print(json.dumps(payload, indent=2))
    if getattr(args, "json", None):
        Path(args.json).write_text(json.dumps(payload, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK if report.valid else EXIT_INVALID


def cmd_mine(args) -> int:
    cfg = config_from_args(args)
    tables = []
    for ident, w in collect_targets(args):
        reports = mine_templates(w, cfg, args.proxy)
        if not args.all:
            reports = [r for r in reports if r.gain > 0]
        rows = [r.row() for r in reports]
        if args.limit:
            rows = rows[:args.limit]
        tables.append({"input": ident, "candidates": rows})
        print(f"# {ident}")
        _print_table([[r["skeleton"], ",".join(r["fillers"]), ",".join(map(str, r["occurrences"])),
                       r["benefit"], r["outlay"], r["gain"]] for r in rows],
                     ["skeleton", "fillers", "occurrences", "benefit", "outlay", "gain"])
    if getattr(args, "json", None):
        Path(args.json).write_text(json.dumps(tables, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_gain(args) -> int:
    if not args.filler:
        raise InputError("at least one filler (-u) is required")
    results = []
    for ident, w in collect_targets(args):
        try:
            rep = gain_report(args.template, args.filler, w, args.proxy)
        except (InvalidFiller, AssemblyError) as exc:
            raise InputError(f"{ident}: {exc}") from None
        results.append({"input": ident, **rep.row()})
        print(rep.gain)
    if getattr(args, "json", None):
        Path(args.json).write_text(json.dumps(results, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK


def cmd_bench(args) -> int:
    from .bench import run_bench

    rows = run_bench(quick=bool(args.quick), seed=7 if args.seed is None else args.seed,
                     samples=args.samples)
    _print_table([[r["criterion"], r["case"], r["expected"], r["observed"], "PASS" if r["passed"] else "FAIL"]
                  for r in rows], ["criterion", "case", "expected", "observed", "result"])
    if getattr(args, "json", None):
        Path(args.json).write_text(json.dumps(rows, indent=2) + "\n", encoding="utf-8")
    return EXIT_OK if all(r["passed"] for r in rows) else EXIT_INVALID


# -- parser ---------------------------------------------------------------------


def _add_inputs(p) -> None:
    p.add_argument("input", nargs="?", help="target string, or a text/FASTA file of targets")
    p.add_argument("--file", help="text file with one target per line")
    p.add_argument("--fasta", help="FASTA file; each record is a target")


def _add_search(p) -> None:
    g = p.add_argument_group("search")
    g.add_argument("--max-cost", type=int)
    g.add_argument("--template-max-len", type=int)
    g.add_argument("--template-max-stars", type=int)
    g.add_argument("--no-adjacent-stars", action="store_true", default=None)
    g.add_argument("--template-fillers", action="store_true", default=None,
                   help="allow templates as instantiation fillers")
    g.add_argument("--nondeterministic", action="store_true", default=None)
    g.add_argument("--jobs", type=int, help="worker processes for the exact search")
    g.add_argument("--time-budget", type=float, help="wall-clock seconds per search")
    g.add_argument("--node-budget", type=int, help="search nodes per search")
    g.add_argument("--max-exact-length", type=int,
                   help=f"longer targets get heuristic bounds only (default {DEFAULT_MAX_EXACT_LENGTH})")


def _add_outputs(p, plans: bool = True) -> None:
    p.add_argument("--json", help="write the structured report to this path")
    if plans:
        p.add_argument("--emit-plan", help="write the witness certificate(s) to this path")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="tassembly", description=__doc__.splitlines()[0])
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("asi", help="exact canonical assembly index")
    _add_inputs(p)
    _add_search(p)
    _add_outputs(p)
    p.add_argument("--require-proved", action="store_true", default=None)
    p.set_defaults(func=cmd_asi)

    p = sub.add_parser("tai", help="templated assembly index (bounded search or heuristic)")
    _add_inputs(p)
    _add_search(p)
    _add_outputs(p)
    p.add_argument("--require-proved", action="store_true", default=None)
    p.add_argument("--with-asi", action="store_true", default=None, help="also compute ASI and the gap")
    p.add_argument("--heuristic-only", action="store_true", default=None)
    p.add_argument("--proxy", help="cost proxy name (default length_minus_one)")
    p.add_argument("--occurrence-scope", choices=[WORKING, TARGET])
    p.set_defaults(func=cmd_tai)

    p = sub.add_parser("verify", help="verify a plan certificate")
    p.add_argument("certificate")
    p.add_argument("--trace", action="store_true", default=None, help="include the object built by each step")
    _add_outputs(p, plans=False)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("mine", help="rank candidate templates by gain")
    _add_inputs(p)
    _add_search(p)
    _add_outputs(p, plans=False)
    p.add_argument("--proxy")
    p.add_argument("--all", action="store_true", default=None, help="include candidates with gain <= 0")
    p.add_argument("--limit", type=int)
    p.set_defaults(func=cmd_mine)

    p = sub.add_parser("gain", help="gain of one skeleton and filler family")
    _add_inputs(p)
    p.add_argument("-T", "--template", required=True)
    p.add_argument("-u", "--filler", action="append")
    p.add_argument("--proxy")
    _add_outputs(p, plans=False)
    p.set_defaults(func=cmd_gain)

    p = sub.add_parser("bench", help="reproduce the worked-example table")
    p.add_argument("--quick", action="store_true", default=None, help="oracle-equivalence sample only")
    p.add_argument("--seed", type=int)
    p.add_argument("--samples", type=int, default=200)
    _add_outputs(p, plans=False)
    p.set_defaults(func=cmd_bench)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return EXIT_INPUT if exc.code not in (0, None) else EXIT_OK
    try:
        apply_environment(args)
        return args.func(args)
    except InputError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_INPUT


if __name__ == "__main__":
    sys.exit(main())
