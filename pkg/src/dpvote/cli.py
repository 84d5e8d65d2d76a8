"""Command-line entry point: ``dpvote <subcommand> ...``.

Exit codes: 0 ok, 1 usage, 2 verification failure, 3 enumeration cap
exceeded, 4 I/O or unreadable ballot file.  Output is never coloured.
"""

from __future__ import annotations

import argparse
import contextlib
import io
import json
import math
import sys
from pathlib import Path
from typing import Any, Sequence

from dpvote import __version__, acceptance, bounds, experiments
from dpvote.axioms import LEVEL_NAMES, achieved_levels
from dpvote.ballots import BallotFormatError, default_names, format_profile_inline, parse_ballots
from dpvote.bounds import BoundId
from dpvote.config import parse_epsilon, parse_grid, read_manifest
from dpvote.core import (
    DEFAULT_ENUMERATION_CAP,
    EnumerationCapError,
    borda_scores,
    condorcet_loser,
    condorcet_winner,
    majority_margins,
    pareto_dominations,
)
from dpvote.dpverify import empirical_epsilon
from dpvote.experiments import format_float
from dpvote.mechanisms import DEFAULT_SEED, MechanismConfig, MechanismId, lottery, make_rng, sample_winner

EXIT_OK, EXIT_USAGE, EXIT_FAIL, EXIT_CAP, EXIT_IO = 0, 1, 2, 3, 4

# applied after flags and --config, so "None" means "not given yet"
DEFAULTS: dict[str, Any] = {
    "format": None,
    "omega": 0.5,
    "seed": DEFAULT_SEED,
    "cap": DEFAULT_ENUMERATION_CAP,
    "threads": 1,
    "m": 5,
    "n": 10,
    "level": 1.0,
    "report": "summary",
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        raise UsageError(f"{self.prog}: {message}")


def _json_float(x: float | None) -> str:
    if x is None:
        return "null"
    if math.isinf(x):
        return '"inf"' if x > 0 else '"-inf"'
    return format(x, ".17g")


def dumps(obj: Any, indent: int = 2, _level: int = 0) -> str:
    """JSON with floats written to 17 significant digits."""
    pad, inner = " " * (indent * _level), " " * (indent * (_level + 1))
    if isinstance(obj, float):
        return _json_float(obj)
    if isinstance(obj, dict):
        if not obj:
            return "{}"
        items = [f"{inner}{json.dumps(str(k))}: {dumps(v, indent, _level + 1)}" for k, v in obj.items()]
        return "{\n" + ",\n".join(items) + f"\n{pad}}}"
    if isinstance(obj, (list, tuple)):
        if not obj:
            return "[]"
        if all(not isinstance(v, (dict, list, tuple)) for v in obj):
            return "[" + ", ".join(dumps(v, indent, _level + 1) for v in obj) + "]"
        items = [f"{inner}{dumps(v, indent, _level + 1)}" for v in obj]
        return "[\n" + ",\n".join(items) + f"\n{pad}]"
    if hasattr(obj, "item"):  # numpy scalar
        return dumps(obj.item(), indent, _level)
    return json.dumps(obj)


def _common(p: argparse.ArgumentParser, formats=("json", "csv", "text")) -> None:
    p.add_argument("--format", choices=formats, default=None, help="output format")
    p.add_argument("--out", default=None, help="write output here instead of stdout")
    p.add_argument("--config", default=None, help="key = value file mirroring these flags; flags win")


def _mech_opts(p: argparse.ArgumentParser, need_size: bool) -> None:
    p.add_argument("mechanism", help="BordaEXP, RDAnti, CWRR, CLRR or Mixture (any case)")
    p.add_argument("--epsilon", type=parse_epsilon, default=None, help="privacy budget; decimal or ln(x)")
    p.add_argument("--omega", type=float, default=None, help="mixture weight on CWRR (default 0.5)")
    if need_size:
        p.add_argument("--m", type=int, default=None)
        p.add_argument("--n", type=int, default=None)
        p.add_argument("--cap", type=int, default=None, help="max profiles to enumerate (default 10^6)")
        p.add_argument("--threads", type=int, default=None, help="worker processes for profile sweeps")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="dpvote", description="Differentially private voting rules and their axiom tradeoffs.")
    parser.add_argument("--version", action="version", version=f"dpvote {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("analyze", help="margins, Condorcet winner/loser, Borda scores, Pareto pairs")
    p.add_argument("file")
    _common(p)

    p = sub.add_parser("run", help="output lottery or sampled winners of a rule on a ballot file")
    _mech_opts(p, need_size=False)
    p.add_argument("file")
    g = p.add_mutually_exclusive_group()
    g.add_argument("--exact", action="store_true", default=None, help="print the exact lottery (default)")
    g.add_argument("--samples", type=int, default=None, help="draw this many winners")
    p.add_argument("--seed", type=int, default=None)
    _common(p)

    p = sub.add_parser("verify-dp", help="exhaustive empirical epsilon over neighbouring profiles")
    _mech_opts(p, need_size=True)
    _common(p)

    p = sub.add_parser("axioms", help="achieved alpha/beta/gamma/eta levels by enumeration")
    _mech_opts(p, need_size=True)
    p.add_argument("--report", choices=("summary", "witnesses"), default=None)
    p.add_argument("--with-dp", action="store_true", default=None, help="also measure empirical epsilon")
    _common(p)

    p = sub.add_parser("bounds", help="evaluate closed-form bounds")
    p.add_argument("--which", required=True, help="BoundId, or lower:<mechanism>:<axiom> for a listed per-mechanism level")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--epsilon", type=parse_epsilon, default=None)
    p.add_argument("--grid", type=parse_grid, default=None, help="epsilon grid start:stop:step or a,b,c")
    p.add_argument("--level", type=float, default=None, help="partner level for three-way bounds (default 1)")
    _common(p)

    p = sub.add_parser("sweep", help="curve data behind the tradeoff figures")
    src = p.add_mutually_exclusive_group(required=True)
    src.add_argument("--figure", type=int, choices=experiments.FIGURES)
    src.add_argument("--spec", help="sweep manifest: target, m, n, epsilon_grid, omega_grid, level_grid, output")
    p.add_argument("--m", type=int, default=None)
    p.add_argument("--n", type=int, default=None)
    p.add_argument("--svg", default=None, help="also render an SVG chart here")
    p.add_argument("--plot", nargs="?", const="", default=None,
                   help="also render a chart here (format from extension); bare --plot puts a PNG next to --out")
    _common(p)

    p = sub.add_parser("selfcheck", help="run the acceptance criteria")
    _common(p, formats=("text", "json"))
    return parser


def _apply_config(parser: argparse.ArgumentParser, args: argparse.Namespace) -> None:
    if getattr(args, "config", None):
        manifest = read_manifest(args.config)
        sub_action = next(a for a in parser._actions if isinstance(a, argparse._SubParsersAction))
        actions = {a.dest: a for a in sub_action.choices[args.command]._actions}
        for key, raw in manifest.items():
            if key not in actions:
                raise UsageError(f"unknown key {key!r} in {args.config}")
            if getattr(args, key) is not None:
                continue
            act = actions[key]
            if isinstance(act, argparse._StoreTrueAction):
                value: Any = raw.lower() in ("1", "true", "yes", "on")
            else:
                value = act.type(raw) if act.type else raw
                if act.choices is not None and value not in act.choices:
                    raise UsageError(f"{key} = {raw!r} is not one of {list(act.choices)}")
            setattr(args, key, value)
    for key, value in DEFAULTS.items():
        if hasattr(args, key) and getattr(args, key) is None:
            setattr(args, key, value)


def _need(args, *names):
    missing = [n for n in names if getattr(args, n, None) is None]
    if missing:
        raise UsageError(f"{args.command}: missing required option(s): {', '.join('--' + m for m in missing)}")


def _cfg(args) -> MechanismConfig:
    _need(args, "epsilon")
    try:
        return MechanismConfig(epsilon=args.epsilon, omega=args.omega, seed=getattr(args, "seed", DEFAULT_SEED))
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _mech(args) -> MechanismId:
    try:
        return MechanismId.parse(args.mechanism)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _read_profile(path: str):
    try:
        text = Path(path).read_text(encoding="utf-8")
    except OSError as exc:
        raise IOError(f"cannot read {path}: {exc.strerror}") from None
    return parse_ballots(text)


def _csv(rows: Sequence[Sequence[Any]]) -> str:
    out = io.StringIO()
    import csv

    w = csv.writer(out, lineterminator="\n")
    for r in rows:
        w.writerow([format_float(v) if isinstance(v, float) else v for v in r])
    return out.getvalue()


# ---------------------------------------------------------------------------
# subcommands; each returns (text, exit code)


def cmd_analyze(args) -> tuple[str, int]:
    prof, names = _read_profile(args.file)
    w = majority_margins(prof)
    cw, cl = condorcet_winner(w), condorcet_loser(w)
    borda = borda_scores(prof)
    pareto = sorted(pareto_dominations(prof))
    fmt = args.format or "text"
    if fmt == "json":
        return dumps({
            "m": prof.m,
            "n": prof.n,
            "alternatives": names,
            "margins": {names[a]: {names[b]: int(w[a, b]) for b in range(prof.m)} for a in range(prof.m)},
            "condorcet_winner": names[cw] if cw is not None else None,
            "condorcet_loser": names[cl] if cl is not None else None,
            "borda": {names[a]: int(borda[a]) for a in range(prof.m)},
            "pareto_dominations": [[names[a], names[b]] for a, b in pareto],
        }) + "\n", EXIT_OK
    if fmt == "csv":
        rows = [("quantity", "alternative", "other", "value")]
        rows += [("margin", names[a], names[b], int(w[a, b])) for a in range(prof.m) for b in range(prof.m) if a != b]
        rows += [("borda", names[a], "", int(borda[a])) for a in range(prof.m)]
        rows += [("condorcet_winner", names[cw] if cw is not None else "", "", "")]
        rows += [("condorcet_loser", names[cl] if cl is not None else "", "", "")]
        rows += [("pareto", names[a], names[b], 1) for a, b in pareto]
        return _csv(rows), EXIT_OK
    width = max(len(x) for x in names)
    lines = [f"m={prof.m} n={prof.n}", "margins w[a,b]:"]
    lines.append(" " * (width + 2) + " ".join(f"{x:>{max(width, 3)}}" for x in names))
    for a in range(prof.m):
        lines.append(f"  {names[a]:<{width}}" + " ".join(f"{int(w[a, b]):>{max(width, 3)}}" for b in range(prof.m)))
    lines.append(f"Condorcet winner: {names[cw] if cw is not None else 'none'}")
    lines.append(f"Condorcet loser: {names[cl] if cl is not None else 'none'}")
    lines.append("Borda: " + ", ".join(f"{names[a]}={int(borda[a])}" for a in range(prof.m)))
    lines.append("Pareto dominations: " + (", ".join(f"{names[a]}>{names[b]}" for a, b in pareto) or "none"))
    return "\n".join(lines) + "\n", EXIT_OK


def cmd_run(args) -> tuple[str, int]:
    mech, cfg = _mech(args), _cfg(args)
    prof, names = _read_profile(args.file)
    fmt = args.format or "json"
    if args.samples is None:
        lot = lottery(mech, prof, cfg)
        if fmt == "csv":
            return _csv([("alternative", "probability")] + [(names[a], float(lot[a])) for a in range(prof.m)]), EXIT_OK
        if fmt == "text":
            return "".join(f"{names[a]}\t{format_float(float(lot[a]))}\n" for a in range(prof.m)), EXIT_OK
        return dumps({names[a]: float(lot[a]) for a in range(prof.m)}) + "\n", EXIT_OK
    if args.samples < 1:
        raise UsageError("--samples must be >= 1")
    rng = make_rng(args.seed)
    winners = [sample_winner(mech, prof, cfg, rng) for _ in range(args.samples)]
    counts = [winners.count(a) for a in range(prof.m)]
    if fmt == "csv":
        rows = [("alternative", "count", "frequency")]
        rows += [(names[a], counts[a], counts[a] / args.samples) for a in range(prof.m)]
        return f"# seed={args.seed}\n" + _csv(rows), EXIT_OK
    if fmt == "text":
        head = f"seed {args.seed}, {args.samples} samples\n"
        return head + "".join(f"{names[a]}\t{counts[a]}\n" for a in range(prof.m)), EXIT_OK
    out = {"mechanism": mech.value, "seed": args.seed, "samples": args.samples,
           "counts": {names[a]: counts[a] for a in range(prof.m)},
           "frequencies": {names[a]: counts[a] / args.samples for a in range(prof.m)}}
    if args.samples == 1:
        out["winner"] = names[winners[0]]
    return dumps(out) + "\n", EXIT_OK


def cmd_verify_dp(args) -> tuple[str, int]:
    mech, cfg = _mech(args), _cfg(args)
    _need(args, "m", "n")
    rep = empirical_epsilon(mech, cfg, args.m, args.n, cap=args.cap)
    code = EXIT_OK if rep.passed else EXIT_FAIL
    names = default_names(args.m)
    worst = None
    if rep.worst_pair is not None:
        p, q, a = rep.worst_pair
        worst = {"profile": format_profile_inline(p, names), "neighbor": format_profile_inline(q, names), "alternative": names[a]}
    fmt = args.format or "text"
    if fmt == "json":
        return dumps({"mechanism": mech.value, "m": args.m, "n": args.n, "omega": cfg.omega if mech is MechanismId.Mixture else None,
                      "configured_epsilon": rep.configured_epsilon, "empirical_epsilon": rep.empirical_epsilon,
                      "verdict": rep.verdict, "pairs_checked": rep.pairs_checked, "worst_pair": worst}) + "\n", code
    if fmt == "csv":
        rows = [("mechanism", "m", "n", "configured_epsilon", "empirical_epsilon", "verdict", "pairs_checked"),
                (mech.value, args.m, args.n, rep.configured_epsilon, rep.empirical_epsilon, rep.verdict, rep.pairs_checked)]
        return _csv(rows), code
    text = f"{rep.verdict}, empirical epsilon = {rep.empirical_epsilon:.9f} (configured {rep.configured_epsilon:.9f}, {rep.pairs_checked} ordered pairs)\n"
    if worst:
        text += f"worst pair: [{worst['profile']}] vs [{worst['neighbor']}] on {worst['alternative']}\n"
    return text, code


def cmd_axioms(args) -> tuple[str, int]:
    mech, cfg = _mech(args), _cfg(args)
    _need(args, "m", "n")
    lv = achieved_levels(mech, cfg, args.m, args.n, cap=args.cap, threads=args.threads)
    if args.with_dp:
        lv.empirical_epsilon = empirical_epsilon(mech, cfg, args.m, args.n, cap=args.cap).empirical_epsilon
    names = default_names(args.m)
    fmt = args.format or "json"
    keys = list(LEVEL_NAMES) + (["empirical_epsilon"] if args.with_dp else [])
    if fmt == "json":
        out: dict[str, Any] = {"mechanism": mech.value, "m": args.m, "n": args.n, "epsilon": cfg.epsilon}
        if mech is MechanismId.Mixture:
            out["omega"] = cfg.omega
        out.update({k: getattr(lv, k) for k in keys})
        out["profiles_checked"] = lv.profiles_checked
        if args.report == "witnesses":
            out["witnesses"] = {k: format_profile_inline(p, names) for k, p in lv.per_profile_witnesses.items()}
        return dumps(out) + "\n", EXIT_OK
    if fmt == "csv":
        rows = [("level", "value", "witness")]
        for k in keys:
            wit = lv.per_profile_witnesses.get(k)
            rows.append((k, getattr(lv, k) if getattr(lv, k) is not None else "", format_profile_inline(wit, names) if wit and args.report == "witnesses" else ""))
        return _csv(rows), EXIT_OK
    lines = [f"{mech.value} m={args.m} n={args.n} epsilon={cfg.epsilon:.9g} ({lv.profiles_checked} profiles)"]
    for k in keys:
        v = getattr(lv, k)
        line = f"  {k:<18} {'absent' if v is None else format_float(v)}"
        if args.report == "witnesses" and k in lv.per_profile_witnesses:
            line += f"   [{format_profile_inline(lv.per_profile_witnesses[k], names)}]"
        lines.append(line)
    return "\n".join(lines) + "\n", EXIT_OK


def _bound_rows(args) -> list[tuple]:
    grid = args.grid if args.grid is not None else ([args.epsilon] if args.epsilon is not None else None)
    if grid is None:
        raise UsageError("bounds: give --epsilon or --grid")
    rows = []
    which = args.which
    if which.lower().startswith("lower:"):
        parts = which.split(":")
        if len(parts) != 3:
            raise UsageError("listed levels are written lower:<mechanism>:<axiom>")
        try:
            mech = MechanismId.parse(parts[1])
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        for eps in grid:
            try:
                cell = bounds.mechanism_lower_bound(mech, parts[2], args.m, args.n, eps)
            except ValueError as exc:
                raise UsageError(str(exc)) from None
            rows.append((eps, f"lower({mech.value},{parts[2]})", cell.value, cell.epsilon_suspect))
        return rows
    try:
        bid = BoundId.parse(which)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    for eps in grid:
        if bid in bounds.TWO_WAY:
            rows.append((eps, bid.value, bounds.two_way_bound(bid, args.m, args.n, eps), False))
        else:
            rows.append((eps, bid.value, bounds.three_way_threshold(bid, args.level, args.m, args.n, eps).value, False))
    return rows


def cmd_bounds(args) -> tuple[str, int]:
    rows = _bound_rows(args)
    fmt = args.format or "csv"
    header = ("epsilon", "bound_id", "value", "epsilon_suspect")
    if fmt == "json":
        return dumps([dict(zip(header, r)) for r in rows]) + "\n", EXIT_OK
    if fmt == "text":
        return "".join(f"{r[1]} eps={format_float(r[0])}: {format_float(r[2])}{' (epsilon suspect)' if r[3] else ''}\n" for r in rows), EXIT_OK
    return _csv([header] + [(e, b, v, str(s).lower()) for e, b, v, s in rows]), EXIT_OK


def _sweep_spec_from_file(path: str, args) -> experiments.SweepSpec:
    man = read_manifest(path)
    if "target" not in man:
        raise UsageError(f"{path}: sweep manifest needs a target")
    kw: dict[str, Any] = {"target": man["target"]}
    for key in ("m", "n"):
        if key in man:
            kw[key] = int(man[key])
        elif getattr(args, key, None) is not None:
            kw[key] = getattr(args, key)
    for key in ("epsilon_grid", "omega_grid", "level_grid"):
        if key in man:
            kw[key] = parse_grid(man[key])
    if "output" in man:
        kw["output"] = man["output"]
    return experiments.SweepSpec(**kw)


def cmd_sweep(args) -> tuple[str, int]:
    if args.figure is not None:
        rows = experiments.figure_rows(args.figure, args.m, args.n)
    else:
        try:
            spec = _sweep_spec_from_file(args.spec, args)
        except OSError as exc:
            raise IOError(f"cannot read {args.spec}: {exc.strerror}") from None
        if args.out is None and spec.output:
            args.out = spec.output
        rows = experiments.run_sweep(spec)
    plot = args.plot
    if plot == "":
        if not args.out:
            raise UsageError("sweep: bare --plot needs --out to place the image next to the CSV")
        plot = str(Path(args.out).with_suffix(".png"))
    for target in (args.svg, plot):
        if target:
            from dpvote import plotting

            plotting.render(rows, target)
    fmt = args.format or "csv"
    if fmt == "json":
        return dumps([{**{k: getattr(r, k) for k in experiments.CSV_HEADER}, **({"flag": r.flag} if r.flag else {})} for r in rows]) + "\n", EXIT_OK
    if fmt == "text":
        return "".join(f"{r.series}: {r.x_name}={format_float(r.x_value)} {r.y_name}={format_float(r.y_value)}\n" for r in rows), EXIT_OK
    return experiments.rows_to_csv(rows), EXIT_OK


def cmd_selfcheck(args) -> tuple[str, int]:
    buf = io.StringIO()
    results = acceptance.run_all(echo=lambda s: buf.write(s + "\n"))
    code = EXIT_OK if all(r.passed for r in results) else EXIT_FAIL
    if (args.format or "text") == "json":
        return dumps([{"criterion": r.number, "title": r.title, "passed": r.passed, "details": r.details} for r in results]) + "\n", code
    passed = sum(r.passed for r in results)
    return buf.getvalue() + f"{passed}/{len(results)} criteria passed\n", code


COMMANDS = {
    "analyze": cmd_analyze,
    "run": cmd_run,
    "verify-dp": cmd_verify_dp,
    "axioms": cmd_axioms,
    "bounds": cmd_bounds,
    "sweep": cmd_sweep,
    "selfcheck": cmd_selfcheck,
}


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
        _apply_config(parser, args)
        text, code = COMMANDS[args.command](args)
    except UsageError as exc:
        print(exc, file=sys.stderr)
        return EXIT_USAGE
    except EnumerationCapError as exc:
        print(f"dpvote: {exc}", file=sys.stderr)
        return EXIT_CAP
    except (OSError, BallotFormatError) as exc:
        print(f"dpvote: {exc}", file=sys.stderr)
        return EXIT_IO
    except ValueError as exc:
        print(f"dpvote: {exc}", file=sys.stderr)
        return EXIT_USAGE
    try:
        if args.out:
            Path(args.out).write_text(text, encoding="utf-8", newline="\n")
        else:
            with contextlib.suppress(BrokenPipeError):
                sys.stdout.write(text)
                sys.stdout.flush()
    except OSError as exc:
        print(f"dpvote: {exc}", file=sys.stderr)
        return EXIT_IO
    return code


if __name__ == "__main__":
    sys.exit(main())
