"""Command-line front end: ``sl2sum eval | verify | tornheim | cf | mixed``.

Exit codes: 0 success, 1 compute or verification failure, 2 usage error.
Every number is printed with 17 significant digits; in JSON, non-finite
values become ``null``.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
import time
from dataclasses import asdict, dataclass, field
from typing import Callable, Sequence

from . import contfrac, geomoracle, tornheim
from .errors import InvalidInputError, Sl2SumError
from .series import (Accumulation, SeriesResult, SumControls, TailKind, available_threads,
                     mixed_sum, sum_cycloid_arctan, sum_power)
from .support import CURVES, Curve, curve_from_samples, get_curve, load_sampled_curve

CONSTANT = "paper-constant"
ORACLE = "geometric-oracle"
CROSS = "cross-check"
NONE = "none"

# Closed forms attached to (curve, s).
KNOWN_CONSTANTS: dict[tuple[str, float], float] = {
    ("circle", 1.0): 2.0,
    ("circle", 2.0): 2.0 - math.pi / 2,
    ("parabola", 1.0): 0.5,
    ("parabola", 2.0): 1.0 / 48,
    ("hyperbola", 2.0): 0.5 * math.log(3.0) + 2.0 * math.sqrt(3.0) - 4.0,
    ("cycloid", 2.0): math.pi,
    ("cycloid-arctan", 2.0): math.pi,
    ("tractrix", 2.0): math.pi,
    ("astroid", 1.0): -2.0,
    ("astroid", 2.0): 3.0 * math.pi / 16,
}

# Curves whose stated constant disagrees with the geometry; the oracle is
# used as the reference and the stated value is reported alongside.
ORACLE_FIRST = {"tractrix"}

DEFAULT_DEPTH_CAP = 1_000_000
DEFAULT_BUDGET = 10**8
DEFAULT_PRUNE = 1e-9


def fmt(x) -> str:
    if x is None:
        return ""
    if isinstance(x, bool):
        return str(x).lower()
    if isinstance(x, float):
        return format(x, ".17g")
    return str(x)


def digits_matched(value: float | None, reference: float | None) -> int | None:
    if value is None or reference is None or not math.isfinite(value):
        return None if reference is None else 0
    err = abs(value - reference) / max(abs(reference), 1.0)
    if err == 0:
        return 17
    return max(0, math.floor(-math.log10(err)))


@dataclass
class RunReport:
    command: str
    label: str
    value: float | None
    nodes_used: int = 0
    truncated_subtrees: int = 0
    tail_kind: str = TailKind.NONE.value
    tail_magnitude: float | None = None
    overflow_truncations: int = 0
    reference_value: float | None = None
    reference_source: str = NONE
    digits_matched: int | None = None
    wall_time_ms: int = 0
    stated_value: float | None = None
    stated_digits_matched: int | None = None
    oracle_value: float | None = None
    tolerance: float | None = None
    passed: bool | None = None

    @classmethod
    def from_result(cls, command: str, label: str, r: SeriesResult, **kw) -> "RunReport":
        return cls(command, label, r.value, r.nodes_used, r.truncated_subtrees,
                   r.tail_kind.value, r.tail_magnitude, r.overflow_truncations, **kw)

    def finish(self, started: float) -> "RunReport":
        self.wall_time_ms = int(round(1000 * (time.perf_counter() - started)))
        self.digits_matched = digits_matched(self.value, self.reference_value)
        if self.stated_value is not None:
            self.stated_digits_matched = digits_matched(self.value, self.stated_value)
        return self


FIELDS = [f for f in RunReport.__dataclass_fields__]

_NUMBER = {"type": ["number", "null"]}
_INT = {"type": ["integer", "null"]}
REPORT_SCHEMA = {
    "$schema": "https://json-schema.org/draft/2020-12/schema",
    "type": "object",
    "additionalProperties": False,
    "required": FIELDS,
    "properties": {
        "command": {"type": "string"},
        "label": {"type": "string"},
        "value": _NUMBER,
        "nodes_used": {"type": "integer", "minimum": 0},
        "truncated_subtrees": {"type": "integer", "minimum": 0},
        "tail_kind": {"enum": [k.value for k in TailKind]},
        "tail_magnitude": {"type": ["number", "null"], "minimum": 0},
        "overflow_truncations": {"type": "integer", "minimum": 0},
        "reference_value": _NUMBER,
        "reference_source": {"enum": [CONSTANT, ORACLE, CROSS, NONE]},
        "digits_matched": {"type": ["integer", "null"], "minimum": 0},
        "wall_time_ms": {"type": "integer", "minimum": 0},
        "stated_value": _NUMBER,
        "stated_digits_matched": _INT,
        "oracle_value": _NUMBER,
        "tolerance": _NUMBER,
        "passed": {"type": ["boolean", "null"]},
    },
}
REPORT_ARRAY_SCHEMA = {"type": "array", "items": REPORT_SCHEMA}


# Output.

def _json_text(reports: list[RunReport], as_array: bool) -> str:
    # json writes floats with repr; swap in 17-digit tokens afterwards.
    numbers: list[str] = []

    def encode(obj):
        if isinstance(obj, float):
            if not math.isfinite(obj):
                return None
            numbers.append(format(obj, ".17g"))
            return f"@@num{len(numbers) - 1}@@"
        return obj

    rows = [{k: encode(v) for k, v in asdict(r).items()} for r in reports]
    text = json.dumps(rows if as_array else rows[0], indent=2)
    for i, tok in enumerate(numbers):
        text = text.replace(f'"@@num{i}@@"', tok, 1)
    return text


def _csv_text(reports: list[RunReport]) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(FIELDS)
    for r in reports:
        w.writerow([fmt(getattr(r, k)) for k in FIELDS])
    return buf.getvalue()


def _text(reports: list[RunReport]) -> str:
    if len(reports) == 1:
        r = reports[0]
        width = max(len(k) for k in FIELDS)
        return "\n".join(f"{k:<{width}}  {fmt(getattr(r, k))}" for k in FIELDS
                         if getattr(r, k) is not None) + "\n"
    head = f"{'identity':<40} {'value':>24} {'reference':>24} {'digits':>6} {'ok':>5} {'ms':>7}"
    lines = [head, "-" * len(head)]
    for r in reports:
        ok = {True: "PASS", False: "FAIL", None: "info"}[r.passed]
        lines.append(f"{r.label:<40} {fmt(r.value):>24} {fmt(r.reference_value):>24} "
                     f"{fmt(r.digits_matched):>6} {ok:>5} {r.wall_time_ms:>7}")
    return "\n".join(lines) + "\n"


def emit(reports: list[RunReport], form: str, as_array: bool = False, out=None) -> None:
    out = out or sys.stdout
    if form == "json":
        out.write(_json_text(reports, as_array or len(reports) != 1) + "\n")
    elif form == "csv":
        out.write(_csv_text(reports))
    else:
        out.write(_text(reports))


# Shared pieces.

class UsageError(Exception):
    pass


def _controls(args, s: float) -> SumControls:
    return SumControls(s=s, prune_epsilon=args.prune, depth_cap=args.depth_cap,
                       node_budget=args.budget, accumulation=args.accumulation)


def _resolve_curve(args) -> Curve:
    if args.curve_file:
        try:
            return curve_from_samples(load_sampled_curve(args.curve_file), name=args.curve_file)
        except (OSError, InvalidInputError) as exc:
            raise UsageError(f"cannot use curve file: {exc}") from None
    if args.curve is None:
        raise UsageError("one of --curve or --curve-file is required")
    try:
        return get_curve(args.curve)
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from None


def geometric_value(curve: Curve, s: float) -> float | None:
    """``2 * region_area`` for ``s = 2``, signed tangent lengths for ``s = 1``."""
    if s not in (1.0, 2.0) or (curve.tangency is None and curve.samples is None):
        return None
    try:
        if s == 2.0:
            val = 2.0 * geomoracle.region_area(curve)
        else:
            val = geomoracle.tangent_lengths(curve)
    except Sl2SumError:
        return None
    return val if math.isfinite(val) else None


def eval_curve(curve: Curve, s: float, controls: SumControls, *, threads: int = 1,
               seed_depth: int = 0, on_block=None) -> SeriesResult:
    if curve.name == "cycloid-arctan":
        return sum_cycloid_arctan(controls, threads=threads, seed_depth=seed_depth,
                                  on_block=on_block)
    return sum_power(curve, controls, threads=threads, seed_depth=seed_depth, on_block=on_block)


def _partials_writer(target: str | None):
    if not target:
        return None, None
    stream = sys.stdout if target == "-" else open(target, "w", newline="")
    stream.write("nodes_used,partial_value\n")
    state = {"next": 1}

    def on_block(nodes, value):
        # Geometric thinning keeps the file small for long runs.
        if nodes >= state["next"]:
            stream.write(f"{nodes},{fmt(float(value))}\n")
            state["next"] = max(nodes + 1, int(nodes * 1.02))

    return on_block, stream


# Commands.

def cmd_eval(args, command: str) -> list[RunReport]:
    curve = _resolve_curve(args)
    s = float(args.power)
    controls = _controls(args, s)
    on_block, stream = _partials_writer(args.emit_partials)
    started = time.perf_counter()
    try:
        r = eval_curve(curve, s, controls, threads=args.threads, seed_depth=args.seed_depth,
                       on_block=on_block)
    finally:
        if stream is not None and stream is not sys.stdout:
            stream.close()
    report = RunReport.from_result(command, f"{curve.name} F({fmt(s)})", r)
    report.oracle_value = geometric_value(curve, s)
    stated = KNOWN_CONSTANTS.get((curve.name, s)) if curve.samples is None else None
    report.stated_value = stated
    if stated is not None and curve.name not in ORACLE_FIRST:
        report.reference_value, report.reference_source = stated, CONSTANT
    elif report.oracle_value is not None:
        report.reference_value, report.reference_source = report.oracle_value, ORACLE
    return [report.finish(started)]


def cmd_tornheim(args, command: str) -> list[RunReport]:
    started = time.perf_counter()
    s = float(args.s)
    if args.parabola_weight:
        r = tornheim.parabola_weighted_sum(s, args.mode, args.cutoff)
        refs = {1.0: 0.5, 2.0: 1.0 / 48}
        label = f"parabola weighted sum s={fmt(s)} ({args.mode})"
    else:
        r = tornheim.tornheim_coprime(tornheim.TornheimQuery(s, args.cutoff, args.mode))
        refs = {1.0: 2.0, 2.0: 1.0 / 3}
        label = f"coprime Mordell-Tornheim s={fmt(s)} ({args.mode})"
    report = RunReport.from_result(command, label, r)
    if s in refs:
        report.reference_value, report.reference_source = refs[s], CONSTANT
        report.stated_value = refs[s]
    return [report.finish(started)]


def _alpha_spec(text: str):
    parts = [p.strip() for p in text.split(",")]
    if len(parts) == 3:
        try:
            return tuple(int(p) for p in parts)
        except ValueError:
            raise UsageError(f"surd triple must be three integers, got {text!r}") from None
    return text


def cmd_cf(args, command: str) -> list[RunReport]:
    started = time.perf_counter()
    e = contfrac.expand(_alpha_spec(args.alpha), args.terms)
    alpha = float(e.alpha)
    reports = []
    for name, fn, ref in (("abs", contfrac.series_abs, alpha + 1), ("sq", contfrac.series_sq, alpha)):
        t0 = time.perf_counter()
        value = fn(e)
        rep = RunReport(command, f"cf {name} alpha={args.alpha} terms={len(e.quotients)}",
                        value, nodes_used=len(e.quotients), reference_value=ref,
                        reference_source=CONSTANT, stated_value=ref)
        reports.append(rep.finish(t0))
    if e.precision_exhausted:
        print(f"note: expansion stopped after {len(e.quotients)} quotients "
              f"(working precision exhausted)", file=sys.stderr)
    if e.terminated:
        print(f"note: alpha is rational; expansion terminated after {len(e.quotients)} "
              f"quotients", file=sys.stderr)
    reports[0].wall_time_ms = int(round(1000 * (time.perf_counter() - started)))
    return reports


def cmd_mixed(args, command: str) -> list[RunReport]:
    try:
        f, g = get_curve(args.f), get_curve(args.g)
    except InvalidInputError as exc:
        raise UsageError(str(exc)) from None
    started = time.perf_counter()
    r = mixed_sum(f, g, _controls(args, 2.0), threads=args.threads, seed_depth=args.seed_depth)
    report = RunReport.from_result(command, f"mixed {f.name} x {g.name}", r)
    try:
        report.oracle_value = geomoracle.mixed_volume_oracle(f, g)
    except Sl2SumError:
        report.oracle_value = None
    stated = KNOWN_CONSTANTS.get((f.name, 2.0)) if f.name == g.name else None
    if stated is not None and f.name not in ORACLE_FIRST:
        report.stated_value = stated / 2
        report.reference_value, report.reference_source = stated / 2, CONSTANT
    elif report.oracle_value is not None:
        report.reference_value, report.reference_source = report.oracle_value, ORACLE
    return [report.finish(started)]


# Verification table.

@dataclass
class Identity:
    label: str
    run: Callable[[], tuple[float, SeriesResult | None]]
    reference: Callable[[], float]
    source: str
    tolerance: float | None  # absolute; None means informational
    extra: dict = field(default_factory=dict)


_RUNS: dict[tuple, SeriesResult] = {}


def _series_row(curve_name: str, s: float, eps: float, threads: int):
    curve = CURVES[curve_name]

    def run():
        key = (curve_name, s, eps)
        if key not in _RUNS:
            _RUNS[key] = eval_curve(curve, s, SumControls(s, eps), threads=threads)
        return _RUNS[key].value, _RUNS[key]

    return run


def identities(profile: str, threads: int = 1) -> list[Identity]:
    quick = profile == "quick"
    pc = KNOWN_CONSTANTS

    def const(x):
        return lambda: x

    def cf_row(spec, n, which):
        def run():
            e = contfrac.expand(spec, n)
            fn = contfrac.series_abs if which == "abs" else contfrac.series_sq
            return fn(e), None
        return run

    def cf_ref(spec, which):
        def ref():
            a = float(contfrac.expand(spec, 1).alpha)
            return a + 1 if which == "abs" else a
        return ref

    def tornheim_row(s, mode, weighted=False):
        def run():
            if weighted:
                r = tornheim.parabola_weighted_sum(s, mode)
            else:
                r = tornheim.tornheim_coprime(tornheim.TornheimQuery(s, mode=mode))
            return r.value, r
        return run

    rows = [
        Identity("circle F(2) = 2 - pi/2", _series_row("circle", 2, 1e-5, threads),
                 const(pc["circle", 2.0]), CONSTANT, 1e-6),
        Identity("circle F(1) = 2", _series_row("circle", 1, 1e-10 if quick else 2e-11, threads),
                 const(2.0), CONSTANT, 1e-3),
        Identity("parabola F(2) = 1/48", _series_row("parabola", 2, 1e-6, threads),
                 const(1 / 48), CONSTANT, 1e-8),
        Identity("parabola weighted F(1) = 1/2 (zeta)", tornheim_row(1.0, "zeta", True),
                 const(0.5), CONSTANT, 1e-8),
        Identity("hyperbola F(2)", _series_row("hyperbola", 2, 1e-5, threads),
                 const(pc["hyperbola", 2.0]), CONSTANT, 1e-6),
        Identity("cycloid F(2) = pi", _series_row("cycloid", 2, 1e-5, threads),
                 const(math.pi), CONSTANT, 1e-4),
        Identity("cycloid arctan form = pi", _series_row("cycloid-arctan", 2, 1e-5, threads),
                 const(math.pi), CONSTANT, 1e-4),
        Identity("astroid F(2) = 3 pi/16", _series_row("astroid", 2, 1e-5, threads),
                 const(3 * math.pi / 16), CONSTANT, 1e-4),
        Identity("astroid F(1) = -2", _series_row("astroid", 1, 1e-10 if quick else 2e-11, threads),
                 const(-2.0), CONSTANT, 1e-3),
        Identity("Mordell-Tornheim s=2 = 1/3 (zeta)", tornheim_row(2.0, "zeta"),
                 const(1 / 3), CONSTANT, 1e-8),
        Identity("cf phi: sq series = phi (40 terms)", cf_row("phi", 40, "sq"),
                 cf_ref("phi", "sq"), CONSTANT, 1e-14),
    ]
    if quick:
        return rows

    def arctan_vs_arccos():
        a = sum_cycloid_arctan(SumControls(2, 1e-5), threads=threads)
        return a.value, a

    def arccos_total():
        return sum_power(CURVES["cycloid"], SumControls(2, 1e-5), threads=threads).value

    def mixed_run():
        r = mixed_sum(CURVES["circle"], CURVES["parabola"], SumControls(2, 1e-6), threads=threads)
        return r.value, r

    rows += [
        Identity("parabola weighted F(1) = 1/2 (direct)", tornheim_row(1.0, "direct", True),
                 const(0.5), CONSTANT, 1e-4),
        Identity("cycloid arctan total = arccos total", arctan_vs_arccos, arccos_total,
                 CROSS, 1e-12),
        Identity("tractrix F(2) = 2 x region area", _series_row("tractrix", 2, 1e-5, threads),
                 lambda: 2 * geomoracle.region_area(CURVES["tractrix"]), ORACLE, 1e-4),
        Identity("tractrix F(2) vs stated pi", _series_row("tractrix", 2, 1e-5, threads),
                 const(math.pi), CONSTANT, None),
        Identity("Mordell-Tornheim s=1 = 2 (zeta)", tornheim_row(1.0, "zeta"),
                 const(2.0), CONSTANT, 1e-6),
        Identity("cf phi: abs series = phi + 1 (40 terms)", cf_row("phi", 40, "abs"),
                 cf_ref("phi", "abs"), CONSTANT, 1e-12),
        Identity("cf 1+sqrt2: abs series (30 terms)", cf_row((1, 2, 1), 30, "abs"),
                 cf_ref((1, 2, 1), "abs"), CONSTANT, 1e-10),
        Identity("cf 1+sqrt2: sq series (30 terms)", cf_row((1, 2, 1), 30, "sq"),
                 cf_ref((1, 2, 1), "sq"), CONSTANT, 1e-10),
        Identity("cf pi: abs series (50 digits)", cf_row("pi", 20, "abs"),
                 cf_ref("pi", "abs"), CONSTANT, 1e-6),
        Identity("cf pi: sq series (50 digits)", cf_row("pi", 20, "sq"),
                 cf_ref("pi", "sq"), CONSTANT, 1e-6),
        Identity("mixed circle x parabola = mixed area", mixed_run,
                 lambda: geomoracle.mixed_volume_oracle(CURVES["circle"], CURVES["parabola"]),
                 ORACLE, 1e-4),
    ]
    return rows


def run_identity(ident: Identity, profile: str, command: str) -> RunReport:
    started = time.perf_counter()
    value, r = ident.run()
    ref = ident.reference()
    if r is not None:
        rep = RunReport.from_result(command, ident.label, r)
        rep.value = value
    else:
        rep = RunReport(command, ident.label, value)
    rep.reference_value, rep.reference_source = ref, ident.source
    if ident.source == CONSTANT:
        rep.stated_value = ref
    rep.finish(started)
    if ident.tolerance is None:
        rep.passed = None
    elif profile == "quick":
        rep.tolerance = 10.0**-3 * max(abs(ref), 1.0)
        rep.passed = rep.digits_matched is not None and rep.digits_matched >= 3
    else:
        rep.tolerance = ident.tolerance
        rep.passed = value is not None and abs(value - ref) <= ident.tolerance
    return rep


def cmd_verify(args, command: str) -> list[RunReport]:
    _RUNS.clear()
    return [run_identity(i, args.profile, command)
            for i in identities(args.profile, threads=args.threads)]


# Argument parsing.

class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(2)


def _positive_int(text: str) -> int:
    try:
        v = int(float(text))
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if v < 1:
        raise argparse.ArgumentTypeError("must be at least 1")
    return v


def _nonneg_int(text: str) -> int:
    v = int(text)
    if v < 0:
        raise argparse.ArgumentTypeError("must be nonnegative")
    return v


def build_parser() -> argparse.ArgumentParser:
    common = argparse.ArgumentParser(add_help=False)
    common.add_argument("--format", choices=("text", "json", "csv"), default="text")
    common.add_argument("--threads", type=_positive_int, default=available_threads())

    engine = argparse.ArgumentParser(add_help=False)
    engine.add_argument("--prune", type=float, default=DEFAULT_PRUNE,
                        help="drop a subtree once |term| falls below this")
    engine.add_argument("--depth-cap", type=_nonneg_int, default=DEFAULT_DEPTH_CAP)
    engine.add_argument("--budget", type=_positive_int, default=DEFAULT_BUDGET,
                        help="maximum number of nodes evaluated")
    engine.add_argument("--seed-depth", type=_nonneg_int, default=0,
                        help="split depth for per-subtree accumulators")
    engine.add_argument("--accumulation", choices=[a.value for a in Accumulation],
                        default=Accumulation.COMPENSATED.value)

    p = _Parser(prog="sl2sum", description="Series over the positive part of SL(2, Z).")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    e = sub.add_parser("eval", parents=[common, engine], help="sum term**s over the tree")
    e.add_argument("--curve", choices=sorted(CURVES), metavar="NAME",
                   help=f"one of: {', '.join(CURVES)}")
    e.add_argument("--curve-file", help="sampled curve, CSV (x,y) or JSON [[x,y],...]")
    e.add_argument("--power", type=float, default=2.0)
    e.add_argument("--emit-partials", metavar="PATH",
                   help="write nodes_used,partial_value rows to PATH ('-' for stdout)")

    v = sub.add_parser("verify", parents=[common], help="run the identity table")
    v.add_argument("--profile", choices=("quick", "full"), default="quick")

    t = sub.add_parser("tornheim", parents=[common], help="coprime Mordell-Tornheim sum")
    t.add_argument("--s", type=float, required=True)
    t.add_argument("--mode", choices=[m.value for m in tornheim.Mode], default="zeta")
    t.add_argument("--cutoff", type=int, default=2000)
    t.add_argument("--parabola-weight", action="store_true",
                   help="report 4**-s times the sum (the parabola's weighted series)")

    c = sub.add_parser("cf", parents=[common], help="continued-fraction series")
    c.add_argument("--alpha", required=True,
                   help="decimal string, phi, sqrt2, pi, e, or a surd triple P,D,Q")
    c.add_argument("--terms", type=_positive_int, default=40)

    m = sub.add_parser("mixed", parents=[common, engine], help="mixed sum of two curves")
    m.add_argument("--f", required=True)
    m.add_argument("--g", required=True)
    return p


COMMANDS = {"eval": cmd_eval, "verify": cmd_verify, "tornheim": cmd_tornheim,
            "cf": cmd_cf, "mixed": cmd_mixed}


def main(argv: Sequence[str] | None = None) -> int:
    argv = list(sys.argv[1:] if argv is None else argv)
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    command = " ".join(["sl2sum", *argv])
    try:
        reports = COMMANDS[args.command](args, command)
    except UsageError as exc:
        print(f"sl2sum: error: {exc}", file=sys.stderr)
        return 2
    except (Sl2SumError, ValueError, OverflowError) as exc:
        print(f"sl2sum: {type(exc).__name__}: {exc}", file=sys.stderr)
        return 1
    emit(reports, args.format, as_array=args.command in ("verify", "cf"))
    if args.command == "verify" and any(r.passed is False for r in reports):
        return 1
    return 0


if __name__ == "__main__":
    sys.exit(main())
