"""Command-line front end: ``ssforge compute|picard|gh-shift|verify|chart``."""

from __future__ import annotations

import argparse
import json
import os
import sys
import tempfile
from typing import Optional, Sequence

from .charts import ChartStyle, render_svg, render_text
from .coefficients import RingContext
from .pages import EngineError, Window, dumps, loads
from .presets import PresetId, SpectralSequence, period

EXIT_USAGE = 2


class UsageError(ValueError):
    pass


def parse_window(text: str) -> Window:
    """``a:b,c:d`` is stems [a, b) and filtrations [c, d)."""
    try:
        stems, filts = text.split(",")
        a, b = (int(x) for x in stems.split(":"))
        c, d = (int(x) for x in filts.split(":"))
        return Window((a, b), (c, d))
    except ValueError as exc:
        raise UsageError(f"malformed window {text!r}; expected a:b,c:d") from exc


def default_window(pid: PresetId, n: int) -> Window:
    P = period(n)
    if pid in (PresetId.TATE_EN, PresetId.TATE_EN_MOD_IK, PresetId.TATE_VKINV):
        return Window((0, 2 * P), (-P, P))
    return Window((0, 2 * P), (0, P))


def parse_page(text: str) -> Optional[int]:
    if text == "einf":
        return None
    try:
        r = int(text)
    except ValueError as exc:
        raise UsageError(f"page must be an integer >= 2 or 'einf', got {text!r}") from exc
    if r < 2:
        raise UsageError(f"page must be at least 2, got {r}")
    return r


def write_atomic(path: Optional[str], text: str) -> None:
    """Write all of ``text`` or nothing: temp file, then rename."""
    if path is None or path == "-":
        sys.stdout.write(text)
        return
    directory = os.path.dirname(os.path.abspath(path))
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".ssforge-", suffix=".tmp")
    try:
        with os.fdopen(fd, "w") as fh:
            fh.write(text)
        os.replace(tmp, path)
    except BaseException:
        if os.path.exists(tmp):
            os.unlink(tmp)
        raise


def _height(value: str) -> int:
    try:
        n = int(value)
    except ValueError as exc:
        raise argparse.ArgumentTypeError(f"height must be an integer, got {value!r}") from exc
    if n < 1:
        raise argparse.ArgumentTypeError(f"height must be at least 1, got {n}")
    return n


def _dumps(doc) -> str:
    return json.dumps(doc, sort_keys=True, indent=1) + "\n"


def _render(page, rules, fmt: str, n: int) -> str:
    if fmt == "json":
        return dumps(page) + "\n"
    style = ChartStyle(period=period(n))
    if fmt == "txt":
        return render_text(page, style)
    return render_svg(page, rules, style, title=f"{page.preset} n={n} E_{page.r}")


def cmd_compute(args) -> str:
    try:
        pid = PresetId(args.preset)
    except ValueError as exc:
        known = ", ".join(p.value for p in PresetId)
        raise UsageError(f"unknown preset {args.preset!r}; known: {known}") from exc
    if args.ro and pid is not PresetId.HFPSS_EN:
        raise UsageError("--ro applies to hfpss-en only")
    window = parse_window(args.window) if args.window else default_window(pid, args.height)
    r = parse_page(args.page)
    ss = SpectralSequence.of(pid, args.height, window, k=args.k, ro=args.ro)
    page = ss.view(r)
    return _render(page, ss.rules, args.format, args.height)


def cmd_picard(args) -> str:
    from .picard import assemble_picard

    report = assemble_picard(RingContext(args.height))
    if args.format == "txt":
        return report.table()
    return report.dumps()


def cmd_gh_shift(args) -> str:
    from .analysis import gh_shift

    report = gh_shift(args.height, args.method)
    if args.format == "txt":
        return f"{report.shift}\n"
    return _dumps(report.to_json())


def verify(n: int) -> dict:
    """Every headline check at height n, as one JSON-ready document."""
    from .analysis import exotic_ledger, find_gap, gh_shift, longest_differential_trace, periodicity
    from .picard import assemble_picard

    gap = find_gap(n)
    per = periodicity(n)
    shift = gh_shift(n, "both")
    pic = assemble_picard(RingContext(n))
    trace = longest_differential_trace(n)
    exotic = exotic_ledger(n, shift.shift)
    doc = {
        "height": n,
        "period": period(n),
        "gap": gap.to_json(),
        "periodicity": {
            "periodic": per.periodic,
            "class": per.class_exps,
            "permanent": per.permanent,
        },
        "gh_shift": shift.to_json(),
        "picard": pic.to_json(),
        "longest_differential_trace": [
            {"k": k, "source_stem": s, "target": list(t)} for k, s, t in trace
        ],
        "exotic": exotic.to_json(),
    }
    checks = {
        "gap_is_minus_3": gap.residues == ((-3) % period(n),),
        "witnesses_survive": all(w.survives for w in gap.witnesses),
        "periodic": per.periodic and per.permanent,
        "shift_is_4_plus_n": shift.shift == (4 + n) % period(n),
        "shift_mod_4": shift.mod4_ok,
        "picard_order": pic.total_order == 2 ** (n + 2),
        "trace_ends_at_period_minus_2": trace[-1][1] == period(n) - 2,
        "exotic_nonzero": exotic.delta % period(n) != 0,
    }
    if n <= 3:
        from .gbt import closed_form_matches, derive_families

        matches = closed_form_matches(n, derive_families(n))
        doc["gbt_families"] = matches
        checks["gbt_families"] = all(matches.values())
    doc["checks"] = checks
    doc["ok"] = all(checks.values())
    return doc


def cmd_verify(args) -> str:
    doc = verify(args.height)
    args._failed = not doc["ok"]
    return _dumps(doc)


def cmd_chart(args) -> str:
    try:
        with open(args.input) as fh:
            page = loads(fh.read())
    except (OSError, json.JSONDecodeError, KeyError) as exc:
        raise UsageError(f"cannot read page from {args.input}: {exc}") from exc
    style = ChartStyle(period=period(page.n))
    if args.format == "txt":
        return render_text(page, style)
    return render_svg(page, (), style, title=f"{page.preset} n={page.n} E_{page.r}")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(prog="ssforge", description=__doc__)
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("compute", help="compute a page of a preset")
    p.add_argument("--preset", required=True)
    p.add_argument("--height", type=_height, required=True)
    p.add_argument("--k", type=int, default=None)
    p.add_argument("--window", default=None, help="stems a:b, filtrations c:d as a:b,c:d")
    p.add_argument("--page", default="einf")
    p.add_argument("--format", choices=("json", "txt", "svg"), default="json")
    p.add_argument("--ro", action="store_true", help="RO(C2)-graded page (hfpss-en only)")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_compute)

    p = sub.add_parser("picard", help="Picard group of the fixed points")
    p.add_argument("--height", type=_height, required=True)
    p.add_argument("--format", choices=("json", "txt"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_picard)

    p = sub.add_parser("gh-shift", help="shift of the Gross-Hopkins dual")
    p.add_argument("--height", type=_height, required=True)
    p.add_argument("--method", choices=("gap", "pattern", "both"), default="both")
    p.add_argument("--format", choices=("json", "txt"), default="json")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_gh_shift)

    p = sub.add_parser("verify", help="run every check at one height")
    p.add_argument("--height", type=_height, required=True)
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_verify)

    p = sub.add_parser("chart", help="render a page dumped by compute --format json")
    p.add_argument("--input", required=True)
    p.add_argument("--format", choices=("txt", "svg"), default="svg")
    p.add_argument("--out", default=None)
    p.set_defaults(func=cmd_chart)
    return parser


def run(argv: Optional[Sequence[str]] = None) -> int:
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        return int(exc.code or 0)
    args._failed = False
    try:
        text = args.func(args)
    except (UsageError, EngineError, ValueError) as exc:
        print(f"ssforge: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    write_atomic(args.out, text)
    return 1 if args._failed else 0


def main() -> None:
    sys.exit(run())


__all__ = ["main", "parse_window", "run", "verify", "write_atomic"]
