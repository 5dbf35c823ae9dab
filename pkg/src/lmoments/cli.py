"""Command line: moment experiments and verification suites with JSON or CSV reports.

Reports are deterministic for a fixed configuration: timings are written only
with ``--timings`` and the worker count is left out of the config echo.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys

from . import __version__, kloosterman, suites
from .lcentral import PoleError, ShiftTuple
from .mainterm import DEFAULT_NODES, DEFAULT_RHO, MollifierSpec, mollified_report, twisted_report

MOMENT_COLUMNS = (
    "q", "h", "k", "shift_mode", "empirical_re", "empirical_im", "predicted_re", "predicted_im",
    "ratio_re", "ratio_im", "err_estimate", "seconds",
)
ITEM_COLUMNS = ("name", "status", "value", "tolerance", "seconds")

FORMULAS = {
    "moment": ["twisted-fourth-moment-six-term-main-term", "zero-shift-circle-mean"],
    "mollified": ["mollified-fourth-moment-main-term", "mu-linear-mollifier", "zero-shift-circle-mean"],
    "verify-afe": ["four-fold-approximate-functional-equation"],
    "verify-orthogonality": ["primitive-even-character-orthogonality"],
    "verify-lemmas": [
        "Y-factor-symmetry", "F_a-euler-product", "G_q-euler-product", "varpi-special-values",
        "ramanujan-sum-dirichlet-series", "phi-star-divisor-identity",
    ],
    "voronoi": ["estermann-voronoi-summation"],
    "kloosterman-harness": [
        "cusp-kloosterman-spectral-bound", "smooth-kloosterman-sum-bound", "incomplete-kloosterman-bilinear-bound",
    ],
}


def _num(x: float) -> str:
    return format(float(x), ".17g")


class UsageError(Exception):
    pass


# ---------------------------------------------------------------------------
# subcommands
# ---------------------------------------------------------------------------


def _moduli(args) -> list[int]:
    if not args.q:
        raise UsageError("empty modulus list")
    if any(q < 3 for q in args.q):
        raise UsageError("moduli must be at least 3")
    return list(args.q)


def _shifts(args) -> ShiftTuple | None:
    if args.shift_mode == "zero-limit":
        return None
    if not args.shifts or len(args.shifts) != 4:
        raise UsageError("explicit shift mode needs --shifts with four complex values")
    return ShiftTuple(*(complex(z.replace(" ", "")) for z in args.shifts))


def _moment_rows(reports, timings: bool) -> list[dict]:
    rows = []
    for r in reports:
        ratio = r.ratio
        rows.append({
            "q": r.q, "h": r.h, "k": r.k, "shift_mode": r.shift_mode,
            "empirical_re": r.empirical.real, "empirical_im": r.empirical.imag,
            "predicted_re": r.predicted.real, "predicted_im": r.predicted.imag,
            "ratio_re": ratio.real, "ratio_im": ratio.imag,
            "err_estimate": r.err_estimate, "seconds": r.seconds if timings else 0.0,
        })
    return rows


def cmd_moment(args):
    sh = _shifts(args)
    reports = [
        twisted_report(q, args.h, args.k, sh, args.rho, args.nodes, args.workers) for q in _moduli(args)
    ]
    summary = {
        "max_deviation": max(r.deviation for r in reports),
        "error_envelopes": [r.diagnostics["error_envelope"] for r in reports],
    }
    return _moment_rows(reports, args.timings), summary, 0


def cmd_mollified(args):
    sh = _shifts(args)
    explicit = tuple((int(h), complex(c)) for h, c in (kv.split(":") for kv in args.coef))
    spec = MollifierSpec(args.y, "explicit" if explicit else args.rule, explicit)
    reports = [mollified_report(q, spec, sh, args.rho, args.nodes, args.workers) for q in _moduli(args)]
    summary = {"mollifier": spec.describe(), "max_deviation": max(r.deviation for r in reports)}
    return _moment_rows(reports, args.timings), summary, 0


def _item_rows(items, timings: bool) -> list[dict]:
    return [
        {"name": i.name, "status": "pass" if i.passed else "FAIL", "value": i.value,
         "tolerance": i.tolerance, "seconds": i.seconds if timings else 0.0}
        for i in items
    ]


def _suite_result(items, timings):
    failed = sum(not i.passed for i in items)
    summary = {"items": len(items), "failed": failed, "worst": max((i.value for i in items), default=0.0)}
    return _item_rows(items, timings), summary, 1 if failed else 0


def cmd_verify_afe(args):
    if not args.q:
        raise UsageError("empty modulus list")
    return _suite_result(suites.afe_suite(args.q, args.draws, args.seed, args.tol), args.timings)


def cmd_verify_orthogonality(args):
    if args.q_max < 1:
        raise UsageError("--q-max must be positive")
    return _suite_result(suites.orthogonality_suite(args.q_max, args.tol), args.timings)


def cmd_verify_lemmas(args):
    return _suite_result(suites.lemma_suite(args.draws, args.seed), args.timings)


def cmd_voronoi(args):
    return _suite_result(suites.voronoi_suite(args.tol, include_bump=not args.no_bump), args.timings)


def cmd_kloosterman_harness(args):
    rows, stats = [], {}
    for kind in args.kinds:
        runs = [kloosterman.run_harness(kind, args.trials, seed) for seed in args.seeds]
        for st in runs:
            rows.append({"name": f"{kind} seed={st.seed}", "status": "stat", "value": st.max_ratio,
                         "tolerance": None, "seconds": 0.0})
        stats[kind] = {
            "runs": [st.as_dict() for st in runs],
            "stability": kloosterman.stability(runs[0], runs[-1]),
        }
    return rows, stats, 0


# ---------------------------------------------------------------------------
# output
# ---------------------------------------------------------------------------


def _config_echo(args) -> dict:
    skip = {"func", "workers", "out", "format", "timings"}
    out = {}
    for k, v in sorted(vars(args).items()):
        if k in skip:
            continue
        out[k] = list(v) if isinstance(v, (list, tuple)) else v
    return out


def render(args, rows, summary) -> str:
    header = {
        "library": "lmoments",
        "version": __version__,
        "subcommand": args.command,
        "formulas": FORMULAS[args.command],
        "config": _config_echo(args),
        "defaults": {"rho": DEFAULT_RHO, "nodes": DEFAULT_NODES, "theta": kloosterman.THETA},
    }
    if args.format == "json":
        return json.dumps({"header": header, "rows": rows, "summary": summary}, indent=2, sort_keys=True) + "\n"
    buf = io.StringIO()
    buf.write("# " + json.dumps(header, sort_keys=True) + "\n")
    buf.write("# summary " + json.dumps(summary, sort_keys=True) + "\n")
    cols = MOMENT_COLUMNS if args.command in ("moment", "mollified") else ITEM_COLUMNS
    w = csv.DictWriter(buf, fieldnames=cols, lineterminator="\n")
    w.writeheader()
    for r in rows:
        w.writerow({k: _num(v) if isinstance(v, float) else v for k, v in r.items()})
    return buf.getvalue()


def build_parser() -> argparse.ArgumentParser:
    p = argparse.ArgumentParser(prog="lmoments", description=__doc__.splitlines()[0])
    p.add_argument("--version", action="version", version=__version__)
    sub = p.add_subparsers(dest="command", required=True)

    def common(sp, seed=True):
        sp.add_argument("--out", help="report path (default: stdout)")
        sp.add_argument("--format", choices=("json", "csv"), default="json")
        sp.add_argument("--workers", type=int, default=None, help="thread count (default: LMOMENTS_WORKERS or 1)")
        sp.add_argument("--timings", action="store_true", help="record wall-clock seconds per item")
        if seed:
            sp.add_argument("--seed", type=int, default=0)

    def moment_args(sp):
        sp.add_argument("--q", type=int, nargs="*", default=None, help="moduli")
        sp.add_argument("--shift-mode", choices=("zero-limit", "explicit"), default="zero-limit")
        sp.add_argument("--shifts", nargs="*", help="alpha beta gamma delta, as Python complex literals")
        sp.add_argument("--rho", type=float, default=DEFAULT_RHO)
        sp.add_argument("--nodes", type=int, default=DEFAULT_NODES)

    sp = sub.add_parser("moment", help="empirical vs predicted twisted fourth moment")
    moment_args(sp)
    sp.add_argument("--h", type=int, default=1)
    sp.add_argument("--k", type=int, default=1)
    common(sp, seed=False)
    sp.set_defaults(func=cmd_moment)

    sp = sub.add_parser("mollified", help="empirical vs predicted mollified moment")
    moment_args(sp)
    sp.add_argument("--y", type=float, default=10.0, help="mollifier length")
    sp.add_argument("--rule", default="mu-linear")
    sp.add_argument("--coef", action="append", default=[], help="explicit coefficient h:value (repeatable)")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_mollified)

    sp = sub.add_parser("verify-afe", help="approximate functional equation residuals")
    sp.add_argument("--q", type=int, nargs="*", default=list(suites.AFE_MODULI))
    sp.add_argument("--draws", type=int, default=5)
    sp.add_argument("--tol", type=float, default=1e-7)
    common(sp)
    sp.set_defaults(func=cmd_verify_afe)

    sp = sub.add_parser("verify-orthogonality", help="exhaustive orthogonality relation")
    sp.add_argument("--q-max", type=int, default=120)
    sp.add_argument("--tol", type=float, default=1e-9)
    common(sp, seed=False)
    sp.set_defaults(func=cmd_verify_orthogonality)

    sp = sub.add_parser("verify-lemmas", help="arithmetic identity suite")
    sp.add_argument("--draws", type=int, default=100)
    common(sp)
    sp.set_defaults(func=cmd_verify_lemmas)

    sp = sub.add_parser("voronoi", help="Voronoi summation on the parameter grid")
    sp.add_argument("--tol", type=float, default=1e-6)
    sp.add_argument("--no-bump", action="store_true", help="skip the compactly supported window case")
    common(sp, seed=False)
    sp.set_defaults(func=cmd_voronoi)

    sp = sub.add_parser("kloosterman-harness", help="bound-ratio statistics for Kloosterman sums")
    sp.add_argument("--kinds", nargs="+", choices=("thkls", "thkls1", "bilinear"),
                    default=["thkls", "thkls1", "bilinear"])
    sp.add_argument("--trials", type=int, default=200)
    sp.add_argument("--seeds", type=int, nargs="+", default=[1, 2])
    common(sp, seed=False)
    sp.set_defaults(func=cmd_kloosterman_harness)
    return p


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        rows, summary, status = args.func(args)
    except (UsageError, PoleError) as exc:
        parser.error(str(exc))  # exits with status 2
    text = render(args, rows, summary)
    if args.out:
        with open(args.out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        sys.stdout.write(text)
    return status


if __name__ == "__main__":
    sys.exit(main())
