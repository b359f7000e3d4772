"""Command-line front end: writes reproducible CSV/JSON data files.

Exit codes: 0 success, 1 usage/config error, 2 computed but a committed
fixture did not match.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import math
import sys
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from . import __version__
from .entanglement_scan import TABLE1, apriori_curve, diagonal_scan, efficiency_sweep, region_scan, sigma_sweep
from .fock_states import DetectionRecord, conditioned_state, marginal_distribution
from .noise_models import (
    DEFAULT_TAIL_EPS,
    DetectorEfficiency,
    DetectorGaussian,
    Ideal,
    ReadoutLoss,
    lossy_photoelectron_distribution,
    mixed_marginal_vector,
    parse_model,
)
from .pt_moments import TensorFunctionSpec
from .quadrature import (
    fock_moment,
    gaussian_state_duan,
    homodyne_sample,
    lossy_variance,
    number_state_duan,
    richter_estimate,
)

EXIT_OK, EXIT_USAGE, EXIT_MISMATCH = 0, 1, 2

PRESETS = {
    "ideal": Ideal(),
    "loss50": ReadoutLoss(0.5, 0.5),
    "eff90": DetectorEfficiency(0.9, 0.9),
    "gauss2": DetectorGaussian(2.0, 2.0),
}

DEMO_STATES = {
    "vacuum": [1.0],
    "fock1": [0.0, 1.0],
    "fock2": [0.0, 0.0, 1.0],
    "super01": [1 / math.sqrt(2), 1 / math.sqrt(2)],
}


class UsageError(Exception):
    pass


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


@dataclass
class Table:
    target: str
    config: dict
    columns: list
    rows: list = field(default_factory=list)
    summary: dict = field(default_factory=dict)
    mismatch: bool = False


def _fmt(v) -> str:
    if v is None:
        return ""
    if isinstance(v, bool):
        return "1" if v else "0"
    if isinstance(v, float):
        return repr(v)
    return str(v)


def render(table: Table, fmt: str) -> str:
    if fmt == "json":
        doc = {"tool": f"ramanent {__version__}", "target": table.target, "config": table.config,
               "columns": table.columns, "rows": table.rows, "summary": table.summary}
        return json.dumps(doc, indent=2, sort_keys=False, default=_fmt) + "\n"
    buf = io.StringIO()
    buf.write(f"# tool: ramanent {__version__}\n")
    buf.write(f"# target: {table.target}\n")
    for key, val in table.config.items():
        buf.write(f"# config.{key}: {_fmt(val)}\n")
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(table.columns)
    writer.writerows([_fmt(v) for v in row] for row in table.rows)
    for key, val in table.summary.items():
        buf.write(f"# summary.{key}: {_fmt(val)}\n")
    return buf.getvalue()


def _spec(text: str) -> TensorFunctionSpec:
    try:
        return TensorFunctionSpec.parse(text)
    except ValueError as exc:
        raise UsageError(f"bad --spec {text!r}: {exc}") from None


def _model(text: str):
    try:
        return parse_model(text)
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def _grid(text: str) -> tuple:
    try:
        a, b = text.lower().split("x")
        n, m = int(a), int(b)
    except ValueError:
        raise UsageError(f"bad --grid {text!r}, expected NxM") from None
    if n < 1 or m < 1:
        raise UsageError("grid dimensions must be >= 1")
    return n, m


def _values(text: str) -> list:
    """'0.5,0.7,1' or 'start:stop:step' (stop inclusive)."""
    try:
        if ":" in text:
            start, stop, step = (float(x) for x in text.split(":"))
            count = int(math.floor((stop - start) / step + 1e-9)) + 1
            return [round(start + i * step, 10) for i in range(count)]
        return [float(x) for x in text.split(",") if x]
    except ValueError:
        raise UsageError(f"bad --values {text!r}") from None


def cmd_table1(args) -> Table:
    table = Table("maxn-table: largest detectable n = m per tensor function, ideal detection",
                  {"n_cap": args.n_cap, "stop_after": args.stop_after}, ["spec", "max_n", "min_n", "expected"])
    for indices, expected in TABLE1.items():
        spec = TensorFunctionSpec(indices)
        scan = diagonal_scan(spec, Ideal(), args.n_cap, stop_after=args.stop_after)
        if scan.capped:
            shown = "capped"
            bad = expected < args.n_cap
        else:
            shown = scan.max_n
            bad = scan.max_n != expected
        table.mismatch |= bad
        table.rows.append([spec.label(), shown, scan.min_n, expected])
    table.summary["fixtures_matched"] = not table.mismatch
    return table


def cmd_region(args) -> Table:
    spec, model = _spec(args.spec), _model(args.model)
    n_max, m_max = _grid(args.grid)
    result = region_scan(spec, model, n_max, m_max, alpha=args.alpha, tail_eps=args.tail_eps,
                         workers=args.workers)
    table = Table("region-map: detectable (n, m) pairs",
                  {"spec": spec.label(), "model": model.label(), "grid": f"{n_max}x{m_max}",
                   "alpha": args.alpha, "tail_eps": args.tail_eps}, ["n", "m", "detected", "weight"])
    for n in range(n_max):
        for m in range(m_max):
            table.rows.append([n, m, (n, m) in result.region, result.weights.get((n, m))])
    table.summary["detected_cells"] = len(result.region)
    table.summary["detected_diagonal"] = sum(1 for n, m in result.region if n == m)
    table.summary["max_n"] = result.max_n
    if args.alpha is not None:
        table.summary["weight_sum"] = math.fsum(result.weights.values())
        table.summary["apriori_probability"] = result.apriori_probability
    return table


def cmd_distribution(args) -> Table:
    rec = DetectionRecord(args.n, args.m)
    model = _model(args.model) if args.model else PRESETS[args.preset]
    if isinstance(model, Ideal):
        probs = marginal_distribution(conditioned_state(rec))
    elif isinstance(model, ReadoutLoss):
        probs = lossy_photoelectron_distribution(rec, model.eta_A, model.eta_B)
    else:
        probs = mixed_marginal_vector(rec, model, args.tail_eps)
    table = Table("anti-stokes-distribution: mode-A photoelectron probabilities",
                  {"n": rec.n, "m": rec.m, "model": model.label(), "tail_eps": args.tail_eps},
                  ["r", "p_r"])
    for r, p in enumerate(probs):
        table.rows.append([r, float(p)])
    r = np.arange(len(probs))
    table.summary["sum"] = float(math.fsum(probs))
    table.summary["mean"] = float(np.dot(r, probs))
    return table


def cmd_sweep(args) -> Table:
    spec = _spec(args.spec)
    cfg = {"kind": args.kind, "spec": spec.label(), "n_cap": args.n_cap, "tail_eps": args.tail_eps}
    if args.kind == "efficiency":
        values = _values(args.values or "0.5:1.0:0.05")
        if any(not 0 < v <= 1 for v in values):
            raise UsageError("efficiencies must lie in (0, 1]")
        curve = efficiency_sweep(spec, values, args.n_cap, args.tail_eps)
        table = Table("maxn-vs-efficiency", cfg, ["eta", "min_n", "max_n"])
        table.rows = [[p.parameter, p.min_n, p.max_n] for p in curve.points]
        table.summary.update(slope=curve.slope, intercept=curve.intercept, residual_rms=curve.residual_rms)
        if 1.0 in values and spec.indices in TABLE1:
            end = next(p for p in curve.points if p.parameter == 1.0)
            table.mismatch = end.max_n != TABLE1[spec.indices]
            table.summary["fixtures_matched"] = not table.mismatch
    elif args.kind == "sigma":
        values = _values(args.values or "1:12:1")
        if any(v <= 0 for v in values):
            raise UsageError("sigma values must be > 0")
        curve = sigma_sweep(spec, values, args.n_cap, args.tail_eps, find_closure=not args.no_closure)
        table = Table("window-vs-sigma", cfg, ["sigma", "min_n", "max_n"])
        table.rows = [[p.parameter, p.min_n, p.max_n] for p in curve.points]
        table.summary["closure_sigma"] = curve.closure
    else:
        values = _values(args.values or "0:2:0.1")
        if any(v < 0 for v in values):
            raise UsageError("alpha values must be >= 0")
        table = Table("apriori-detection-probability", cfg, ["alpha", "probability"])
        table.rows = [[a, p] for a, p in apriori_curve(spec, values, args.tail_eps)]
    return table


def cmd_quadrature(args) -> Table:
    sub = args.sub
    if sub == "duan-number":
        rep = number_state_duan(DetectionRecord(args.n, args.m))
        table = Table("duan-number-state", {"n": args.n, "m": args.m},
                      ["var_q_sum", "var_p_diff", "total", "detected"])
        table.rows.append([rep.var_q_sum, rep.var_p_diff, rep.total, rep.entangled_detected])
        return table
    if sub == "duan-gaussian":
        if args.alpha is None or args.alpha <= 0:
            raise UsageError("duan-gaussian needs --alpha > 0")
        rep = gaussian_state_duan(args.alpha, args.P, args.Q)
        table = Table("duan-gaussian-state", {"alpha": args.alpha, "P": args.P, "Q": args.Q, "eta": args.eta},
                      ["var_q_sum", "var_p_diff", "total", "detected"])
        table.rows.append([rep.var_q_sum, rep.var_p_diff, rep.total, rep.entangled_detected])
        if args.eta is not None:
            lossy_total = lossy_variance(rep.var_q_sum, args.eta) + lossy_variance(rep.var_p_diff, args.eta)
            table.summary["lossy_total"] = lossy_total
            table.summary["lossy_detected"] = lossy_total < 2
        return table
    coeffs = DEMO_STATES[args.state]
    samples = homodyne_sample(coeffs, args.count, seed=args.seed, as_arrays=True)
    table = Table("richter-estimate", {"state": args.state, "count": args.count, "seed": args.seed},
                  ["k", "l", "estimate_re", "estimate_im", "stderr_re", "stderr_im", "exact_re", "exact_im", "within_3se"])
    for k, l in [(0, 0), (0, 1), (1, 1), (2, 2)]:
        est = richter_estimate(samples, k, l)
        exact = fock_moment(coeffs, k, l)
        table.rows.append([k, l, est.value.real, est.value.imag, est.stderr_real, est.stderr_imag,
                           exact.real, exact.imag, est.within(exact)])
    return table


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="ramanent", description=__doc__.splitlines()[0])
    parser.add_argument("--version", action="version", version=f"ramanent {__version__}")
    common = _Parser(add_help=False)
    common.add_argument("--out", default="-", help="output path, '-' for stdout")
    common.add_argument("--format", choices=["csv", "json"], default="csv")
    common.add_argument("--tail-eps", type=float, default=DEFAULT_TAIL_EPS)
    common.add_argument("--seed", type=int, default=12345)
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("table1", parents=[common], help="MaxN for the eight tabulated tensor functions")
    p.add_argument("--n-cap", type=int, default=600)
    p.add_argument("--stop-after", type=int, default=50)
    p.set_defaults(func=cmd_table1)

    p = sub.add_parser("region", parents=[common], help="verdict map over (n, m)")
    p.add_argument("--spec", default="1,2,3")
    p.add_argument("--model", default="ideal")
    p.add_argument("--grid", default="130x130")
    p.add_argument("--alpha", type=float)
    p.add_argument("--workers", type=int, default=1)
    p.set_defaults(func=cmd_region)

    p = sub.add_parser("distribution", parents=[common], help="anti-Stokes photoelectron distribution")
    p.add_argument("--n", type=int, default=10)
    p.add_argument("--m", type=int, default=10)
    p.add_argument("--preset", choices=sorted(PRESETS), default="ideal")
    p.add_argument("--model", help="overrides --preset")
    p.set_defaults(func=cmd_distribution)

    p = sub.add_parser("sweep", parents=[common], help="efficiency, sigma or a-priori curves")
    p.add_argument("kind", choices=["efficiency", "sigma", "apriori"])
    p.add_argument("--spec", default="1,2,3")
    p.add_argument("--values", help="comma list or start:stop:step")
    p.add_argument("--n-cap", type=int, default=600)
    p.add_argument("--no-closure", action="store_true")
    p.set_defaults(func=cmd_sweep)

    p = sub.add_parser("quadrature", parents=[common], help="quadrature-variance and homodyne checks")
    p.add_argument("sub", choices=["duan-number", "duan-gaussian", "richter-demo"])
    p.add_argument("--n", type=int, default=1)
    p.add_argument("--m", type=int, default=1)
    p.add_argument("--alpha", type=float)
    p.add_argument("--P", type=float, default=0.0)
    p.add_argument("--Q", type=float, default=0.0)
    p.add_argument("--eta", type=float)
    p.add_argument("--state", choices=sorted(DEMO_STATES), default="fock1")
    p.add_argument("--count", type=int, default=1_000_000)
    p.set_defaults(func=cmd_quadrature)
    return parser


def _validate(args):
    for name in ("n", "m"):
        if getattr(args, name, 0) is not None and getattr(args, name, 0) < 0:
            raise UsageError(f"--{name} must be >= 0")
    if args.tail_eps <= 0 or args.tail_eps >= 1:
        raise UsageError("--tail-eps must lie in (0, 1)")
    if getattr(args, "n_cap", 1) < 1:
        raise UsageError("--n-cap must be >= 1")
    if getattr(args, "count", 1) < 1:
        raise UsageError("--count must be >= 1")
    eta = getattr(args, "eta", None)
    if eta is not None and not 0 <= eta <= 1:
        raise UsageError("--eta must lie in [0, 1]")


def main(argv: Optional[list] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        _validate(args)
        table = args.func(args)
    except (UsageError, ValueError) as exc:
        print(f"ramanent: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    text = render(table, args.format)
    if args.out == "-":
        sys.stdout.write(text)
    else:
        try:
            with open(args.out, "w", encoding="utf-8", newline="\n") as fh:
                fh.write(text)
        except OSError as exc:
            print(f"ramanent: error: cannot write {args.out}: {exc.strerror}", file=sys.stderr)
            return EXIT_USAGE
    return EXIT_MISMATCH if table.mismatch else EXIT_OK


if __name__ == "__main__":
    sys.exit(main())
