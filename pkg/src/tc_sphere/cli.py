"""``tc-sphere`` command line: bounds, oracle cross-checks, sweeps, planner runs."""

from __future__ import annotations

import argparse
import csv
import io
import json
import sys
from typing import Iterable, List, Optional, Sequence

import numpy as np

from . import planner
from .bundles import GRAMMAR, BundleError, BundleSpec, parse_spec
from .cohomology_models import build_erb_model, build_sphere_bundle_ring, closed_form_cup_length, kernel_cup_length_oracle
from .graded_ring import CoefficientRing, RingError
from .spaces import BaseKind, BaseSpace
from .tc_bounds import InconsistentBounds, evaluate

EXIT_OK, EXIT_FAIL, EXIT_USAGE = 0, 1, 2

FAMILIES = ("cp_eta_eps", "rp_l_eta_eps")


class UsageError(Exception):
    pass


def _dump(obj) -> str:
    return json.dumps(obj, indent=2)


def _csv(rows: List[dict], fields: Sequence[str]) -> str:
    buf = io.StringIO()
    writer = csv.DictWriter(buf, fieldnames=list(fields), lineterminator="\n")
    writer.writeheader()
    for row in rows:
        writer.writerow({k: "" if row.get(k) is None else row[k] for k in fields})
    return buf.getvalue()


def _spec(text: str) -> BundleSpec:
    try:
        return parse_spec(text)
    except BundleError as exc:
        msg = str(exc)
        raise UsageError(msg if GRAMMAR in msg else f"{msg}; expected {GRAMMAR}") from None


def _interval(lower: int, upper: Optional[int]) -> str:
    return f"[{lower}, {'inf' if upper is None else upper}]"


def cmd_bounds(args) -> int:
    report = evaluate(_spec(args.spec), args.r)
    if args.format == "json":
        print(_dump(report.to_dict()))
    elif args.format == "csv":
        fields = ("id", "direction", "applicable", "value", "citation")
        print(_csv([rule.to_dict() for rule in report.rules], fields), end="")
    else:
        print(f"spec: {report.spec}  (rank q = {report.spec.rank}), r = {report.r}")
        for rule in report.rules:
            shown = "-" if rule.value is None else str(rule.value)
            mark = "x" if rule.applicable else " "
            print(f"  [{mark}] {rule.id.value:<16} {rule.direction.value:<5} {shown:>3}  ({rule.citation})")
            for cond in rule.conditions:
                print(f"        {'ok' if cond.holds else 'no'}: {cond.name} {cond.detail}".rstrip())
        if report.exact is not None:
            print(f"TC_{report.r} = {report.exact}  (exact)")
        else:
            print(f"TC_{report.r} in {_interval(report.lower, report.upper)}")
    return EXIT_OK


def _oracle_record(spec: BundleSpec, r: int, coefficients: str) -> dict:
    if coefficients == "auto":
        z2 = spec.base.kind is BaseKind.REAL_PROJECTIVE
        coeff = CoefficientRing.MOD_TWO if z2 else CoefficientRing.INTEGERS
    else:
        coeff = CoefficientRing(coefficients)
    sb = build_sphere_bundle_ring(spec, coeff)
    oracle = kernel_cup_length_oracle(build_erb_model(sb, r))
    formula = closed_form_cup_length(sb, r)
    return {
        "spec": str(spec),
        "r": r,
        "coefficients": coeff.value,
        "oracle": oracle,
        "formula": formula,
        "match": oracle == formula,
    }


def cmd_oracle(args) -> int:
    spec = _spec(args.spec)
    try:
        rec = _oracle_record(spec, args.r, args.coefficients)
    except (BundleError, RingError) as exc:
        raise UsageError(str(exc)) from None
    if args.format == "json":
        print(_dump(rec))
    elif args.format == "csv":
        print(_csv([rec], list(rec)), end="")
    else:
        verdict = "MATCH" if rec["match"] else "MISMATCH"
        print(f"{rec['spec']}, r = {rec['r']} over {rec['coefficients']}: "
              f"oracle {rec['oracle']}, formula {rec['formula']}, {verdict}")
    return EXIT_OK if rec["match"] else EXIT_FAIL


def order(text: str) -> int:
    """Argparse type for ``r``: an integer ``>= 2``."""
    try:
        value = int(text)
    except ValueError:
        value = 0
    if value < 2:
        raise argparse.ArgumentTypeError(f"r must be an integer >= 2, got {text!r}")
    return value


def parse_range(text: str) -> range:
    """``"3"``, ``"1..4"`` or ``"1-4"`` (inclusive); ``"5..4"`` is empty."""
    for sep in ("..", "-", ":"):
        if sep in text:
            lo, _, hi = text.partition(sep)
            break
    else:
        lo = hi = text
    try:
        return range(int(lo), int(hi) + 1)
    except ValueError:
        raise argparse.ArgumentTypeError(f"bad range {text!r}; use N or A..B") from None


def sweep_rows(family: str, ns: Iterable[int], ls: Iterable[int], rs: Iterable[int]) -> List[dict]:
    rows = []
    ls = [1] if family == "cp_eta_eps" else list(ls)
    for n in ns:
        for ell in ls:
            if family == "cp_eta_eps":
                spec = BundleSpec(BaseSpace.cp(n), 1, 1)
            else:
                spec = BundleSpec(BaseSpace.rp(n), ell, 1)
            for r in rs:
                rep = evaluate(spec, r)
                rows.append({
                    "family": family, "spec": str(spec), "n": n, "l": ell, "r": r,
                    "lower": rep.lower, "upper": rep.upper, "exact": rep.exact,
                })
    return rows


SWEEP_FIELDS = ("family", "spec", "n", "l", "r", "lower", "upper", "exact")


def cmd_sweep(args) -> int:
    rows = sweep_rows(args.family, args.n, args.l, args.r)
    if args.format == "json":
        print(_dump(rows))
    elif args.format == "csv":
        print(_csv(rows, SWEEP_FIELDS), end="")
    else:
        for row in rows:
            value = f"{row['exact']} (exact)" if row["exact"] is not None else _interval(row["lower"], row["upper"])
            print(f"{row['spec']:<22} r={row['r']}  TC_r = {value}")
    return EXIT_OK


def parse_points(text: str, q: int, normalize: bool = False) -> np.ndarray:
    try:
        rows = [[float(x) for x in chunk.split(",")] for chunk in text.split(";")]
    except ValueError:
        raise UsageError(f"malformed points {text!r}; expected 'x1,..,xq;y1,..,yq;...'") from None
    if any(len(row) != q for row in rows):
        raise UsageError(f"every point needs exactly q={q} coordinates")
    if len(rows) < 2:
        raise UsageError("need at least two points (r >= 2)")
    pts = np.array(rows, dtype=float)
    if normalize:
        pts /= np.linalg.norm(pts, axis=1, keepdims=True)
    return pts


def _table(name: str, q: int) -> planner.StiefelSectionTable:
    try:
        if name == "complex":
            return planner.builtin_complex_section(q)
        return planner.two_chart_table(q)
    except planner.PlannerError as exc:
        raise UsageError(str(exc)) from None


def cmd_plan(args) -> int:
    pts = parse_points(args.points, args.q, args.normalize)
    try:
        config = planner.FiberConfig(pts, args.fiber_id)
        result = planner.plan(config, _table(args.table, args.q), args.grid, args.tau_antipodal)
    except planner.DenominatorUnderflow as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_FAIL
    except planner.PlannerError as exc:
        raise UsageError(str(exc)) from None
    if args.format == "text":
        print(f"J = {list(result.antipodal_set)}, piece_index = {result.piece_index}")
        for j in range(2, config.r + 1):
            mid = result.paths[j - 2](0.5)
            print(f"  gamma_{j}: {result.kind(j)}, gamma({0.5}) = {np.array2string(mid, precision=6)}")
    else:
        print(json.dumps(result.to_dict(), separators=(",", ":")))
    return EXIT_OK


def cmd_stats(args) -> int:
    table = _table(args.table, args.q)
    hist = planner.piece_statistics(
        args.samples, args.q, args.r, table, seed=args.seed,
        tau_antipodal=args.tau_antipodal, antipodal_rate=args.antipodal_rate,
    )
    observed = [int(i) for i in np.flatnonzero(hist)]
    bound = table.k + args.r - 1
    rec = {
        "q": args.q, "r": args.r, "samples": args.samples, "seed": args.seed, "table": table.name,
        "k": table.k, "histogram": [int(c) for c in hist],
        "max_index": max(observed) if observed else None, "bound": bound,
    }
    if args.format == "json":
        print(_dump(rec))
    elif args.format == "csv":
        print(_csv([{"piece": i, "count": int(c)} for i, c in enumerate(hist)], ("piece", "count")), end="")
    else:
        for i, c in enumerate(hist):
            print(f"piece {i}: {int(c)}")
        print(f"max index {rec['max_index']} (bound k + r - 1 = {bound})")
    ok = rec["max_index"] is None or rec["max_index"] <= bound
    return EXIT_OK if ok else EXIT_FAIL


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\ngrammar: {GRAMMAR}\n")


def build_parser() -> argparse.ArgumentParser:
    p = _Parser(prog="tc-sphere", description="Sequential parametrized TC of sphere bundles.")
    sub = p.add_subparsers(dest="command", required=True, parser_class=_Parser)

    def fmt(sp, default="text"):
        sp.add_argument("--format", choices=("text", "json", "csv"), default=default)

    b = sub.add_parser("bounds", help="evaluate every bound rule")
    b.add_argument("spec", help=GRAMMAR)
    b.add_argument("--r", type=order, required=True)
    fmt(b)
    b.set_defaults(func=cmd_bounds)

    o = sub.add_parser("oracle", help="compare brute-force cup-length with the closed form")
    o.add_argument("spec", help=GRAMMAR)
    o.add_argument("--r", type=order, required=True)
    o.add_argument("--coefficients", choices=("auto", "Z", "Z2"), default="auto")
    fmt(o)
    o.set_defaults(func=cmd_oracle)

    s = sub.add_parser("sweep", help="tabulate a bundle family")
    s.add_argument("family", choices=FAMILIES)
    s.add_argument("--n", type=parse_range, default=range(1, 5))
    s.add_argument("--l", type=parse_range, default=range(1, 2))
    s.add_argument("--r", type=parse_range, default=range(2, 3))
    fmt(s, "csv")
    s.set_defaults(func=cmd_sweep)

    pl = sub.add_parser("plan", help="plan paths for one fibre configuration")
    pl.add_argument("--q", type=int, required=True)
    pl.add_argument("--points", required=True, help="'x1,..,xq;y1,..,yq;...' (first point is e_1)")
    pl.add_argument("--table", choices=("complex", "two-chart"), default=None)
    pl.add_argument("--grid", type=int, default=1024, help="time samples per path")
    pl.add_argument("--tau-antipodal", type=float, default=planner.TAU_ANTIPODAL)
    pl.add_argument("--fiber-id", default=None)
    pl.add_argument("--normalize", action="store_true", help="rescale points to unit length")
    pl.add_argument("--seed", type=int, default=0, help="accepted for symmetry; planning is deterministic")
    fmt(pl, "json")
    pl.set_defaults(func=cmd_plan)

    st = sub.add_parser("stats", help="histogram piece indices over random configurations")
    st.add_argument("--q", type=int, required=True)
    st.add_argument("--r", type=order, required=True)
    st.add_argument("--samples", type=int, default=100_000)
    st.add_argument("--seed", type=int, default=0)
    st.add_argument("--table", choices=("complex", "two-chart"), default=None)
    st.add_argument("--tau-antipodal", type=float, default=planner.TAU_ANTIPODAL)
    st.add_argument("--antipodal-rate", type=float, default=0.0,
                    help="probability of forcing each e_j to be exactly -e_1")
    fmt(st, "json")
    st.set_defaults(func=cmd_stats)
    return p


def main(argv: Optional[Sequence[str]] = None) -> int:
    args = build_parser().parse_args(argv)
    if getattr(args, "table", "unset") is None:
        args.table = "complex" if args.q % 2 == 0 else "two-chart"
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except InconsistentBounds as exc:
        print(f"invariant violation: {exc}", file=sys.stderr)
        return EXIT_FAIL


if __name__ == "__main__":
    sys.exit(main())
