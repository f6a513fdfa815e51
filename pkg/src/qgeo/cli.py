"""Command-line front end.

    qgeo channel  --bloch 0.6,0,0 --p 0.3
    qgeo channel  --bell phi+ --p 0.75
    qgeo metric   --at 0.5,0,0 --dp 0.1,0,0 --kind statistical --p 0.375
    qgeo geodesic --frame 1,0,0,0,0,1,0,0 --p 0.3 --count 64 --out curve.csv
    qgeo verify   --seed 1 --count 10000 --check all --workers 4

stdout carries only JSON or CSV; logs go to stderr (level from ``QGEO_LOG``).
Exit status: 0 success, 1 verification found violations, 2 usage or parse
error, 3 domain/precondition error.
"""

from __future__ import annotations

import argparse
import csv
import io
import json
import logging
import os
import sys
from pathlib import Path

import numpy as np

from . import channel, geodesic, hilbert, metric, verify
from .errors import QGeoError

log = logging.getLogger("qgeo")

EXIT_OK, EXIT_VIOLATIONS, EXIT_USAGE, EXIT_DOMAIN = 0, 1, 2, 3


class UsageError(Exception):
    pass


def _floats(text: str, n: int | None, what: str) -> list[float]:
    try:
        vals = [float(t) for t in text.split(",")]
    except ValueError:
        raise UsageError(f"{what}: expected comma-separated numbers, got {text!r}") from None
    if n is not None and len(vals) != n:
        raise UsageError(f"{what}: expected {n} values, got {len(vals)}")
    return vals


def _warn_inversion(prob: float | None) -> None:
    if prob is not None and prob > channel.FULL_RANDOMIZATION:
        # user-facing, so shown regardless of QGEO_LOG
        print(f"qgeo: warning: p = {prob:g} > 3/4: contraction factor is negative (Bloch inversion)", file=sys.stderr)


def _emit(text: str, out: str | None) -> None:
    if out:
        Path(out).write_text(text)
    else:
        sys.stdout.write(text)


def _dumps(obj) -> str:
    return json.dumps(obj, ensure_ascii=False) + "\n"


def _load_state(path: str) -> hilbert.DensityOperator:
    try:
        obj = json.loads(Path(path).read_text())
    except (OSError, json.JSONDecodeError) as exc:
        raise UsageError(f"cannot read state file {path!r}: {exc}") from None
    if not isinstance(obj, dict):
        raise UsageError("state JSON must be an object")
    try:
        if "p" in obj:
            return hilbert.density_from_bloch(hilbert.bloch_from_json(obj))
        return hilbert.operator_from_json(obj, hilbert.DensityOperator)
    except QGeoError:
        raise
    except ValueError as exc:
        raise UsageError(str(exc)) from None


def cmd_channel(args) -> int:
    _warn_inversion(args.p)
    if args.bell:
        try:
            kind = hilbert.canonical_bell_kind(args.bell)
        except ValueError as exc:
            raise UsageError(str(exc)) from None
        state, dev = channel.depolarize_bell_with_deviation(args.p, kind)
        if dev > 1e-12:
            raise QGeoError(f"Kraus and closed-form outputs differ by {dev:.3e}")
        result = {
            "state": hilbert.operator_to_json(state),
            "prob": args.p,
            "meta": {"input": kind, "closed_form_max_deviation": dev},
        }
    else:
        if args.state:
            rho = _load_state(args.state)
        elif args.bloch:
            rho = hilbert.density_from_bloch(_floats(args.bloch, 3, "--bloch"))
        else:
            raise UsageError("one of --bloch, --state or --bell is required")
        out = channel.depolarize(rho, args.p)
        result = {
            "state": hilbert.operator_to_json(out),
            "prob": args.p,
            "bloch": hilbert.bloch_to_json(hilbert.bloch_from_density(out)),
        }
    _emit(_dumps(result), args.out)
    return EXIT_OK


def cmd_metric(args) -> int:
    p = _floats(args.at, 3, "--at")
    dp = _floats(args.dp, 3, "--dp")
    _warn_inversion(args.p)
    if args.kind == "statistical":
        result = {"ds2": metric.line_element_bloch(p, dp)}
        if args.p is not None:
            result["ds2_depolarized"] = metric.line_element_depolarized(p, dp, args.p)
    elif args.kind == "bures":
        x, dx = np.asarray(p) / 2.0, np.asarray(dp) / 2.0
        result = {"ds2": metric.bures_line_element(x, dx)}
        if args.p is not None:
            result["ds2_depolarized"] = metric.bures_line_element_depolarized(x, dx, args.p)
    else:
        if args.p is not None:
            raise QGeoError("Fubini-Study is defined on pure states; depolarized states are mixed")
        result = {"ds2": metric.fubini_study_bloch(p, dp)}
    _emit(_dumps(result), None)
    return EXIT_OK


def cmd_geodesic(args) -> int:
    seeds = _floats(args.frame, 8, "--frame")
    if args.count < 2:
        raise UsageError("--count must be at least 2")
    _warn_inversion(args.p)
    frame = geodesic.frame_from_seed(seeds[:4], seeds[4:])
    rows = geodesic.sample_rows(geodesic.sample_geodesic(frame, args.p, args.count))
    unphysical = sum(1 for r in rows if not r[-1])
    if unphysical:
        log.info("%d of %d samples have P0 < 0 (no physical preimage)", unphysical, len(rows))
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(geodesic.CSV_HEADER)
    writer.writerows(rows)
    _emit(buf.getvalue(), args.out)
    return EXIT_OK


def cmd_verify(args) -> int:
    try:
        grid = _floats(args.p_grid, None, "--p-grid") if args.p_grid else verify.DEFAULT_GRID
        cfg = verify.SampleConfig(args.seed, args.count, tuple(grid), args.cap)
    except ValueError as exc:
        raise UsageError(str(exc)) from None
    if args.workers < 1:
        raise UsageError("--workers must be positive")
    checks = {**verify.CHECKS, **verify.EXTRA_CHECKS}
    if args.check == "all":
        reports = verify.run_all(cfg, workers=args.workers)
    elif args.check in checks:
        reports = [checks[args.check](cfg, workers=args.workers)]
    else:
        raise UsageError(f"unknown check {args.check!r}; choose from all, {', '.join(checks)}")
    for r in reports:
        log.info("%s finished in %.1f ms", r.check_name, r.elapsed_ms)
    _emit(_dumps([r.to_dict(include_timing=args.timing) for r in reports]), None)
    return EXIT_OK if all(r.passed for r in reports) else EXIT_VIOLATIONS


class _Parser(argparse.ArgumentParser):
    def error(self, message):
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="qgeo", description="Riemannian geometry of the qubit depolarizing channel.")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    ch = sub.add_parser("channel", help="apply the depolarizing channel")
    ch.add_argument("--state", help="JSON state file (operator or Bloch schema)")
    ch.add_argument("--bloch", help="Bloch vector x,y,z")
    ch.add_argument("--bell", help="depolarize qubit A of a Bell state: phi+, phi-, psi+, psi- (or φ+ ...)")
    ch.add_argument("--p", type=float, required=True, help="error probability in [0, 1]")
    ch.add_argument("--out", help="write JSON here instead of stdout")
    ch.set_defaults(func=cmd_channel)

    me = sub.add_parser("metric", help="evaluate a line element at a Bloch point")
    me.add_argument("--at", required=True, help="Bloch point x,y,z")
    me.add_argument("--dp", required=True, help="tangent dx,dy,dz")
    me.add_argument("--p", type=float, help="also report the depolarized line element")
    me.add_argument("--kind", choices=("statistical", "bures", "fubini"), default="statistical")
    me.set_defaults(func=cmd_metric)

    ge = sub.add_parser("geodesic", help="sample a great circle and its depolarized image")
    ge.add_argument("--frame", required=True, help="eight reals: seed vectors u and v")
    ge.add_argument("--p", type=float, default=0.0)
    ge.add_argument("--count", type=int, default=64)
    ge.add_argument("--out", help="CSV path (stdout if omitted)")
    ge.set_defaults(func=cmd_geodesic)

    ve = sub.add_parser("verify", help="run Monte-Carlo certification checks")
    ve.add_argument("--seed", type=int, default=1)
    ve.add_argument("--count", type=int, default=10_000)
    ve.add_argument("--p-grid", dest="p_grid", help="comma-separated probabilities (default: 21 points on [0, 1])")
    ve.add_argument("--cap", type=float, default=0.99, help="radius cap for sampled Bloch vectors")
    ve.add_argument("--check", default="all")
    ve.add_argument("--workers", type=int, default=1)
    ve.add_argument("--timing", action="store_true", help="include elapsed_ms in the JSON reports")
    ve.set_defaults(func=cmd_verify)
    return parser


def _configure_logging() -> None:
    level = os.environ.get("QGEO_LOG", "error").upper()
    logging.basicConfig(
        stream=sys.stderr,
        level=getattr(logging, level, logging.ERROR),
        format="%(levelname)s %(name)s: %(message)s",
        force=True,
    )


def main(argv: list[str] | None = None) -> int:
    _configure_logging()
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except UsageError as exc:
        print(f"qgeo: error: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except QGeoError as exc:
        print(f"qgeo: {type(exc).__name__}: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
