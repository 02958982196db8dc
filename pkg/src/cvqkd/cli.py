"""Command line entry point: ``run``, ``sweep`` and ``rate``.

Exit status is 0 for completed or cleanly aborted runs, 2 for configuration
errors and 1 for other failures.
"""

from __future__ import annotations

import argparse
import json
import logging
import sys

from .channel import ConfigError
from .config import load_config
from .pipeline import rate_summary, run_protocol
from .report import ReportError, emit_report, emit_sweep, jsonable
from .sweep import SWEEP_PARAMS, SweepSpec, run_sweep

log = logging.getLogger("cvqkd")


def _parser() -> argparse.ArgumentParser:
    ap = argparse.ArgumentParser(prog="cvqkd", description=__doc__.splitlines()[0])
    ap.add_argument("-v", "--verbose", action="store_true")
    sub = ap.add_subparsers(dest="command", required=True)

    run = sub.add_parser("run", help="simulate the full protocol once")
    run.add_argument("--config", required=True)
    run.add_argument("--seed", type=int)
    run.add_argument("--out", default="out")

    sw = sub.add_parser("sweep", help="repeat runs over a parameter grid")
    sw.add_argument("--config", required=True)
    sw.add_argument("--param", required=True, choices=SWEEP_PARAMS)
    sw.add_argument("--grid", required=True, help="comma-separated values")
    sw.add_argument("--reps", type=int, default=1)
    sw.add_argument("--beta", help="per-point beta values, comma-separated, aligned with --grid")
    sw.add_argument("--seed", type=int)
    sw.add_argument("--out", default="out")

    rate = sub.add_parser("rate", help="rates from configured values, no simulation")
    rate.add_argument("--config", required=True)
    return ap


def _floats(text: str) -> list[float]:
    try:
        return [float(v) for v in text.split(",") if v.strip()]
    except ValueError:
        raise ConfigError(f"bad numeric list {text!r}") from None


def _cmd_run(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    report = run_protocol(cfg)
    emit_report(report, args.out)
    print(f"status={report.status} R={report.R:.6g} r={report.r} p_EC={report.p_EC:.4g} "
          f"epsilon={report.epsilon:.3g} key={'yes' if report.key_emitted else 'no'}")
    return 0


def _cmd_sweep(args) -> int:
    cfg = load_config(args.config)
    if args.seed is not None:
        cfg = cfg.replace(seed=args.seed)
    grid = _floats(args.grid)
    betas = None
    if args.beta:
        beta_list = _floats(args.beta)
        if len(beta_list) != len(grid):
            raise ConfigError("--beta needs one value per grid point")
        betas = dict(zip(grid, beta_list))
    spec = SweepSpec(args.param, grid, args.reps, betas)

    def progress(s):
        log.info("%s=%g rep=%d status=%s R=%.5g", spec.param, s.value, s.rep, s.status, s.R)

    points = run_sweep(spec, cfg, progress)
    emit_sweep(points, spec.param, args.out)
    for p in points:
        row = p.row()
        print(f"{spec.param}={row['value']:g} R={row['R']:.5g}±{row['R_stderr']:.2g} "
              f"FER={row['FER']:.3g} fnd_rnd={row['mean_fnd_rnd']:.3g} failures={row['failures']}")
    return 0


def _cmd_rate(args) -> int:
    print(json.dumps(jsonable(rate_summary(load_config(args.config))), indent=2))
    return 0


def main(argv=None) -> int:
    args = _parser().parse_args(argv)
    logging.basicConfig(level=logging.INFO if args.verbose else logging.WARNING,
                        format="%(levelname)s %(name)s: %(message)s")
    handler = {"run": _cmd_run, "sweep": _cmd_sweep, "rate": _cmd_rate}[args.command]
    try:
        return handler(args)
    except ConfigError as exc:
        print(f"config error: {exc}", file=sys.stderr)
        return 2
    except (ReportError, ArithmeticError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
