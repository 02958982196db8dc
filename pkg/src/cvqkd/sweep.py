"""Repeated seeded runs over a one-parameter grid."""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass, field

import numpy as np

from .channel import ConfigError, ProtocolConfig
from .pipeline import STATUS_OK, run_protocol

log = logging.getLogger(__name__)

SWEEP_PARAMS = ("N", "L", "xi", "snr", "p")


@dataclass
class SweepSpec:
    """Swept parameter, grid, repetitions and an optional per-point beta table."""

    param: str
    values: list
    reps: int = 1
    betas: dict | None = None

    def __post_init__(self):
        if self.param not in SWEEP_PARAMS:
            raise ConfigError(f"cannot sweep {self.param!r}; choose from {', '.join(SWEEP_PARAMS)}")
        if not len(self.values):
            raise ConfigError("sweep grid is empty")
        if self.reps < 1:
            raise ConfigError("reps must be at least 1")

    def point_config(self, base: ProtocolConfig, value, rep: int) -> ProtocolConfig:
        # the same seeds are reused at every grid point (common random numbers)
        changes = {"seed": base.seed + rep}
        if self.param == "snr":
            changes.update(snr=float(value), mu=None)
        elif self.param in ("N", "p"):
            changes[self.param] = int(value)
        else:
            changes[self.param] = float(value)
        if self.betas and value in self.betas:
            changes["beta"] = self.betas[value]
        return base.replace(**changes)


@dataclass
class RunSummary:
    value: float
    rep: int
    seed: int
    status: str
    R: float
    FER: float
    p_EC: float
    mean_fnd_rnd: float
    error: str = ""


@dataclass
class SweepPoint:
    value: float
    runs: list = field(default_factory=list)

    def _stat(self, name):
        vals = np.array([getattr(r, name) for r in self.runs if not r.error], dtype=float)
        vals = vals[np.isfinite(vals)]
        if vals.size == 0:
            return math.nan, math.nan
        se = vals.std(ddof=1) / math.sqrt(vals.size) if vals.size > 1 else math.nan
        return float(vals.mean()), float(se)

    def row(self) -> dict:
        out = {"value": self.value, "reps": len(self.runs),
               "failures": sum(1 for r in self.runs if r.error)}
        for name in ("R", "FER", "mean_fnd_rnd", "p_EC"):
            out[name], out[f"{name}_stderr"] = self._stat(name)
        return out


def run_sweep(spec: SweepSpec, base_cfg: ProtocolConfig, progress=None,
              runner=run_protocol) -> list[SweepPoint]:
    """Run ``spec.reps`` seeded repetitions at every grid value.

    ``runner`` maps a config to a ``RunReport``; a caching runner lets several
    sweeps share identical grid points.

    Failures of single runs (invalid configurations, aborted protocols, code
    rejections) are recorded on the point and the sweep continues.
    """
    points = []
    for value in spec.values:
        point = SweepPoint(value)
        for rep in range(spec.reps):
            try:
                cfg = spec.point_config(base_cfg, value, rep)
                rep_obj = runner(cfg)
                R = rep_obj.R if rep_obj.status == STATUS_OK else math.nan
                summary = RunSummary(value, rep, cfg.seed, rep_obj.status, R, rep_obj.FER,
                                     rep_obj.p_EC, rep_obj.mean_fnd_rnd,
                                     "" if rep_obj.status == STATUS_OK else rep_obj.status)
            except (ConfigError, ArithmeticError, ValueError) as exc:
                log.warning("sweep point %s=%s rep %d failed: %s", spec.param, value, rep, exc)
                summary = RunSummary(value, rep, base_cfg.seed + rep, "error", math.nan,
                                     math.nan, math.nan, math.nan, str(exc))
            point.runs.append(summary)
            if progress:
                progress(summary)
        points.append(point)
    return points
