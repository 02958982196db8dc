"""Writing run reports, transcripts, keys, sweep tables and plot data."""

from __future__ import annotations

import csv
import json
import math
from dataclasses import asdict
from pathlib import Path

import numpy as np

from .pipeline import RunReport
from .sweep import SweepPoint


class ReportError(OSError):
    pass


def jsonable(obj):
    if isinstance(obj, dict):
        return {k: jsonable(v) for k, v in obj.items()}
    if isinstance(obj, (list, tuple)):
        return [jsonable(v) for v in obj]
    if isinstance(obj, np.generic):
        obj = obj.item()
    if isinstance(obj, float) and not math.isfinite(obj):
        return None
    return obj


def _write(path: Path, writer):
    try:
        path.parent.mkdir(parents=True, exist_ok=True)
        writer(path)
    except OSError as exc:
        raise ReportError(f"cannot write {path}: {exc}") from exc
    return path


def emit_report(report: RunReport, out_dir, *, include_timings: bool = True) -> list[Path]:
    """report.json, blocks.jsonl and, when a key exists, key.bin."""
    out = Path(out_dir)
    data = report.to_dict()
    blocks = data.pop("blocks")
    if not include_timings:
        data.pop("timings")
    data["key_file"] = "key.bin" if report.key_emitted else None
    data["key_bits"] = int(report.K_bob.size) if report.key_emitted else 0
    paths = [_write(out / "report.json",
                    lambda p: p.write_text(json.dumps(jsonable(data), indent=2, sort_keys=True) + "\n"))]
    paths.append(_write(out / "blocks.jsonl", lambda p: p.write_text(
        "".join(json.dumps(jsonable(b), sort_keys=True) + "\n" for b in blocks))))
    key = out / "key.bin"
    if report.key_emitted:
        # bits packed MSB first; the last byte is zero padded
        paths.append(_write(key, lambda p: p.write_bytes(np.packbits(report.K_bob).tobytes())))
    elif key.exists():
        key.unlink()
    return paths


SWEEP_COLUMNS = ("value", "reps", "failures", "R", "R_stderr", "FER", "FER_stderr",
                 "mean_fnd_rnd", "mean_fnd_rnd_stderr", "p_EC", "p_EC_stderr")


def emit_sweep(points: list[SweepPoint], param: str, out_dir) -> list[Path]:
    """sweep.csv, runs.csv and gnuplot-style ``plotdata/<metric>_vs_<param>.dat``."""
    out = Path(out_dir)
    rows = [p.row() for p in points]

    def write_csv(path):
        with path.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=[param if c == "value" else c for c in SWEEP_COLUMNS])
            w.writeheader()
            for row in rows:
                w.writerow({(param if k == "value" else k): row[k] for k in SWEEP_COLUMNS})

    def write_runs(path):
        runs = [asdict(r) for p in points for r in p.runs]
        with path.open("w", newline="") as fh:
            w = csv.DictWriter(fh, fieldnames=list(runs[0]))
            w.writeheader()
            w.writerows(runs)

    paths = [_write(out / "sweep.csv", write_csv), _write(out / "runs.csv", write_runs)]
    for metric in ("R", "FER", "mean_fnd_rnd", "p_EC"):
        def write_dat(path, metric=metric):
            lines = [f"# {param} {metric} {metric}_stderr"]
            lines += [f"{r['value']:.10g} {r[metric]:.10g} {r[metric + '_stderr']:.10g}" for r in rows]
            path.write_text("\n".join(lines) + "\n")
        paths.append(_write(out / "plotdata" / f"{metric}_vs_{param}.dat", write_dat))
    return paths
