"""File formats: pattern CSV ingestion, trace/summary/curve/error tables,
and the run manifest.

All tables are plain comma-separated files with a header row; floats are
written with shortest round-trip precision so reading a file back loses
nothing. Writes go through a temp-file-then-rename so readers never observe
a half-written file. Wall-clock information is confined to the manifest:
every other artifact is a pure function of config and seed.
"""

from __future__ import annotations

import csv
import json
import math
import os
import platform
import sys
import tempfile
from contextlib import contextmanager
from datetime import datetime, timezone

import numpy as np

from .core import PointPattern, RngState, Window
from .mcmc import ChainTrace
from .posterior import ErrorEstimates, PosteriorSummary
from .summaries import EnvelopeResult

__all__ = [
    "ingest_pattern",
    "read_pattern",
    "write_pattern",
    "write_trace",
    "read_trace",
    "write_summary",
    "write_errors",
    "write_curves",
    "write_rows",
    "read_table",
    "write_manifest",
    "atomic_write_text",
]


def _fmt(v) -> str:
    if v is None:
        return ""
    f = float(v)
    if math.isnan(f):
        return "nan"
    return repr(f)


@contextmanager
def _atomic(path: str, mode: str = "w"):
    """Write to a sibling temp file, then rename over the target."""
    directory = os.path.dirname(os.path.abspath(path))
    os.makedirs(directory, exist_ok=True)
    fd, tmp = tempfile.mkstemp(dir=directory, prefix=".tmp-",
                               suffix=os.path.basename(path))
    try:
        with os.fdopen(fd, mode, newline="" if "b" not in mode else None) as fh:
            yield fh
        os.replace(tmp, path)
    except BaseException:
        try:
            os.unlink(tmp)
        except OSError:
            pass
        raise


def atomic_write_text(path: str, text: str) -> None:
    with _atomic(path) as fh:
        fh.write(text)


def write_rows(path: str, header, rows) -> None:
    """Small CSV table: floats get round-trip formatting, the rest str()."""
    with _atomic(path) as fh:
        w = csv.writer(fh)
        w.writerow(list(header))
        for row in rows:
            w.writerow([_fmt(v) if isinstance(v, (float, np.floating))
                        else str(v) for v in row])


def ingest_pattern(path: str, window=None, normalize: bool = False):
    """Read a pattern CSV (header ``x,y`` or ``x,y,angle``).

    Returns (pattern, transform). Without normalize, a window is required
    and points outside it are an error listing the offending data rows.
    With normalize, coordinates are shifted to the origin and divided by the
    longer bounding-box side, landing in the unit square (aspect preserved);
    transform records the applied map as {"offset": [x, y], "scale": s} with
    new = (old - offset) * s, and the window becomes [0,1]^2. Angles must
    already be radians in [0, pi).
    """
    try:
        fh = open(path, newline="")
    except OSError as exc:
        raise FileNotFoundError(f"cannot read pattern file: {exc}") from exc
    with fh:
        reader = csv.reader(fh)
        try:
            header = next(reader)
        except StopIteration:
            raise ValueError(f"{path}: empty file, expected a header row")
        cols = [c.strip().lower() for c in header]
        if cols[:2] != ["x", "y"] or len(cols) > 3 or \
                (len(cols) == 3 and cols[2] != "angle"):
            raise ValueError(
                f"{path}: header must be 'x,y' or 'x,y,angle', got {header!r}")
        marked = len(cols) == 3
        xs: list[float] = []
        ys: list[float] = []
        angles: list[float] = []
        for lineno, row in enumerate(reader, start=2):
            if not row or (len(row) == 1 and not row[0].strip()):
                continue
            if len(row) != len(cols):
                raise ValueError(f"{path}:{lineno}: expected {len(cols)} fields")
            try:
                xs.append(float(row[0]))
                ys.append(float(row[1]))
                if marked:
                    angles.append(float(row[2]))
            except ValueError as exc:
                raise ValueError(f"{path}:{lineno}: {exc}") from exc
    points = np.column_stack([xs, ys]) if xs else np.empty((0, 2))
    marks = np.asarray(angles) if marked else None
    if marked and len(angles) and (marks.min() < 0 or marks.max() >= math.pi):
        bad = [i + 2 for i, a in enumerate(angles)
               if a < 0 or a >= math.pi][:20]
        raise ValueError(
            f"{path}: angle must be radians in [0, pi); offending rows {bad}")

    transform = None
    if normalize:
        if len(points) == 0:
            raise ValueError("cannot normalize an empty pattern")
        lo = points.min(axis=0)
        span = points.max(axis=0) - lo
        longer = float(span.max())
        if longer <= 0:
            raise ValueError("cannot normalize: all points coincide")
        scale = 1.0 / longer
        points = (points - lo) * scale
        window = Window(np.zeros(2), np.ones(2))
        transform = {"offset": lo.tolist(), "scale": scale}
    else:
        window = _as_window(window)
        if window is None:
            raise ValueError("a window is required when normalize is off")
        inside = window.contains(points)
        if not bool(np.all(inside)):
            bad = (np.nonzero(~inside)[0] + 2).tolist()[:20]
            raise ValueError(
                f"{path}: points outside the window at rows {bad}; "
                "pass normalize to rescale")
    return PointPattern(points, window, marks), transform


def _as_window(window):
    if window is None or isinstance(window, Window):
        return window
    if isinstance(window, dict):
        return Window(np.asarray(window["lower"], dtype=float),
                      np.asarray(window["upper"], dtype=float))
    lower, upper = window
    return Window(np.asarray(lower, dtype=float), np.asarray(upper, dtype=float))


def read_pattern(path: str, window=None) -> PointPattern:
    pattern, _ = ingest_pattern(path, window=window)
    return pattern


def write_pattern(path: str, pattern: PointPattern) -> None:
    marked = pattern.marks is not None
    with _atomic(path) as fh:
        w = csv.writer(fh)
        w.writerow(["x", "y", "angle"] if marked else ["x", "y"])
        for i in range(len(pattern)):
            row = [_fmt(pattern.points[i, 0]), _fmt(pattern.points[i, 1])]
            if marked:
                row.append(_fmt(pattern.marks[i]))
            w.writerow(row)


def write_trace(path: str, trace: ChainTrace) -> str:
    """Trace CSV (one kept sample per row) plus a JSON sidecar.

    The sidecar sits next to the CSV with a .json suffix and carries the
    config echo, seed, acceptance rate, and wall time. Returns its path.
    """
    with _atomic(path) as fh:
        w = csv.writer(fh)
        w.writerow(trace.param_names)
        for row in trace.samples:
            w.writerow([_fmt(v) for v in row])
    sidecar = os.path.splitext(path)[0] + ".json"
    seed = trace.seed
    if isinstance(seed, RngState):
        seed = {"seed": seed.seed, "stream": seed.stream}
    meta = {
        "param_names": list(trace.param_names),
        "acceptance_rate": trace.acceptance_rate,
        "config": trace.config,
        "wall_time_s": trace.wall_time_s,
        "seed": seed,
        "n_samples": int(trace.samples.shape[0]),
    }
    atomic_write_text(sidecar, json.dumps(meta, indent=2, sort_keys=True) + "\n")
    return sidecar


def read_trace(path: str) -> ChainTrace:
    """Rebuild a ChainTrace from its CSV and sidecar (if present)."""
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        names = tuple(next(reader))
        rows = [[float(v) for v in row] for row in reader if row]
    samples = np.asarray(rows, dtype=float).reshape(len(rows), len(names))
    sidecar = os.path.splitext(path)[0] + ".json"
    acceptance = float("nan")
    config: dict = {}
    wall = float("nan")
    seed = None
    if os.path.exists(sidecar):
        with open(sidecar) as fh:
            meta = json.load(fh)
        acceptance = meta.get("acceptance_rate", acceptance)
        config = meta.get("config", config)
        wall = meta.get("wall_time_s", wall)
        seed = meta.get("seed")
        if isinstance(seed, dict) and set(seed) == {"seed", "stream"}:
            seed = RngState(int(seed["seed"]), int(seed["stream"]))
    return ChainTrace(samples, names, acceptance, config, wall, seed)


def write_summary(path: str, summary: PosteriorSummary, extra=None) -> None:
    """Posterior table, one row per parameter.

    extra, when given, is a mapping of constant columns prepended to every
    row (e.g. {"r": 0.05} for range sweeps).
    """
    extra = dict(extra or {})
    qcols = [f"q{int(round(100 * p))}" for p in summary.quantile_probs]
    header = list(extra) + ["parameter", *qcols, "mean", "map", "bandwidth",
                            "n_samples"]
    with _atomic(path) as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for j, name in enumerate(summary.param_names):
            row = [_fmt(v) if isinstance(v, float) else str(v)
                   for v in extra.values()]
            row.append(name)
            row.extend(_fmt(summary.quantiles[i, j])
                       for i in range(len(summary.quantile_probs)))
            row.append(_fmt(summary.mean[j]))
            row.append(_fmt(summary.map_estimate[j]))
            row.append(_fmt(summary.bandwidths[j]))
            row.append(str(summary.n_samples))
            w.writerow(row)


def write_errors(path: str, items) -> None:
    """Error-estimate table, one row per parameter.

    items is either a single ErrorEstimates or an iterable of
    (label_mapping, ErrorEstimates) pairs; label columns (e.g. {"r": 0.05})
    come first, shared across all rows of that entry.
    """
    if isinstance(items, ErrorEstimates):
        items = [({}, items)]
    items = [(dict(labels), est) for labels, est in items]
    label_cols: list[str] = []
    for labels, _ in items:
        for key in labels:
            if key not in label_cols:
                label_cols.append(key)
    header = label_cols + ["parameter", "asymptotic_sd", "mc_sd",
                           "n_sim", "n_batches"]
    with _atomic(path) as fh:
        w = csv.writer(fh)
        w.writerow(header)
        for labels, est in items:
            for j, name in enumerate(est.param_names):
                row = [_fmt(labels[c]) if isinstance(labels.get(c), float)
                       else str(labels.get(c, "")) for c in label_cols]
                row.append(name)
                row.append(_fmt(est.asymptotic_sd[j]))
                row.append(_fmt(est.mc_sd[j]))
                row.append(str(est.n_sim))
                row.append(str(est.n_batches))
                w.writerow(row)


def write_curves(path: str, results) -> None:
    """Long-format curve table: statistic,u,observed,lower,upper,theoretical.

    results maps statistic name to either an EnvelopeResult or a mapping
    with keys u/observed/theoretical (lower and upper left empty then).
    """
    with _atomic(path) as fh:
        w = csv.writer(fh)
        w.writerow(["statistic", "u", "observed", "lower", "upper",
                    "theoretical"])
        for name, res in results.items():
            if isinstance(res, EnvelopeResult):
                u, obs = res.u, res.observed
                lower, upper, theo = res.lower, res.upper, res.theoretical
            else:
                u = np.asarray(res["u"], dtype=float)
                obs = np.asarray(res["observed"], dtype=float)
                theo = np.asarray(res["theoretical"], dtype=float)
                lower = upper = None
            for i in range(len(u)):
                w.writerow([
                    name,
                    _fmt(u[i]),
                    _fmt(obs[i]),
                    _fmt(lower[i]) if lower is not None else "",
                    _fmt(upper[i]) if upper is not None else "",
                    _fmt(theo[i]),
                ])


def read_table(path: str) -> list[dict[str, str]]:
    """Generic CSV reader: list of header-keyed string dicts."""
    with open(path, newline="") as fh:
        return list(csv.DictReader(fh))


def write_manifest(path: str, subcommand: str, seed, config: dict,
                   outputs: list[str], notes=None) -> None:
    """Run manifest: config echo, seed, library versions, timestamp."""
    import matplotlib
    import scipy

    from . import __version__

    manifest = {
        "subcommand": subcommand,
        "seed": seed,
        "config": config,
        "outputs": sorted(outputs),
        "versions": {
            "python": platform.python_version(),
            "numpy": np.__version__,
            "scipy": scipy.__version__,
            "matplotlib": matplotlib.__version__,
            "abcshadow": __version__,
        },
        "argv": sys.argv[1:],
        "timestamp_utc": datetime.now(timezone.utc).isoformat(),
    }
    atomic_write_text(path, json.dumps(manifest, indent=2, sort_keys=True) + "\n")
