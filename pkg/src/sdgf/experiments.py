"""Declarative CS / denoising sweeps comparing Gabor windows.

Every (window, grid value, trial) row is an independent task. The random
data of a row (measurement matrix, noise) is seeded from ``(base_seed, grid
value, trial)`` only, so all windows see exactly the same problem instance.
"""

from __future__ import annotations

import csv
import io
import logging
import math
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import asdict, dataclass, field
from functools import lru_cache
from pathlib import Path

import numpy as np

from .errors import DimensionMismatch, SDGFError, ZeroReference
from .gabor import CLASSICAL_KINDS, analysis_pair, make_lattice, make_window
from .signals import (
    SignalRecord,
    add_gaussian_noise,
    analysis_sparse_signal,
    gaussian_matrix,
    load_wav_segment,
    make_signal,
)
from .solvers import SolverConfig, solve_analysis_cs, solve_analysis_denoise
from .zauner import star_window

log = logging.getLogger(__name__)

ROWS_HEADER = ("window", "grid", "trial", "metric", "eta", "iterations", "converged")
AGG_HEADER = ("window", "grid", "median", "mean", "n")
DEFAULT_WINDOWS = ("star", "gauss", "hann", "hamming", "itersine")
DATA_TAG = "data"

FNV_OFFSET = 0xCBF29CE484222325
FNV_PRIME = 0x100000001B3


def relative_error(x_hat, x) -> float:
    nx = np.linalg.norm(x)
    if nx == 0:
        raise ZeroReference("reference signal has zero norm")
    return float(np.linalg.norm(np.asarray(x_hat) - x) / nx)


def mse(x_hat, x) -> float:
    x_hat = np.asarray(x_hat)
    x = np.asarray(x)
    if x_hat.shape != x.shape:
        raise DimensionMismatch(f"shapes {x_hat.shape} and {x.shape} differ")
    return float(np.sum(np.abs(x_hat - x) ** 2) / x.size)


def format_grid(value) -> str:
    if isinstance(value, (int, np.integer)):
        return str(int(value))
    return repr(float(value))


def derive_seed(base_seed: int, window_tag: str, grid_value, trial: int) -> int:
    """64-bit FNV-1a of ``"{base_seed}|{window_tag}|{grid}|{trial}"``."""
    text = f"{int(base_seed)}|{window_tag}|{format_grid(grid_value)}|{int(trial)}"
    h = FNV_OFFSET
    for byte in text.encode("utf-8"):
        h ^= byte
        h = (h * FNV_PRIME) & 0xFFFFFFFFFFFFFFFF
    return h


def default_k_grid(L: int, points: int = 10) -> list[int]:
    return sorted({int(round(k)) for k in np.linspace(L / 6, L, points)})


def default_sigma_grid(points: int = 10) -> list[float]:
    return [float(s) for s in np.linspace(0.001, 0.01, points)]


@dataclass(frozen=True)
class ExperimentSpec:
    mode: str
    signal: str
    L: int
    a: int
    b: int
    windows: tuple[str, ...] = DEFAULT_WINDOWS
    grid: tuple = ()
    trials: int = 20
    base_seed: int = 0
    solver: SolverConfig = SolverConfig()
    sigma: float = 0.001
    theta: float = 0.0
    eigenvalue_index: int = 0
    field: str = "R"
    audio: str | None = None
    offset: int = 0
    sparsity: int = 0
    workers: int | None = None

    def __post_init__(self):
        if self.mode not in ("cs", "denoise"):
            raise ValueError(f"mode must be 'cs' or 'denoise', got {self.mode!r}")
        if "star" not in self.windows:
            raise ValueError("windows must include 'star'")
        for w in self.windows:
            if w != "star" and w not in CLASSICAL_KINDS:
                raise ValueError(f"unknown window {w!r}")
        make_lattice(self.L, self.a, self.b)
        grid = tuple(self.grid) or (
            tuple(default_k_grid(self.L)) if self.mode == "cs" else tuple(default_sigma_grid())
        )
        if self.mode == "cs" and any(not (1 <= k <= self.L) for k in grid):
            raise ValueError(f"every K must lie in [1, L={self.L}]")
        if self.mode == "denoise" and any(s < 0 for s in grid):
            raise ValueError("noise levels must be nonnegative")
        object.__setattr__(self, "grid", grid)

    def with_changes(self, **kw) -> "ExperimentSpec":
        d = {f: getattr(self, f) for f in self.__dataclass_fields__}
        d.update(kw)
        return ExperimentSpec(**d)


@dataclass(frozen=True)
class Row:
    window: str
    grid: object
    trial: int
    metric: float
    eta: float
    iterations: int
    converged: bool
    error: str = ""


@dataclass
class SweepResult:
    rows: list[Row] = field(default_factory=list)

    def aggregate(self) -> list[tuple[str, object, float, float, int]]:
        groups: dict[tuple[str, str], list[float]] = {}
        keys: dict[tuple[str, str], tuple[str, object]] = {}
        for r in self.rows:
            k = (r.window, format_grid(r.grid))
            keys.setdefault(k, (r.window, r.grid))
            if not math.isnan(r.metric):
                groups.setdefault(k, []).append(r.metric)
        out = []
        for k, (w, g) in keys.items():
            vals = groups.get(k, [])
            if vals:
                out.append((w, g, float(np.median(vals)), float(np.mean(vals)), len(vals)))
            else:
                out.append((w, g, math.nan, math.nan, 0))
        return out

    def medians(self, window: str) -> list[float]:
        return [m for w, _, m, _, _ in self.aggregate() if w == window]


def load_signal(spec: ExperimentSpec) -> SignalRecord:
    if spec.signal in ("two_chirp", "bumps", "cusp"):
        return make_signal(spec.signal, spec.L)
    if spec.signal == "wav":
        if not spec.audio:
            raise ValueError("signal 'wav' needs an audio path")
        return load_wav_segment(spec.audio, spec.offset, spec.L)
    if spec.signal == "sparse_complex":
        s = spec.sparsity or max(1, spec.L // 20)
        lat = make_lattice(spec.L, spec.a, spec.b)
        return analysis_sparse_signal(lat, s, derive_seed(spec.base_seed, "signal", 0, 0))
    raise ValueError(f"unknown signal {spec.signal!r}")


@lru_cache(maxsize=32)
def _operator(kind: str, L: int, a: int, b: int, theta: float, index: int):
    lat = make_lattice(L, a, b)
    if kind == "star":
        g = star_window(L, theta, index).as_window()
    else:
        g = make_window(kind, L)
    return analysis_pair(g, lat)


def _run_task(args) -> Row:
    spec, window, grid, trial, x = args
    data_seed = derive_seed(spec.base_seed, DATA_TAG, grid, trial)
    try:
        pair = _operator(window, spec.L, spec.a, spec.b, spec.theta, spec.eigenvalue_index)
        real = not np.iscomplexobj(x)
        if spec.mode == "cs":
            A = gaussian_matrix(int(grid), spec.L, "R" if real else "C", data_seed).A
            y, eta = add_gaussian_noise(A @ x, spec.sigma, data_seed + 1)
            res = solve_analysis_cs(A, y, pair, eta, spec.solver, real=real)
            metric = relative_error(res.x_hat, x)
        else:
            y, eta = add_gaussian_noise(x, float(grid), data_seed)
            res = solve_analysis_denoise(y, pair, eta, spec.solver, real=real)
            metric = mse(res.x_hat, x)
        return Row(window, grid, trial, metric, eta, res.iterations, res.converged)
    except (SDGFError, ValueError, np.linalg.LinAlgError) as exc:
        log.warning("row (%s, %s, %d) failed: %s", window, grid, trial, exc)
        return Row(window, grid, trial, math.nan, math.nan, -1, False, str(exc))


def worker_count(spec: ExperimentSpec) -> int:
    if spec.workers:
        return spec.workers
    env = os.environ.get("SDGF_THREADS")
    if env:
        return max(1, int(env))
    return os.cpu_count() or 1


def _run(spec: ExperimentSpec, mode: str) -> SweepResult:
    if spec.mode != mode:
        raise ValueError(f"spec mode is {spec.mode!r}, expected {mode!r}")
    x = load_signal(spec).samples
    if x.shape != (spec.L,):
        raise DimensionMismatch(f"signal length {x.shape[0]} != L={spec.L}")
    if "star" in spec.windows:
        # fail the whole sweep early on a non-compliant dimension
        star_window(spec.L, spec.theta, spec.eigenvalue_index)
    tasks = [(spec, w, g, t, x) for w in spec.windows for g in spec.grid for t in range(spec.trials)]
    n = worker_count(spec)
    if n <= 1 or len(tasks) < 2:
        rows = [_run_task(t) for t in tasks]
    else:
        with ProcessPoolExecutor(max_workers=n) as ex:
            rows = list(ex.map(_run_task, tasks, chunksize=max(1, len(tasks) // (4 * n))))
    return SweepResult(rows)


def run_cs_sweep(spec: ExperimentSpec) -> SweepResult:
    return _run(spec, "cs")


def run_denoise_sweep(spec: ExperimentSpec) -> SweepResult:
    return _run(spec, "denoise")


def run_sweep(spec: ExperimentSpec) -> SweepResult:
    return _run(spec, spec.mode)


def _fmt(v: float) -> str:
    return "nan" if math.isnan(v) else repr(float(v))


def rows_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(ROWS_HEADER)
    for r in result.rows:
        w.writerow(
            [r.window, format_grid(r.grid), r.trial, _fmt(r.metric), _fmt(r.eta), r.iterations, int(r.converged)]
        )
    return buf.getvalue()


def aggregate_csv(result: SweepResult) -> str:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(AGG_HEADER)
    for win, g, med, mean, n in result.aggregate():
        w.writerow([win, format_grid(g), _fmt(med), _fmt(mean), n])
    return buf.getvalue()


PLOT_SCRIPT = '''"""Plot median metric against the sweep grid, one line per window.

Usage: python plot.py [aggregate.csv] [output.png]
"""
import csv
import sys
from collections import defaultdict

import matplotlib

matplotlib.use("Agg")
import matplotlib.pyplot as plt

src = sys.argv[1] if len(sys.argv) > 1 else "aggregate.csv"
dst = sys.argv[2] if len(sys.argv) > 2 else "figure.png"
series = defaultdict(list)
with open(src, newline="") as fh:
    for row in csv.DictReader(fh):
        series[row["window"]].append((float(row["grid"]), float(row["median"])))
colors = {{"star": "tab:blue"}}
fig, ax = plt.subplots(figsize=(6, 4))
for name, pts in series.items():
    pts.sort()
    ax.plot([p[0] for p in pts], [p[1] for p in pts], marker="o", label=name, color=colors.get(name))
ax.set_xlabel("{xlabel}")
ax.set_ylabel("{ylabel}")
ax.legend()
fig.tight_layout()
fig.savefig(dst, dpi=150)
'''


def plot_script(mode: str) -> str:
    if mode == "cs":
        return PLOT_SCRIPT.format(xlabel="number of measurements K", ylabel="median relative error")
    return PLOT_SCRIPT.format(xlabel="noise standard deviation", ylabel="median MSE")


def emit_results(result: SweepResult, out_dir, mode: str = "cs") -> list[Path]:
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    files = {
        "rows.csv": rows_csv(result),
        "aggregate.csv": aggregate_csv(result),
        "plot.py": plot_script(mode),
    }
    paths = []
    for name, text in files.items():
        p = out / name
        p.write_text(text, encoding="utf-8")
        paths.append(p)
    return paths


def spec_to_dict(spec: ExperimentSpec) -> dict:
    d = asdict(spec)
    d["solver"] = asdict(spec.solver)
    return d
