"""Angle-sweep experiment runner and report emission (CSV / gnuplot / SVG)."""
from __future__ import annotations

import concurrent.futures
import csv
import io
from dataclasses import dataclass, field, replace

import numpy as np

from .channel import Topology, make_angle_channel
from .optimize import (OptimizerConfig, optimize_lower_bound,
                       optimize_strategy, optimize_upper_bound)

QUANTITIES = ("upper", "lower", "sc", "pre")

CSV_COLUMNS = ("theta_rad", "upper_bits", "lower_bits", "rsc_bits",
               "rpre_bits", "seed", "evals_total")


def default_theta_grid(points: int = 17) -> list[float]:
    return [float(t) for t in np.linspace(0.0, np.pi, points)]


@dataclass(frozen=True)
class SweepConfig:
    topology: Topology = Topology()
    theta_grid: tuple[float, ...] = field(
        default_factory=lambda: tuple(default_theta_grid()))
    h1_norm: float = 10.0
    optimizer: OptimizerConfig = OptimizerConfig()
    quantities: tuple[str, ...] = QUANTITIES
    output_path: str = "sweep.csv"

    def __post_init__(self):
        if not self.theta_grid:
            raise ValueError("theta_grid must be nonempty")
        for t in self.theta_grid:
            if not 0.0 <= t <= np.pi:
                raise ValueError("every theta must lie in [0, pi]")
        if not self.quantities:
            raise ValueError("quantities must be nonempty")
        for q in self.quantities:
            if q not in QUANTITIES:
                raise ValueError(f"unknown quantity {q!r}")


@dataclass(frozen=True)
class SweepRow:
    theta: float
    upper: float | None
    lower: float | None
    r_sc: float | None
    r_pre: float | None
    seed: int
    evals_total: int


@dataclass(frozen=True)
class SweepResult:
    rows: tuple[SweepRow, ...]
    quantities: tuple[str, ...]


def _sweep_point(args) -> SweepRow:
    cfg, index, theta = args
    # Per-point seed keeps rows independent of execution order and job count.
    point_seed = cfg.optimizer.seed ^ index
    opt = replace(cfg.optimizer, seed=point_seed)
    ch = make_angle_channel(theta, cfg.h1_norm, cfg.topology)
    upper = lower = r_sc = r_pre = None
    evals = 0
    if "lower" in cfg.quantities:
        lower = optimize_lower_bound(ch)
    if "upper" in cfg.quantities:
        res = optimize_upper_bound(ch, opt)
        upper = res.value
        evals += res.evaluations
    sc_res = None
    if "sc" in cfg.quantities:
        sc_res = optimize_strategy(ch, "sc", opt)
        r_sc = sc_res.value
        evals += sc_res.evaluations
    if "pre" in cfg.quantities:
        extra = [sc_res.argmax] if sc_res is not None else []
        pre_res = optimize_strategy(ch, "pre", opt, extra_starts=extra)
        r_pre = pre_res.value
        evals += pre_res.evaluations
    return SweepRow(theta=theta, upper=upper, lower=lower, r_sc=r_sc,
                    r_pre=r_pre, seed=point_seed, evals_total=evals)


def run_sweep(cfg: SweepConfig, jobs: int = 1) -> SweepResult:
    """Evaluate every requested quantity at every angle; deterministic per seed."""
    tasks = [(cfg, i, t) for i, t in enumerate(cfg.theta_grid)]
    if jobs > 1:
        with concurrent.futures.ProcessPoolExecutor(max_workers=jobs) as ex:
            rows = list(ex.map(_sweep_point, tasks))
    else:
        rows = [_sweep_point(t) for t in tasks]
    rows.sort(key=lambda r: r.theta)
    return SweepResult(rows=tuple(rows), quantities=tuple(cfg.quantities))


# ---------------------------------------------------------------------------
# Emission
# ---------------------------------------------------------------------------

def _fmt(v: float | None) -> str:
    return "" if v is None else f"{v:.12g}"


def write_csv(result: SweepResult, path: str) -> None:
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(CSV_COLUMNS)
    for r in result.rows:
        w.writerow([_fmt(r.theta), _fmt(r.upper), _fmt(r.lower),
                    _fmt(r.r_sc), _fmt(r.r_pre), str(r.seed),
                    str(r.evals_total)])
    try:
        with open(path, "w", newline="") as fh:
            fh.write(buf.getvalue())
    except OSError as exc:
        raise OSError(f"cannot write CSV to {path}: {exc}") from exc


def load_csv(path: str) -> SweepResult:
    """Parse a sweep CSV back into a SweepResult."""

    def num(s: str) -> float | None:
        return None if s == "" else float(s)

    rows = []
    with open(path, newline="") as fh:
        reader = csv.reader(fh)
        header = next(reader)
        if tuple(header) != CSV_COLUMNS:
            raise ValueError(f"unexpected CSV header in {path}")
        for rec in reader:
            rows.append(SweepRow(theta=float(rec[0]), upper=num(rec[1]),
                                 lower=num(rec[2]), r_sc=num(rec[3]),
                                 r_pre=num(rec[4]), seed=int(rec[5]),
                                 evals_total=int(rec[6])))
    present = []
    if rows:
        first = rows[0]
        for name, v in (("upper", first.upper), ("lower", first.lower),
                        ("sc", first.r_sc), ("pre", first.r_pre)):
            if v is not None:
                present.append(name)
    return SweepResult(rows=tuple(rows), quantities=tuple(present))


_GNUPLOT_TEMPLATE = """\
# Rate bounds vs relay angle; generated alongside {csv}
set datafile separator ","
set xlabel "angle between H1 and H2 (rad)"
set ylabel "rate (bits/s/Hz)"
set key left bottom
plot "{csv}" using 1:2 with lines title "upper bound", \\
     "{csv}" using 1:3 with lines title "lower bound", \\
     "{csv}" using 1:4 with lines title "superposition", \\
     "{csv}" using 1:5 with lines title "precoding"
"""


def write_gnuplot(result: SweepResult, path: str) -> str:
    """Write the CSV plus a gnuplot script referencing it; returns script path."""
    csv_path = path if path.endswith(".csv") else path + ".csv"
    gp_path = csv_path[:-4] + ".gp"
    write_csv(result, csv_path)
    with open(gp_path, "w") as fh:
        fh.write(_GNUPLOT_TEMPLATE.format(csv=csv_path))
    return gp_path


_SERIES = (("upper", "upper bound"), ("lower", "lower bound"),
           ("r_sc", "superposition"), ("r_pre", "precoding"))


def write_svg(result: SweepResult, path: str) -> None:
    """Render the rate curves to an SVG figure."""
    import matplotlib
    matplotlib.use("Agg")
    import matplotlib.pyplot as plt

    thetas = [r.theta for r in result.rows]
    fig, ax = plt.subplots(figsize=(6.0, 4.0))
    for attr, label in _SERIES:
        ys = [getattr(r, attr) for r in result.rows]
        if any(y is not None for y in ys):
            ax.plot(thetas, ys, marker="o", markersize=3, label=label)
    ax.set_xlabel("angle between H1 and H2 (rad)")
    ax.set_ylabel("rate (bits/s/Hz)")
    ax.grid(True, alpha=0.3)
    ax.legend(loc="best")
    fig.tight_layout()
    try:
        fig.savefig(path, format="svg")
    except OSError as exc:
        raise OSError(f"cannot write SVG to {path}: {exc}") from exc
    finally:
        plt.close(fig)


def emit(result: SweepResult, fmt: str, path: str) -> list[str]:
    """Write the sweep in the requested format; returns the files written."""
    if fmt == "csv":
        write_csv(result, path)
        return [path]
    if fmt == "gnuplot":
        gp = write_gnuplot(result, path)
        return [gp[:-3] + ".csv", gp]
    if fmt == "svg":
        svg_path = path if path.endswith(".svg") else path + ".svg"
        csv_path = svg_path[:-4] + ".csv"
        write_csv(result, csv_path)
        write_svg(result, svg_path)
        return [csv_path, svg_path]
    raise ValueError(f"unknown format {fmt!r}")
