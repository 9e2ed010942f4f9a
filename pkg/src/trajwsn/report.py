"""Scenario execution and result files: ``rounds.csv``, ``summary.csv`` and
two SVG line plots (live nodes and cumulative delivered packets per round)."""
from __future__ import annotations

import csv
import logging
import traceback
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from pathlib import Path
from xml.sax.saxutils import escape

import numpy as np

from .config import SimConfig
from .simulation import RoundMetrics, run_simulation

log = logging.getLogger(__name__)

ROUNDS_HEADER = ["algorithm", "seed", "round", "alive", "packets_cum", "energy_spent_j", "residual_j", "rotations",
                 "reclusterings"]
SUMMARY_HEADER = ["algorithm", "seed", "first_death_round", "last_death_round", "total_packets", "total_energy_j"]


@dataclass(frozen=True)
class Summary:
    first_death_round: int | None
    last_death_round: int | None
    total_packets: int
    total_energy_j: float


@dataclass
class RunResult:
    algorithm: str
    seed: int
    n_nodes: int
    rounds: list[RoundMetrics] = field(default_factory=list)
    error: str | None = None

    @property
    def summary(self) -> Summary:
        return summarize(self.rounds, self.n_nodes)


def summarize(rounds: list[RoundMetrics], n_nodes: int) -> Summary:
    first = next((m.round for m in rounds if m.alive_count < n_nodes), None)
    last = next((m.round for m in rounds if m.alive_count == 0), None)
    packets = rounds[-1].packets_delivered_total if rounds else 0
    return Summary(first, last, packets, float(sum(m.energy_spent_this_round for m in rounds)))


def _run_one(job):
    cfg, algorithm, seed = job
    try:
        return RunResult(algorithm, seed, cfg.n_nodes, run_simulation(cfg, seed, algorithm))
    except Exception as exc:  # reported per run; siblings carry on
        log.error("run algorithm=%s seed=%s failed: %s", algorithm, seed, exc)
        return RunResult(algorithm, seed, cfg.n_nodes, error=f"{type(exc).__name__}: {exc}\n{traceback.format_exc()}")


def run_scenario(cfg: SimConfig, workers: int | None = None) -> list[RunResult]:
    """One run per (algorithm, seed), returned sorted by that pair whatever
    order the workers finish in."""
    jobs = sorted(((a, s) for a in cfg.algorithms for s in cfg.seed_list))
    jobs = [(cfg, a, s) for a, s in jobs]
    workers = cfg.workers if workers is None else workers
    if workers > 1 and len(jobs) > 1:
        with ProcessPoolExecutor(max_workers=workers) as pool:
            results = list(pool.map(_run_one, jobs))
    else:
        results = [_run_one(j) for j in jobs]
    return sorted(results, key=lambda r: (r.algorithm, r.seed))


def _num(v) -> str:
    if v is None:
        return ""
    if isinstance(v, (float, np.floating)):
        return repr(float(v))
    return str(v)


def write_csv(results: list[RunResult], out_dir) -> tuple[Path, Path]:
    if not results:
        raise ValueError("no results to write")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    rounds_path, summary_path = out / "rounds.csv", out / "summary.csv"
    with open(rounds_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(ROUNDS_HEADER)
        for r in results:
            for m in r.rounds:
                w.writerow([r.algorithm, r.seed, m.round, m.alive_count, m.packets_delivered_total,
                            _num(m.energy_spent_this_round), _num(m.residual_energy_total), m.head_rotations,
                            m.reclusterings])
    with open(summary_path, "w", newline="") as fh:
        w = csv.writer(fh, lineterminator="\n")
        w.writerow(SUMMARY_HEADER)
        for r in results:
            s = r.summary
            w.writerow([r.algorithm, r.seed, _num(s.first_death_round), _num(s.last_death_round), s.total_packets,
                        _num(s.total_energy_j)])
    return rounds_path, summary_path


def read_rounds_csv(path) -> dict[tuple[str, int], list[RoundMetrics]]:
    out: dict[tuple[str, int], list[RoundMetrics]] = {}
    with open(path, newline="") as fh:
        for row in csv.DictReader(fh):
            out.setdefault((row["algorithm"], int(row["seed"])), []).append(RoundMetrics(
                int(row["round"]), int(row["alive"]), int(row["packets_cum"]), float(row["energy_spent_j"]),
                float(row["residual_j"]), int(row["rotations"]), int(row["reclusterings"])))
    return out


# --------------------------------------------------------------------------
# SVG plots
#
# Plot area: x in [PLOT_LEFT, PLOT_LEFT + PLOT_W], y in [PLOT_TOP, PLOT_TOP + PLOT_H].
# Data (round, value) maps to
#   px = PLOT_LEFT + (round - x0) / (x1 - x0) * PLOT_W
#   py = PLOT_TOP + PLOT_H - (value - y0) / (y1 - y0) * PLOT_H
# with x0, x1, y0, y1 written on the plot group as data-* attributes.

WIDTH, HEIGHT = 760, 480
PLOT_LEFT, PLOT_TOP, PLOT_W, PLOT_H = 80, 40, 640, 370
COLORS = {"trajectory": "#1f77b4", "leach": "#d62728"}


def series(results: list[RunResult], metric: str) -> dict[str, tuple[np.ndarray, np.ndarray]]:
    """Seed-averaged curve per algorithm.

    A run that ended early contributes its final value to later rounds
    (0 live nodes, flat packet total), so every seed spans the same range.
    """
    attr = {"alive": "alive_count", "packets": "packets_delivered_total"}[metric]
    by_alg: dict[str, list[RunResult]] = {}
    for r in results:
        if r.rounds:
            by_alg.setdefault(r.algorithm, []).append(r)
    out = {}
    for alg, runs in by_alg.items():
        length = max(len(r.rounds) for r in runs)
        mat = np.empty((len(runs), length))
        for i, r in enumerate(runs):
            vals = [getattr(m, attr) for m in r.rounds]
            mat[i, : len(vals)] = vals
            mat[i, len(vals):] = vals[-1]
        out[alg] = (np.arange(1, length + 1, dtype=float), mat.mean(axis=0))
    return out


def _nice_ticks(lo, hi, count=6):
    span = hi - lo
    if span <= 0:
        return [lo]
    raw = span / count
    mag = 10 ** np.floor(np.log10(raw))
    step = min((m * mag for m in (1, 2, 2.5, 5, 10) if m * mag >= raw), default=raw)
    first = np.ceil(lo / step) * step
    return [float(v) for v in np.arange(first, hi + step * 1e-9, step)]


def _fmt_tick(v):
    return f"{v:g}" if abs(v) < 1e6 else f"{v:.3g}"


def render_svg(curves: dict[str, tuple[np.ndarray, np.ndarray]], title: str, ylabel: str,
               extra: dict[str, list[tuple[np.ndarray, np.ndarray]]] | None = None) -> str:
    everything = list(curves.values()) + [c for runs in (extra or {}).values() for c in runs]
    xs = [x for x, _ in everything]
    ys = [y for _, y in everything]
    x0, x1 = 0.0, max(float(x.max()) for x in xs) if xs else 1.0
    y0, y1 = 0.0, max(float(y.max()) for y in ys) if ys else 1.0
    x1 = x1 if x1 > x0 else x0 + 1.0
    y1 = y1 if y1 > y0 else y0 + 1.0

    def px(x):
        return PLOT_LEFT + (x - x0) / (x1 - x0) * PLOT_W

    def py(y):
        return PLOT_TOP + PLOT_H - (y - y0) / (y1 - y0) * PLOT_H

    def points(x, y):
        return " ".join(f"{a:.3f},{b:.3f}" for a, b in zip(px(x), py(y)))

    parts = [
        '<?xml version="1.0" encoding="UTF-8"?>',
        f'<svg xmlns="http://www.w3.org/2000/svg" width="{WIDTH}" height="{HEIGHT}" '
        f'viewBox="0 0 {WIDTH} {HEIGHT}" font-family="sans-serif" font-size="12">',
        f'<rect width="{WIDTH}" height="{HEIGHT}" fill="white"/>',
        f'<text x="{WIDTH / 2}" y="22" text-anchor="middle" font-size="15">{escape(title)}</text>',
        f'<g id="plot" data-x0="{x0!r}" data-x1="{x1!r}" data-y0="{y0!r}" data-y1="{y1!r}" '
        f'data-left="{PLOT_LEFT}" data-top="{PLOT_TOP}" data-width="{PLOT_W}" data-height="{PLOT_H}">',
        f'<rect x="{PLOT_LEFT}" y="{PLOT_TOP}" width="{PLOT_W}" height="{PLOT_H}" fill="none" stroke="#333"/>',
    ]
    for t in _nice_ticks(x0, x1):
        parts.append(f'<line x1="{px(t):.3f}" y1="{PLOT_TOP + PLOT_H}" x2="{px(t):.3f}" '
                     f'y2="{PLOT_TOP + PLOT_H + 5}" stroke="#333"/>')
        parts.append(f'<text x="{px(t):.3f}" y="{PLOT_TOP + PLOT_H + 19}" text-anchor="middle">{_fmt_tick(t)}</text>')
    for t in _nice_ticks(y0, y1):
        parts.append(f'<line x1="{PLOT_LEFT - 5}" y1="{py(t):.3f}" x2="{PLOT_LEFT}" y2="{py(t):.3f}" stroke="#333"/>')
        parts.append(f'<text x="{PLOT_LEFT - 8}" y="{py(t) + 4:.3f}" text-anchor="end">{_fmt_tick(t)}</text>')
    for alg, runs in (extra or {}).items():
        for x, y in runs:
            parts.append(f'<polyline class="per-seed" data-algorithm="{escape(alg)}" fill="none" '
                         f'stroke="{COLORS.get(alg, "#555")}" stroke-opacity="0.25" stroke-width="0.8" '
                         f'points="{points(x, y)}"/>')
    for alg, (x, y) in curves.items():
        parts.append(f'<polyline class="series" data-algorithm="{escape(alg)}" fill="none" '
                     f'stroke="{COLORS.get(alg, "#555")}" stroke-width="1.6" points="{points(x, y)}"/>')
    parts.append("</g>")
    parts.append(f'<text x="{PLOT_LEFT + PLOT_W / 2}" y="{HEIGHT - 20}" text-anchor="middle">round</text>')
    parts.append(f'<text transform="translate(20 {PLOT_TOP + PLOT_H / 2}) rotate(-90)" '
                 f'text-anchor="middle">{escape(ylabel)}</text>')
    for i, alg in enumerate(curves):
        y = PLOT_TOP + 16 + 18 * i
        parts.append(f'<line x1="{PLOT_LEFT + PLOT_W - 150}" y1="{y}" x2="{PLOT_LEFT + PLOT_W - 125}" y2="{y}" '
                     f'stroke="{COLORS.get(alg, "#555")}" stroke-width="2"/>')
        parts.append(f'<text class="legend" x="{PLOT_LEFT + PLOT_W - 118}" y="{y + 4}">{escape(alg)}</text>')
    parts.append("</svg>")
    return "\n".join(parts) + "\n"


def emit_plots(results: list[RunResult], out_dir, per_seed: bool = False) -> tuple[Path, Path]:
    if not results:
        raise ValueError("no results to plot")
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    paths = []
    for metric, name, title, ylabel in (("alive", "alive.svg", "Nodes alive per round", "live nodes"),
                                        ("packets", "packets.svg", "Packets delivered", "cumulative packets")):
        extra = None
        if per_seed:
            extra = {}
            for r in results:
                if r.rounds:
                    extra.setdefault(r.algorithm, []).extend(series([r], metric).values())
        path = out / name
        path.write_text(render_svg(series(results, metric), title, ylabel, extra))
        paths.append(path)
    return tuple(paths)
