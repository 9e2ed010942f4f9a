import re
import xml.etree.ElementTree as ET

import numpy as np
import pytest

from trajwsn import report
from trajwsn.config import SimConfig
from trajwsn.report import (
    ROUNDS_HEADER,
    SUMMARY_HEADER,
    RunResult,
    emit_plots,
    read_rounds_csv,
    render_svg,
    run_scenario,
    series,
    write_csv,
)
from trajwsn.simulation import RoundMetrics

SVG = "{http://www.w3.org/2000/svg}"

FIXTURE = [
    RoundMetrics(1, 3, 2, 0.5, 5.5, 0, 1),
    RoundMetrics(2, 2, 4, 0.25, 5.25, 1, 0),
    RoundMetrics(3, 0, 5, 0.125, 5.125, 0, 1),
]


def tiny_cfg(**kw):
    base = dict(n_nodes=12, initial_energy_j=0.01, max_rounds=400)
    base.update(kw)
    return SimConfig(**base)


def test_headers_exact(tmp_path):
    rounds, summary = write_csv([RunResult("trajectory", 1, 3, [])], tmp_path)
    assert rounds.read_text() == ",".join(ROUNDS_HEADER) + "\n"
    assert ROUNDS_HEADER == ["algorithm", "seed", "round", "alive", "packets_cum", "energy_spent_j", "residual_j",
                             "rotations", "reclusterings"]
    assert SUMMARY_HEADER == ["algorithm", "seed", "first_death_round", "last_death_round", "total_packets",
                              "total_energy_j"]
    assert summary.read_text().splitlines() == [",".join(SUMMARY_HEADER), "trajectory,1,,,0,0.0"]


def test_zero_round_run_header_only(tmp_path):
    (res,) = run_scenario(tiny_cfg(max_rounds=0, algorithm="leach"))
    rounds, _ = write_csv([res], tmp_path)
    assert rounds.read_text().splitlines() == [",".join(ROUNDS_HEADER)]


def test_fixture_rows_and_round_trip(tmp_path):
    rounds, summary = write_csv([RunResult("leach", 7, 3, FIXTURE)], tmp_path)
    lines = rounds.read_text().splitlines()
    assert lines[1:] == ["leach,7,1,3,2,0.5,5.5,0,1", "leach,7,2,2,4,0.25,5.25,1,0", "leach,7,3,0,5,0.125,5.125,0,1"]
    assert read_rounds_csv(rounds) == {("leach", 7): FIXTURE}
    assert summary.read_text().splitlines()[1] == "leach,7,2,3,5,0.875"


def test_round_trip_is_lossless(tmp_path):
    results = run_scenario(tiny_cfg())
    rounds, _ = write_csv(results, tmp_path)
    back = read_rounds_csv(rounds)
    for r in results:
        assert back[(r.algorithm, r.seed)] == r.rounds
        alive = [m.alive_count for m in r.rounds]
        assert all(a >= b for a, b in zip(alive, alive[1:]))


def test_scenario_order_and_count():
    results = run_scenario(tiny_cfg(max_rounds=5, seed_count=20, seeds=(3,)))
    assert len(results) == 40
    assert [(r.algorithm, r.seed) for r in results] == [(a, s) for a in ("leach", "trajectory")
                                                        for s in range(3, 23)]
    assert all(len(r.rounds) == 5 for r in results)


def test_single_run():
    (r,) = run_scenario(tiny_cfg(algorithm="trajectory", max_rounds=3))
    assert r.algorithm == "trajectory" and r.error is None and len(r.rounds) == 3


def test_workers_give_same_results():
    cfg = tiny_cfg(max_rounds=60, seed_count=2)
    serial = run_scenario(cfg, workers=1)
    pooled = run_scenario(cfg, workers=2)
    assert [(r.algorithm, r.seed, r.rounds) for r in serial] == [(r.algorithm, r.seed, r.rounds) for r in pooled]


def test_identical_invocations_byte_identical(tmp_path):
    cfg = tiny_cfg(seed_count=2)
    for d in ("a", "b"):
        res = run_scenario(cfg)
        write_csv(res, tmp_path / d)
        emit_plots(res, tmp_path / d)
    for name in ("rounds.csv", "summary.csv", "alive.svg", "packets.svg"):
        assert (tmp_path / "a" / name).read_bytes() == (tmp_path / "b" / name).read_bytes()


def test_failing_run_is_isolated(monkeypatch):
    real = report.run_simulation

    def flaky(cfg, seed, algorithm):
        if seed == 2:
            raise RuntimeError("boom")
        return real(cfg, seed, algorithm)

    monkeypatch.setattr(report, "run_simulation", flaky)
    results = run_scenario(tiny_cfg(max_rounds=3, seed_count=3, algorithm="leach"))
    assert [r.error is None for r in results] == [True, False, True]
    assert "boom" in results[1].error


def parse_plot(path):
    root = ET.parse(path).getroot()
    g = root.find(f".//{SVG}g[@id='plot']")
    t = {k: float(g.get(f"data-{k}")) for k in ("x0", "x1", "y0", "y1", "left", "top", "width", "height")}
    curves = {}
    for pl in g.findall(f"{SVG}polyline[@class='series']"):
        pts = np.array([[float(v) for v in p.split(",")] for p in pl.get("points").split()])
        x = t["x0"] + (pts[:, 0] - t["left"]) / t["width"] * (t["x1"] - t["x0"])
        y = t["y0"] + (t["top"] + t["height"] - pts[:, 1]) / t["height"] * (t["y1"] - t["y0"])
        curves[pl.get("data-algorithm")] = (x, y)
    legend = [e.text for e in root.iter(f"{SVG}text") if e.get("class") == "legend"]
    return curves, legend


def test_polylines_invert_to_csv_data(tmp_path):
    results = run_scenario(tiny_cfg(seeds=(4,)))
    rounds, _ = write_csv(results, tmp_path)
    alive_svg, packets_svg = emit_plots(results, tmp_path)
    data = read_rounds_csv(rounds)
    for path, attr in ((alive_svg, "alive_count"), (packets_svg, "packets_delivered_total")):
        curves, legend = parse_plot(path)
        assert sorted(curves) == sorted(legend) == ["leach", "trajectory"]
        x_span = max(len(v) for v in data.values())
        for alg, (x, y) in curves.items():
            vals = [getattr(m, attr) for m in data[(alg, 4)]]
            # points are written to 3 decimals in pixel space
            np.testing.assert_allclose(x, np.arange(1, len(vals) + 1), atol=0.001 * x_span / 640 + 1e-9)
            np.testing.assert_allclose(y, vals, atol=0.001 * max(vals) / 370 + 1e-9)


def test_single_algorithm_single_curve(tmp_path):
    results = run_scenario(tiny_cfg(algorithm="leach"))
    curves, legend = parse_plot(emit_plots(results, tmp_path)[0])
    assert list(curves) == ["leach"] and legend == ["leach"]


def test_seed_average_pads_with_final_value():
    a = RunResult("leach", 1, 3, FIXTURE)
    b = RunResult("leach", 2, 3, FIXTURE[:2])
    x, y = series([a, b], "alive")["leach"]
    assert x.tolist() == [1, 2, 3] and y.tolist() == [3.0, 2.0, 1.0]


def test_per_seed_curves(tmp_path):
    results = run_scenario(tiny_cfg(seed_count=3, algorithm="trajectory"))
    svg = emit_plots(results, tmp_path, per_seed=True)[0].read_text()
    assert len(re.findall('class="per-seed"', svg)) == 3
    assert len(re.findall('class="series"', svg)) == 1


def test_empty_inputs_rejected(tmp_path):
    with pytest.raises(ValueError):
        write_csv([], tmp_path)
    with pytest.raises(ValueError):
        emit_plots([], tmp_path)
    assert "<polyline" not in render_svg({}, "t", "y")
