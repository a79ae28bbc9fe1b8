import math

import numpy as np
import pytest

import flatlab


def test_plane_has_zero_height():
    grid = flatlab.GraphGrid.polar(1.0, 16.0, 33, 32)
    graph = flatlab.make_harmonic_graph([flatlab.HarmonicMode(2, 0, flatlab.ModeKind.growing, [], 0.25)], grid)
    rec = flatlab.flatness(graph.to_cloud(), 4.0)
    assert rec.H < 1e-12


def test_catenoid_fit():
    grid = flatlab.GraphGrid.polar(8.0, 2048.0, 129, 32)
    fit = flatlab.fit_asymptotics(flatlab.make_catenoid3(1.0, grid))
    assert abs(fit.b - math.log(2.0)) < 1e-3
    assert abs(fit.c - 1.0) < 1e-3


def test_catenoid_boundary_solve():
    grid = flatlab.GraphGrid.polar(2.0, 64.0, 65, 16)
    exact = flatlab.make_catenoid3(1.0, grid).values
    sol, report = flatlab.solve_dirichlet(list(exact[0]), list(exact[-1]), grid)
    assert np.max(np.abs(sol.values - exact)) < 1e-3
    assert report["iters"] >= 1


def test_graph_csv_round_trip():
    grid = flatlab.GraphGrid.polar(1.0, 8.0, 9, 12)
    graph = flatlab.make_catenoid3(0.5, grid)
    text = graph.to_csv()
    assert flatlab.SampledGraph.from_csv(text).to_csv() == text


def test_two_sheets():
    rng = np.random.default_rng(3)
    pts = []
    for z in (-0.1, 0.1):
        xy = rng.uniform(-2.0, 2.0, size=(20000, 2))
        r = np.hypot(xy[:, 0], xy[:, 1])
        xy = xy[(r > 1.0) & (r < 2.0)]
        pts.append(np.column_stack([xy, np.full(len(xy), z)]))
    sheets, ordered, connected = flatlab.sheet_decompose(np.vstack(pts), 0.2, 0.05)
    assert len(sheets) == 2 and ordered and not connected


def test_validate_config():
    assert flatlab.validate_config("alpha = 1.5\n") == ["alpha out of (0,1)"]
    assert flatlab.validate_config("") == []


def test_errors_are_exceptions():
    with pytest.raises(flatlab.Error):
        flatlab.flatness(np.zeros((3, 3)), 1.0)


def test_run_experiment():
    ok, summary, files = flatlab.run_experiment("experiment = kelvin-check\nn = 4\n")
    assert ok
    assert "report.json" in files
