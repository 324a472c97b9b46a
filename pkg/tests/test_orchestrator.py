import csv
import json
import math
from pathlib import Path

import numpy as np
import pytest
from scipy.special import jv

import orchestrator
from coupling_engine import bessel_argument, bessel_j0, normalized_frequency
from errors import AccuracyError
from frame_ingest import dump_frame, dump_mask, mask_from_lattice
from lattice_geometry import PhysicalParams, build_lattice_1d, lattice_to_json
from orchestrator import main
from utils.frame_renderer import FrameRenderer

CONFIGS = Path(__file__).resolve().parent.parent / "configs"
CHAIN_J0 = bessel_j0(bessel_argument(normalized_frequency(PhysicalParams(1.503, 0.78, 15.0)), 14.4, 2.0))


def _run(*args):
    return main([str(a) for a in args])


def _rows(path):
    with open(path, encoding="utf-8", newline="") as fh:
        return list(csv.DictReader(fh))


def _json(path):
    return json.loads(Path(path).read_text(encoding="utf-8"))


def _write_config(tmp_path, doc, name="run.json"):
    path = tmp_path / name
    path.write_text(json.dumps(doc), encoding="utf-8")
    return path


# ============================================================================
# SIMULATE
# ============================================================================

def test_simulate_writes_one_file_per_z(tmp_path):
    assert _run("simulate", "--config", CONFIGS / "chain" / "straight.json", "--out", tmp_path) == 0
    manifest = _json(tmp_path / "manifest.json")
    assert [f["file"] for f in manifest["files"]] == [
        "probabilities_z1p5.csv", "probabilities_z3.csv", "probabilities_z4p5.csv",
    ]
    rows = _rows(tmp_path / "probabilities_z3.csv")
    assert len(rows) == 121
    assert sum(float(r["probability"]) for r in rows) == pytest.approx(1.0, abs=1e-9)


def test_simulate_is_deterministic(tmp_path):
    a, b = tmp_path / "a", tmp_path / "b"
    cfg = CONFIGS / "chain" / "curved.json"
    assert _run("simulate", "--config", cfg, "--out", a) == 0
    assert _run("simulate", "--config", cfg, "--out", b, "--threads", "3") == 0
    names = sorted(p.name for p in a.iterdir())
    assert names == sorted(p.name for p in b.iterdir())
    for name in names:
        assert (a / name).read_bytes() == (b / name).read_bytes()


def test_simulate_integrator_checks(tmp_path):
    assert _run("simulate", "--config", CONFIGS / "chain" / "curved.json", "--out", tmp_path) == 0
    checks = _json(tmp_path / "manifest.json")["integrator_checks"]
    assert [c["z_cm"] for c in checks] == [1.5, 3.0, 4.5]
    assert all(0.0 <= c["tv_integrator"] <= 1.0 for c in checks)


def test_simulate_triangular(tmp_path):
    assert _run("simulate", "--config", CONFIGS / "triangular" / "curved.json", "--out", tmp_path) == 0
    manifest = _json(tmp_path / "manifest.json")
    assert manifest["dimension"] == "2D"
    assert manifest["n_sites"] == 3 * 14 * 15 + 1


def test_empty_scan_is_configuration_error(tmp_path):
    doc = _json(CONFIGS / "chain" / "straight.json")
    doc["scan"] = {"z_cm": []}
    assert _run("simulate", "--config", _write_config(tmp_path, doc), "--out", tmp_path / "out") == 2


def test_unknown_key_is_configuration_error(tmp_path):
    doc = _json(CONFIGS / "chain" / "straight.json")
    doc["lattice"]["colour"] = "red"
    assert _run("simulate", "--config", _write_config(tmp_path, doc), "--out", tmp_path / "out") == 2


def test_lattice_too_small(tmp_path):
    doc = _json(CONFIGS / "chain" / "straight.json")
    doc["lattice"]["n_sites"] = 21
    assert _run("simulate", "--config", _write_config(tmp_path, doc), "--out", tmp_path / "out") == 2


@pytest.mark.parametrize("config, section, size", [
    ("chain/straight.json", "n_sites", 2),
    ("triangular/straight.json", "radius_shells", 1),
])
def test_lattice_without_edge_sites_is_too_small(tmp_path, config, section, size):
    doc = _json(CONFIGS / config)
    doc["lattice"][section] = size
    assert _run("simulate", "--config", _write_config(tmp_path, doc), "--out", tmp_path / "out") == 2


def test_missing_config(tmp_path):
    assert _run("simulate", "--out", tmp_path) == 2


def test_accuracy_error_exit_code(tmp_path, monkeypatch):
    def broken(cfg, ctx):
        raise AccuracyError("deriva")

    monkeypatch.setitem(orchestrator.COMMANDS, "simulate", broken)
    assert _run("simulate", "--config", CONFIGS / "chain" / "straight.json", "--out", tmp_path) == 3


def test_missing_config_file(tmp_path):
    assert _run("simulate", "--config", tmp_path / "absent.json", "--out", tmp_path) == 4


# ============================================================================
# VARIANCE-SCAN
# ============================================================================

def test_variance_scan_chain(tmp_path):
    assert _run("variance-scan", "--config", CONFIGS / "chain" / "variance.json", "--out", tmp_path) == 0
    rows = {float(r["z"]): r for r in _rows(tmp_path / "variance_1D.csv")}
    for z in (2.0, 4.0):
        assert float(rows[z]["ratio"]) == pytest.approx(CHAIN_J0**2, rel=2e-2)
        assert float(rows[z]["sigma2_simulated"]) == pytest.approx(float(rows[z]["sigma2_analytic"]), rel=5e-3)
        assert float(rows[z]["sigma2_uv"]) == pytest.approx(float(rows[z]["sigma2_analytic"]), rel=1e-6)

    curve = _rows(tmp_path / "variance_curve_1D.csv")
    assert list(curve[0]) == ["z", "sigma2", "error", "axis"]
    assert [float(r["sigma2"]) for r in curve] == [float(rows[z]["sigma2_simulated"]) for z in sorted(rows)]
    assert {r["axis"] for r in curve} == {"1D"}
    assert all(r["error"] == "" for r in curve)
    straight = _rows(tmp_path / "variance_curve_1D_straight.csv")
    assert [float(r["sigma2"]) for r in straight] == [float(rows[z]["sigma2_straight"]) for z in sorted(rows)]

    fit = _json(tmp_path / "ballistic_fit.json")["axes"]["1D"]
    assert fit["fit_straight"]["slope"] == pytest.approx(math.sqrt(2.0), rel=1e-2)
    assert fit["slope_ratio"] == pytest.approx(CHAIN_J0, abs=1e-3)
    assert fit["fit"]["ballistic"] is True
    assert fit["ballistic_rate_straight"] == pytest.approx(2.0)


def test_variance_scan_triangular(tmp_path):
    doc = {
        "physical": {"n0": 1.503, "lambda_um": 0.78, "d_um": 15.0},
        "lattice": {"kind": "triangular", "radius_shells": 10},
        "profile": {"kind": "sinusoidal", "amplitude_um": 14.4, "period_cm": 2.0},
        "coupling": {"couplings": {"d": 0.5, "sqrt3d": 0.06, "2d": 0.015}},
        "scan": {"z_cm": [0.25, 0.5, 0.75]},
    }
    out = tmp_path / "out"
    assert _run("variance-scan", "--config", _write_config(tmp_path, doc), "--out", out) == 0
    assert (out / "variance_horizontal.csv").exists()
    assert (out / "variance_vertical.csv").exists()
    assert (out / "variance_curve_horizontal.csv").exists()
    assert (out / "variance_curve_vertical_straight.csv").exists()
    axes = _json(out / "ballistic_fit.json")["axes"]
    assert axes["vertical"]["ballistic_rate"] > axes["horizontal"]["ballistic_rate"]
    assert axes["vertical"]["ballistic_rate_straight"] > axes["vertical"]["ballistic_rate"]


# ============================================================================
# LOCALIZATION-SCAN
# ============================================================================

def test_localization_scan(tmp_path):
    assert _run("localization-scan", "--config", CONFIGS / "localization" / "localization.json", "--out", tmp_path) == 0
    rows = {float(r["amplitude_um"]): r for r in _rows(tmp_path / "localization_scan.csv")}
    assert float(rows[0.0]["c_eff_factor"]) == 1.0
    assert float(rows[30.0]["return_probability"]) >= 0.99
    assert float(rows[30.3]["return_probability_integrator"]) >= 0.99

    summary = _json(tmp_path / "localization_summary.json")
    assert summary["min_factor_amplitude_um"] == 30.3
    assert summary["localizing_amplitude_um"] == pytest.approx(30.30, abs=0.01)
    report = summary["coupling_report"]
    assert report["predicted"] == pytest.approx(0.00188, abs=2e-5)
    assert report["measured"] == 0.02


# ============================================================================
# MEMORY
# ============================================================================

def test_curved_then_straight_matches_reference(tmp_path):
    assert _run("memory", "--config", CONFIGS / "localization" / "curved_straight.json", "--out", tmp_path) == 0
    summary = _json(tmp_path / "memory_summary.json")
    assert summary["reference"]["length_cm"] == 2.0
    assert summary["reference"]["relative_difference"]["1D"] <= 0.02
    assert (tmp_path / "memory_boundary_0.csv").exists()
    assert (tmp_path / "memory_boundary_1.csv").exists()


def test_straight_then_curved_freezes(tmp_path):
    assert _run("memory", "--config", CONFIGS / "localization" / "straight_curved.json", "--out", tmp_path) == 0
    summary = _json(tmp_path / "memory_summary.json")
    assert summary["tv_final_vs_previous_boundary"] <= 1e-6


def test_single_straight_segment_matches_simulate(tmp_path):
    base = {
        "physical": {"n0": 1.503, "lambda_um": 0.81, "d_um": 13.0},
        "lattice": {"kind": "chain", "n_sites": 41},
    }
    mem = dict(base, segments=[{"length_cm": 2.0, "profile": {"kind": "straight"}}])
    sim = dict(base, scan={"z_cm": [2.0]})
    assert _run("memory", "--config", _write_config(tmp_path, mem, "mem.json"), "--out", tmp_path / "mem") == 0
    assert _run("simulate", "--config", _write_config(tmp_path, sim, "sim.json"), "--out", tmp_path / "sim") == 0
    p_mem = [float(r["probability"]) for r in _rows(tmp_path / "mem" / "memory_boundary_0.csv")]
    p_sim = [float(r["probability"]) for r in _rows(tmp_path / "sim" / "probabilities_z2.csv")]
    assert np.max(np.abs(np.array(p_mem) - np.array(p_sim))) < 1e-12


# ============================================================================
# GSTATS
# ============================================================================

def test_gstats_source(tmp_path):
    assert _run("gstats", "--config", CONFIGS / "gstats" / "source.json", "--out", tmp_path) == 0
    report = _json(tmp_path / "g2_report.json")
    assert report["cauchy_schwarz"]["n_sigma"] == pytest.approx(70.8, abs=0.05)
    assert report["quoted_n_sigma"] == 1303


def test_gstats_after_chip(tmp_path):
    assert _run("gstats", "--config", CONFIGS / "gstats" / "after_chip.json", "--out", tmp_path) == 0
    assert _json(tmp_path / "g2_report.json")["cauchy_schwarz"]["n_sigma"] == pytest.approx(7.95, abs=0.01)


def test_gstats_counts_flag(tmp_path):
    counts = tmp_path / "counts.csv"
    counts.write_text("n_x,n_y,n_xy,T,tau\n1000,1000,10,100,0.001\n", encoding="utf-8")
    assert _run("gstats", "--counts", counts, "--out", tmp_path / "out") == 0
    assert _json(tmp_path / "out" / "g2_report.json")["rows"][0]["g2"] == pytest.approx(1.0)


def test_gstats_malformed_csv(tmp_path):
    counts = tmp_path / "counts.csv"
    counts.write_text("n_x,n_y,n_xy,T,tau\n1000,abc,10,100,0.001\n", encoding="utf-8")
    assert _run("gstats", "--counts", counts, "--out", tmp_path / "out") == 4


def test_gstats_synthetic_poisson(tmp_path):
    assert _run("gstats", "--config", CONFIGS / "gstats" / "poisson.json", "--out", tmp_path, "--seed", "12345") == 0
    report = _json(tmp_path / "g2_report.json")
    assert len(report["rows"]) == 100
    inside = sum(abs(r["g2"] - 1.0) <= 3 * r["stddev"] for r in report["rows"])
    assert inside >= 95
    assert report["synthetic"]["seed"] == 12345


def test_gstats_without_input(tmp_path):
    assert _run("gstats", "--out", tmp_path) == 2


# ============================================================================
# INGEST
# ============================================================================

def test_ingest_synthetic_frame(tmp_path):
    lattice = build_lattice_1d(11, 15.0)
    mask = mask_from_lattice(lattice, px_per_um=1.0, origin_px=(115.0, 45.0), radius_px=6.0)
    m = np.arange(-5, 6)
    truth = jv(m, 2.0) ** 2
    truth /= truth.sum()
    frame = FrameRenderer(sigma_px=1.5, offset=1000.0).render_field(230, 60, mask, truth, 1e5)

    (tmp_path / "lattice.json").write_text(json.dumps(lattice_to_json(lattice)), encoding="utf-8")
    (tmp_path / "mask.json").write_text(dump_mask(mask), encoding="utf-8")
    (tmp_path / "frame_a.txt").write_text(dump_frame(frame), encoding="utf-8")
    doc = {"ingest": {"frames": ["frame_a.txt"], "mask": "mask.json", "lattice_json": "lattice.json"}}

    out = tmp_path / "out"
    assert _run("ingest", "--config", _write_config(tmp_path, doc), "--out", out) == 0
    rows = _rows(out / "ingest_frame_a_probabilities.csv")
    assert [int(r["site_id"]) for r in rows] == list(range(11))
    p = np.array([float(r["probability"]) for r in rows])
    assert 0.5 * np.abs(p - truth).sum() <= 1e-2

    bars = _json(out / "ingest_report.json")["frames"][0]["variance"]["1D"]
    assert bars["mean"] == pytest.approx(float(np.dot(m * m, truth)), rel=2e-2)
    assert len(bars["strategies"]) == 3


def test_ingest_missing_frame(tmp_path):
    lattice = build_lattice_1d(3, 15.0)
    (tmp_path / "lattice.json").write_text(json.dumps(lattice_to_json(lattice)), encoding="utf-8")
    mask = mask_from_lattice(lattice, 1.0, (100.0, 45.0), 6.0)
    (tmp_path / "mask.json").write_text(dump_mask(mask), encoding="utf-8")
    doc = {"ingest": {"frames": ["absent.txt"], "mask": "mask.json", "lattice_json": "lattice.json"}}
    assert _run("ingest", "--config", _write_config(tmp_path, doc), "--out", tmp_path / "out") == 4
