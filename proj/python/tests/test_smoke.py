import json
import math

import numpy as np
import pytest

import risuav


def test_fspl_and_geometry():
    assert risuav.path_loss_fspl(101.98, 2e9) == pytest.approx(
        20 * math.log10(4 * math.pi * 101.98 * 2e9 / 299792458.0), rel=1e-12
    )
    g = risuav.SystemGeometry()
    sites = risuav.element_positions(g, 400)
    assert sites.shape == (400, 3)
    assert np.allclose(sites.mean(axis=0), g.uav_pos, atol=1e-9)
    with pytest.raises(risuav.DomainError):
        risuav.path_loss_fspl(0.0, 2e9)


def test_channel_parseval():
    p = risuav.ChannelParams()
    p.num_elements = 8
    real = risuav.draw_realization(risuav.SystemGeometry(), p, 11)
    taps = real.direct_taps
    assert len(taps) == 23
    freq = risuav.to_frequency_domain(real, 64)
    assert freq.cascade.shape == (64, 8)
    energy = sum(abs(g) ** 2 for _, g in taps)
    assert np.sum(np.abs(freq.direct) ** 2) == pytest.approx(64 * energy, rel=1e-9)


def test_rate_matches_closed_form():
    params = risuav.OfdmParams(64, 16, 1e7, 10.0)
    h = np.ones(64, dtype=complex)
    rate, snr = risuav.achievable_rate(h, 0.1, params)
    assert np.allclose(snr, 10.0)
    assert rate == pytest.approx(1e-6 * 64 / 80 * 1e7 / 64 * 64 * math.log2(11.0), rel=1e-12)


def test_optimizer_pipeline_against_brute_force():
    freq = risuav.random_frequency_channel(6, 3, 5)
    best = risuav.brute_force(freq, 16)
    out = risuav.configure_sdr(freq, risuav.SolverOptions(), 9)
    theta = out["theta"]
    assert np.allclose(np.abs(theta), 1.0, atol=1e-9)
    f_opt = risuav.power_objective(freq, best)
    assert risuav.power_objective(freq, theta) >= 0.95 * f_opt
    assert out["relaxation_objective"] >= f_opt * (1 - 1e-6)
    ones = risuav.unconfigured(3)
    assert risuav.power_objective(freq, theta) >= risuav.power_objective(freq, ones)

    r, subset = risuav.build_quadratic(freq, 6)
    assert r.shape == (4, 4)
    assert np.allclose(r, r.conj().T)
    assert list(subset) == list(range(6))
    sol = risuav.sdr_solve(r)
    assert sol["objective"] >= f_opt * (1 - 1e-6)

    refined = risuav.coordinate_ascent(ones, freq)
    assert risuav.power_objective(freq, refined) >= risuav.power_objective(freq, ones)


def test_sweep_and_results_roundtrip(tmp_path):
    cfg = {
        "channel": {"num_elements": 8, "num_subcarriers": 64},
        "trials": 3,
        "threads": 1,
        "sweep": {"variable": "snr", "values": [0, 10]},
    }
    rows, csv_text, resolved = risuav.run_sweep(cfg)
    assert csv_text.splitlines()[0] == (
        "sweep_var,value,method,rate_mbps_mean,rate_mbps_ci95,trials,master_seed"
    )
    assert len(rows) == 4
    assert resolved["trials"] == 3

    out = tmp_path / "snr.csv"
    risuav.write_sweep(out, cfg)
    assert out.read_text() == csv_text
    assert json.loads((tmp_path / "snr.csv.config.json").read_text()) == resolved
    assert risuav.read_results(str(out)) == rows

    with pytest.raises(risuav.ConfigError):
        risuav.run_sweep({"trails": 3})


def test_oracle_check():
    rep = risuav.oracle_check(seed=4, instances=10)
    assert rep["passed"]
    assert rep["worst_ratio"] >= 0.95
