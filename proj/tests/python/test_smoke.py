import numpy as np
import relaylab as rl


def test_csi_quality():
    assert rl.csi_quality(1, 1.0) == 0.5
    assert abs(rl.csi_quality(100, 0.01) - 0.5) < 1e-15


def test_scaling_report_table():
    assert rl.scaling_report("1", "0", "0", "0")["r_s"] == "0"
    assert rl.scaling_report("0", "0", "0", "1/2")["r_s"] == "1/2"
    rep = rl.scaling_report()
    assert rep["linear_regime"] and rep["r_s"] == "1"


def test_simulate_deterministic():
    p = rl.make_params(64, 4, 10.0, 10.0, 0.8)
    a = rl.simulate(p, 64, seed=7)
    b = rl.simulate(p, 64, seed=7)
    assert np.array_equal(a["sinr"], b["sinr"])
    assert (a["sinr"] > 0).all()
    c = rl.simulate(p, 64, seed=8)
    assert not np.array_equal(a["sinr"], c["sinr"])


def test_estimate_shapes_and_variance():
    est = rl.mmse_estimate_direct(200, 4, 0.8, seed=1)
    assert est["F_hat"].shape == (200, 4)
    assert est["G_hat"].shape == (4, 200)
    v = np.mean(np.abs(est["F_hat"]) ** 2)
    assert abs(v - 0.8) < 0.1


def test_interference_pdf_normalizes():
    p = rl.make_params(200, 10, 10.0, 10.0, 0.8)
    y = np.linspace(0, 8, 4001)
    f = rl.interference_pdf(y, p)
    assert abs(np.trapz(f, y) - 1.0) < 1e-3
    assert np.allclose(f, rl.interference_pdf(y, p, form="series"), atol=1e-10)


def test_outage_and_aber_scalars():
    p = rl.make_params(200, 8, 10.0, 10.0, 0.95)
    po = rl.outage_probability(10 ** 0.8, p)
    assert 0.0 < po["value"] < 1.0
    a = rl.aber(p)
    assert 0.0 < a["value"] < 0.5
    assert a["bridge_gamma_th"] > 0.0


def test_rate_lower_bound_example():
    p = rl.make_params(200, 10, 1.0, 1.0, 0.5)
    tilde, clb = rl.rate_lower_bound(p)
    assert abs(tilde - 1 / 0.332) < 1e-9
    assert abs(clb - 1.0021695) < 1e-5
