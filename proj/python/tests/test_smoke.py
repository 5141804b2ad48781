import math

import pytest

import shortpath_lab as sl

SMALL = {
    "problem": {"cost": "maxcut-hamming", "graph": {"model": "erdos-renyi", "edge_rule": "constant", "edge_value": 0.5}},
    "chain": {"kind": "transposition-walk"},
    "instances_per_n": 2,
    "seed": 11,
}


def test_g_eta():
    assert sl.g_eta(-0.8, 0.5) == pytest.approx(-0.6)
    assert sl.g_eta(-0.2, 0.5) == 0.0


def test_solve_at_zero_b():
    out = sl.solve(SMALL, n=10, b=0.0)
    assert out["instance"]["M"] == 120
    m = out["metrics"]
    assert m["overlap_init"] == pytest.approx(1.0, abs=1e-9)
    assert m["overlap_opt"] ** 2 == pytest.approx(out["instance"]["pi_estar"], rel=1e-9)


def test_solve_with_conditions():
    out = sl.solve(SMALL, n=9, b=0.5, conditions=True)
    c = out["conditions"]
    assert c["delta_p_eta"] <= c["delta_tilde"] + 1e-12
    assert c["omega_source"] == "delta"


def test_run_and_fit():
    cfg = dict(SMALL, n={"from": 8, "to": 11}, b_policy={"kind": "fixed", "b": [0.5]})
    csv, failures = sl.run(cfg)
    assert failures == []
    lines = csv.strip().split("\n")
    assert lines[0] == sl.CSV_HEADER
    assert len(lines) == 1 + 4 * 2
    assert csv == sl.run(cfg)[0]
    fit = sl.fit_csv(csv)
    assert fit["ci95"][0] <= fit["exponent"] <= fit["ci95"][1]
    assert len(fit["points"]) == 4


def test_exact_power_law():
    sizes = [2.0 ** i for i in range(4, 12)]
    fit = sl.fit_power_law(sizes, [s ** 0.4 for s in sizes])
    assert fit["exponent"] == pytest.approx(0.4, abs=1e-12)
    assert fit["stderr"] < 1e-12


def test_phase_b():
    r = sl.phase_b(SMALL, n=12)
    assert 0.0 < r["b"] < 2.0
    assert not r["saturated"]


def test_generate_graph_is_deterministic():
    a = sl.generate_graph(SMALL, n=8, instance=3)
    assert a == sl.generate_graph(SMALL, n=8, instance=3)
    assert a != sl.generate_graph(SMALL, n=8, instance=4)


def test_theory_helpers():
    assert sl.b_star_poincare(1.0) == pytest.approx(0.8798, abs=1e-4)
    assert sl.predicted_exponent(0.3, 0.5, -10.0, math.exp(-10.0), 1.0) == pytest.approx(0.4625)


def test_errors_are_typed():
    with pytest.raises(sl.ValidationError):
        sl.solve(dict(SMALL, eta=1.5), n=8)
    with pytest.raises(sl.SplabError):
        sl.run({"n": [8]})


def test_verify_fast():
    report = sl.verify()
    assert report["pass"], report
