import math

import pytest

import multab


def test_counts():
    assert multab.count_a([4, 4]) == 9
    assert multab.count_a([2, 2, 2]) == 4
    assert multab.count_h(20, [2], [4]) == 10
    assert multab.count_h(20, [2], [4], squarefree=True) == 3


def test_count_a_matches_python_set():
    sides = [37, 41]
    assert multab.count_a(sides) == len({a * b for a in range(1, 38) for b in range(1, 42)})


def test_budget_raises():
    with pytest.raises(multab.ResourceLimit):
        multab.count_a([100000, 100000], budget_bits=1000)


def test_geometry():
    assert multab.tau_chain([2, 3]) == 6
    assert multab.l_volume([2]) == pytest.approx(math.log(4))


def test_constants_and_prediction():
    assert multab.alpha_seq(1) == pytest.approx(0.528766373, abs=1e-8)
    assert multab.q(math.e) == pytest.approx(1.0)
    alpha, residual = multab.solve_alpha([1.0, 2.0])
    assert residual < 1e-10
    p = multab.predict([100, 1000])
    assert set(p["densities"]) == {"general", "small_k", "large_k", "equal_size"}
    with pytest.raises(ValueError):
        multab.q(0.0)


def test_order_statistics_and_poisson():
    assert multab.qr_exact(2, 1, 2) == pytest.approx(0.75)
    assert multab.gr_sum(2, 0, 2) == pytest.approx(1.5)
    assert multab.slab_prob([1.0], [1.0], 1.0) == pytest.approx(math.exp(-1))
    assert multab.alpha_r([1.0], [1.0], math.e) == pytest.approx(1.0)


def test_experiment_and_suite():
    rows = multab.run_experiment({"experiment": "E3", "x": [2000, 4000], "y": [[10]]}, with_meta=False)
    assert [r["params"]["x"] for r in rows] == [2000, 4000]
    assert all(r["status"] == "ok" and r["values"]["ratio"] > 0 for r in rows)
    assert "meta" not in rows[0]
    assert multab.run_suite("constants")["passed"]
    with pytest.raises(ValueError):
        multab.run_experiment({"experiment": "E1", "log2_n": []})
