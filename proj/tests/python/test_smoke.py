import math
import os

import pytest

import layercode

DATA = os.path.join(os.path.dirname(__file__), "..", "..", "data")


def code(name):
    return layercode.load_css(os.path.join(DATA, name))


@pytest.fixture(scope="module")
def c422():
    return layercode.build_layer_code(code("c422.txt"), 2)


def test_build_and_validate(c422):
    assert c422.layer_counts() == {"grey": 4, "blue": 1, "red": 1}
    assert c422.k == 2
    rep = layercode.validate(c422, 2)
    assert rep["ok"] and rep["commutes"]


def test_round_trip(c422):
    back = layercode.deserialize_lattice(c422.serialize())
    assert back.hx == c422.hx and back.hz == c422.hz


def test_decode_single_flips(c422):
    for q in range(0, c422.num_qubits, 17):
        m, e = layercode.syndrome(c422, x=[q], z=[q])
        out = layercode.decode(c422, m, e)
        x = sorted(set(out["x"]) ^ {q})
        z = sorted(set(out["z"]) ^ {q})
        assert layercode.syndrome(c422, x=x, z=z) == ([], [])
        assert layercode.logical_failure_mask(c422, x, z) == 0


def test_empty_syndrome(c422):
    out = layercode.decode(c422, [], [])
    assert out["x"] == [] and out["z"] == []


def test_barrier_and_budget(c422):
    barrier, path = layercode.energy_barrier(c422, "X")
    assert barrier == 1 and path
    with pytest.raises(layercode.BudgetExceeded):
        layercode.energy_barrier(c422, "X", state_budget=10)


def test_rates_and_bounds():
    assert layercode.rate(1.5, -2.0) == 1.0
    assert layercode.rate(1.5, 2.0) == pytest.approx(math.exp(-3.0))
    b = layercode.bounds(0.5, 2.0, 4, 2, 50, 4, t=0.0)
    assert b["eps_bound_log"] == -math.inf


def test_memory_time_smoke(c422):
    cells = layercode.memory_time(c422, [0.5], t_max=5.0, checkpoints=4, trajectories=30, seed=3)
    assert len(cells) == 1 and len(cells[0]["times"]) == 4


def test_parse_error():
    with pytest.raises(layercode.ParseError):
        layercode.parse_css("n 2 xchecks 1 zchecks 0\n1z\n")
    with pytest.raises(ValueError):
        layercode.rate(1.0, 1.0, "arrhenius")
