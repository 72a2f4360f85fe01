"""Smoke tests of the python bindings: a thin pass over every exposed surface."""

import math

import pytest

import busyq


def test_service_models():
    const = busyq.ServiceModel.constant(1.0)
    assert const.df(0.5) == 0.0
    assert const.df(1.5) == 1.0
    assert const.mean() == pytest.approx(1.0)

    family = busyq.ServiceModel.beta_const(1.0, 1.0, 0.0)
    assert family.df(1.0) == pytest.approx(0.61269983678, abs=1e-9)
    assert family.atom() == pytest.approx(math.exp(-1.0))
    assert family.mean() == pytest.approx(1.0)

    general = busyq.ServiceModel.beta_general(1.0, 1.0, lambda u: 0.1 * math.exp(-u))
    assert general.mean() == pytest.approx(1.0)

    empirical = busyq.ServiceModel.empirical(lambda t: -math.expm1(-t), 0.0)
    assert empirical.mean() == pytest.approx(1.0, abs=1e-7)

    with pytest.raises(busyq.BusyqError):
        busyq.ServiceModel.beta_const(1.0, 1.0, 5.0)


def test_transform_and_moments():
    q = busyq.QueueModel(1.0, busyq.ServiceModel.beta_const(1.0, 1.0, 0.0))
    bt = busyq.BusyTransform(q)
    assert bt.closed_form
    assert bt.eval_real(0.0) == 1.0
    assert bt.eval_real(1.0) == pytest.approx(0.53788284274, abs=1e-9)
    assert busyq.mean_busy_period(q) == pytest.approx(math.e - 1.0)

    result = busyq.busy_moments(q, 3)
    closed = busyq.beta_family_moments(1.0, 1.0, 0.0, 3)
    for got, want in zip(result["moments"], closed):
        assert got == pytest.approx(want, rel=1e-7)


def test_busy_laws():
    assert busyq.beta_const_busy_df(1.0, 1.0, 0.0, 1.0) == pytest.approx(
        0.562445752488, abs=1e-9
    )
    q = busyq.QueueModel(1.0, busyq.ServiceModel.exponential(1.0))
    law = busyq.general_busy_density(q, step=0.01, horizon=45.0)
    assert law.mean() == pytest.approx(math.e - 1.0, abs=0.02)
    assert law.df(1e9) == pytest.approx(1.0, abs=1e-3)

    compound = busyq.ConstantBusyLaw(1.0, 1.0)
    assert compound.mean() == pytest.approx(math.e - 1.0)
    stream = busyq.Stream(7)
    draws = [compound.sample(stream) for _ in range(20000)]
    assert sum(draws) / len(draws) == pytest.approx(math.e - 1.0, rel=0.05)


def test_inversion_round_trip():
    value = busyq.invert(lambda s: 1.0 / (s + 1.0), 1.0)
    assert value == pytest.approx(math.exp(-1.0), abs=1e-8)

    grid = [0.5, 1.0, 2.0]
    out = busyq.invert_df(lambda s: 1.0 / (s * (1.0 + s) ** 2), grid)
    for t, v in zip(grid, out["values"]):
        assert v == pytest.approx(1.0 - (1.0 + t) * math.exp(-t), abs=1e-6)


def test_tail_analysis():
    w = 1.0 - math.exp(-1.0)
    r = math.exp(-1.0)
    tail = busyq.recover_service_tail(lambda s: w / (s + r), 1.0, 1.0, [0.5, 1.0])
    assert tail[1] == pytest.approx(0.387300, abs=1e-3)

    report = busyq.check_feasibility(
        lambda t: 0.5 * math.exp(-t), math.log(2.0), [0.5, 1.0, 5.0, 15.0, 20.0]
    )
    assert report["verdict"] == "FAIL"


def test_network():
    net = busyq.parse_network_json(
        """{"nodes": [{"lambda": 1.0, "service": {"kind": "exponential", "rate": 1.0}},
                      {"lambda": 0.0, "service": {"kind": "exponential", "rate": 1.0}}],
            "routing": [[0.0, 1.0], [0.0, 0.0]]}"""
    )
    assert busyq.solve_traffic(net) == pytest.approx([1.0, 1.0])
    st = busyq.SojournTransform(net)
    assert st.eval_real(1.0) == pytest.approx(0.25)
    moments = busyq.sojourn_moments(st)
    assert moments["mean"] == pytest.approx(2.0, abs=1e-4)

    df = st.invert_df([1.0, 2.0])
    assert df[0] == pytest.approx(1.0 - 2.0 * math.exp(-1.0), abs=1e-6)

    sojourns = busyq.simulate_network(net, 20000, seed=3)
    mean = sum(sojourns) / len(sojourns)
    assert mean == pytest.approx(2.0, rel=0.05)


def test_simulation_against_formula():
    q = busyq.QueueModel(1.0, busyq.ServiceModel.exponential(1.0))
    sample = busyq.simulate_queue(q, periods=20000, seed=11)
    mean = sum(sample["busy"]) / len(sample["busy"])
    assert mean == pytest.approx(math.e - 1.0, rel=0.05)

    ks = busyq.ks_distance(
        sample["busy"],
        lambda t: 0.0 if t < 0 else busyq.beta_const_busy_df(1.0, 1.0, 0.0, t),
    )
    assert ks > 0.01  # wrong law is detected

    # reproducibility across calls
    again = busyq.simulate_queue(q, periods=20000, seed=11)
    assert sample["busy"][:10] == again["busy"][:10]
