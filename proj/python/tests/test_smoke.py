import math

import pytest

import ordcap


def test_arrival_transform():
    assert ordcap.ArrivalModel.poisson(0.2).lst(0.5) == pytest.approx(0.2 / 0.7)
    assert ordcap.ArrivalModel.gamma(2.0, 0.4).lst(0.3) == pytest.approx((0.8 / 1.1) ** 2)


def test_erlang_b():
    chain = ordcap.OverflowChain(ordcap.ArrivalModel.poisson(0.2), ordcap.Allocation(1.0, [0.5, 0.5]))
    p = ordcap.blocking_probabilities(chain, 2)
    assert p[0] == pytest.approx(0.2 / 0.7)
    assert p[1] == pytest.approx(0.054054, rel=1e-5)
    assert chain.mean_overflow_time(1) == pytest.approx(17.5)


def test_metrics_and_feasibility():
    model = ordcap.ArrivalModel.poisson(0.2)
    chain = ordcap.OverflowChain(model, ordcap.geometric_allocation(0.5, 1.0, 10))
    m = ordcap.compute_metrics(chain, 10)
    assert len(m.p) == 11 and m.p[0] == 1.0
    assert math.isfinite(m.delay_total)
    assert ordcap.is_feasible(chain, 10)["verdict"] == "feasible"
    assert ordcap.max_first_rate(model, 1.0) == pytest.approx(0.965685, rel=1e-6)


def test_tap_and_crossing():
    tap = ordcap.tap_solution(0.25, 1.0, 5)
    assert tap.prefix == pytest.approx([0.5 * 0.5**n for n in range(5)])
    assert ordcap.ell_crossing_alpha(ordcap.ArrivalModel.poisson(0.2), 1.0) == pytest.approx(1 - math.sqrt(0.2), rel=1e-6)


def test_small_optimization():
    result = ordcap.optimize_allocation(ordcap.ArrivalModel.poisson(0.3), 1.0, horizon=4, restarts=0)
    assert result.allocation.is_non_increasing()
    assert all(b <= a for a, b in zip(result.trace, result.trace[1:]))


def test_simulation():
    r = ordcap.simulate(ordcap.ArrivalModel.poisson(0.2), [0.5], arrivals=200_000, warmup=1_000, seed=3)
    assert abs(r.p_hat[0] - 0.2 / 0.7) <= 4 * r.p_se[0]


def test_errors_and_experiment(tmp_path):
    with pytest.raises(ordcap.DomainError):
        ordcap.ArrivalModel.gamma(-1.0, 1.0)
    with pytest.raises(ordcap.Error):
        ordcap.Allocation(1.0, [0.3, 0.5])
    code, _, errors = ordcap.run_experiment("mode = metrics\nallocation.alpha = 0.5\n", str(tmp_path))
    assert code == 1 and "arrival.lambda" in errors
    code, _, _ = ordcap.run_experiment("mode = metrics\narrival.lambda = 0.2\nallocation.alpha = 0.5\n", str(tmp_path))
    assert code == 0
    assert len((tmp_path / "metrics.csv").read_text().splitlines()) == 16
