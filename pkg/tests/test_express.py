"""Express analysis: stationary solve, Eq.-1 mean, log/model mean equality."""

import numpy as np
import pytest

from flowtime import (
    END,
    START,
    GaussianMixture,
    discover,
    limiting_probabilities,
    mean_execution_time,
    verify_mean_equality,
)
from flowtime.errors import SingularSystem
from flowtime.timefmt import dhms_to_seconds, format_seconds

from helpers import build_flow, key, random_log, random_point_mass_flow, toy_log

PM0 = GaussianMixture.point_mass(0.0)


def three_state_chain():
    """The aperiodic 3-state chain with stationary (2/5, 2/5, 1/5)."""
    states = [START, key("X"), END]
    return build_flow(
        states,
        {
            (0, 1): (1.0, PM0),
            (1, 0): (0.5, PM0),
            (1, 2): (0.5, PM0),
            (2, 0): (1.0, PM0),
        },
    )


def test_three_state_chain_limiting_probabilities():
    flow = three_state_chain()
    pi = limiting_probabilities(flow)
    np.testing.assert_allclose(pi, [0.4, 0.4, 0.2], atol=1e-12)


def test_three_state_chain_against_power_iteration():
    flow = three_state_chain()
    P = flow.dense_matrix()
    x = np.full(3, 1 / 3)
    for _ in range(10_000):
        x = x @ P
    np.testing.assert_allclose(limiting_probabilities(flow), x, atol=1e-9)


def test_two_state_flow_is_symmetric():
    flow = build_flow([START, END], {(0, 1): (1.0, PM0), (1, 0): (1.0, PM0)})
    np.testing.assert_allclose(limiting_probabilities(flow), [0.5, 0.5], atol=1e-12)


def test_toy_limiting_probabilities_exact():
    flow = discover(toy_log(), 1)
    pi = limiting_probabilities(flow)
    expected = {
        "START": 1 / 6, "Claim": 1 / 9, "Resolve": 2 / 9,
        "Close": 2 / 9, "Assign": 1 / 9, "END": 1 / 6,
    }
    for i, s in enumerate(flow.states):
        assert pi[i] == pytest.approx(expected[s.label], abs=1e-12)


def test_periodic_flow_solvable():
    # the direct solve must not assume aperiodicity: a 3-cycle has period 3
    flow = build_flow(
        [START, key("X"), END],
        {(0, 1): (1.0, PM0), (1, 2): (1.0, PM0), (2, 0): (1.0, PM0)},
    )
    np.testing.assert_allclose(limiting_probabilities(flow), [1 / 3, 1 / 3, 1 / 3], atol=1e-12)


def test_toy_mean_execution_time():
    flow = discover(toy_log(), 1)
    report = mean_execution_time(flow)
    assert report.overall_mean * 3600 == pytest.approx(265325.3333333333, abs=1e-6)
    assert format_seconds(report.overall_mean * 3600) == "3d 1h 42m 5s"
    assert abs(report.overall_mean * 3600 - dhms_to_seconds(3, 1, 42, 5)) <= 1.0
    # the overall mean is recomputable from the report fields
    mask = np.ones(len(report.pi), dtype=bool)
    mask[flow.end] = False
    recomputed = report.contributions[mask].sum() / report.start_pi
    assert recomputed == pytest.approx(report.overall_mean, rel=1e-12)


def test_zero_means_give_zero_mu():
    flow = three_state_chain()
    assert mean_execution_time(flow).overall_mean == 0.0


def test_halved_means_worked_example():
    # feeding the mean formula second-rounded halved state means lands on
    # the reference total within display rounding
    flow = discover(toy_log(), 1)
    report = mean_execution_time(flow)
    pi = {s.label: report.pi[i] for i, s in enumerate(flow.states)}
    means = {s.label: report.state_means[i] for i, s in enumerate(flow.states)}
    means["Claim"] *= 0.5
    means["Assign"] *= 0.5
    mu = sum(pi[n] * means[n] for n in pi if n != "END") / pi["START"]
    assert abs(mu * 3600 - dhms_to_seconds(2, 5, 40, 19)) <= 2.0


def test_scale_equivariance():
    rng = np.random.default_rng(10)
    flow = random_point_mass_flow(rng, n_interior=4)
    base = mean_execution_time(flow).overall_mean
    c = 3.25
    scaled = flow.copy()
    for e, model in scaled.edge_times.items():
        scaled.edge_times[e] = model.scaled(c)
    assert mean_execution_time(scaled).overall_mean == pytest.approx(c * base, rel=1e-12)


def test_pi_invariant_under_state_permutation():
    rng = np.random.default_rng(12)
    flow = random_point_mass_flow(rng, n_interior=4)
    pi = limiting_probabilities(flow)
    perm = rng.permutation(flow.n_states())
    inv = np.argsort(perm)
    from flowtime import SemiMarkovFlow, WaitingTimeModel
    permuted = SemiMarkovFlow(
        states=[flow.states[j] for j in inv],
        P={int(perm[u]): {int(perm[v]): p for v, p in row.items()} for u, row in flow.P.items()},
        edge_times={(int(perm[u]), int(perm[v])): m.copy() for (u, v), m in flow.edge_times.items()},
        start=int(perm[flow.start]),
        end=int(perm[flow.end]),
        k=flow.k,
    )
    pi2 = limiting_probabilities(permuted)
    for old, new in enumerate(perm):
        assert pi2[new] == pytest.approx(pi[old], abs=1e-12)


def test_singular_system_detected():
    # two disconnected cycles: not irreducible, bypassing validate()
    from flowtime import SemiMarkovFlow, WaitingTimeModel
    states = [START, key("X"), key("Y"), END]
    P = {0: {1: 1.0}, 1: {0: 1.0}, 2: {3: 1.0}, 3: {2: 1.0}}
    times = {e: WaitingTimeModel() for row_u, row in P.items() for e in [(row_u, v) for v in row]}
    flow = SemiMarkovFlow(states=states, P=P, edge_times=times, start=0, end=3, k=1)
    with pytest.raises(SingularSystem):
        limiting_probabilities(flow)


def visit_ratio_series(flow, r: int, tol: float = 1e-12, max_steps: int = 200_000) -> float:
    """Truncated sum over l of (P-hat^l)[start, r] with the end->start edge zeroed."""
    P = flow.dense_matrix()
    P[flow.end, flow.start] = 0.0
    x = np.zeros(flow.n_states())
    x[flow.start] = 1.0
    total = x[r]
    for _ in range(max_steps):
        x = x @ P
        total += x[r]
        if x.sum() < tol:
            return total
    raise AssertionError("series did not converge")


def test_visit_ratio_series_on_toy_flow():
    flow = discover(toy_log(), 1)
    pi = limiting_probabilities(flow)
    for r in range(flow.n_states()):
        assert pi[r] / pi[flow.start] == pytest.approx(visit_ratio_series(flow, r), abs=1e-6)


def test_log_model_mean_equality_toy():
    log = toy_log()
    for k in (1, 2):
        mu_model, mu_log, gap = verify_mean_equality(log, k)
        assert gap <= 1e-9
        assert mu_log * 3600 == pytest.approx(265325.3333333333, abs=1e-6)


def test_log_model_mean_equality_random_logs():
    rng = np.random.default_rng(13)
    for _ in range(20):
        log = random_log(rng)
        for k in (1, 2, 3, 4, 5):
            _, _, gap = verify_mean_equality(log, k)
            assert gap <= 1e-9
