"""Shared fixtures: the application-management toy log and random generators."""

from __future__ import annotations

from datetime import datetime, timedelta

import numpy as np

from flowtime import (
    END,
    START,
    EventLog,
    GaussianMixture,
    SemiMarkovFlow,
    StateKey,
    WaitingTimeModel,
    parse_event_log,
)

TOY_CSV = """case,activity,timestamp
1,Claim,2022-06-17 14:53:03
2,Claim,2022-06-17 17:33:47
1,Assign,2022-06-18 12:38:30
2,Resolve,2022-06-19 09:46:03
2,Close,2022-06-19 18:57:52
1,Resolve,2022-06-20 10:37:52
1,Close,2022-06-20 19:41:23
2,Resolve,2022-06-21 18:14:51
3,Assign,2022-06-21 22:56:05
3,Resolve,2022-06-22 11:09:43
2,Close,2022-06-22 17:49:46
3,Close,2022-06-22 22:58:02
"""

# per-transition waiting-time samples of the toy log, in seconds
TOY_EDGE_SAMPLES_S = {
    ("Claim", "Assign"): [78327],
    ("Claim", "Resolve"): [144736],
    ("Assign", "Resolve"): [165562, 44018],
    ("Resolve", "Close"): [32611, 33109, 84895, 42499],
    ("Close", "Resolve"): [170219],
}

TOY_DURATIONS_S = [276500.0, 432959.0, 86517.0]
TOY_MEAN_S = sum(TOY_DURATIONS_S) / 3.0  # 265325.333...


def toy_log() -> EventLog:
    return parse_event_log(TOY_CSV)


def key(*names: str) -> StateKey:
    return StateKey(window=tuple(names))


def random_log(rng: np.random.Generator, n_traces: int | None = None,
               n_activities: int | None = None, max_len: int = 10) -> EventLog:
    """A log of random traces; zero increments exercise the tiebreak rule."""
    n_traces = n_traces if n_traces is not None else int(rng.integers(3, 51))
    n_acts = n_activities if n_activities is not None else int(rng.integers(2, 9))
    acts = [f"A{i}" for i in range(n_acts)]
    rows = ["case,activity,timestamp"]
    base = datetime(2022, 1, 1)
    for c in range(n_traces):
        length = int(rng.integers(1, max_len + 1))
        t = base + timedelta(seconds=int(rng.integers(0, 100_000)))
        for _ in range(length):
            rows.append(f"{c},{acts[int(rng.integers(0, n_acts))]},{t:%Y-%m-%d %H:%M:%S}")
            t += timedelta(seconds=int(rng.integers(0, 200_000)))
    return parse_event_log("\n".join(rows) + "\n")


def build_flow(states: list[StateKey], edges: dict[tuple[int, int], tuple[float, GaussianMixture]],
               k: int = 1) -> SemiMarkovFlow:
    """Assemble a flow from explicit (probability, mixture) edges."""
    P: dict[int, dict[int, float]] = {}
    times: dict[tuple[int, int], WaitingTimeModel] = {}
    for (u, v), (p, g) in edges.items():
        P.setdefault(u, {})[v] = p
        times[(u, v)] = WaitingTimeModel(samples=[], running_mean=g.mean(), fitted=g)
    flow = SemiMarkovFlow(
        states=states, P=P, edge_times=times,
        start=states.index(START), end=states.index(END), k=k,
    )
    flow.validate()
    return flow


def random_point_mass_flow(rng: np.random.Generator, n_interior: int | None = None,
                           max_mean_hours: int = 10, cyclic: bool = False) -> SemiMarkovFlow:
    """Random flow with integer point-mass edge times.

    A chain backbone keeps every state on a start-to-end path; random
    extra edges (including at most one self-loop per state, probability
    <= 1/3 by construction) add branching. With ``cyclic`` the extras may
    also point backwards; exact (threshold-0) reduction of such flows
    nests self-loop closures, which only stays tractable with pruning, so
    threshold-0 properties use the acyclic shape.
    """
    n = n_interior if n_interior is not None else int(rng.integers(1, 7))
    states = [START] + [key(f"S{i}") for i in range(n)] + [END]
    start, end = 0, n + 1
    counts: dict[int, dict[int, float]] = {}

    def bump(u: int, v: int, c: float) -> None:
        counts.setdefault(u, {})
        counts[u][v] = counts[u].get(v, 0.0) + c

    bump(start, 1, 2.0)
    for i in range(1, n):
        bump(i, i + 1, 2.0)
    bump(n, end, 2.0)
    for _ in range(int(rng.integers(0, 2 * n + 1))):
        u = int(rng.integers(1, n + 1))
        v = int(rng.integers(1, n + 2)) if cyclic else int(rng.integers(u, n + 2))
        if u == v and counts.get(u, {}).get(u):
            continue  # at most one unit of self-loop weight per state
        bump(u, v, 1.0)
    bump(end, start, 1.0)

    edges: dict[tuple[int, int], tuple[float, GaussianMixture]] = {}
    for u, row in counts.items():
        total = sum(row.values())
        for v, c in row.items():
            if u == start or v == end or u == end:
                mean = 0.0
            else:
                mean = float(rng.integers(0, max_mean_hours + 1))
            edges[(u, v)] = (c / total, GaussianMixture.point_mass(mean))
    return build_flow(states, edges)
