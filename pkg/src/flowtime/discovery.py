"""k-order semi-Markov process-flow discovery from event logs.

States are windows of the last k activity names (shorter prefixes near a
trace's start), plus reserved START/END sentinels. Transition counts are
accumulated per trace and row-normalized; each traversed transition also
collects its waiting-time sample (timestamp delta, in hours).
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable

import numpy as np

from .errors import EmptyLog, InvalidOrder
from .eventlog import EventLog
from .gmm import POINT_MASS_ZERO, FitConfig, GaussianMixture, fit_waiting_time

_SENTINEL_ORDER = {"start": 0, None: 1, "end": 2}


@dataclass(frozen=True)
class StateKey:
    window: tuple[str, ...] = ()
    sentinel: str | None = None  # "start" | "end" | None

    def __post_init__(self):
        if self.sentinel is None and not self.window:
            raise ValueError("non-sentinel state needs a non-empty window")

    @property
    def is_sentinel(self) -> bool:
        return self.sentinel is not None

    def sort_key(self) -> tuple:
        return (_SENTINEL_ORDER[self.sentinel], self.window)

    @property
    def label(self) -> str:
        if self.sentinel == "start":
            return "START"
        if self.sentinel == "end":
            return "END"
        return ",".join(self.window)

    def to_json(self) -> str | list[str]:
        if self.is_sentinel:
            return self.label
        return list(self.window)

    @staticmethod
    def from_json(data: str | list[str]) -> "StateKey":
        if data == "START":
            return START
        if data == "END":
            return END
        if isinstance(data, str):
            return StateKey(window=(data,))
        return StateKey(window=tuple(data))


START = StateKey(sentinel="start")
END = StateKey(sentinel="end")


@dataclass
class WaitingTimeModel:
    """Per-edge waiting-time data: raw samples (hours), mean, fitted GMM."""

    samples: list[float] = field(default_factory=list)
    running_mean: float = 0.0
    fitted: GaussianMixture | None = None

    @staticmethod
    def from_samples(samples: Iterable[float]) -> "WaitingTimeModel":
        xs = list(samples)
        mean = sum(xs) / len(xs) if xs else 0.0
        return WaitingTimeModel(samples=xs, running_mean=mean)

    @staticmethod
    def structural_zero() -> "WaitingTimeModel":
        return WaitingTimeModel(samples=[], running_mean=0.0, fitted=POINT_MASS_ZERO)

    def effective_mixture(self) -> GaussianMixture:
        if self.fitted is not None:
            return self.fitted
        return GaussianMixture.point_mass(self.running_mean)

    def copy(self) -> "WaitingTimeModel":
        return WaitingTimeModel(list(self.samples), self.running_mean, self.fitted)

    def scaled(self, factor: float) -> "WaitingTimeModel":
        return WaitingTimeModel(
            samples=[s * factor for s in self.samples],
            running_mean=self.running_mean * factor,
            fitted=self.fitted.scaled_time(factor) if self.fitted is not None else None,
        )

    def with_mean(self, hours: float) -> "WaitingTimeModel":
        delta = hours - self.running_mean
        return WaitingTimeModel(
            samples=[s + delta for s in self.samples] if self.samples else [],
            running_mean=hours,
            fitted=self.fitted.shifted(delta) if self.fitted is not None else None,
        )


@dataclass
class SemiMarkovFlow:
    """Row-stochastic transition structure plus per-edge waiting models."""

    states: list[StateKey]
    P: dict[int, dict[int, float]]
    edge_times: dict[tuple[int, int], WaitingTimeModel]
    start: int
    end: int
    k: int

    def __post_init__(self):
        self.index = {key: i for i, key in enumerate(self.states)}

    # -- structure ----------------------------------------------------------

    def n_states(self) -> int:
        return len(self.states)

    def n_transitions(self) -> int:
        return sum(len(row) for row in self.P.values())

    def edges(self) -> list[tuple[int, int, float]]:
        out = []
        for u in sorted(self.P):
            for v in sorted(self.P[u]):
                out.append((u, v, self.P[u][v]))
        return out

    def dense_matrix(self) -> np.ndarray:
        n = self.n_states()
        mat = np.zeros((n, n))
        for u, row in self.P.items():
            for v, p in row.items():
                mat[u, v] = p
        return mat

    def state_mean_hours(self, i: int) -> float:
        row = self.P.get(i, {})
        return sum(p * self.edge_times[(i, j)].running_mean for j, p in row.items())

    def state_means(self) -> np.ndarray:
        return np.array([self.state_mean_hours(i) for i in range(self.n_states())])

    def copy(self) -> "SemiMarkovFlow":
        return SemiMarkovFlow(
            states=list(self.states),
            P={u: dict(row) for u, row in self.P.items()},
            edge_times={e: m.copy() for e, m in self.edge_times.items()},
            start=self.start,
            end=self.end,
            k=self.k,
        )

    # -- invariants -----------------------------------------------------------

    def validate(self, tol: float = 1e-9) -> None:
        for u, row in self.P.items():
            total = sum(row.values())
            if abs(total - 1.0) > tol:
                raise ValueError(f"row {self.states[u].label} sums to {total}")
        end_row = self.P.get(self.end, {})
        if set(end_row) != {self.start} or abs(end_row[self.start] - 1.0) > tol:
            raise ValueError("end state must transition to start with probability 1")
        n = self.n_states()
        if self._reachable_from(self.start) != set(range(n)):
            raise ValueError("not every state is reachable from start")
        if self._reaching(self.end) != set(range(n)):
            raise ValueError("not every state reaches end")

    def _reachable_from(self, src: int) -> set[int]:
        seen = {src}
        stack = [src]
        while stack:
            u = stack.pop()
            for v in self.P.get(u, {}):
                if v not in seen:
                    seen.add(v)
                    stack.append(v)
        return seen

    def _reaching(self, dst: int) -> set[int]:
        incoming: dict[int, list[int]] = {}
        for u, row in self.P.items():
            for v in row:
                incoming.setdefault(v, []).append(u)
        seen = {dst}
        stack = [dst]
        while stack:
            v = stack.pop()
            for u in incoming.get(v, []):
                if u not in seen:
                    seen.add(u)
                    stack.append(u)
        return seen

    # -- serialization ----------------------------------------------------------

    def to_dict(self, include_samples: bool = True) -> dict:
        states = [{"id": i, "key": key.to_json()} for i, key in enumerate(self.states)]
        edges = []
        for u, v, p in self.edges():
            model = self.edge_times[(u, v)]
            entry: dict = {
                "from": u,
                "to": v,
                "p": p,
                "mean_hours": model.running_mean,
                "n_samples": len(model.samples),
                "gmm": model.fitted.to_dict() if model.fitted is not None else None,
            }
            if include_samples and model.samples:
                entry["samples"] = list(model.samples)
            edges.append(entry)
        return {"k": self.k, "states": states, "edges": edges}

    @staticmethod
    def from_dict(data: dict) -> "SemiMarkovFlow":
        states = [StateKey.from_json(s["key"]) for s in sorted(data["states"], key=lambda s: s["id"])]
        P: dict[int, dict[int, float]] = {}
        edge_times: dict[tuple[int, int], WaitingTimeModel] = {}
        for e in data["edges"]:
            u, v = int(e["from"]), int(e["to"])
            P.setdefault(u, {})[v] = float(e["p"])
            fitted = GaussianMixture.from_dict(e["gmm"]) if e.get("gmm") else None
            edge_times[(u, v)] = WaitingTimeModel(
                samples=[float(x) for x in e.get("samples", [])],
                running_mean=float(e["mean_hours"]),
                fitted=fitted,
            )
        flow = SemiMarkovFlow(
            states=states,
            P=P,
            edge_times=edge_times,
            start=states.index(START),
            end=states.index(END),
            k=int(data["k"]),
        )
        flow.validate()
        return flow


def discover(log: EventLog, k: int, round_hours: bool = False) -> SemiMarkovFlow:
    """Build the k-order semi-Markov flow of a log.

    Counts transitions between activity-name windows (growing prefixes
    while fewer than k events have been seen), then row-normalizes.
    Waiting times are the per-transition timestamp deltas in hours;
    transitions touching START/END carry zero waiting time.
    """
    if k < 1:
        raise InvalidOrder(f"order k must be >= 1, got {k}")
    if not log.traces:
        raise EmptyLog("cannot discover from a log with no traces")

    states: list[StateKey] = [START]
    index: dict[StateKey, int] = {START: 0}
    counts: dict[int, dict[int, float]] = {}
    samples: dict[tuple[int, int], list[float]] = {}

    def intern(key: StateKey) -> int:
        if key not in index:
            index[key] = len(states)
            states.append(key)
        return index[key]

    def bump(u: int, v: int) -> None:
        counts.setdefault(u, {})
        counts[u][v] = counts[u].get(v, 0.0) + 1.0

    for trace in log.traces:
        acts = trace.activity_trace
        times = trace.time_trace
        n = len(acts)
        first = intern(StateKey(window=tuple(acts[0:1])))
        bump(index[START], first)
        for pos in range(1, n):  # pos counts events seen so far (1-based)
            delta_h = (times[pos] - times[pos - 1]).total_seconds() / 3600.0
            if round_hours:
                delta_h = float(round(delta_h))
            if pos < k:
                u = intern(StateKey(window=tuple(acts[0:pos])))
                v = intern(StateKey(window=tuple(acts[0 : pos + 1])))
            else:
                u = intern(StateKey(window=tuple(acts[pos - k : pos])))
                v = intern(StateKey(window=tuple(acts[pos - k + 1 : pos + 1])))
            bump(u, v)
            samples.setdefault((u, v), []).append(delta_h)
        if k < n:
            last = intern(StateKey(window=tuple(acts[n - k : n])))
        else:
            last = intern(StateKey(window=tuple(acts)))
        bump(last, intern(END))

    end_idx = intern(END)
    bump(end_idx, index[START])

    P: dict[int, dict[int, float]] = {}
    edge_times: dict[tuple[int, int], WaitingTimeModel] = {}
    for u, row in counts.items():
        total = sum(row.values())
        P[u] = {v: c / total for v, c in row.items()}
        for v in row:
            if (u, v) in samples:
                edge_times[(u, v)] = WaitingTimeModel.from_samples(samples[(u, v)])
            else:
                edge_times[(u, v)] = WaitingTimeModel.structural_zero()

    flow = SemiMarkovFlow(
        states=states, P=P, edge_times=edge_times,
        start=index[START], end=end_idx, k=k,
    )
    flow.validate()
    return flow


def fit_edge_distributions(flow: SemiMarkovFlow, cfg: FitConfig | None = None) -> SemiMarkovFlow:
    """Fit a GMM to every edge's samples (KDE-then-GMM pipeline).

    Edges with no samples, or all-zero samples, get a zero point mass;
    degenerate sample sets collapse to a point mass at the sample mean.
    """
    cfg = cfg or FitConfig()
    out = flow.copy()
    for (u, v), model in sorted(out.edge_times.items()):
        model.fitted = fit_waiting_time(model.samples, cfg)
    return out


def fit_edges_as_point_masses(flow: SemiMarkovFlow) -> SemiMarkovFlow:
    """Give every edge a point mass at its mean waiting time.

    Preserves all edge means exactly, which makes the reduced total-time
    mean directly comparable to the express-analysis mean.
    """
    out = flow.copy()
    for model in out.edge_times.values():
        model.fitted = GaussianMixture.point_mass(model.running_mean)
    return out
