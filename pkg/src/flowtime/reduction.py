"""Full analysis: iterative state elimination of the flow graph.

With the end-to-start return edge removed, interior states are
eliminated one at a time; each elimination reroutes in-edges through the
state's self-loop closure onto its out-edges, composing probabilities
multiplicatively and waiting-time mixtures by convolution, merging
parallel edges as probability-weighted mixtures. When only START and
END remain, the single surviving edge carries the overall execution-time
distribution.
"""

from __future__ import annotations

import warnings
from dataclasses import dataclass, field

import numpy as np

from .errors import AbsorbingSelfLoop, NotInterior, WalkTooLong
from .discovery import SemiMarkovFlow, StateKey
from .gmm import (
    GaussianMixture,
    TruncatedMixture,
    coalesce,
    convolve,
    mix,
    prune,
    self_loop_closure,
    truncate_nonneg,
)

ROW_SUM_TOL = 1e-9


@dataclass(frozen=True)
class ReductionConfig:
    threshold: float = 0.001
    j_max: int = 64

    def __post_init__(self):
        if not (0 <= self.threshold < 1):
            raise ValueError("threshold must be in [0, 1)")
        if self.j_max < 1:
            raise ValueError("j_max must be >= 1")


@dataclass
class TotalTimePDF:
    mixture: GaussianMixture
    truncated: TruncatedMixture
    mass_check: float
    eliminated_order: list[StateKey] = field(default_factory=list)
    threshold: float = 0.001
    j_max: int = 64

    def to_dict(self) -> dict:
        return {
            "mixture": self.mixture.to_dict(),
            "mass_check": self.mass_check,
            "threshold": self.threshold,
            "j_max": self.j_max,
            "eliminated_order": [k.to_json() for k in self.eliminated_order],
        }

    @staticmethod
    def from_dict(data: dict) -> "TotalTimePDF":
        mixture = GaussianMixture.from_dict(data["mixture"])
        return TotalTimePDF(
            mixture=mixture,
            truncated=truncate_nonneg(mixture),
            mass_check=float(data["mass_check"]),
            eliminated_order=[StateKey.from_json(k) for k in data.get("eliminated_order", [])],
            threshold=float(data.get("threshold", 0.001)),
            j_max=int(data.get("j_max", 64)),
        )


@dataclass
class WorkingFlow:
    """Mutable elimination graph: edges[u][v] = (probability, mixture)."""

    states: list[StateKey]
    edges: dict[int, dict[int, tuple[float, GaussianMixture]]]
    start: int
    end: int

    @staticmethod
    def from_flow(flow: SemiMarkovFlow) -> "WorkingFlow":
        edges: dict[int, dict[int, tuple[float, GaussianMixture]]] = {}
        for u, row in flow.P.items():
            if u == flow.end:
                continue  # drop the end-to-start return edge
            edges[u] = {
                v: (p, flow.edge_times[(u, v)].effective_mixture())
                for v, p in row.items()
            }
        return WorkingFlow(
            states=list(flow.states), edges=edges, start=flow.start, end=flow.end
        )

    def interior(self) -> list[int]:
        nodes = set(self.edges)
        for row in self.edges.values():
            nodes.update(row)
        return [v for v in nodes if v not in (self.start, self.end)]

    def degree_product(self, v: int) -> int:
        out_deg = sum(1 for w in self.edges.get(v, {}) if w != v)
        in_deg = sum(1 for u, row in self.edges.items() if u != v and v in row)
        return in_deg * out_deg


def eliminate_state(work: WorkingFlow, v: int, cfg: ReductionConfig) -> WorkingFlow:
    """Remove interior state v, rerouting all paths through it."""
    if v in (work.start, work.end):
        raise NotInterior(f"cannot eliminate {work.states[v].label}")

    out_row = work.edges.get(v, {})
    p_loop, f_loop = out_row.get(v, (0.0, None))
    if p_loop >= 1.0 - 1e-12:
        raise AbsorbingSelfLoop(f"state {work.states[v].label} self-loop has probability {p_loop}")
    closure = self_loop_closure(p_loop, f_loop, cfg.threshold, cfg.j_max)
    denom = 1.0 - p_loop

    sort_key = lambda i: work.states[i].sort_key()
    ins = sorted((u for u, row in work.edges.items() if u != v and v in row), key=sort_key)
    outs = sorted((w for w in out_row if w != v), key=sort_key)

    # closure * outgoing-edge convolutions are shared across all in-edges
    routed: dict[int, tuple[float, GaussianMixture]] = {}
    for w in outs:
        p_vw, f_vw = out_row[w]
        g = coalesce(convolve(closure, f_vw))
        if cfg.threshold > 0:
            g = prune(g, cfg.threshold)
        routed[w] = (p_vw / denom, g)

    for u in ins:
        p_uv, f_uv = work.edges[u].pop(v)
        for w in outs:
            p_route, g = routed[w]
            p_new = p_uv * p_route
            f_new = coalesce(convolve(f_uv, g))
            if cfg.threshold > 0:
                f_new = prune(f_new, cfg.threshold)
            existing = work.edges[u].get(w)
            if existing is not None:
                p_old, f_old = existing
                p_sum = p_old + p_new
                merged = coalesce(mix([(p_old / p_sum, f_old), (p_new / p_sum, f_new)]))
                if cfg.threshold > 0:
                    merged = prune(merged, cfg.threshold)
                work.edges[u][w] = (p_sum, merged)
            else:
                work.edges[u][w] = (p_new, f_new)
        row_sum = sum(p for p, _ in work.edges[u].values())
        if abs(row_sum - 1.0) > ROW_SUM_TOL:
            raise AbsorbingSelfLoop(
                f"row {work.states[u].label} lost stochasticity ({row_sum}) eliminating "
                f"{work.states[v].label}"
            )

    work.edges.pop(v, None)
    return work


def reduce_flow(flow: SemiMarkovFlow, cfg: ReductionConfig | None = None) -> TotalTimePDF:
    """Eliminate all interior states; the surviving edge is the total-time PDF.

    States are removed in increasing (in-degree x out-degree) order,
    self-loops excluded from the counts, ties broken by state key.
    """
    cfg = cfg or ReductionConfig()
    work = WorkingFlow.from_flow(flow)
    order: list[StateKey] = []
    while True:
        interior = work.interior()
        if not interior:
            break
        v = min(interior, key=lambda i: (work.degree_product(i), work.states[i].sort_key()))
        eliminate_state(work, v, cfg)
        order.append(work.states[v])

    # A flow may legally route edges back into START; eliminating their
    # sources leaves a START self-loop that still has to be closed.
    start_row = work.edges.get(work.start, {})
    p_loop, f_loop = start_row.get(work.start, (0.0, None))
    final = start_row.get(work.end)
    if final is None:
        raise NotInterior("reduction finished without a start-to-end edge")
    mass, mixture = final
    if p_loop > 0:
        if p_loop >= 1.0 - 1e-12:
            raise AbsorbingSelfLoop("start state became absorbing during reduction")
        closure = self_loop_closure(p_loop, f_loop, cfg.threshold, cfg.j_max)
        mass = mass / (1.0 - p_loop)
        mixture = coalesce(convolve(closure, mixture))
        if cfg.threshold > 0:
            mixture = prune(mixture, cfg.threshold)
    if mass < 0.95:
        warnings.warn(f"reduction lost probability mass: start-to-end edge carries {mass}")
    return TotalTimePDF(
        mixture=mixture,
        truncated=truncate_nonneg(mixture),
        mass_check=mass,
        eliminated_order=order,
        threshold=cfg.threshold,
        j_max=cfg.j_max,
    )


def simulate(
    flow: SemiMarkovFlow,
    n_runs: int,
    seed: int,
    max_steps: int = 1_000_000,
) -> np.ndarray:
    """Monte-Carlo oracle: random walks from START to END, summing edge times.

    Sampling uses the untruncated mixtures (negative draws possible, as
    in the analytic model before final truncation). Deterministic for a
    given seed.
    """
    if n_runs < 1:
        raise ValueError("n_runs must be >= 1")
    rng = np.random.default_rng(seed)

    rows: dict[int, tuple[np.ndarray, np.ndarray]] = {}
    for u, row in flow.P.items():
        if u == flow.end:
            continue
        targets = np.array(sorted(row), dtype=int)
        probs = np.array([row[v] for v in targets])
        rows[u] = (targets, probs / probs.sum())

    state = np.full(n_runs, flow.start, dtype=int)
    total = np.zeros(n_runs)
    active = state != flow.end
    steps = 0
    while np.any(active):
        if steps >= max_steps:
            raise WalkTooLong(f"some runs exceeded {max_steps} steps")
        for u in sorted(set(state[active].tolist())):
            here = np.where(active & (state == u))[0]
            targets, probs = rows[u]
            choice = rng.choice(len(targets), size=len(here), p=probs)
            for t_idx in range(len(targets)):
                picked = here[choice == t_idx]
                if len(picked) == 0:
                    continue
                v = int(targets[t_idx])
                mixture = flow.edge_times[(u, v)].effective_mixture()
                comp = rng.choice(len(mixture), size=len(picked), p=mixture.q)
                mu = mixture.mu[comp]
                sd = np.sqrt(mixture.var[comp])
                draws = np.where(sd > 0, rng.normal(mu, np.where(sd > 0, sd, 1.0)), mu)
                total[picked] += draws
                state[picked] = v
        active = state != flow.end
        steps += 1
    return total
