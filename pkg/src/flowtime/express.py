"""Express analysis: limiting probabilities and the mean execution time.

The mean overall execution time is mu = (1/pi_s) * sum over non-end
states of pi_i * mu_i, where pi solves the stationary balance equations
and mu_i is the probability-weighted mean waiting time over state i's
outgoing transitions (transitions into END wait zero by construction).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import SingularSystem
from .eventlog import EventLog, log_mean_duration
from .discovery import SemiMarkovFlow, discover
from .timefmt import format_hours, hours_to_seconds

RESIDUAL_TOL = 1e-9


@dataclass(frozen=True)
class StationaryReport:
    pi: np.ndarray               # limiting probabilities, state-indexed
    state_means: np.ndarray      # mean waiting time per state, hours
    contributions: np.ndarray    # pi_i * mu_i, hours
    overall_mean: float          # hours
    start_pi: float

    def to_dict(self, flow: SemiMarkovFlow) -> dict:
        return {
            "states": [
                {
                    "key": flow.states[i].to_json(),
                    "pi": float(self.pi[i]),
                    "mean_hours": float(self.state_means[i]),
                    "contribution_hours": float(self.contributions[i]),
                }
                for i in range(len(self.pi))
            ],
            "mean_hours": self.overall_mean,
            "mean_seconds": hours_to_seconds(self.overall_mean),
            "mean_formatted": format_hours(self.overall_mean),
            "start_pi": self.start_pi,
        }


def limiting_probabilities(flow: SemiMarkovFlow) -> np.ndarray:
    """Solve pi = pi P with sum(pi) = 1 by direct elimination.

    The last balance equation is replaced by the normalization row; a
    singular system signals a malformed (non-irreducible) matrix.
    """
    P = flow.dense_matrix()
    n = P.shape[0]
    A = P.T - np.eye(n)
    A[-1, :] = 1.0
    b = np.zeros(n)
    b[-1] = 1.0
    try:
        pi = np.linalg.solve(A, b)
    except np.linalg.LinAlgError as exc:
        raise SingularSystem(str(exc)) from None
    residual = float(np.max(np.abs(pi - pi @ P)))
    if residual > RESIDUAL_TOL or np.any(pi <= 0):
        raise SingularSystem(
            f"stationary solve failed (residual {residual:.2e}, min pi {pi.min():.2e})"
        )
    return pi


def mean_execution_time(flow: SemiMarkovFlow) -> StationaryReport:
    pi = limiting_probabilities(flow)
    means = flow.state_means()
    contributions = pi * means
    start_pi = float(pi[flow.start])
    mask = np.ones(len(pi), dtype=bool)
    mask[flow.end] = False
    overall = float(contributions[mask].sum() / start_pi)
    return StationaryReport(
        pi=pi,
        state_means=means,
        contributions=contributions,
        overall_mean=overall,
        start_pi=start_pi,
    )


def verify_mean_equality(log: EventLog, k: int) -> tuple[float, float, float]:
    """Model mean vs. log mean duration; returns (model, log, relative gap)."""
    flow = discover(log, k)
    mu_model = mean_execution_time(flow).overall_mean
    mu_log = log_mean_duration(log) / 3600.0
    denom = max(abs(mu_log), abs(mu_model))
    gap = 0.0 if denom == 0 else abs(mu_model - mu_log) / denom
    return mu_model, mu_log, gap
