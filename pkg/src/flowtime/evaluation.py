"""Performance-accuracy scoring: binned distributions and KL divergence.

Log durations and the model's total-time PDF are binned over a common
set of equal intervals (default 20 bins spanning 0..1000 hours);
out-of-range mass is excluded and both sides renormalized. Bins are
half-open [lo, hi), the last bin closed.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import AllOutOfRange, EdgeMismatch
from .reduction import TotalTimePDF

KL_EPSILON = 1e-12


def default_edges(n_bins: int = 20, max_hours: float = 1000.0) -> np.ndarray:
    return np.linspace(0.0, max_hours, n_bins + 1)


@dataclass(frozen=True)
class BinnedDistribution:
    bin_edges: np.ndarray
    masses: np.ndarray
    excluded_fraction: float = 0.0

    def __post_init__(self):
        object.__setattr__(self, "bin_edges", np.asarray(self.bin_edges, dtype=float))
        object.__setattr__(self, "masses", np.asarray(self.masses, dtype=float))
        if len(self.masses) != len(self.bin_edges) - 1:
            raise ValueError("need one more edge than masses")
        if abs(float(self.masses.sum()) - 1.0) > 1e-9:
            raise ValueError(f"masses sum to {self.masses.sum()}")


def bin_log(durations: Sequence[float], edges: np.ndarray | None = None) -> BinnedDistribution:
    """Histogram of in-range durations, renormalized."""
    edges = default_edges() if edges is None else np.asarray(edges, dtype=float)
    x = np.asarray(durations, dtype=float)
    in_range = (x >= edges[0]) & (x <= edges[-1])
    if not np.any(in_range):
        raise AllOutOfRange(f"no duration falls in [{edges[0]}, {edges[-1]}]")
    kept = x[in_range]
    idx = np.searchsorted(edges, kept, side="right") - 1
    idx = np.clip(idx, 0, len(edges) - 2)  # top edge joins the closed last bin
    masses = np.zeros(len(edges) - 1)
    np.add.at(masses, idx, 1.0)
    masses /= masses.sum()
    return BinnedDistribution(
        bin_edges=edges,
        masses=masses,
        excluded_fraction=1.0 - len(kept) / len(x),
    )


def bin_model(pdf: TotalTimePDF, edges: np.ndarray | None = None) -> BinnedDistribution:
    """Analytic bin masses of the truncated mixture, renormalized in range."""
    edges = default_edges() if edges is None else np.asarray(edges, dtype=float)
    trunc = pdf.truncated
    masses = np.array(
        [
            trunc.mass(edges[i], edges[i + 1], include_right=(i == len(edges) - 2))
            for i in range(len(edges) - 1)
        ]
    )
    total = float(masses.sum())
    if total <= 0:
        raise AllOutOfRange("model has no mass inside the binning range")
    return BinnedDistribution(
        bin_edges=edges, masses=masses / total, excluded_fraction=1.0 - total
    )


def kl_divergence(L: BinnedDistribution, M: BinnedDistribution) -> float:
    """sum over bins of L ln(L / max(M, eps)); zero-mass L bins contribute 0."""
    if len(L.bin_edges) != len(M.bin_edges) or np.any(L.bin_edges != M.bin_edges):
        raise EdgeMismatch("binned distributions use different edges")
    total = 0.0
    for l, m in zip(L.masses, M.masses):
        if l > 0:
            total += l * math.log(l / max(m, KL_EPSILON))
    return total


def uniform_baseline(mean: float, edges: np.ndarray | None = None) -> BinnedDistribution:
    """The zero-anchored uniform with the given mean, binned and renormalized."""
    if mean <= 0:
        raise ValueError("baseline mean must be positive")
    edges = default_edges() if edges is None else np.asarray(edges, dtype=float)
    width = 2.0 * mean
    lo = np.clip(edges[:-1], 0.0, width)
    hi = np.clip(edges[1:], 0.0, width)
    masses = (hi - lo) / width
    total = float(masses.sum())
    if total <= 0:
        raise AllOutOfRange("uniform baseline has no mass inside the binning range")
    return BinnedDistribution(
        bin_edges=edges, masses=masses / total, excluded_fraction=1.0 - total
    )
