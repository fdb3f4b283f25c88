"""Gaussian-mixture waiting-time algebra.

Mixtures are weighted lists of (weight, mean, variance) components in
hours; variance 0 marks a point mass, so the zero-time distribution and
convolution identity is just the single component (1, 0, 0). Convolution
adds means and variances component-wise across the cross product, which
keeps the whole reduction pipeline closed under a finite representation.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass
from typing import Sequence

import numpy as np
from scipy import optimize
from scipy.special import ndtr  # standard normal CDF, vectorized

from .errors import (
    AbsorbingSelfLoop,
    DegenerateComponent,
    FitFailure,
    NoSamples,
    WeightSumViolation,
)

WEIGHT_TOL = 1e-9


@dataclass(frozen=True, eq=False)
class GaussianMixture:
    """Immutable mixture; component arrays are read-only float64."""

    q: np.ndarray
    mu: np.ndarray
    var: np.ndarray

    def __post_init__(self):
        for name in ("q", "mu", "var"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr = np.atleast_1d(arr).copy()
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)
        if not (len(self.q) == len(self.mu) == len(self.var)):
            raise ValueError("component arrays must have equal length")
        if len(self.q) == 0:
            raise ValueError("mixture needs at least one component")
        if np.any(self.q <= 0):
            raise ValueError("weights must be positive")
        if abs(float(self.q.sum()) - 1.0) > WEIGHT_TOL:
            raise WeightSumViolation(f"weights sum to {self.q.sum()!r}")
        if np.any(self.var < 0):
            raise ValueError("variances must be nonnegative")

    def __len__(self) -> int:
        return len(self.q)

    @staticmethod
    def point_mass(mu: float) -> "GaussianMixture":
        return GaussianMixture(np.array([1.0]), np.array([float(mu)]), np.array([0.0]))

    @staticmethod
    def single(mu: float, var: float) -> "GaussianMixture":
        return GaussianMixture(np.array([1.0]), np.array([float(mu)]), np.array([float(var)]))

    @staticmethod
    def from_components(components: Sequence[tuple[float, float, float]]) -> "GaussianMixture":
        arr = np.array(components, dtype=float).reshape(-1, 3)
        return GaussianMixture(arr[:, 0], arr[:, 1], arr[:, 2])

    def mean(self) -> float:
        return float(np.dot(self.q, self.mu))

    def variance(self) -> float:
        m = self.mean()
        return float(np.dot(self.q, self.var + self.mu**2) - m * m)

    def canonical(self) -> "GaussianMixture":
        """Components sorted by (mean, variance, weight) for comparisons."""
        order = np.lexsort((self.q, self.var, self.mu))
        return GaussianMixture(self.q[order], self.mu[order], self.var[order])

    def scaled_time(self, factor: float) -> "GaussianMixture":
        """Dilate the time axis: means scale by factor, variances by factor^2."""
        return GaussianMixture(self.q, self.mu * factor, self.var * factor * factor)

    def shifted(self, delta: float) -> "GaussianMixture":
        return GaussianMixture(self.q, self.mu + delta, self.var)

    def to_dict(self) -> dict:
        return {
            "components": [
                {"q": float(q), "mu": float(m), "var": float(v)}
                for q, m, v in zip(self.q, self.mu, self.var)
            ]
        }

    @staticmethod
    def from_dict(data: dict) -> "GaussianMixture":
        comps = data["components"]
        return GaussianMixture(
            np.array([c["q"] for c in comps]),
            np.array([c["mu"] for c in comps]),
            np.array([c["var"] for c in comps]),
        )


POINT_MASS_ZERO = GaussianMixture.point_mass(0.0)


@dataclass(frozen=True)
class DensityCurve:
    grid: np.ndarray
    values: np.ndarray

    def integral(self) -> float:
        return float(np.trapezoid(self.values, self.grid))


@dataclass(frozen=True)
class FitConfig:
    bandwidth: float = 4.0
    max_components: int = 10
    grid_points: int = 512
    rel_error_target: float = 0.05

    def __post_init__(self):
        if self.bandwidth <= 0:
            raise ValueError("bandwidth must be positive")
        if self.max_components < 1:
            raise ValueError("max_components must be >= 1")


# --- algebra ----------------------------------------------------------------

def convolve(f: GaussianMixture, g: GaussianMixture) -> GaussianMixture:
    """Cross product of components; count is len(f)*len(g), no pruning here."""
    q = np.outer(f.q, g.q).ravel()
    mu = np.add.outer(f.mu, g.mu).ravel()
    var = np.add.outer(f.var, g.var).ravel()
    nz = q > 0  # weight products can underflow to exactly zero
    if not nz.all():
        q, mu, var = q[nz], mu[nz], var[nz]
    return GaussianMixture(q, mu, var)


def mix(parts: Sequence[tuple[float, GaussianMixture]]) -> GaussianMixture:
    """Weighted mixture of mixtures; part weights must sum to one."""
    weights = np.array([w for w, _ in parts], dtype=float)
    if np.any(weights <= 0):
        raise WeightSumViolation("part weights must be positive")
    if abs(float(weights.sum()) - 1.0) > WEIGHT_TOL:
        raise WeightSumViolation(f"part weights sum to {weights.sum()!r}")
    q = np.concatenate([w * f.q for w, f in parts])
    mu = np.concatenate([f.mu for _, f in parts])
    var = np.concatenate([f.var for _, f in parts])
    nz = q > 0  # scaled weights can underflow to exactly zero
    if not nz.all():
        q, mu, var = q[nz], mu[nz], var[nz]
    return GaussianMixture(q / q.sum(), mu, var)


def coalesce(f: GaussianMixture) -> GaussianMixture:
    """Merge exactly-equal (mean, variance) components, summing weights.

    Distribution-preserving; keeps point-mass lattices from exploding
    during repeated convolutions.
    """
    if len(f) == 1:
        return f
    order = np.lexsort((f.var, f.mu))
    mu, var, q = f.mu[order], f.var[order], f.q[order]
    starts = np.empty(len(mu), dtype=bool)
    starts[0] = True
    starts[1:] = (mu[1:] != mu[:-1]) | (var[1:] != var[:-1])
    if starts.all():
        return f
    idx = np.cumsum(starts) - 1
    merged = np.bincount(idx, weights=q)
    return GaussianMixture(merged, mu[starts], var[starts])


def prune(f: GaussianMixture, threshold: float) -> GaussianMixture:
    """Merge all sub-threshold components into one moment-matched Gaussian.

    Total weight, mixture mean and mixture variance are preserved exactly.
    """
    small = f.q < threshold
    if not np.any(small):
        return f
    keep = ~small
    w = float(f.q[small].sum())
    m = float(np.dot(f.q[small], f.mu[small])) / w
    v = float(np.dot(f.q[small], f.var[small] + f.mu[small] ** 2)) / w - m * m
    v = max(v, 0.0)
    q = np.append(f.q[keep], w)
    mu = np.append(f.mu[keep], m)
    var = np.append(f.var[keep], v)
    return GaussianMixture(q, mu, var)


def self_loop_closure(
    p: float,
    f_loop: GaussianMixture | None,
    threshold: float,
    j_max: int,
) -> GaussianMixture:
    """Distribution of total time spent looping before exit.

    Geometric series sum_{j>=0} (1-p) p^j (j-fold self-convolution);
    terms are kept while their weight exceeds the threshold (always at
    least the j=0 term), capped at j_max, then renormalized.
    """
    if p >= 1.0:
        raise AbsorbingSelfLoop(f"self-loop probability {p} >= 1")
    if p < 0.0:
        raise ValueError("self-loop probability must be nonnegative")
    if p == 0.0:
        return POINT_MASS_ZERO
    if f_loop is None:
        raise ValueError("self-loop with p > 0 needs a waiting-time mixture")

    if len(f_loop) == 1:
        # the j-fold self-convolution of one component is closed-form
        parts = []
        weight = 1.0 - p
        j = 0
        while True:
            parts.append((weight, j))
            weight_next = weight * p
            if j + 1 > j_max or weight_next <= threshold:
                break
            weight = weight_next
            j += 1
        q = np.array([w for w, _ in parts])
        js = np.array([float(j) for _, j in parts])
        return GaussianMixture(q / q.sum(), js * f_loop.mu[0], js * f_loop.var[0])

    parts_g: list[tuple[float, GaussianMixture]] = []
    g = POINT_MASS_ZERO
    weight = 1.0 - p
    j = 0
    while True:
        parts_g.append((weight, g))
        next_weight = weight * p
        if j + 1 > j_max or next_weight <= threshold:
            break
        g = coalesce(convolve(g, f_loop))
        if threshold > 0:
            g = prune(g, threshold)
        weight = next_weight
        j += 1

    total = sum(w for w, _ in parts_g)
    return coalesce(mix([(w / total, g) for w, g in parts_g]))


# --- nonnegative truncation --------------------------------------------------

@dataclass(frozen=True)
class TruncatedMixture:
    """Nonnegative-support view of a mixture.

    Each Gaussian component is renormalized over [0, inf); point masses
    below zero are relocated to zero. ``density`` covers the continuous
    part only; atoms are exposed separately so binning can count them.
    """

    weights: np.ndarray      # continuous component weights
    mu: np.ndarray
    sigma: np.ndarray
    tail: np.ndarray         # per-component mass on [0, inf) before renorm
    atoms: tuple[tuple[float, float], ...]  # (weight, location >= 0)

    def density(self, t: np.ndarray | float) -> np.ndarray | float:
        t_arr = np.asarray(t, dtype=float)
        out = np.zeros_like(t_arr, dtype=float)
        if len(self.weights):
            z = (t_arr[..., None] - self.mu) / self.sigma
            pdf = np.exp(-0.5 * z * z) / (self.sigma * math.sqrt(2 * math.pi))
            out = (self.weights / self.tail * pdf).sum(axis=-1)
        out = np.where(t_arr < 0, 0.0, out)
        if np.isscalar(t) or t_arr.ndim == 0:
            return float(out)
        return out

    def __call__(self, t: np.ndarray | float) -> np.ndarray | float:
        return self.density(t)

    def atom_mass(self) -> float:
        return sum(w for w, _ in self.atoms)

    def mass(self, a: float, b: float, include_right: bool = False) -> float:
        """Mass on [a, b) (or [a, b] when include_right), a >= 0."""
        a = max(a, 0.0)
        total = 0.0
        if len(self.weights):
            hi = ndtr((b - self.mu) / self.sigma)
            lo = ndtr((a - self.mu) / self.sigma)
            total += float((self.weights * (hi - lo) / self.tail).sum())
        for w, loc in self.atoms:
            if a <= loc < b or (include_right and loc == b):
                total += w
        return total

    def support_hint(self) -> float:
        """A t beyond which the remaining mass is negligible (for plotting)."""
        hi = 0.0
        if len(self.weights):
            hi = float(np.max(self.mu + 6.0 * self.sigma))
        for _, loc in self.atoms:
            hi = max(hi, loc)
        return max(hi, 1.0)


def truncate_nonneg(f: GaussianMixture) -> TruncatedMixture:
    """Truncate every Gaussian component to [0, inf), preserving weights."""
    continuous = f.var > 0
    sigma = np.sqrt(f.var[continuous])
    mu = f.mu[continuous]
    tail = ndtr(mu / sigma) if len(sigma) else np.array([])
    if len(sigma) and np.any(tail < 1e-12):
        bad = int(np.argmin(tail))
        raise DegenerateComponent(
            f"component N({mu[bad]:.3g}, {sigma[bad] ** 2:.3g}) has no mass at t >= 0"
        )
    atoms = tuple(
        (float(q), float(max(m, 0.0)))
        for q, m in zip(f.q[~continuous], f.mu[~continuous])
    )
    return TruncatedMixture(
        weights=f.q[continuous], mu=mu, sigma=sigma, tail=tail, atoms=atoms
    )


# --- KDE + GMM fitting --------------------------------------------------------

def fit_kde(samples: Sequence[float], cfg: FitConfig) -> DensityCurve:
    """Gaussian-kernel KDE on a uniform grid with a fixed bandwidth."""
    x = np.asarray(samples, dtype=float)
    if x.size == 0:
        raise NoSamples("KDE needs at least one sample")
    h = cfg.bandwidth
    lo = float(x.min()) - 3.0 * h
    hi = float(x.max()) + 3.0 * h
    grid = np.linspace(lo, hi, cfg.grid_points)
    z = (grid[:, None] - x[None, :]) / h
    values = np.exp(-0.5 * z * z).sum(axis=1) / (x.size * h * math.sqrt(2 * math.pi))
    return DensityCurve(grid=grid, values=values)


def _mixture_on_grid(grid: np.ndarray, q: np.ndarray, mu: np.ndarray, sigma: np.ndarray) -> np.ndarray:
    z = (grid[:, None] - mu[None, :]) / sigma[None, :]
    return (q[None, :] * np.exp(-0.5 * z * z) / (sigma[None, :] * math.sqrt(2 * math.pi))).sum(axis=1)


def _initial_means(curve: DensityCurve, n: int) -> np.ndarray:
    """The n largest local maxima of the curve, padded by quantiles."""
    v = curve.values
    interior = (v[1:-1] > v[:-2]) & (v[1:-1] >= v[2:])
    peak_idx = np.where(interior)[0] + 1
    peak_idx = peak_idx[np.argsort(v[peak_idx])[::-1]]
    means = list(curve.grid[peak_idx[:n]])
    if len(means) < n:
        # quantiles of the distribution the curve represents
        cdf = np.concatenate([[0.0], np.cumsum((v[1:] + v[:-1]) / 2 * np.diff(curve.grid))])
        cdf /= cdf[-1]
        missing = n - len(means)
        levels = (np.arange(missing) + 1) / (missing + 1)
        means.extend(np.interp(levels, cdf, curve.grid))
    return np.array(means[:n])


def fit_gmm(curve: DensityCurve, cfg: FitConfig) -> GaussianMixture:
    """Least-squares fit of an increasing number of Gaussians to the curve.

    Stops at the first component count whose relative L2 error meets the
    target, otherwise returns the best fit seen. Weights are clipped
    positive and renormalized.
    """
    grid, values = curve.grid, curve.values
    norm = float(np.linalg.norm(values))
    if norm == 0:
        raise FitFailure("curve is identically zero")
    span = float(grid[-1] - grid[0])

    best: tuple[float, np.ndarray] | None = None
    for n in range(1, cfg.max_components + 1):
        mu0 = _initial_means(curve, n)
        q0 = np.full(n, 1.0 / n)
        s0 = np.full(n, cfg.bandwidth)
        x0 = np.concatenate([q0, mu0, s0])
        lower = np.concatenate([np.full(n, 1e-12), np.full(n, grid[0] - span), np.full(n, 1e-6 * span)])
        upper = np.concatenate([np.full(n, np.inf), np.full(n, grid[-1] + span), np.full(n, 10 * span)])

        def residual(x: np.ndarray, n: int = n) -> np.ndarray:
            return _mixture_on_grid(grid, x[:n], x[n : 2 * n], x[2 * n :]) - values

        try:
            res = optimize.least_squares(residual, x0, bounds=(lower, upper), method="trf")
        except Exception:
            continue
        if not np.all(np.isfinite(res.x)):
            continue
        err = float(np.linalg.norm(residual(res.x))) / norm
        if best is None or err < best[0]:
            best = (err, res.x.copy())
        if err <= cfg.rel_error_target:
            break

    if best is None:
        raise FitFailure("optimizer failed for every component count")
    x = best[1]
    n = len(x) // 3
    q, mu, sigma = x[:n], x[n : 2 * n], x[2 * n :]
    q = np.clip(q, 1e-12, None)
    return GaussianMixture(q / q.sum(), mu, sigma**2)


def fit_waiting_time(samples: Sequence[float], cfg: FitConfig | None = None) -> GaussianMixture:
    """KDE-then-GMM pipeline for one transition's waiting-time samples.

    Degenerate data (no samples, or fewer than two distinct values)
    bypasses fitting and yields a point mass; a failed fit falls back to
    a single moment-matched Gaussian.
    """
    cfg = cfg or FitConfig()
    x = np.asarray(samples, dtype=float)
    if x.size == 0 or np.all(x == 0):
        return POINT_MASS_ZERO
    if len(np.unique(x)) < 2:
        return GaussianMixture.point_mass(float(x.mean()))
    try:
        return fit_gmm(fit_kde(x, cfg), cfg)
    except FitFailure as exc:
        warnings.warn(f"GMM fit failed ({exc}); falling back to a moment-matched Gaussian")
        var = float(x.var())
        if var == 0:
            return GaussianMixture.point_mass(float(x.mean()))
        return GaussianMixture.single(float(x.mean()), var)
