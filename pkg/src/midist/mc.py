"""Monte Carlo ground truth for the information posterior.

Chance matrices are drawn from the Dirichlet posterior by normalising
independent unit-scale gamma variates (one per cell, shape = posterior
count) and the information value is evaluated exactly on each draw.  Every
fixed-size chunk of draws owns its own seed-derived substream, so results
are bit-identical for a given seed no matter how chunks would be scheduled
across workers.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import special

from .core import mi_upper_bound
from .dist import DistApprox
from .errors import ConfigurationError, InputError, InsufficientDataError, ZeroCellError
from .tables import PosteriorCounts

CHUNK_DRAWS = 1 << 15
SORTED_SAMPLE_LIMIT = 10_000_000
HISTOGRAM_BINS = 10_000
SAMPLE_BUDGET = 1_000_000_000


@dataclass(frozen=True, eq=False)
class McSummary:
    """Summary of posterior draws of the information value.

    Draws are stored sorted while the count stays within
    SORTED_SAMPLE_LIMIT; beyond that a fixed-width histogram on
    [0, i_max] stands in.
    """

    sample_count: int
    mean: float
    variance: float
    mean_std_error: float
    seed: int
    i_max: float
    samples: np.ndarray | None = None
    histogram: tuple[np.ndarray, np.ndarray] | None = None  # (counts, edges)


def _chunk_rng(seed: int, index: int) -> np.random.Generator:
    return np.random.default_rng(np.random.SeedSequence(entropy=seed, spawn_key=(index,)))


def _chance_draws(shapes: np.ndarray, count: int, rng: np.random.Generator) -> np.ndarray:
    """``count`` simplex points from the Dirichlet with the given shapes."""
    g = rng.standard_gamma(shapes, size=(count, shapes.size))
    return g / g.sum(axis=1, keepdims=True)


def _information_of(pi: np.ndarray, r: int, s: int) -> np.ndarray:
    p = pi.reshape(-1, r, s)
    rows = p.sum(axis=2)
    cols = p.sum(axis=1)
    joint = special.xlogy(p, p).sum(axis=(1, 2))
    return joint - special.xlogy(rows, rows).sum(axis=1) - special.xlogy(cols, cols).sum(axis=1)


def sample_mi(pc: PosteriorCounts, sample_count: int, seed: int) -> McSummary:
    """Draw chance matrices from the posterior and summarise their information."""
    if np.any(pc.n <= 0):
        raise ZeroCellError("sampling needs every posterior cell positive")
    if sample_count < 1:
        raise InputError("sample_count must be >= 1")
    if sample_count > SAMPLE_BUDGET:
        raise ConfigurationError(
            f"sample_count {sample_count} exceeds the storage budget {SAMPLE_BUDGET}"
        )
    upper = mi_upper_bound(pc.r, pc.s)
    shapes = np.asarray(pc.n, dtype=float).reshape(-1)
    keep_samples = sample_count <= SORTED_SAMPLE_LIMIT

    if keep_samples:
        out = np.empty(sample_count)
        for k, start in enumerate(range(0, sample_count, CHUNK_DRAWS)):
            m = min(CHUNK_DRAWS, sample_count - start)
            pi = _chance_draws(shapes, m, _chunk_rng(seed, k))
            out[start : start + m] = np.clip(_information_of(pi, pc.r, pc.s), 0.0, upper)
        mean = float(out.mean())
        variance = float(out.var(ddof=1)) if sample_count > 1 else 0.0
        out.sort()
        out.setflags(write=False)
        return McSummary(
            sample_count=sample_count,
            mean=mean,
            variance=variance,
            mean_std_error=math.sqrt(variance / sample_count),
            seed=seed,
            i_max=upper,
            samples=out,
        )

    edges = np.linspace(0.0, upper if upper > 0 else 1.0, HISTOGRAM_BINS + 1)
    counts = np.zeros(HISTOGRAM_BINS, dtype=np.int64)
    total = 0.0
    total_sq = 0.0
    for k, start in enumerate(range(0, sample_count, CHUNK_DRAWS)):
        m = min(CHUNK_DRAWS, sample_count - start)
        pi = _chance_draws(shapes, m, _chunk_rng(seed, k))
        values = np.clip(_information_of(pi, pc.r, pc.s), 0.0, upper)
        counts += np.histogram(values, bins=edges)[0]
        total += float(values.sum())
        total_sq += float((values**2).sum())
    mean = total / sample_count
    variance = max(0.0, (total_sq - total**2 / sample_count) / (sample_count - 1))
    return McSummary(
        sample_count=sample_count,
        mean=mean,
        variance=variance,
        mean_std_error=math.sqrt(variance / sample_count),
        seed=seed,
        i_max=upper,
        histogram=(counts, edges),
    )


def ks_distance(summary: McSummary, d: DistApprox) -> float:
    """Sup gap between the draws' empirical CDF and a fitted CDF.

    Histogram summaries fall back to evaluating the gap at bin edges,
    which understates the true distance by at most one bin's mass.
    """
    if summary.samples is not None:
        x = summary.samples
        n = summary.sample_count
        i = np.arange(1, n + 1)
        upper_gap = (i / n - d.cdf(x)).max()
        lower_gap = (d.cdf_left(x) - (i - 1) / n).max()  # left limit matters at atoms
        return float(max(0.0, upper_gap, lower_gap))
    counts, edges = summary.histogram
    ecdf = np.cumsum(counts) / summary.sample_count
    return float(np.abs(ecdf - d.cdf(edges[1:])).max())


def tail_slope(summary: McSummary, side: str, window: tuple[float, float], bins: int = 25) -> float:
    """Log-log density slope against the distance to a support boundary.

    ``window`` is a (low, high) quantile range taken from the chosen tail,
    with high at most 0.2.  The density comes from a log-spaced histogram
    of the in-window draws; the slope is its least-squares fit.
    """
    if side not in ("lower", "upper"):
        raise InputError(f"side must be 'lower' or 'upper', got {side!r}")
    lo, hi = window
    if not (0.0 < lo < hi <= 0.2):
        raise InputError("window must satisfy 0 < low < high <= 0.2")
    if summary.samples is None:
        raise InputError("tail estimation needs stored samples, not a histogram summary")
    n = summary.sample_count
    if n < 100_000:
        raise InsufficientDataError("tail estimation needs at least 1e5 draws")
    if side == "lower":
        dist = summary.samples[int(lo * n) : int(hi * n)]
    else:
        dist = (summary.i_max - summary.samples[::-1])[int(lo * n) : int(hi * n)]
    dist = dist[dist > 0]
    if dist.size < 1000:
        raise InsufficientDataError(f"only {dist.size} draws inside the window")
    edges = np.geomspace(dist.min(), dist.max(), bins + 1)
    counts, edges = np.histogram(dist, bins=edges)
    widths = np.diff(edges)
    mids = np.sqrt(edges[:-1] * edges[1:])
    good = counts > 0
    density = counts[good] / (n * widths[good])
    return float(np.polyfit(np.log(mids[good]), np.log(density), 1)[0])
