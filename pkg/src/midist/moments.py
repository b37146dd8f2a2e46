"""Closed-form posterior mean and second-order variance of mutual information.

Under a Dirichlet posterior with cell counts n_ij, marginals n_i+ and n_+j
and total n, the mean is exact:

    mean = (1/n) * sum_ij n_ij * [psi(n_ij+1) - psi(n_i+ +1) - psi(n_+j +1) + psi(n+1)]

and the variance expands to second order in 1/n:

    variance = (K - J^2) / (n+1)
             + [M + (r-1)(s-1)(1/2 - J) - Q] / ((n+1)(n+2))

with the double-sum intermediates

    J = sum_ij (n_ij/n) * log(n_ij n / (n_i+ n_+j))        (the plug-in value)
    K = sum_ij (n_ij/n) * log(...)^2
    M = sum_ij (1/n_ij - 1/n_i+ - 1/n_+j + 1/n) n_ij log(...)
    Q = 1 - sum_ij n_ij^2 / (n_i+ n_+j)

The intermediates are exposed so tests can pin each one separately.  Cost
is O(r*s) per table; only double sums appear.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .core import digamma_grid
from .errors import ZeroCellError
from .tables import PosteriorCounts


@dataclass(frozen=True)
class MiMoments:
    """First two posterior moments plus the variance intermediates."""

    mean: float
    variance: float
    k_term: float
    j_term: float
    m_term: float
    q_term: float
    variance_clamped: bool = False


def _require_positive_cells(pc: PosteriorCounts) -> None:
    if pc.n.min() <= 0:
        raise ZeroCellError(
            "moment formulas need every posterior cell positive; "
            "apply a positive-weight prior first"
        )


def _mean_unchecked(pc: PosteriorCounts) -> float:
    # one digamma evaluation over a flat batch of all needed arguments
    r, s = pc.r, pc.s
    args = np.empty(r * s + r + s + 1)
    args[: r * s] = pc.n.ravel()
    args[r * s : r * s + r] = pc.row_marginals
    args[r * s + r : r * s + r + s] = pc.col_marginals
    args[-1] = pc.total
    psi = digamma_grid(args + 1.0)
    bracket = (
        psi[: r * s].reshape(r, s)
        - psi[r * s : r * s + r][:, None]
        - psi[r * s + r : r * s + r + s][None, :]
        + psi[-1]
    )
    return float((pc.n * bracket).sum() / pc.total)


def mi_mean(pc: PosteriorCounts) -> float:
    """Exact posterior mean of mutual information, in nats."""
    _require_positive_cells(pc)
    return _mean_unchecked(pc)


def mi_moments(pc: PosteriorCounts) -> MiMoments:
    """Exact mean plus the second-order variance approximation.

    A negative raw variance (possible deep in the near-independence,
    small-count corner of the expansion) is clamped to zero and flagged
    rather than raised, so downstream distribution fits stay defined.
    """
    _require_positive_cells(pc)
    n = pc.n
    rows = pc.row_marginals
    cols = pc.col_marginals
    total = pc.total
    outer = np.outer(rows, cols)
    log_ratio = np.log(n * total) - np.log(outer)
    p = n / total
    j = float((p * log_ratio).sum())
    k = float((p * log_ratio**2).sum())
    m = float(
        ((1.0 / n - (1.0 / rows)[:, None] - (1.0 / cols)[None, :] + 1.0 / total) * n * log_ratio).sum()
    )
    q = float(1.0 - (n * n / outer).sum())
    r, s = pc.r, pc.s
    raw = (k - j * j) / (total + 1.0) + (
        m + (r - 1) * (s - 1) * (0.5 - j) - q
    ) / ((total + 1.0) * (total + 2.0))
    return MiMoments(
        mean=_mean_unchecked(pc),
        variance=max(raw, 0.0),
        k_term=k,
        j_term=j,
        m_term=m,
        q_term=q,
        variance_clamped=bool(raw < 0.0),
    )
