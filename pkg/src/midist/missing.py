"""Leading-order information moments for partially observed pairs.

Some instances observe the feature but not the class.  With unlabeled
counts u_i on top of the prior-augmented joint grid n_ij (row sums n_i+,
grand total N = sum n_ij + sum u_i), each row's unlabeled mass is spread
over the row's observed class frequencies:

    pi_ij = (n_i+ + u_i) / N * n_ij / n_i+

The plug-in information of that grid is the leading-order mean, and the
leading 1/N variance is

    variance = (Kbar - Jbar^2 / Qbar - Pbar) / N

built from

    rho_ij   = N * pi_ij^2 / n_ij          (0 where n_ij = 0)
    rho_i    = N * pi_i+^2 / u_i           (inf sentinel where u_i = 0)
    Qbar_i   = rho_i / (rho_i + sum_j rho_ij)      (1 at the sentinel)
    Qbar     = sum_i (sum_j rho_ij) * Qbar_i
    Kbar     = sum_ij rho_ij * log(pi_ij / (pi_i+ pi_+j))^2
    Jbar_i   = sum_j  rho_ij * log(pi_ij / (pi_i+ pi_+j))
    Jbar     = sum_i Jbar_i * Qbar_i
    Pbar     = sum_i Jbar_i^2 * Qbar_i / rho_i     (0 at the sentinel)

With no unlabeled mass everything reduces to the complete-case values:
pi_ij = n_ij/N, Qbar = 1, Pbar = 0 and the variance becomes (K - J^2)/N.
The mirror case (class observed, feature value missing) is handled by
transposing, see ``moments_with_missing``.  Cost is O(r*s).

The derivation assumes the uniform prior; other priors are accepted but
the result carries ``prior_extrapolation=True``.
"""

from __future__ import annotations

from dataclasses import dataclass, replace

import numpy as np

from .core import _information_terms
from .errors import InputError, UndefinedFillError
from .tables import ContingencyTable, PriorSpec


@dataclass(frozen=True, eq=False)
class MissingMoments:
    """Filled-in chance grid plus every intermediate of the 1/N variance.

    ``rho_missing`` uses ``inf`` as the sentinel for rows without unlabeled
    mass; the dependent quantities resolve that limit to the complete-case
    values.  The vectors are indexed by the fully observed variable, which
    is the original table's columns when ``missing_axis == "feature"``.
    """

    pi_hat: np.ndarray
    rho: np.ndarray
    rho_missing: np.ndarray
    q_bar_i: np.ndarray
    q_bar: float
    k_bar: float
    j_bar: float
    p_bar: float
    j_bar_rows: np.ndarray
    mean: float
    variance: float
    total: float
    variance_clamped: bool = False
    prior_extrapolation: bool = False
    missing_axis: str = "class"


def _prepare(table: ContingencyTable, prior: PriorSpec):
    if np.any(table.missing_feature > 0):
        raise InputError(
            "these routines take unlabeled mass on the class margin; transpose "
            "the table or call moments_with_missing for missing feature values"
        )
    grid = table.counts.astype(float) + prior.cell_weight(table.r, table.s)
    unlabeled = np.asarray(table.missing_class, dtype=float)
    rows = grid.sum(axis=1)
    total = float(grid.sum() + unlabeled.sum())
    if total <= 0:
        raise InputError("table carries no mass")
    bad = (unlabeled > 0) & (rows <= 0)
    if bad.any():
        i = int(np.argmax(bad))
        raise UndefinedFillError(
            f"row {i} has unlabeled instances but no observed mass to spread them over"
        )
    pi = np.zeros_like(grid)
    pos = rows > 0
    pi[pos] = ((rows[pos] + unlabeled[pos]) / total)[:, None] * grid[pos] / rows[pos][:, None]
    return grid, unlabeled, total, pi


def fill_estimate(table: ContingencyTable, prior: PriorSpec = PriorSpec()) -> np.ndarray:
    """Chance grid with each row's unlabeled mass spread over the row's frequencies.

    The grid sums to 1.
    """
    return _prepare(table, prior)[3]


def mi_mean_missing(table: ContingencyTable, prior: PriorSpec = PriorSpec()) -> float:
    """Leading-order posterior mean: the plug-in information of the filled grid."""
    pi = fill_estimate(table, prior)
    value = float(_information_terms(pi, pi.sum(axis=1), pi.sum(axis=0), 1.0).sum())
    return max(0.0, value)


def mi_variance_missing(table: ContingencyTable, prior: PriorSpec = PriorSpec()) -> MissingMoments:
    """Leading 1/N mean and variance with all intermediates exposed."""
    grid, unlabeled, total, pi = _prepare(table, prior)
    pi_rows = pi.sum(axis=1)
    pi_cols = pi.sum(axis=0)

    log_ratio = np.zeros_like(pi)
    mask = pi > 0
    log_ratio[mask] = np.log(pi[mask]) - np.log(np.outer(pi_rows, pi_cols)[mask])

    rho = np.zeros_like(pi)
    cell = grid > 0
    rho[cell] = total * pi[cell] ** 2 / grid[cell]
    rho_rows = rho.sum(axis=1)

    rho_missing = np.full(table.r, np.inf)
    has_unlabeled = unlabeled > 0
    rho_missing[has_unlabeled] = total * pi_rows[has_unlabeled] ** 2 / unlabeled[has_unlabeled]

    q_bar_i = np.ones(table.r)
    q_bar_i[has_unlabeled] = rho_missing[has_unlabeled] / (
        rho_missing[has_unlabeled] + rho_rows[has_unlabeled]
    )
    q_bar = float((rho_rows * q_bar_i).sum())
    k_bar = float((rho * log_ratio**2).sum())
    j_bar_rows = (rho * log_ratio).sum(axis=1)
    j_bar = float((j_bar_rows * q_bar_i).sum())
    p_bar = float((j_bar_rows**2 * q_bar_i / rho_missing).sum())  # division by inf -> 0

    mean = max(0.0, float(_information_terms(pi, pi_rows, pi_cols, 1.0).sum()))
    raw = (k_bar - j_bar**2 / q_bar - p_bar) / total
    return MissingMoments(
        pi_hat=pi,
        rho=rho,
        rho_missing=rho_missing,
        q_bar_i=q_bar_i,
        q_bar=q_bar,
        k_bar=k_bar,
        j_bar=j_bar,
        p_bar=p_bar,
        j_bar_rows=j_bar_rows,
        mean=mean,
        variance=max(raw, 0.0),
        total=total,
        variance_clamped=bool(raw < 0.0),
        prior_extrapolation=prior.kind != "uniform",
        missing_axis="class",
    )


def moments_with_missing(table: ContingencyTable, prior: PriorSpec = PriorSpec()) -> MissingMoments:
    """Route a table with unlabeled mass on either margin through the same formulas.

    Mass on the feature margin is handled by transposing, evaluating, and
    transposing the grids back.  Mass on both margins at once is out of
    scope here (joint missingness needs an iterative estimator).
    """
    has_class_gap = bool(table.missing_class.sum() > 0)
    has_feature_gap = bool(table.missing_feature.sum() > 0)
    if has_class_gap and has_feature_gap:
        raise InputError(
            "instances missing the feature and instances missing the class "
            "cannot be combined in a single table"
        )
    if has_feature_gap:
        m = mi_variance_missing(table.transposed(), prior)
        return replace(m, pi_hat=m.pi_hat.T, rho=m.rho.T, missing_axis="feature")
    return mi_variance_missing(table, prior)
