"""Moment-matched approximations of the information posterior.

A fitted object reproduces the requested mean and variance exactly and is
queryable for probabilities and quantiles.  The beta family lives on the
rescaled variable I / i_max so its support matches the information range;
the normal keeps its unbounded support (it is only asymptotically
concentrated inside the range).  An infeasible moment pair raises from the
strict ``fit`` and degrades to the gamma family in ``fit_with_fallback``.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np
from scipy import optimize, special

from .errors import InfeasibleFitError, InputError

FIT_FAMILIES = ("normal", "gamma", "beta")


@dataclass(frozen=True)
class TailExponents:
    """Power-law exponents of the posterior density at the support ends.

    The density scales like d**lower for distance d to 0 and like
    d**upper for distance d to the upper bound.
    """

    lower: float
    upper: float


def tail_exponents(r: int, s: int) -> TailExponents:
    """Boundary scaling exponents for an r x s problem."""
    if r < 1 or s < 1:
        raise InputError("cardinalities must be >= 1")
    return TailExponents(
        lower=(r - 1) * (s - 1) / 2.0 - 1.0,
        upper=(min(r, s) - 3) / 2.0,
    )


@dataclass(frozen=True)
class DistApprox:
    """A fitted approximation family, immutable and query-only."""

    family: str
    params: dict
    support: tuple[float, float]

    def cdf(self, x):
        """P(I <= x); scalar in, scalar out (arrays pass through)."""
        scalar = np.ndim(x) == 0
        xa = np.asarray(x, dtype=float)
        if self.family == "normal":
            sigma = math.sqrt(self.params["variance"])
            v = special.ndtr((xa - self.params["mean"]) / sigma)
        elif self.family == "gamma":
            v = special.gammainc(self.params["shape"], np.maximum(xa, 0.0) / self.params["scale"])
        elif self.family == "beta":
            t = np.clip(xa / self.params["scale"], 0.0, 1.0)
            v = special.betainc(self.params["alpha"], self.params["beta"], t)
        else:
            v = (xa >= self.params["location"]).astype(float)
        return float(v) if scalar else v

    def cdf_left(self, x):
        """P(I < x); differs from cdf only where the law has an atom."""
        if self.family == "point_mass":
            scalar = np.ndim(x) == 0
            v = (np.asarray(x, dtype=float) > self.params["location"]).astype(float)
            return float(v) if scalar else v
        return self.cdf(x)

    def prob_exceeds(self, epsilon: float) -> float:
        """P(I > epsilon)."""
        return 1.0 - self.cdf(epsilon)

    def quantile(self, q: float) -> float:
        """Inverse CDF by bracketed root search, accurate to about 1e-9.

        q = 0 and q = 1 return the support ends (infinite for the
        unbounded families).
        """
        if not (0.0 <= q <= 1.0) or not np.isfinite(q):
            raise InputError(f"quantile level must lie in [0, 1], got {q}")
        if self.family == "point_mass":
            return self.params["location"]
        lo, hi = self.support
        if q == 0.0:
            return lo
        if q == 1.0:
            return hi
        blo, bhi = self._finite_bracket(q)
        return float(optimize.brentq(lambda t: self.cdf(t) - q, blo, bhi, xtol=1e-12, maxiter=300))

    def _finite_bracket(self, q: float) -> tuple[float, float]:
        if self.family == "normal":
            mu = self.params["mean"]
            sigma = math.sqrt(self.params["variance"])
            blo, bhi = mu - 15.0 * sigma, mu + 15.0 * sigma
            while self.cdf(blo) > q:
                blo = mu + 2.0 * (blo - mu)
            while self.cdf(bhi) < q:
                bhi = mu + 2.0 * (bhi - mu)
            return blo, bhi
        if self.family == "gamma":
            mean = self.params["shape"] * self.params["scale"]
            bhi = mean + 15.0 * math.sqrt(self.params["shape"]) * self.params["scale"]
            while self.cdf(bhi) < q:
                bhi *= 2.0
            return 0.0, bhi
        return 0.0, self.params["scale"]  # beta

    def moments(self) -> tuple[float, float]:
        """Analytic (mean, variance) of the fitted family."""
        if self.family == "normal":
            return self.params["mean"], self.params["variance"]
        if self.family == "gamma":
            k, theta = self.params["shape"], self.params["scale"]
            return k * theta, k * theta**2
        if self.family == "beta":
            a, b, scale = self.params["alpha"], self.params["beta"], self.params["scale"]
            return scale * a / (a + b), scale**2 * a * b / ((a + b) ** 2 * (a + b + 1.0))
        return self.params["location"], 0.0


def _point_mass(location: float) -> DistApprox:
    return DistApprox("point_mass", {"location": float(location)}, (float(location), float(location)))


def fit(family: str, mean: float, variance: float, i_max: float) -> DistApprox:
    """Moment-match one family to (mean, variance) on the range [0, i_max].

    Zero variance (and a zero-length range) degenerate to a point mass.
    Infeasible pairs raise InfeasibleFitError naming the violated bound.
    """
    if family not in FIT_FAMILIES:
        raise InputError(f"unknown family {family!r}; expected one of {FIT_FAMILIES}")
    if not (np.isfinite(mean) and np.isfinite(variance) and np.isfinite(i_max)):
        raise InputError("mean, variance and i_max must be finite")
    if variance < 0 or i_max < 0:
        raise InputError("variance and i_max must be non-negative")
    if i_max == 0.0:
        return _point_mass(0.0)
    if variance == 0.0:
        return _point_mass(mean)
    if family == "normal":
        return DistApprox("normal", {"mean": float(mean), "variance": float(variance)}, (-math.inf, math.inf))
    if family == "gamma":
        if mean <= 0:
            raise InfeasibleFitError(f"gamma needs mean > 0, got {mean}")
        return DistApprox(
            "gamma",
            {"shape": float(mean**2 / variance), "scale": float(variance / mean)},
            (0.0, math.inf),
        )
    # beta on the rescaled variable I / i_max
    if not 0.0 < mean < i_max:
        raise InfeasibleFitError(f"beta needs 0 < mean < i_max = {i_max}, got mean {mean}")
    bound = mean * (i_max - mean)
    if variance >= bound:
        raise InfeasibleFitError(
            f"variance {variance} >= mean * (i_max - mean) = {bound}; "
            "moment pair infeasible for beta"
        )
    mt = mean / i_max
    vt = variance / i_max**2
    alpha = mt * (mt * (1.0 - mt) / vt - 1.0)
    beta = alpha * (1.0 - mt) / mt
    return DistApprox(
        "beta",
        {"alpha": float(alpha), "beta": float(beta), "scale": float(i_max)},
        (0.0, float(i_max)),
    )


def fit_with_fallback(family: str, mean: float, variance: float, i_max: float):
    """``fit``, except an infeasible beta pair degrades to gamma with a warning.

    Returns (approximation, fallback family name or None).
    """
    try:
        return fit(family, mean, variance, i_max), None
    except InfeasibleFitError:
        if family != "beta":
            raise
        warnings.warn(
            "beta moment pair infeasible; falling back to the gamma family",
            RuntimeWarning,
            stacklevel=2,
        )
        return fit("gamma", mean, variance, i_max), "gamma"
