"""Attribute relevance filters over the information posterior.

Three rules, all reading the same per-attribute posterior:

    f   keep when the plug-in value exceeds the threshold
    ff  keep only when relevance is highly probable, P(I > eps) > p
    bf  keep unless irrelevance is highly probable, i.e. discard when
        P(I <= eps) >= p

With p >= 1/2 the ff set is always contained in the bf set.
"""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from .core import mi_upper_bound
from .dist import FIT_FAMILIES, fit_with_fallback
from .errors import ConfigurationError, InputError
from .missing import moments_with_missing
from .moments import mi_moments
from .tables import ContingencyTable, PriorSpec, apply_prior

FILTERS = ("f", "ff", "bf")
_FLAG_NAMES = {"f": "keep_f", "ff": "keep_ff", "bf": "keep_bf"}


@dataclass(frozen=True)
class FilterConfig:
    """Shared settings for the three filters."""

    epsilon: float = 0.003
    p_level: float = 0.95
    family: str = "beta"
    prior: PriorSpec = field(default_factory=PriorSpec)

    def __post_init__(self) -> None:
        if not np.isfinite(self.epsilon) or self.epsilon < 0:
            raise ConfigurationError("epsilon must be finite and non-negative")
        if not 0.0 < self.p_level < 1.0:
            raise ConfigurationError("p_level must lie strictly inside (0, 1)")
        if self.family not in FIT_FAMILIES:
            raise ConfigurationError(f"family must be one of {FIT_FAMILIES}")

    def require_credible_threshold(self) -> None:
        """The credible filters need epsilon > 0.

        The posterior puts probability one on strictly positive
        information, so a zero threshold could never separate anything;
        only the plug-in filter tolerates epsilon = 0.
        """
        if self.epsilon == 0.0:
            raise ConfigurationError(
                "epsilon = 0 is rejected for the credible filters: exact "
                "independence has posterior probability zero, so every "
                "attribute would be kept"
            )


@dataclass(frozen=True)
class FilterDecision:
    """Per-attribute outcome of all three keep rules."""

    attribute: object
    j: float
    mean: float
    variance: float
    prob_exceeds_eps: float
    keep_f: bool
    keep_ff: bool
    keep_bf: bool
    degenerate: bool = False
    fit_fallback: str | None = None
    used_missing: bool = False


def decide(table: ContingencyTable, cfg: FilterConfig, attribute=None) -> FilterDecision:
    """Evaluate every keep rule for one attribute-against-class table.

    Single-valued attributes (information range of zero) are degenerate
    and discarded by all three rules.  Tables carrying partial margins are
    routed through the incomplete-sample moments automatically.
    """
    upper = mi_upper_bound(table.r, table.s)
    if upper == 0.0:
        return FilterDecision(
            attribute=attribute,
            j=0.0,
            mean=0.0,
            variance=0.0,
            prob_exceeds_eps=0.0,
            keep_f=False,
            keep_ff=False,
            keep_bf=False,
            degenerate=True,
        )
    if table.has_missing():
        mm = moments_with_missing(table, cfg.prior)
        j, mean, variance = mm.mean, mm.mean, mm.variance
        used_missing = True
    else:
        pc = apply_prior(table, cfg.prior)
        mom = mi_moments(pc)
        # j_term is the plug-in value itself; clamp mirrors empirical_mi
        j, mean, variance = max(0.0, mom.j_term), mom.mean, mom.variance
        used_missing = False
    approx, fallback = fit_with_fallback(cfg.family, mean, variance, upper)
    prob = approx.prob_exceeds(cfg.epsilon)
    return FilterDecision(
        attribute=attribute,
        j=j,
        mean=mean,
        variance=variance,
        prob_exceeds_eps=prob,
        keep_f=bool(j > cfg.epsilon),
        keep_ff=bool(prob > cfg.p_level),
        keep_bf=bool(prob > 1.0 - cfg.p_level),
        fit_fallback=fallback,
        used_missing=used_missing,
    )


def select_features(tables: dict, cfg: FilterConfig, which: str) -> list:
    """Apply one filter across attributes; kept ids come back in input order.

    ``tables`` maps attribute id to that attribute's table against the
    class; all tables must agree on the class cardinality.
    """
    if which not in FILTERS:
        raise InputError(f"unknown filter {which!r}; expected one of {FILTERS}")
    if which != "f":
        cfg.require_credible_threshold()
    items = list(tables.items())
    cardinalities = {t.s for _, t in items}
    if len(cardinalities) > 1:
        raise InputError(
            f"attributes disagree on the class cardinality: {sorted(cardinalities)}"
        )
    flag = _FLAG_NAMES[which]
    return [aid for aid, t in items if getattr(decide(t, cfg, aid), flag)]
