"""Contingency tables for one categorical feature against the class.

Observed counts stay integral.  Prior pseudo-counts are real valued
(Jeffreys and Perks add fractions), so the prior-augmented grid is stored
as floats with cached marginals.  All values are immutable after
construction and safe to share between threads.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError, ZeroCellError

PRIOR_KINDS = ("uniform", "jeffreys", "haldane", "perks", "custom")
_NAMED_WEIGHTS = {"uniform": 1.0, "jeffreys": 0.5, "haldane": 0.0}


def _readonly(a: np.ndarray) -> np.ndarray:
    a.setflags(write=False)
    return a


def _as_margin(vec, length: int, name: str) -> np.ndarray:
    if vec is None:
        return np.zeros(length)
    src = np.asarray(vec)
    out = src.astype(float)
    if out.shape != (length,):
        raise InputError(f"{name} must have length {length}, got shape {out.shape}")
    if np.issubdtype(src.dtype, np.integer):
        if src.min() < 0:
            raise InputError(f"{name} entries must be finite and non-negative")
    elif not np.all(np.isfinite(out)) or np.any(out < 0):
        raise InputError(f"{name} entries must be finite and non-negative")
    return out


@dataclass(frozen=True, eq=False)
class ContingencyTable:
    """Joint counts of a feature (rows) against the class (columns).

    ``missing_class[i]`` counts instances where feature value ``i`` was
    observed but the class was not; ``missing_feature[j]`` counts instances
    where class ``j`` was observed but the feature value was not.
    """

    counts: np.ndarray
    missing_class: np.ndarray | None = None
    missing_feature: np.ndarray | None = None

    def __post_init__(self) -> None:
        counts = np.asarray(self.counts)
        if counts.ndim != 2 or counts.shape[0] < 1 or counts.shape[1] < 1:
            raise InputError("counts must be an r x s grid with r >= 1 and s >= 1")
        if np.issubdtype(counts.dtype, np.integer):
            if counts.min() < 0:
                raise InputError("counts must be non-negative")
        else:
            as_float = counts.astype(float)
            if not np.all(np.isfinite(as_float)):
                raise InputError("counts must be finite")
            if np.any(as_float < 0):
                raise InputError("counts must be non-negative")
            if np.any(np.mod(as_float, 1.0) != 0):
                raise InputError("observed counts must be integral")
        r, s = counts.shape
        mc = _as_margin(self.missing_class, r, "missing_class")
        mf = _as_margin(self.missing_feature, s, "missing_feature")
        object.__setattr__(self, "counts", _readonly(counts.astype(np.int64)))
        object.__setattr__(self, "missing_class", _readonly(mc))
        object.__setattr__(self, "missing_feature", _readonly(mf))

    @property
    def r(self) -> int:
        return int(self.counts.shape[0])

    @property
    def s(self) -> int:
        return int(self.counts.shape[1])

    @property
    def total(self) -> float:
        """All contributing instances, complete pairs plus both partial margins."""
        return float(self.counts.sum() + self.missing_class.sum() + self.missing_feature.sum())

    def has_missing(self) -> bool:
        return bool(self.missing_class.sum() > 0 or self.missing_feature.sum() > 0)

    def transposed(self) -> "ContingencyTable":
        """Swap the roles of the two variables, margins included."""
        return ContingencyTable(self.counts.T, self.missing_feature, self.missing_class)


@dataclass(frozen=True)
class PriorSpec:
    """Per-cell prior pseudo-count for the Dirichlet posterior.

    Named kinds carry their own weight (uniform 1, jeffreys 1/2, haldane 0,
    perks 1/(r*s)); only ``custom`` takes an explicit one.
    """

    kind: str = "uniform"
    weight: float | None = None

    def __post_init__(self) -> None:
        if self.kind not in PRIOR_KINDS:
            raise InputError(f"unknown prior kind {self.kind!r}; expected one of {PRIOR_KINDS}")
        if self.kind == "custom":
            if self.weight is None or not np.isfinite(self.weight) or self.weight < 0:
                raise InputError("custom prior needs a finite non-negative weight")
        elif self.weight is not None:
            raise InputError(f"prior kind {self.kind!r} determines its own weight")

    def cell_weight(self, r: int, s: int) -> float:
        """Pseudo-count added to every cell of an r x s table."""
        if self.kind == "perks":
            return 1.0 / (r * s)
        if self.kind == "custom":
            return float(self.weight)
        return _NAMED_WEIGHTS[self.kind]


@dataclass(frozen=True, eq=False)
class PosteriorCounts:
    """Prior-augmented counts with cached marginals.

    This grid is the sufficient statistic for every posterior quantity in
    the package.  Marginals are validated against the grid at construction
    (tolerance 1e-12 relative to the total).
    """

    n: np.ndarray
    row_marginals: np.ndarray
    col_marginals: np.ndarray
    total: float

    def __post_init__(self) -> None:
        n = np.asarray(self.n, dtype=float)
        if n.ndim != 2 or n.shape[0] < 1 or n.shape[1] < 1:
            raise InputError("posterior grid must be an r x s array")
        if not np.all(np.isfinite(n)) or np.any(n < 0):
            raise InputError("posterior cells must be finite and non-negative")
        rows = np.asarray(self.row_marginals, dtype=float)
        cols = np.asarray(self.col_marginals, dtype=float)
        total = float(self.total)
        tol = 1e-12 * max(total, 1.0)
        if rows.shape != (n.shape[0],) or np.max(np.abs(rows - n.sum(axis=1))) > tol:
            raise InputError("row marginals inconsistent with the grid")
        if cols.shape != (n.shape[1],) or np.max(np.abs(cols - n.sum(axis=0))) > tol:
            raise InputError("column marginals inconsistent with the grid")
        if abs(total - n.sum()) > tol:
            raise InputError("total inconsistent with the grid")
        object.__setattr__(self, "n", _readonly(n))
        object.__setattr__(self, "row_marginals", _readonly(rows))
        object.__setattr__(self, "col_marginals", _readonly(cols))
        object.__setattr__(self, "total", total)

    @classmethod
    def from_grid(cls, grid) -> "PosteriorCounts":
        """Build from a grid alone; marginals are consistent by construction."""
        g = np.asarray(grid, dtype=float)
        if g.ndim != 2 or g.shape[0] < 1 or g.shape[1] < 1:
            raise InputError("posterior grid must be an r x s array")
        if not np.all(np.isfinite(g)) or g.min() < 0:
            raise InputError("posterior cells must be finite and non-negative")
        rows = g.sum(axis=1)
        self = object.__new__(cls)
        object.__setattr__(self, "n", _readonly(g.copy()))
        object.__setattr__(self, "row_marginals", _readonly(rows))
        object.__setattr__(self, "col_marginals", _readonly(g.sum(axis=0)))
        object.__setattr__(self, "total", float(rows.sum()))
        return self

    @property
    def r(self) -> int:
        return int(self.n.shape[0])

    @property
    def s(self) -> int:
        return int(self.n.shape[1])

    def transposed(self) -> "PosteriorCounts":
        return PosteriorCounts(self.n.T, self.col_marginals, self.row_marginals, self.total)


def build_table(pairs: Iterable[Sequence[int]], r: int, s: int) -> ContingencyTable:
    """Tally (feature value, class) index pairs into an r x s table."""
    if r < 1 or s < 1:
        raise InputError("cardinalities must be >= 1")
    counts = np.zeros((r, s), dtype=np.int64)
    for pos, pair in enumerate(pairs):
        i, j = pair
        if not (0 <= i < r and 0 <= j < s):
            raise InputError(f"pair #{pos} = ({i}, {j}) lies outside [0, {r}) x [0, {s})")
        counts[i, j] += 1
    return ContingencyTable(counts)


def apply_prior(table: ContingencyTable, prior: PriorSpec) -> PosteriorCounts:
    """Add the prior pseudo-count to every cell and recompute marginals.

    A weight of zero is rejected whenever the table has empty cells, since
    the downstream moment formulas divide by every cell.
    """
    weight = prior.cell_weight(table.r, table.s)
    if weight == 0.0 and np.any(table.counts == 0):
        raise ZeroCellError(
            "zero-cell posterior: prior weight 0 leaves empty cells that the "
            "moment formulas divide by"
        )
    return PosteriorCounts.from_grid(table.counts + weight)


def marginals(pc: PosteriorCounts) -> tuple[np.ndarray, np.ndarray, float]:
    """Cached (row sums, column sums, total) of a posterior grid."""
    return pc.row_marginals, pc.col_marginals, pc.total


def table_from_json(obj) -> ContingencyTable:
    """Build a table from the JSON literal {"r", "s", "counts", ...}.

    The missing-count vectors are optional and default to zero.
    """
    if isinstance(obj, (str, bytes)):
        try:
            obj = json.loads(obj)
        except json.JSONDecodeError as exc:
            raise InputError(f"invalid table JSON: {exc}") from exc
    if not isinstance(obj, dict):
        raise InputError("table literal must be a JSON object")
    for key in ("r", "s", "counts"):
        if key not in obj:
            raise InputError(f"table literal is missing {key!r}")
    counts = np.asarray(obj["counts"])
    if counts.ndim != 2 or counts.shape != (int(obj["r"]), int(obj["s"])):
        raise InputError(
            f"counts shape {counts.shape} does not match r={obj['r']}, s={obj['s']}"
        )
    return ContingencyTable(counts, obj.get("missing_class"), obj.get("missing_feature"))
