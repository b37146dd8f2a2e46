"""Datasets, the incremental classify-then-update loop, and reporting.

A run walks the (already shuffled) instances once.  At each step the
filters select attribute subsets from tables built over everything seen so
far, the classifier predicts the new instance with each subset, the
prediction is scored, and only then is the instance absorbed.  All filters
share one pass, so they see the identical instance order by construction;
the order is hashed into the report as evidence of pairing.
"""

from __future__ import annotations

import csv
import hashlib
import json
import math
import warnings
from dataclasses import asdict, dataclass, field
from itertools import combinations
from typing import Sequence

import numpy as np
from scipy import stats as scipy_stats

from .errors import InputError
from .filters import FILTERS, FilterConfig, decide
from .nb import NaiveBayesModel
from .tables import ContingencyTable

DEFAULT_MISSING_TOKEN = "?"
_FLAG_NAMES = {"f": "keep_f", "ff": "keep_ff", "bf": "keep_bf"}


@dataclass
class Dataset:
    """Categorical instances with vocabularies resolved up front.

    Instances are (value-index tuple, class index) pairs; None marks a
    missing cell.  Vocabularies are fixed at load time so incremental runs
    never meet an unknown index.
    """

    attributes: list[str]
    attribute_vocabs: list[list[str]]
    class_vocab: list[str]
    instances: list[tuple[tuple[int | None, ...], int | None]]
    provenance: dict = field(default_factory=dict)

    def __len__(self) -> int:
        return len(self.instances)

    @property
    def class_count(self) -> int:
        return len(self.class_vocab)

    @property
    def vocab_sizes(self) -> list[int]:
        return [len(v) for v in self.attribute_vocabs]


def load_dataset(
    path,
    delimiter: str = ",",
    header: bool = True,
    class_column=None,
    missing_token: str = DEFAULT_MISSING_TOKEN,
) -> Dataset:
    """Parse a CSV of categorical data; the class column defaults to the last.

    Vocabularies follow first appearance; cells equal to ``missing_token``
    become None.  ``class_column`` may be a header name or a 0-based index.
    """
    raw: list[tuple[int, list[str]]] = []
    with open(path, newline="") as fh:
        for lineno, row in enumerate(csv.reader(fh, delimiter=delimiter), start=1):
            if not row or all(cell.strip() == "" for cell in row):
                continue
            raw.append((lineno, [cell.strip() for cell in row]))
    if not raw:
        raise InputError(f"{path}: empty file")
    if header:
        names = raw[0][1]
        data = raw[1:]
    else:
        names = [f"col_{i}" for i in range(len(raw[0][1]))]
        data = raw
    if not data:
        raise InputError(f"{path}: header only, no instances")
    width = len(names)
    for lineno, row in data:
        if len(row) != width:
            raise InputError(f"{path}: line {lineno}: expected {width} fields, got {len(row)}")

    if class_column is None:
        class_index = width - 1
    elif isinstance(class_column, int):
        class_index = class_column
    else:
        text = str(class_column)
        if text in names:
            class_index = names.index(text)
        elif text.lstrip("-").isdigit():
            class_index = int(text)
        else:
            raise InputError(f"{path}: class column {class_column!r} not found in header")
    if not 0 <= class_index < width:
        raise InputError(f"{path}: class column index {class_index} outside [0, {width})")

    attr_indices = [i for i in range(width) if i != class_index]
    vocab_maps: list[dict[str, int]] = [{} for _ in attr_indices]
    class_map: dict[str, int] = {}
    instances = []
    for _, row in data:
        values = []
        for slot, col in enumerate(attr_indices):
            token = row[col]
            if token == missing_token:
                values.append(None)
            else:
                values.append(vocab_maps[slot].setdefault(token, len(vocab_maps[slot])))
        token = row[class_index]
        cls = None if token == missing_token else class_map.setdefault(token, len(class_map))
        instances.append((tuple(values), cls))
    return Dataset(
        attributes=[names[i] for i in attr_indices],
        attribute_vocabs=[list(m) for m in vocab_maps],
        class_vocab=list(class_map),
        instances=instances,
        provenance={
            "path": str(path),
            "delimiter": delimiter,
            "header": header,
            "class_column": class_index,
            "missing_token": missing_token,
        },
    )


def prepare(dataset: Dataset, mode: str = "drop_missing", seed: int = 0) -> Dataset:
    """Resolve missing cells, then shuffle with the seed.

    drop_missing removes rows containing any missing cell.  keep_missing
    keeps rows with missing attribute values (they still inform the filter
    tables through the partial margins) but drops rows with a missing
    class, which could be neither scored nor learned from.
    """
    if mode not in ("drop_missing", "keep_missing"):
        raise InputError(f"mode must be drop_missing or keep_missing, got {mode!r}")
    if mode == "drop_missing":
        kept = [
            row
            for row in dataset.instances
            if row[1] is not None and all(v is not None for v in row[0])
        ]
    else:
        kept = [row for row in dataset.instances if row[1] is not None]
    order = np.random.default_rng(seed).permutation(len(kept))
    return Dataset(
        attributes=list(dataset.attributes),
        attribute_vocabs=[list(v) for v in dataset.attribute_vocabs],
        class_vocab=list(dataset.class_vocab),
        instances=[kept[i] for i in order],
        provenance={**dataset.provenance, "prepared": {"mode": mode, "seed": int(seed)}},
    )


def attribute_tables(dataset: Dataset) -> dict[str, ContingencyTable]:
    """Full-dataset contingency tables, one per attribute against the class.

    Rows without a class label are skipped; a missing attribute value in a
    labelled row counts into that attribute's partial margin.
    """
    s = dataset.class_count
    joint = [np.zeros((v, s), dtype=np.int64) for v in dataset.vocab_sizes]
    partial = [np.zeros(s, dtype=np.int64) for _ in dataset.attributes]
    for values, cls in dataset.instances:
        if cls is None:
            continue
        for a, v in enumerate(values):
            if v is None:
                partial[a][cls] += 1
            else:
                joint[a][v, cls] += 1
    return {
        name: ContingencyTable(joint[a], missing_feature=partial[a])
        for a, name in enumerate(dataset.attributes)
    }


@dataclass
class FilterRun:
    """One filter's trajectory over an incremental pass."""

    correct: list[int]
    running_accuracy: list[float]
    selected_counts: list[int]
    final_accuracy: float
    mean_selected: float
    selected_sets: list[list[int]] | None = None


@dataclass
class RunReport:
    """Everything an incremental run produced; JSON- and CSV-serialisable."""

    config: dict
    filters: list[str]
    instance_count: int
    order_hash: str
    runs: dict[str, FilterRun]
    pair_tests: dict[str, dict]


def _order_hash(dataset: Dataset) -> str:
    return hashlib.sha256(repr(dataset.instances).encode()).hexdigest()


def _paired_t_curve(correct_a: Sequence[int], correct_b: Sequence[int]):
    """Per-k paired t statistics and two-tailed 0.05 significance flags.

    Zero-variance differences follow the conventions of paired_t_test;
    k = 1 is reported as (0, not significant).
    """
    d = np.asarray(correct_a, dtype=np.int64) - np.asarray(correct_b, dtype=np.int64)
    length = len(d)
    s1 = np.cumsum(d)
    s2 = np.cumsum(d * d)
    k = np.arange(1, length + 1)
    num = k * s2 - s1 * s1  # k(k-1) * sample variance, exact in integers
    with np.errstate(divide="ignore", invalid="ignore"):
        t = np.where(
            num > 0,
            s1 * np.sqrt((k - 1) / np.where(num > 0, num, 1)),
            np.where(s1 == 0, 0.0, np.sign(s1) * np.inf),
        )
    t[0] = 0.0
    critical = np.full(length, np.inf)
    if length > 1:
        critical[1:] = scipy_stats.t.ppf(0.975, k[1:] - 1)
    significant = np.abs(t) > critical
    return [float(v) for v in t], [bool(v) for v in significant]


def paired_t_test(correct_a: Sequence[float], correct_b: Sequence[float], k: int) -> tuple[float, bool]:
    """Two-tailed paired t test at level 0.05 over the first k entries.

    All-equal differences give t = 0 (not significant) when they are zero
    and an infinite t (significant) otherwise.
    """
    if k < 2:
        raise InputError("paired t test needs k >= 2")
    if len(correct_a) < k or len(correct_b) < k:
        raise InputError(f"both sequences must have at least k = {k} entries")
    d = np.asarray(correct_a[:k], dtype=float) - np.asarray(correct_b[:k], dtype=float)
    mean = float(d.mean())
    if np.all(d == d[0]):
        if mean == 0.0:
            return 0.0, False
        return math.copysign(math.inf, mean), True
    t = mean * math.sqrt(k) / float(d.std(ddof=1))
    critical = float(scipy_stats.t.ppf(0.975, k - 1))
    return t, bool(abs(t) > critical)


def run_incremental(
    dataset: Dataset,
    cfg: FilterConfig,
    filters: Sequence[str] = FILTERS,
    record_selected: bool = False,
) -> RunReport:
    """Classify-then-update pass over a prepared dataset.

    Per instance: build per-attribute tables from everything seen so far,
    let each filter pick its subset, predict with that subset, score, and
    only then absorb the instance into the classifier and the tallies.
    """
    filters = list(filters)
    if not filters or len(set(filters)) != len(filters):
        raise InputError("filters must be a non-empty list without duplicates")
    for f in filters:
        if f not in FILTERS:
            raise InputError(f"unknown filter {f!r}; expected one of {FILTERS}")
    if any(f != "f" for f in filters):
        cfg.require_credible_threshold()
    if len(dataset) < 1:
        raise InputError("run needs at least one instance")
    if any(cls is None for _, cls in dataset.instances):
        raise InputError("run needs prepared data: instances without a class label remain")

    s = dataset.class_count
    sizes = dataset.vocab_sizes
    n_attr = len(sizes)
    model = NaiveBayesModel(sizes, s)
    joint = [np.zeros((v, s), dtype=np.int64) for v in sizes]
    partial = [np.zeros(s, dtype=np.int64) for _ in range(n_attr)]

    correct = {f: [] for f in filters}
    counts = {f: [] for f in filters}
    sets = {f: [] for f in filters} if record_selected else None

    for values, cls in dataset.instances:
        selected = {f: [] for f in filters}
        for a in range(n_attr):
            table = ContingencyTable(joint[a], missing_feature=partial[a])
            decision = decide(table, cfg, attribute=a)
            for f in filters:
                if getattr(decision, _FLAG_NAMES[f]):
                    selected[f].append(a)
        for f in filters:
            predicted, _ = model.predict(values, selected[f])
            correct[f].append(int(predicted == cls))
            counts[f].append(len(selected[f]))
            if sets is not None:
                sets[f].append(list(selected[f]))
        model.update(values, cls)
        for a, v in enumerate(values):
            if v is None:
                partial[a][cls] += 1
            else:
                joint[a][v, cls] += 1

    steps = np.arange(1, len(dataset) + 1)
    runs = {}
    for f in filters:
        acc = np.cumsum(correct[f]) / steps
        runs[f] = FilterRun(
            correct=correct[f],
            running_accuracy=[float(a) for a in acc],
            selected_counts=counts[f],
            final_accuracy=float(acc[-1]),
            mean_selected=float(np.mean(counts[f])),
            selected_sets=sets[f] if sets is not None else None,
        )
    pair_tests = {}
    for a, b in combinations(filters, 2):
        t_curve, sig_curve = _paired_t_curve(correct[a], correct[b])
        pair_tests[f"{a}_vs_{b}"] = {"t": t_curve, "significant": sig_curve}

    return RunReport(
        config={
            "epsilon": cfg.epsilon,
            "p_level": cfg.p_level,
            "family": cfg.family,
            "prior_kind": cfg.prior.kind,
            "prior_weight": cfg.prior.weight,
            "prepared": dataset.provenance.get("prepared"),
        },
        filters=filters,
        instance_count=len(dataset),
        order_hash=_order_hash(dataset),
        runs=runs,
        pair_tests=pair_tests,
    )


def report_to_dict(report: RunReport) -> dict:
    return asdict(report)


def report_from_dict(payload: dict) -> RunReport:
    runs = {name: FilterRun(**body) for name, body in payload["runs"].items()}
    return RunReport(
        config=payload["config"],
        filters=list(payload["filters"]),
        instance_count=int(payload["instance_count"]),
        order_hash=payload["order_hash"],
        runs=runs,
        pair_tests=payload["pair_tests"],
    )


def load_report(path) -> RunReport:
    with open(path) as fh:
        return report_from_dict(json.load(fh))


def write_report(report: RunReport, path, format: str = "csv") -> None:
    """Emit per-instance curves as CSV or the full structure as JSON."""
    if format == "json":
        with open(path, "w") as fh:
            json.dump(report_to_dict(report), fh, indent=2)
            fh.write("\n")
        return
    if format != "csv":
        raise InputError(f"format must be csv or json, got {format!r}")
    pairs = list(report.pair_tests)
    header = (
        ["instance"]
        + [f"accuracy_{f}" for f in report.filters]
        + [f"selected_{f}" for f in report.filters]
        + [f"significant_{p}" for p in pairs]
    )
    with open(path, "w", newline="") as fh:
        writer = csv.writer(fh)
        writer.writerow(header)
        for i in range(report.instance_count):
            row = [i + 1]
            row += [repr(report.runs[f].running_accuracy[i]) for f in report.filters]
            row += [report.runs[f].selected_counts[i] for f in report.filters]
            row += [int(report.pair_tests[p]["significant"][i]) for p in pairs]
            writer.writerow(row)


def discretize_equal_frequency(values: Sequence[float], bins: int) -> list[str]:
    """Quantile-bin a numeric column into labels bin_0 .. bin_{B-1}.

    Boundaries are the 1/B .. (B-1)/B quantiles; a value equal to a
    boundary goes to the lower bin.  Fewer distinct values than bins falls
    back to one bin per distinct value, with a warning.
    """
    if bins < 2:
        raise InputError("bin count must be >= 2")
    arr = np.asarray(values, dtype=float)
    if arr.size == 0 or not np.all(np.isfinite(arr)):
        raise InputError("column must be non-empty and numeric")
    distinct = np.unique(arr)
    if distinct.size < bins:
        warnings.warn(
            f"only {distinct.size} distinct values for {bins} bins; using one bin per value",
            RuntimeWarning,
            stacklevel=2,
        )
        lookup = {v: i for i, v in enumerate(distinct.tolist())}
        return [f"bin_{lookup[float(v)]}" for v in arr.tolist()]
    boundaries = np.quantile(arr, np.arange(1, bins) / bins)
    indices = np.searchsorted(boundaries, arr, side="left")
    return [f"bin_{i}" for i in indices]


def synthetic_dataset(
    n_instances: int,
    informative: int = 5,
    noise: int = 5,
    seed: int = 0,
    flip: float = 0.2,
) -> Dataset:
    """Binary benchmark: the class copied into ``informative`` attributes
    with independent flips, plus ``noise`` attributes independent of it."""
    if n_instances < 1:
        raise InputError("n_instances must be >= 1")
    rng = np.random.default_rng(seed)
    y = rng.integers(0, 2, size=n_instances)
    columns = []
    for _ in range(informative):
        flips = rng.random(n_instances) < flip
        columns.append(np.where(flips, 1 - y, y))
    for _ in range(noise):
        columns.append(rng.integers(0, 2, size=n_instances))
    names = [f"dep_{k}" for k in range(informative)] + [f"noise_{k}" for k in range(noise)]
    instances = [
        (tuple(int(col[i]) for col in columns), int(y[i])) for i in range(n_instances)
    ]
    return Dataset(
        attributes=names,
        attribute_vocabs=[["0", "1"] for _ in names],
        class_vocab=["0", "1"],
        instances=instances,
        provenance={"synthetic": {"n": n_instances, "informative": informative, "noise": noise, "seed": seed, "flip": flip}},
    )
