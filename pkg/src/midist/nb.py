"""Incremental naive Bayes with add-one smoothing on every estimate."""

from __future__ import annotations

import math
from typing import Iterable, Sequence

import numpy as np

from .errors import InputError


class NaiveBayesModel:
    """Categorical naive Bayes learned one labelled instance at a time.

    Scoring uses the smoothed posterior-mean estimates

        P(class j)            = (count_j + 1) / (seen + s)
        P(value v | class j)  = (count_vj + 1) / (count_j + vocab size)

    accumulated in log space.  Instance cells may be None (unobserved);
    such cells are skipped both when predicting and when updating.
    Updates are single-writer by contract; reads between updates are free.
    """

    def __init__(self, vocab_sizes: Sequence[int], class_count: int):
        if class_count < 1:
            raise InputError("class_count must be >= 1")
        if any(v < 1 for v in vocab_sizes):
            raise InputError("every attribute needs a vocabulary of size >= 1")
        self.vocab_sizes = [int(v) for v in vocab_sizes]
        self.class_count = int(class_count)
        self.class_counts = np.zeros(self.class_count, dtype=np.int64)
        self.cond_counts = [np.zeros((v, self.class_count), dtype=np.int64) for v in self.vocab_sizes]
        self.seen = 0

    def _check_instance(self, instance) -> None:
        if len(instance) != len(self.vocab_sizes):
            raise InputError(
                f"instance has {len(instance)} attributes, model expects {len(self.vocab_sizes)}"
            )
        for a, v in enumerate(instance):
            if v is None:
                continue
            if not 0 <= v < self.vocab_sizes[a]:
                raise InputError(
                    f"attribute {a}: value index {v} outside vocabulary of size {self.vocab_sizes[a]}"
                )

    def predict(self, instance, selected: Iterable[int]) -> tuple[int, np.ndarray]:
        """Most probable class and the full posterior over classes.

        Only attributes in ``selected`` contribute likelihood terms; ties
        resolve to the lowest class index.
        """
        self._check_instance(instance)
        log_scores = np.log(self.class_counts + 1.0) - math.log(self.seen + self.class_count)
        for a in sorted(set(selected)):
            if not 0 <= a < len(self.vocab_sizes):
                raise InputError(f"selected attribute {a} does not exist")
            v = instance[a]
            if v is None:
                continue
            log_scores = log_scores + np.log(self.cond_counts[a][v] + 1.0)
            log_scores = log_scores - np.log(self.class_counts + self.vocab_sizes[a])
        weights = np.exp(log_scores - log_scores.max())
        posterior = weights / weights.sum()
        return int(np.argmax(posterior)), posterior

    def update(self, instance, class_index: int) -> None:
        """Absorb one labelled instance into the tallies."""
        self._check_instance(instance)
        if not 0 <= class_index < self.class_count:
            raise InputError(f"class index {class_index} outside [0, {self.class_count})")
        self.class_counts[class_index] += 1
        for a, v in enumerate(instance):
            if v is not None:
                self.cond_counts[a][v, class_index] += 1
        self.seen += 1
