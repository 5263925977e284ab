"""Concentration and association measures for usage distributions."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np


def gini(values) -> float:
    """Gini coefficient of a vector of non-negative magnitudes.

    Computed with the sorted-rank identity
    ``G = (2 * sum(i * x_(i))) / (n * sum(x)) - (n + 1) / n``
    over ascending-sorted values with 1-based ranks, which is O(n log n)
    and equal to the mean-absolute-difference form.
    """
    x = np.asarray(values, dtype=float)
    if x.ndim != 1 or x.size == 0:
        raise ValueError("gini requires a non-empty 1-d vector")
    if np.any(x < 0):
        raise ValueError("gini requires non-negative values")
    total = x.sum()
    if total == 0:
        raise ValueError("gini is undefined for an all-zero vector")
    x = np.sort(x)
    n = x.size
    ranks = np.arange(1, n + 1)
    return float((2.0 * np.dot(ranks, x)) / (n * total) - (n + 1) / n)


def midranks(values) -> np.ndarray:
    """Ranks 1..n with ties sharing their average rank."""
    x = np.asarray(values, dtype=float)
    order = np.argsort(x, kind="mergesort")
    ranks = np.empty(x.size, dtype=float)
    sx = x[order]
    i = 0
    while i < x.size:
        j = i
        while j + 1 < x.size and sx[j + 1] == sx[i]:
            j += 1
        ranks[order[i : j + 1]] = (i + j) / 2.0 + 1.0
        i = j + 1
    return ranks


def spearman(x, y) -> float:
    """Spearman rank correlation: Pearson correlation of mid-ranks."""
    a = np.asarray(x, dtype=float)
    b = np.asarray(y, dtype=float)
    if a.shape != b.shape or a.ndim != 1:
        raise ValueError("spearman requires two equal-length 1-d vectors")
    if a.size < 3:
        raise ValueError("spearman requires at least 3 observations")
    ra = midranks(a)
    rb = midranks(b)
    da = ra - ra.mean()
    db = rb - rb.mean()
    denom = np.sqrt(np.dot(da, da) * np.dot(db, db))
    if denom == 0:
        raise ValueError("spearman is undefined for a constant vector")
    return float(np.dot(da, db) / denom)


@dataclass(frozen=True)
class FiveNumber:
    min: float
    q1: float
    median: float
    q3: float
    max: float


def five_number(values) -> FiveNumber:
    """Min, linear-interpolated quartiles, and max."""
    x = np.asarray(values, dtype=float)
    if x.size == 0:
        raise ValueError("five_number requires a non-empty vector")
    q1, med, q3 = np.percentile(x, [25.0, 50.0, 75.0], method="linear")
    return FiveNumber(float(x.min()), float(q1), float(med), float(q3), float(x.max()))
