"""Result containers shared by the statistical routines."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np


@dataclass(frozen=True)
class TestResult:
    statistic: float
    p_value: float
    method: str
    n: tuple[int, ...]


@dataclass(frozen=True)
class TrendResult(TestResult):
    tau: float = 0.0
    trend: str = "no trend"  # increasing | decreasing | no trend


@dataclass(frozen=True)
class EffectSize:
    delta: float
    magnitude: str  # negligible | small | medium | large


@dataclass
class GlmFit:
    family: str  # binomial-logit | negative-binomial-log
    terms: tuple[str, ...]
    coefficients: np.ndarray
    standard_errors: np.ndarray
    dispersion: float | None
    log_likelihood: float
    converged: bool
    iterations: int
    ll_trace: list[float] = field(default_factory=list)
    diagnostic: str | None = None


@dataclass(frozen=True)
class EffectRow:
    term: str
    ratio: float
    ci_low: float
    ci_high: float
    p_value: float


EffectTable = tuple[EffectRow, ...]
