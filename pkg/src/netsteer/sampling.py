"""Finite-shot emulation of correlation tables.

Sampling algorithm (reproducible from the description alone):

* setting tuples are visited in sorted order of their ``(xs, y)`` keys; the
  position of a tuple in that order is its *tuple index*;
* each tuple draws from a Philox4x64-10 counter-based stream keyed by the
  two 64-bit words ``(seed, tuple index)`` with the counter starting at 0;
  draw ``j`` is the ``j``-th 64-bit output word of that stream;
* a draw ``u`` becomes ``U = (u >> 11) * 2**-53`` and selects the first
  outcome (C order over ``(a_1, ..., a_n, b)``) whose cumulative probability
  exceeds ``U``; the last cumulative value is pinned to 1.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Mapping

import numpy as np

from .assemblages import CorrelationTable
from .criteria import TableCriterion
from .errors import PreconditionError


@dataclass(frozen=True)
class ShotPlan:
    shots: int
    seed: int = 0

    def __post_init__(self):
        if int(self.shots) < 1:
            raise PreconditionError(f"shots must be >= 1, got {self.shots}")
        if not 0 <= int(self.seed) < 2**64:
            raise PreconditionError("seed must fit in an unsigned 64-bit integer")
        object.__setattr__(self, "shots", int(self.shots))
        object.__setattr__(self, "seed", int(self.seed))


@dataclass(frozen=True, eq=False)
class EmpiricalTable:
    alice_settings: tuple[int, ...]
    bob_outcomes: tuple[int, ...]
    counts: Mapping[tuple, np.ndarray]
    shots: int
    seed: int

    def frequencies(self) -> CorrelationTable:
        return CorrelationTable(self.alice_settings, self.bob_outcomes,
                                {k: c / self.shots for k, c in self.counts.items()})


def tuple_stream(seed: int, index: int) -> np.random.Philox:
    return np.random.Philox(key=np.array([seed, index], dtype=np.uint64))


def uniforms(seed: int, index: int, count: int) -> np.ndarray:
    raw = tuple_stream(seed, index).random_raw(count)
    return (raw >> np.uint64(11)).astype(np.float64) * 2.0**-53


def sample(table: CorrelationTable, plan: ShotPlan) -> EmpiricalTable:
    counts = {}
    for index, key in enumerate(table.keys()):
        p = table[key]
        cdf = np.cumsum(np.clip(p.reshape(-1), 0.0, None))
        cdf /= cdf[-1]
        cdf[-1] = 1.0
        outcome = np.searchsorted(cdf, uniforms(plan.seed, index, plan.shots), side="right")
        counts[key] = np.bincount(outcome, minlength=p.size).reshape(p.shape)
    return EmpiricalTable(table.alice_settings, table.bob_outcomes, counts, plan.shots, plan.seed)


def _term_covariance(criterion: TableCriterion, freq: CorrelationTable, shots: float) -> np.ndarray:
    """Multinomial covariance of the term estimates (setting tuples are independent)."""
    weights = criterion.term_weights()
    k = len(weights)
    cov = np.zeros((k, k))
    if math.isinf(shots):
        return cov
    for key in criterion.required_keys():
        f = freq[key].reshape(-1)
        ws = [w[key].reshape(-1) if key in w else np.zeros_like(f) for w in weights]
        means = [wi @ f for wi in ws]
        for i in range(k):
            for j in range(i, k):
                c = (ws[i] * ws[j]) @ f - means[i] * means[j]
                cov[i, j] += c / shots
                cov[j, i] = cov[i, j]
    return cov


def _gradient(combine, t: np.ndarray, h: float = 1e-6) -> np.ndarray:
    g = np.zeros_like(t)
    for i in range(len(t)):
        e = np.zeros_like(t)
        e[i] = h
        g[i] = (combine(t + e) - combine(t - e)) / (2 * h)
    return g


def estimate_criterion(emp, criterion: TableCriterion) -> tuple[float, float]:
    """Plug-in estimate of a criterion and its standard error.

    Linear criteria use the exact multinomial delta method. For nonlinear
    ones each term's standard error is pushed through the outer function by
    a one-sided finite step and the contributions are added (a conservative,
    approximate first-order bound that stays finite where the function has
    a kink or an infinite slope).
    """
    if isinstance(emp, CorrelationTable):
        freq, shots = emp, math.inf
    else:
        freq, shots = emp.frequencies(), emp.shots
    missing = criterion.required_keys() - set(freq.probs)
    if missing:
        raise PreconditionError(f"empirical table lacks setting tuples {sorted(missing)}")
    t = criterion.term_values(freq)
    value = float(criterion.combine(t))
    cov = _term_covariance(criterion, freq, shots)
    if criterion.linear:
        g = _gradient(criterion.combine, t)
        return value, float(math.sqrt(max(g @ cov @ g, 0.0)))
    se = np.sqrt(np.clip(np.diag(cov), 0.0, None))
    total = 0.0
    for i, s in enumerate(se):
        if s == 0:
            continue
        step = np.zeros_like(t)
        step[i] = s
        total += max(abs(criterion.combine(t + step) - value), abs(criterion.combine(t - step) - value))
    return value, float(total)
