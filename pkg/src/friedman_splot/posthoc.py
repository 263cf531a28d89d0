"""Pairwise post-hoc procedures after a Friedman test, and p-value adjustment."""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from itertools import combinations
from typing import Sequence

import numpy as np

from .errors import DegenerateError, DomainError
from .ranking import RankMatrix
from .specfun import _check_probability, studentized_range_sf, t_sf


class AdjustMethod(str, Enum):
    BONFERRONI = "bonferroni"
    SIDAK_EXACT = "sidak_exact"
    HOLM = "holm"
    HOCHBERG = "hochberg"
    HOMMEL = "hommel"
    BH = "bh"
    BY = "by"
    NONE = "none"

    def __str__(self) -> str:
        return self.value

    @classmethod
    def coerce(cls, value: "AdjustMethod | str") -> "AdjustMethod":
        if isinstance(value, cls):
            return value
        try:
            return cls(str(value).lower().replace("-", "_"))
        except ValueError:
            names = ", ".join(m.value for m in cls)
            raise DomainError(f"unknown adjustment method {value!r}; expected one of {names}") from None


@dataclass(frozen=True)
class PairwiseComparison:
    group_i: str
    group_j: str
    mean_rank_diff: float
    statistic: float
    p_value: float
    significant: bool


def adjust_pvalues(p: Sequence[float], method: AdjustMethod | str) -> list[float]:
    """Adjust a family of p-values for multiplicity.

    Follows the conventional definitions (as in R's ``p.adjust``), plus
    ``sidak_exact`` which maps each p to ``1 - (1 - p)**n``.
    """
    method = AdjustMethod.coerce(method)
    pv = np.array([_check_probability(x) for x in p], dtype=float)
    n = pv.size
    if n == 0:
        return []
    if method is AdjustMethod.NONE:
        out = pv
    elif method is AdjustMethod.BONFERRONI:
        out = n * pv
    elif method is AdjustMethod.SIDAK_EXACT:
        with np.errstate(divide="ignore"):
            out = -np.expm1(n * np.log1p(-pv))
    elif method is AdjustMethod.HOLM:
        order = np.argsort(pv, kind="stable")
        steps = np.maximum.accumulate((n - np.arange(n)) * pv[order])
        out = np.empty(n)
        out[order] = steps
    elif method is AdjustMethod.HOCHBERG:
        order = np.argsort(pv, kind="stable")[::-1]
        steps = np.minimum.accumulate((np.arange(n) + 1) * pv[order])
        out = np.empty(n)
        out[order] = steps
    elif method is AdjustMethod.HOMMEL:
        out = _hommel(pv)
    else:
        order = np.argsort(pv, kind="stable")[::-1]
        i = np.arange(n, 0, -1)
        factor = float(np.sum(1.0 / np.arange(1, n + 1))) if method is AdjustMethod.BY else 1.0
        steps = np.minimum.accumulate(factor * n / i * pv[order])
        out = np.empty(n)
        out[order] = steps
    return [float(v) for v in np.clip(out, 0.0, 1.0)]


def _hommel(p: np.ndarray) -> np.ndarray:
    n = p.size
    if n == 1:
        return p.copy()
    order = np.argsort(p, kind="stable")
    ps = p[order]
    i = np.arange(1, n + 1)
    q = np.full(n, np.min(n * ps / i))
    pa = q.copy()
    for m in range(n - 1, 1, -1):
        i1 = np.arange(n - m + 1)
        i2 = np.arange(n - m + 1, n)
        q1 = np.min(m * ps[i2] / np.arange(2, m + 1))
        q[i1] = np.minimum(m * ps[i1], q1)
        q[i2] = q[n - m]
        pa = np.maximum(pa, q)
    out = np.empty(n)
    out[order] = np.maximum(pa, ps)
    return out


def nemenyi(ranks: RankMatrix, family_alpha: float = 0.05) -> list[PairwiseComparison]:
    """Nemenyi all-pairs comparison of mean ranks.

    The standardized mean-rank difference is referred to the studentized
    range with ``G`` means and infinite degrees of freedom; the procedure
    already controls the family-wise error, so no further adjustment applies.
    """
    family_alpha = _check_probability(family_alpha, "family_alpha", open_interval=True)
    G, B = ranks.G, ranks.B
    means = ranks.ranks.mean(axis=0)
    se = math.sqrt(G * (G + 1) / (12.0 * B))
    labels = ranks.group_labels
    out = []
    for i, j in combinations(range(G), 2):
        diff = abs(float(means[i] - means[j]))
        stat = diff / se
        p = studentized_range_sf(stat, G)
        out.append(PairwiseComparison(labels[i], labels[j], diff, stat, p, p < family_alpha))
    return out


def nemenyi_critical_difference(G: int, B: int, q_crit: float) -> float:
    """Smallest mean-rank difference declared significant for a range quantile ``q_crit``."""
    return q_crit / math.sqrt(2.0) * math.sqrt(G * (G + 1) / (6.0 * B))


def conover(
    ranks: RankMatrix,
    family_alpha: float = 0.05,
    adjust: AdjustMethod | str = AdjustMethod.NONE,
) -> list[PairwiseComparison]:
    """Conover's pairwise t test on rank sums.

    Uses the pooled variance ``2B(A - C)(1 - T/(B(G-1))) / ((B-1)(G-1))`` on
    the rank-sum scale, where ``A`` is the sum of squared ranks,
    ``C = BG(G+1)^2/4`` and ``T`` the Friedman statistic in its tie-aware
    form (identical to the plain statistic when there are no ties).
    Two-sided p-values come from t with ``(B-1)(G-1)`` degrees of freedom.
    """
    family_alpha = _check_probability(family_alpha, "family_alpha", open_interval=True)
    G, B = ranks.G, ranks.B
    if B < 2:
        raise DegenerateError("Conover's test needs at least two blocks")
    r = ranks.ranks
    sums = r.sum(axis=0)
    a_sq = float(np.sum(r * r))
    c_term = B * G * (G + 1) ** 2 / 4.0
    spread = a_sq - c_term
    if spread <= 1e-12 * c_term:
        raise DegenerateError("all ranks are tied within every block; rank variance is zero")
    t_stat = (G - 1) * (float(np.dot(sums, sums)) - B * c_term) / spread
    df = (B - 1) * (G - 1)
    var = 2.0 * B * spread * (1.0 - t_stat / (B * (G - 1))) / df
    se = math.sqrt(max(var, 0.0))
    labels = ranks.group_labels

    pairs = list(combinations(range(G), 2))
    diffs = [abs(float(sums[i] - sums[j])) for i, j in pairs]
    stats = []
    raw = []
    for diff in diffs:
        if se > 0.0:
            t = diff / se
        else:
            # perfect concordance across blocks: every nonzero gap is infinitely significant
            t = math.inf if diff > 0.0 else 0.0
        stats.append(t)
        raw.append(min(1.0, 2.0 * t_sf(t, df)))
    adjusted = adjust_pvalues(raw, adjust)
    return [
        PairwiseComparison(labels[i], labels[j], diff / B, t, p, p < family_alpha)
        for (i, j), diff, t, p in zip(pairs, diffs, stats, adjusted)
    ]
