"""The Friedman rank statistic and its exact null moments."""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .ranking import RankMatrix
from .specfun import chi_square_sf


@dataclass(frozen=True)
class FriedmanResult:
    statistic: float
    df: int
    p_value: float
    rank_sums: list[float]
    G: int
    B: int


@dataclass(frozen=True)
class MomentSet:
    """Mean, variance, third central moment and skewness."""

    m1: float
    m2: float
    m3: float
    skewness: float


def friedman_statistic(ranks: RankMatrix) -> FriedmanResult:
    """Friedman's chi-square statistic with its chi-square(G - 1) p-value.

    No tie correction is applied.
    """
    G, B = ranks.G, ranks.B
    if G < 2:
        raise DomainError("the Friedman test needs at least two groups")
    sums = ranks.ranks.sum(axis=0)
    # centred form; equal to 12/(BG(G+1)) sum R^2 - 3B(G+1) but free of cancellation
    centred = sums - 0.5 * B * (G + 1)
    stat = float(12.0 * np.dot(centred, centred) / (B * G * (G + 1)))
    return FriedmanResult(
        statistic=stat,
        df=G - 1,
        p_value=chi_square_sf(stat, G - 1),
        rank_sums=[float(v) for v in sums],
        G=G,
        B=B,
    )


def _check_design_size(G: int, B: int) -> None:
    if int(G) != G or G < 2:
        raise DomainError(f"G must be an integer >= 2, got {G!r}")
    if int(B) != B or B < 2:
        raise DomainError(f"B must be an integer >= 2, got {B!r}")


def friedman_moments(G: int, B: int) -> MomentSet:
    """Exact null mean, variance and third central moment of the statistic."""
    _check_design_size(G, B)
    m1 = G - 1.0
    m2 = 2.0 * (G - 1) * (1.0 - 1.0 / B)
    m3 = 8.0 * (G - 1) * (1.0 - 3.0 / B + 2.0 / B**2)
    return MomentSet(m1, m2, m3, m3 / m2**1.5 if m2 > 0 else math.nan)
