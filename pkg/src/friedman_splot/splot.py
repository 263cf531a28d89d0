"""Per-group decomposition of the Friedman statistic and its decision limit.

Each group contributes ``S_g = ((R_g - B(G+1)/2) / sqrt(BG(G+1)/12))**2`` to
the Friedman statistic, so the statistic is simply ``sum(S_g)``.  Under the
null hypothesis every ``S_g`` is approximated by a gamma distribution whose
mean and skewness match the exact null moments; a group is flagged when its
``S_g`` exceeds the ``1 - alpha_per_test`` gamma quantile.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import DomainError
from .friedman import MomentSet, _check_design_size
from .posthoc import AdjustMethod
from .ranking import BlockDesign, RankMatrix, TieMethod, rank_within_blocks
from .specfun import GammaParams, _check_probability, gamma_quantile, gamma_sf

# adjustments that reduce to a single per-test level, hence a single horizontal limit
SINGLE_STEP = (AdjustMethod.BONFERRONI, AdjustMethod.SIDAK_EXACT, AdjustMethod.NONE)


@dataclass(frozen=True)
class SComponents:
    s: list[float]
    rank_sums: list[float]
    G: int
    B: int

    @property
    def total(self) -> float:
        return math.fsum(self.s)


@dataclass(frozen=True)
class GammaFit:
    shape: float
    rate: float
    target_mean: float
    target_skewness: float

    @property
    def params(self) -> GammaParams:
        return GammaParams(self.shape, self.rate)

    @property
    def mean(self) -> float:
        return self.shape / self.rate

    @property
    def variance(self) -> float:
        return self.shape / self.rate**2

    @property
    def skewness(self) -> float:
        return 2.0 / math.sqrt(self.shape)

    @property
    def excess_kurtosis(self) -> float:
        return 6.0 / self.shape


@dataclass(frozen=True)
class SPlotReport:
    group_labels: list[str]
    components: SComponents
    fit: GammaFit
    family_alpha: float
    per_test_alpha: float
    adjust: AdjustMethod
    decision_limit: float
    flagged: list[str]
    contributions: list[float] | None
    p_values: list[float]
    overall_reject: bool


def _center_scale(G: int, B: int) -> tuple[float, float]:
    return 0.5 * B * (G + 1), math.sqrt(B * G * (G + 1) / 12.0)


def s_values(rank_sums: np.ndarray, G: int, B: int) -> np.ndarray:
    """Vectorised S_g for rank sums along the last axis."""
    center, scale = _center_scale(G, B)
    z = (np.asarray(rank_sums, dtype=float) - center) / scale
    return z * z


def s_components(ranks: RankMatrix) -> SComponents:
    sums = ranks.ranks.sum(axis=0)
    s = s_values(sums, ranks.G, ranks.B)
    return SComponents([float(v) for v in s], [float(v) for v in sums], ranks.G, ranks.B)


def s_moments(G: int, B: int) -> MomentSet:
    """Null mean, variance, third moment and skewness of one S_g (closed form)."""
    _check_design_size(G, B)
    m1 = 1.0 - 1.0 / G
    m2 = (2.0 - 2.0 / G) * (1.0 - 1.0 / B)
    m3 = (8.0 - 8.0 / G) * (1.0 - 3.0 / B + 2.0 / B**2)
    return MomentSet(m1, m2, m3, m3 / m2**1.5)


def gamma_fit(G: int, B: int) -> GammaFit:
    """Gamma shape and rate whose mean and skewness equal those of S_g.

    B = 2 is rejected as well as B = 1: the third moment vanishes there and
    no gamma distribution has zero skewness.
    """
    moments = s_moments(G, B)
    if moments.m3 <= 0.0:
        raise DomainError(f"S_g has zero skewness at B={B}; no gamma fit exists")
    shape = 4.0 * moments.m2**3 / moments.m3**2
    rate = shape / moments.m1
    return GammaFit(shape, rate, moments.m1, moments.skewness)


def per_test_alpha(family_alpha: float, n_tests: int, adjust: AdjustMethod | str = AdjustMethod.BONFERRONI) -> float:
    """Per-test level that keeps the family-wise level at ``family_alpha`` over ``n_tests`` tests."""
    family_alpha = _check_probability(family_alpha, "family_alpha", open_interval=True)
    adjust = AdjustMethod.coerce(adjust)
    if adjust is AdjustMethod.BONFERRONI:
        return family_alpha / n_tests
    if adjust is AdjustMethod.SIDAK_EXACT:
        return -math.expm1(math.log1p(-family_alpha) / n_tests)
    if adjust is AdjustMethod.NONE:
        return family_alpha
    raise DomainError(
        f"adjustment {adjust.value!r} is step-wise and has no single decision limit; "
        "use bonferroni, sidak_exact or none"
    )


def decision_limit(
    G: int,
    B: int,
    family_alpha: float = 0.05,
    adjust: AdjustMethod | str = AdjustMethod.BONFERRONI,
) -> float:
    alpha_pt = per_test_alpha(family_alpha, G, adjust)
    return gamma_quantile(1.0 - alpha_pt, gamma_fit(G, B).params)


def splot_from_ranks(
    ranks: RankMatrix,
    family_alpha: float = 0.05,
    adjust: AdjustMethod | str = AdjustMethod.BONFERRONI,
) -> SPlotReport:
    adjust = AdjustMethod.coerce(adjust)
    comps = s_components(ranks)
    fit = gamma_fit(comps.G, comps.B)
    alpha_pt = per_test_alpha(family_alpha, comps.G, adjust)
    dl = gamma_quantile(1.0 - alpha_pt, fit.params)
    labels = list(ranks.group_labels)
    flagged = [label for label, s in zip(labels, comps.s) if s > dl]
    total = comps.total
    contributions = [s / total for s in comps.s] if total > 0.0 else None
    return SPlotReport(
        group_labels=labels,
        components=comps,
        fit=fit,
        family_alpha=float(family_alpha),
        per_test_alpha=alpha_pt,
        adjust=adjust,
        decision_limit=dl,
        flagged=flagged,
        contributions=contributions,
        p_values=[gamma_sf(s, fit.params) for s in comps.s],
        overall_reject=bool(flagged),
    )


def splot_analysis(
    design: BlockDesign,
    family_alpha: float = 0.05,
    ties: TieMethod | None = None,
    adjust: AdjustMethod | str = AdjustMethod.BONFERRONI,
) -> SPlotReport:
    """Rank ``design`` and build the full S-plot report."""
    return splot_from_ranks(rank_within_blocks(design, ties), family_alpha, adjust)
