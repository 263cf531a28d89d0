"""Seeded Monte Carlo studies under the null hypothesis.

Replications are generated in fixed-size chunks.  Chunk ``c`` draws from a
Philox stream keyed by ``(seed, c)`` only, so replication ``i`` always sees
the same random numbers regardless of how many workers run the chunks, and
results are assembled in chunk order.
"""

from __future__ import annotations

import csv
import io
import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Iterable, Literal, Sequence

import numpy as np

from .errors import DomainError
from .posthoc import AdjustMethod
from .ranking import TieMethod, rank_rows
from .specfun import _check_probability, chi_square_quantile
from .splot import decision_limit, gamma_fit, s_values

CHUNK_SIZE = 1000
DISTRIBUTIONS = ("normal", "exponential")

# grids of the published studies
MOMENT_GRID_G = (3, 5)
MOMENT_GRID_B = (3, 5, 10, 15, 25)
TYPE1_GRID_G = (5, 10, 20)
TYPE1_GRID_B = (8, 15, 25, 50)

Robustness = Literal["robust", "nonrobust"]


@dataclass(frozen=True)
class SimConfig:
    G: int
    B: int
    distribution: str = "normal"
    family_alpha: float = 0.05
    replications: int = 10_000
    seed: int = 12345
    adjust: AdjustMethod = AdjustMethod.BONFERRONI
    ties: TieMethod = field(default_factory=TieMethod)

    def __post_init__(self) -> None:
        if int(self.G) != self.G or self.G < 2:
            raise DomainError(f"G must be an integer >= 2, got {self.G!r}")
        if int(self.B) != self.B or self.B < 2:
            raise DomainError(f"B must be an integer >= 2, got {self.B!r}")
        if self.distribution not in DISTRIBUTIONS:
            raise DomainError(f"distribution must be one of {DISTRIBUTIONS}, got {self.distribution!r}")
        _check_probability(self.family_alpha, "family_alpha", open_interval=True)
        if int(self.replications) != self.replications or self.replications < 1:
            raise DomainError(f"replications must be a positive integer, got {self.replications!r}")
        if int(self.seed) != self.seed or self.seed < 0:
            raise DomainError(f"seed must be a non-negative integer, got {self.seed!r}")
        object.__setattr__(self, "adjust", AdjustMethod.coerce(self.adjust))


@dataclass(frozen=True)
class MomentRow:
    G: int
    B: int
    distribution: str
    group_index: int
    mean: float
    variance: float
    skewness: float
    excess_kurtosis: float
    # (mean, variance, skewness, excess kurtosis) of the fitted gamma
    theoretical: tuple[float, float, float, float]
    replications: int

    @property
    def mean_se(self) -> float:
        return math.sqrt(self.variance / self.replications)


@dataclass(frozen=True)
class Type1Row:
    G: int
    B: int
    distribution: str
    family_alpha: float
    replications: int
    rejections_friedman: int
    rejections_splot: int
    empirical_rate_friedman: float
    empirical_rate_splot: float
    bradley_friedman: Robustness
    bradley_splot: Robustness


def _chunk_rng(seed: int, chunk: int) -> np.random.Generator:
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(seed, spawn_key=(chunk,))))


def _chunk_bounds(replications: int) -> list[tuple[int, int]]:
    return [(c, min(CHUNK_SIZE, replications - c * CHUNK_SIZE)) for c in range(math.ceil(replications / CHUNK_SIZE))]


def _draw_s(config: SimConfig, chunk: int, size: int) -> np.ndarray:
    rng = _chunk_rng(config.seed, chunk)
    shape = (size, config.B, config.G)
    if config.distribution == "normal":
        x = rng.standard_normal(shape)
    else:
        x = rng.standard_exponential(shape)
    ranks = rank_rows(x, config.ties.kind, rng)
    return s_values(ranks.sum(axis=1), config.G, config.B)


def _run_chunks(fn, config: SimConfig, workers: int) -> list:
    bounds = _chunk_bounds(config.replications)
    if workers <= 1 or len(bounds) == 1:
        return [fn(config, c, n) for c, n in bounds]
    with ThreadPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(lambda cn: fn(config, *cn), bounds))


def simulate_s_samples(config: SimConfig, workers: int = 1) -> np.ndarray:
    """Raw S_g draws, shape ``(replications, G)``."""
    return np.concatenate(_run_chunks(_draw_s, config, workers), axis=0)


def sample_moments(x: np.ndarray) -> tuple[float, float, float, float]:
    """Mean, variance, skewness and excess kurtosis (population-style central moments)."""
    x = np.asarray(x, dtype=float)
    m = float(np.mean(x))
    d = x - m
    m2 = float(np.mean(d * d))
    m3 = float(np.mean(d**3))
    m4 = float(np.mean(d**4))
    if m2 == 0.0:
        return m, 0.0, math.nan, math.nan
    return m, m2, m3 / m2**1.5, m4 / m2**2 - 3.0


def simulate_s_moments(
    config: SimConfig, workers: int = 1, samples: np.ndarray | None = None
) -> list[MomentRow]:
    """Empirical moments of each group's S_g across replications."""
    if samples is None:
        samples = simulate_s_samples(config, workers)
    fit = gamma_fit(config.G, config.B)
    theory = (fit.mean, fit.variance, fit.skewness, fit.excess_kurtosis)
    rows = []
    for g in range(config.G):
        mean, var, skew, kurt = sample_moments(samples[:, g])
        rows.append(
            MomentRow(config.G, config.B, config.distribution, g + 1, mean, var, skew, kurt, theory, config.replications)
        )
    return rows


def _count_rejections(config: SimConfig, chunk: int, size: int, crit: float, dl: float) -> tuple[int, int]:
    s = _draw_s(config, chunk, size)
    f = s.sum(axis=1)
    return int(np.count_nonzero(f > crit)), int(np.count_nonzero(s.max(axis=1) > dl))


def simulate_type1(config: SimConfig, workers: int = 1, dl_override: float | None = None) -> Type1Row:
    """Empirical type I error of the Friedman test and of the S-plot rule.

    A Friedman replication rejects when its chi-square p-value is below
    ``family_alpha``, evaluated as ``F > chi2_{1-alpha}(G-1)``; an S-plot
    replication rejects when any ``S_g`` exceeds the decision limit.
    """
    crit = chi_square_quantile(1.0 - config.family_alpha, config.G - 1)
    dl = decision_limit(config.G, config.B, config.family_alpha, config.adjust) if dl_override is None else dl_override

    def work(cfg: SimConfig, chunk: int, size: int) -> tuple[int, int]:
        return _count_rejections(cfg, chunk, size, crit, dl)

    counts = _run_chunks(work, config, workers)
    rej_f = sum(c[0] for c in counts)
    rej_s = sum(c[1] for c in counts)
    rate_f = rej_f / config.replications
    rate_s = rej_s / config.replications
    return Type1Row(
        config.G,
        config.B,
        config.distribution,
        config.family_alpha,
        config.replications,
        rej_f,
        rej_s,
        rate_f,
        rate_s,
        bradley_classify(rate_f, config.family_alpha),
        bradley_classify(rate_s, config.family_alpha),
    )


def bradley_interval(alpha: float) -> tuple[float, float]:
    alpha = _check_probability(alpha, "alpha")
    if math.isclose(alpha, 0.05):
        return 0.035, 0.065
    if math.isclose(alpha, 0.01):
        return 0.0, 0.02
    return max(0.0, alpha - 0.015), alpha + 0.015


def bradley_classify(rate: float, alpha: float) -> Robustness:
    """Robust when the empirical rate sits inside Bradley's band around ``alpha``."""
    rate = _check_probability(rate, "rate")
    lo, hi = bradley_interval(alpha)
    return "robust" if lo <= rate <= hi else "nonrobust"


# ---------------------------------------------------------------------------
# grids and CSV output

MOMENT_FIELDS = (
    "G", "B", "distribution", "replications", "seed", "group",
    "mean", "variance", "skewness", "excess_kurtosis",
    "theory_mean", "theory_variance", "theory_skewness", "theory_excess_kurtosis",
)
TYPE1_FIELDS = (
    "distribution", "alpha", "G", "B", "replications", "seed", "adjust",
    "rate_friedman", "rate_splot", "bradley_friedman", "bradley_splot",
)


def _fmt(x: float) -> str:
    return f"{x:.6f}"


def moment_grid(
    groups: Sequence[int] = MOMENT_GRID_G,
    blocks: Sequence[int] = MOMENT_GRID_B,
    distributions: Sequence[str] = DISTRIBUTIONS,
    **config_kwargs,
) -> list[SimConfig]:
    return [SimConfig(G, B, d, **config_kwargs) for G in groups for B in blocks for d in distributions]


def type1_grid(
    groups: Sequence[int] = TYPE1_GRID_G,
    blocks: Sequence[int] = TYPE1_GRID_B,
    distributions: Sequence[str] = DISTRIBUTIONS,
    alphas: Sequence[float] = (0.05, 0.01),
    **config_kwargs,
) -> list[SimConfig]:
    return [
        SimConfig(G, B, d, family_alpha=a, **config_kwargs)
        for G in groups
        for B in blocks
        for d in distributions
        for a in alphas
    ]


def moments_csv(results: Iterable[tuple[SimConfig, list[MomentRow]]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(MOMENT_FIELDS)
    for config, rows in results:
        for r in rows:
            writer.writerow(
                [r.G, r.B, r.distribution, r.replications, config.seed, r.group_index,
                 _fmt(r.mean), _fmt(r.variance), _fmt(r.skewness), _fmt(r.excess_kurtosis),
                 *(_fmt(v) for v in r.theoretical)]
            )
    return buf.getvalue()


def type1_csv(results: Iterable[tuple[SimConfig, Type1Row]]) -> str:
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow(TYPE1_FIELDS)
    for config, r in results:
        writer.writerow(
            [r.distribution, f"{r.family_alpha:g}", r.G, r.B, r.replications, config.seed, config.adjust.value,
             _fmt(r.empirical_rate_friedman), _fmt(r.empirical_rate_splot), r.bradley_friedman, r.bradley_splot]
        )
    return buf.getvalue()


def samples_csv(samples: np.ndarray) -> str:
    """One column per group, one row per replication."""
    buf = io.StringIO()
    writer = csv.writer(buf, lineterminator="\n")
    writer.writerow([f"S_{g + 1}" for g in range(samples.shape[1])])
    for row in samples:
        writer.writerow([repr(float(v)) for v in row])
    return buf.getvalue()
