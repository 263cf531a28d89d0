"""End-to-end acceptance checks, one test per numbered criterion.

Run ``pytest tests/test_acceptance.py -v``; the terminal summary prints a
PASS/FAIL line per criterion.
"""

import itertools
import math
import os
import time
import timeit
from fractions import Fraction

import numpy as np
import pytest

from friedman_splot import (
    BlockDesign,
    TieMethod,
    adjust_pvalues,
    conover,
    friedman_moments,
    friedman_statistic,
    gamma_fit,
    load_example,
    nemenyi,
    rank_within_blocks,
    s_components,
    splot_analysis,
)
from friedman_splot.cli import main
from friedman_splot.ranking import rank_rows
from friedman_splot.sim import SimConfig, moment_grid, sample_moments, simulate_s_samples, simulate_type1, type1_grid
from friedman_splot.specfun import (
    GammaParams,
    chi_square_sf,
    gamma_quantile,
    reg_gamma_lower,
    studentized_range_cdf,
)

from reference_tables import (
    CONOVER_P,
    CONOVER_SIGNIFICANT,
    CONOVER_ZERO,
    EMPIRICAL_MOMENTS,
    NEMENYI_P,
    THEORETICAL_MOMENTS,
    TYPE1_RATES,
)

WORKERS = os.cpu_count() or 1


def _pairs(rows):
    return {(r.group_i, r.group_j): r for r in rows}


@pytest.mark.criterion(1, "Friedman statistic on the example table")
def test_criterion_01_friedman():
    design = load_example()
    exact = Fraction(12, 160) * 1848 - 120
    res = friedman_statistic(rank_within_blocks(design))
    assert exact == Fraction(186, 10)
    assert res.statistic == float(exact)
    assert abs(res.p_value - 0.0003) <= 5e-5
    per_call = min(timeit.repeat(lambda: friedman_statistic(rank_within_blocks(design)), number=100, repeat=5)) / 100
    print(f"runtime per call {per_call * 1e3:.4f} ms")
    assert per_call < 1e-3


@pytest.mark.criterion(2, "S components and contributions")
def test_criterion_02_components():
    ranks = rank_within_blocks(load_example())
    comps = s_components(ranks)
    for got, want in zip(comps.s, (10.8, 0.3, 2.7, 4.8)):
        assert abs(got - want) <= 0.05
    rep = splot_analysis(load_example(), 0.05)
    assert abs(100 * rep.contributions[0] - 58.0) <= 0.3
    assert abs(100 * rep.contributions[3] - 25.8) <= 0.3
    assert abs(comps.total - friedman_statistic(ranks).statistic) <= 1e-10


@pytest.mark.criterion(3, "S-plot flags at both alpha levels")
def test_criterion_03_flags():
    assert set(splot_analysis(load_example(), 0.05).flagged) == {"A", "D"}
    assert set(splot_analysis(load_example(), 0.01).flagged) == {"A"}


@pytest.mark.criterion(4, "Nemenyi p-values and significant pairs")
def test_criterion_04_nemenyi():
    rows = _pairs(nemenyi(rank_within_blocks(load_example()), 0.05))
    for pair, p in NEMENYI_P.items():
        print(f"{pair}: {rows[pair].p_value:.6f} vs {p}")
        assert abs(rows[pair].p_value - p) <= 0.0005
    assert {k for k, r in rows.items() if r.significant} == {("A", "C"), ("A", "D")}


@pytest.mark.criterion(5, "Conover p-values and significant pairs")
def test_criterion_05_conover():
    rows = _pairs(conover(rank_within_blocks(load_example()), 0.05))
    failures = []
    for pair in CONOVER_ZERO:
        if not rows[pair].p_value < 5e-5:
            failures.append(f"{pair}: {rows[pair].p_value:.6f} not < 5e-5")
    if {k for k, r in rows.items() if r.significant} != CONOVER_SIGNIFICANT:
        failures.append("significant set differs")
    for pair, p in CONOVER_P.items():
        got = rows[pair].p_value
        print(f"{pair}: {got:.6f} vs {p}")
        if abs(got - p) > 0.0005:
            failures.append(f"{pair}: {got:.6f} vs {p} (diff {got - p:+.6f})")
    assert not failures, "; ".join(failures)


MOMENT_NAMES = ("mean", "variance", "skewness", "excess kurtosis")


@pytest.mark.criterion(6, "Closed-form fitted gamma moments")
def test_criterion_06_theoretical_moments():
    failures = []
    for (G, B), printed in THEORETICAL_MOMENTS.items():
        fit = gamma_fit(G, B)
        ours = (fit.mean, fit.variance, fit.skewness, fit.excess_kurtosis)
        for name, got, want in zip(MOMENT_NAMES, ours, printed):
            if abs(got - want) > 0.01:
                failures.append(f"G={G} B={B} {name}: {got:.4f} vs {want}")
    assert not failures, "; ".join(failures)


@pytest.mark.criterion(7, "Simulated moments against the published empirical columns")
def test_criterion_07_simulated_moments():
    start = time.perf_counter()
    failures = []
    checked = 0
    for config in moment_grid(replications=10_000, seed=12345):
        samples = simulate_s_samples(config, WORKERS)
        R = config.replications
        published = EMPIRICAL_MOMENTS[(config.G, config.B, config.distribution)]
        for g, (p_mean, p_var, _, _) in enumerate(published):
            mean, var, _, _ = sample_moments(samples[:, g])
            # both sides are Monte Carlo estimates from R replications
            se = math.sqrt((var + p_var) / R)
            checked += 1
            if abs(mean - p_mean) > 3 * se:
                failures.append(f"G={config.G} B={config.B} {config.distribution} S_{g + 1} mean {mean:.4f} vs {p_mean}")
        if config.B >= 5:
            # groups are exchangeable, so compare the pooled estimate with the column average
            _, _, skew, _ = sample_moments(samples[:, : len(published)].ravel())
            target = float(np.mean([row[2] for row in published]))
            checked += 1
            if abs(skew - target) > 0.15:
                failures.append(f"G={config.G} B={config.B} {config.distribution} skewness {skew:.3f} vs {target:.3f}")
    elapsed = time.perf_counter() - start
    print(f"{checked} checks, {elapsed:.1f} s")
    assert elapsed < 120
    assert not failures, "; ".join(failures)


@pytest.mark.criterion(8, "Type I error grid and Bradley robustness")
def test_criterion_08_type1():
    start = time.perf_counter()
    failures = []
    for config in type1_grid(replications=10_000, seed=12345):
        row = simulate_type1(config, WORKERS)
        want_f, want_s = TYPE1_RATES[(config.distribution, config.family_alpha)][(config.G, config.B)]
        tag = f"{config.distribution} a={config.family_alpha} G={config.G} B={config.B}"
        for label, got, want, robust in [
            ("F", row.empirical_rate_friedman, want_f, row.bradley_friedman),
            ("S", row.empirical_rate_splot, want_s, row.bradley_splot),
        ]:
            print(f"{tag} {label}: {got:.4f} vs {want:.3f} {robust}")
            if abs(got - want) > 0.01:
                failures.append(f"{tag} {label} {got:.4f} vs {want}")
            if robust != "robust":
                failures.append(f"{tag} {label} {got:.4f} nonrobust")
    elapsed = time.perf_counter() - start
    print(f"{elapsed:.1f} s")
    assert elapsed < 600
    assert not failures, f"{len(failures)} cells off: " + "; ".join(failures)


def _phi(z):
    return 0.5 * (1.0 + math.erf(z / math.sqrt(2.0)))


@pytest.mark.criterion(9, "Property suite")
def test_criterion_09_properties():
    rng = np.random.default_rng(2024)
    # decomposition identity and rank conservation
    for _ in range(1000):
        B, G = int(rng.integers(3, 30)), int(rng.integers(2, 12))
        values = rng.normal(size=(B, G))
        if rng.random() < 0.3:
            values = np.round(values)
        ranks = rank_within_blocks(BlockDesign(values))
        assert abs(s_components(ranks).total - friedman_statistic(ranks).statistic) <= 1e-10
        assert np.all(ranks.ranks.sum(axis=1) == G * (G + 1) / 2)
        for kind in ("first", "last", "min", "max"):
            r = rank_rows(values + np.arange(G) * 100.0, kind)
            assert np.all(r.sum(axis=1) == G * (G + 1) / 2)
    # quantile/CDF roundtrip
    for shape in (0.05, 0.1, 0.5833, 1.0, 3.0, 12.0, 50.0):
        for p in (1e-4, 1e-3, 0.01, 0.1, 0.5, 0.9, 0.99, 0.999, 1 - 1e-4):
            assert abs(reg_gamma_lower(shape, gamma_quantile(p, GammaParams(shape))) - p) <= 1e-9
    # chi-square with one df is a squared normal
    for x in np.linspace(0, 40, 81):
        assert abs(chi_square_sf(x, 1) - 2 * (1 - _phi(math.sqrt(x)))) <= 1e-9
    # two-mean range
    for q in np.linspace(0, 8, 81):
        assert abs(studentized_range_cdf(q, 2) - (2 * _phi(q / math.sqrt(2)) - 1)) <= 1e-6
    # exact moments of F over all 36 configurations at G=3, B=2
    perms = list(itertools.permutations((1, 2, 3)))
    fs = []
    for a, b in itertools.product(perms, repeat=2):
        sums = [a[g] + b[g] for g in range(3)]
        fs.append(Fraction(12, 24) * sum((s - 4) ** 2 for s in sums))
    assert len(fs) == 36
    mean = sum(fs) / 36
    var = sum((f - mean) ** 2 for f in fs) / 36
    third = sum((f - mean) ** 3 for f in fs) / 36
    m = friedman_moments(3, 2)
    assert abs(m.m1 - mean) <= 1e-12 and abs(m.m2 - var) <= 1e-12 and abs(m.m3 - third) <= 1e-12
    # adjustment dominance
    for _ in range(500):
        p = rng.random(int(rng.integers(1, 15))) ** 3
        bonf, holm = adjust_pvalues(p, "bonferroni"), adjust_pvalues(p, "holm")
        for method in ("bonferroni", "sidak_exact", "holm", "hochberg", "hommel", "bh", "by"):
            assert all(x >= y - 1e-15 for x, y in zip(adjust_pvalues(p, method), p))
        assert all(b >= h - 1e-15 and h >= x - 1e-15 for b, h, x in zip(bonf, holm, p))


@pytest.mark.criterion(10, "Byte-identical simulation output")
def test_criterion_10_determinism(tmp_path):
    commands = [
        ["simulate-moments", "-G", "3", "5", "-B", "5", "10", "--reps", "2500", "--seed", "77"],
        ["simulate-type1", "-G", "5", "10", "-B", "8", "--reps", "2500", "--seed", "77", "--alpha", "0.05", "0.01"],
    ]
    for argv in commands:
        outputs = []
        for i, workers in enumerate(("1", "1", "4")):
            out = tmp_path / f"{argv[0]}-{i}.csv"
            assert main([*argv, "--workers", workers, "--out", str(out)]) == 0
            outputs.append(out.read_bytes())
        assert outputs[0] == outputs[1] == outputs[2]
        assert len(outputs[0].splitlines()) > 2
