import math
from itertools import combinations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from statsmodels.stats.multitest import multipletests

from friedman_splot import AdjustMethod, BlockDesign, TieMethod, adjust_pvalues, conover, nemenyi, rank_within_blocks
from friedman_splot.errors import DegenerateError
from friedman_splot.posthoc import nemenyi_critical_difference
from friedman_splot.ranking import RankMatrix
from friedman_splot.specfun import studentized_range_quantile

from reference_tables import CONOVER_SIGNIFICANT

# scipy.integrate.quad over the range density with infinite df
NEMENYI_ORACLE = {
    ("A", "B"): 0.212748261,
    ("A", "C"): 0.0027631723,
    ("A", "D"): 0.000621829,
    ("B", "C"): 0.4080497,
    ("B", "D"): 0.212748261,
    ("C", "D"): 0.98026848,
}

LATIN = RankMatrix(
    np.array([[1.0, 2, 3, 4], [2, 3, 4, 1], [3, 4, 1, 2], [4, 1, 2, 3]]), TieMethod(), ("A", "B", "C", "D")
)


def _by_pair(rows):
    return {(r.group_i, r.group_j): r for r in rows}


def test_nemenyi_table(example_ranks):
    rows = _by_pair(nemenyi(example_ranks))
    assert len(rows) == 6
    for pair, p in NEMENYI_ORACLE.items():
        assert rows[pair].p_value == pytest.approx(p, abs=1e-7)
    assert {k for k, r in rows.items() if r.significant} == {("A", "C"), ("A", "D")}
    assert rows[("A", "C")].mean_rank_diff == pytest.approx(2.25)
    assert rows[("A", "D")].mean_rank_diff == pytest.approx(2.5)


def test_nemenyi_critical_difference():
    q = studentized_range_quantile(0.95, 4)
    cd = nemenyi_critical_difference(4, 8, q)
    assert cd == pytest.approx(1.6583028784917073, abs=1e-7)
    assert cd == pytest.approx(1.658, abs=1e-3)


def test_nemenyi_identical_groups():
    rows = nemenyi(LATIN)
    assert all(r.p_value == 1.0 and not r.significant for r in rows)


def test_conover_table_significance(example_ranks):
    rows = _by_pair(conover(example_ranks))
    assert {k for k, r in rows.items() if r.significant} == CONOVER_SIGNIFICANT
    assert rows[("A", "C")].p_value < 5e-5
    assert rows[("A", "D")].p_value < 5e-5


def test_conover_textbook_values(example_ranks):
    # pooled rank-sum variance: A=240, C=200, T=18.6, df=21
    se = math.sqrt(2 * 8 * 40 * (1 - 18.6 / 24) / 21)
    rows = _by_pair(conover(example_ranks))
    assert rows[("A", "B")].statistic == pytest.approx(10 / se, rel=1e-12)
    assert rows[("A", "B")].p_value == pytest.approx(0.0010, abs=5e-5)
    assert rows[("C", "D")].p_value == pytest.approx(0.4535, abs=5e-5)


def test_conover_identical_groups():
    rows = conover(LATIN)
    assert all(r.statistic == 0.0 and r.p_value == 1.0 for r in rows)


def test_conover_degenerate():
    flat = RankMatrix(np.full((4, 3), 2.0), TieMethod(), ("A", "B", "C"))
    with pytest.raises(DegenerateError):
        conover(flat)


def test_conover_perfect_concordance():
    same = RankMatrix(np.array([[1.0, 2, 3]] * 5), TieMethod(), ("A", "B", "C"))
    rows = conover(same)
    assert all(math.isinf(r.statistic) and r.p_value == 0.0 for r in rows)


def test_conover_adjustment_applied(example_ranks):
    raw = [r.p_value for r in conover(example_ranks)]
    holm = [r.p_value for r in conover(example_ranks, adjust="holm")]
    assert holm == pytest.approx(adjust_pvalues(raw, "holm"))


def test_adjust_examples():
    assert adjust_pvalues([0.01, 0.04], "bonferroni") == pytest.approx([0.02, 0.08])
    assert adjust_pvalues([0.01, 0.011, 0.5], "holm") == pytest.approx([0.03, 0.03, 0.5])
    assert adjust_pvalues([0.03, 0.03, 0.5], "holm") == pytest.approx([0.09, 0.09, 0.5])
    assert adjust_pvalues([0.2], "sidak_exact") == pytest.approx([0.2])
    assert adjust_pvalues([0.01, 0.5], "sidak_exact") == pytest.approx([1 - 0.99**2, 0.75])
    assert adjust_pvalues([], "holm") == []


STATSMODELS = {
    "bonferroni": "bonferroni",
    "sidak_exact": "sidak",
    "holm": "holm",
    "hochberg": "simes-hochberg",
    "hommel": "hommel",
    "bh": "fdr_bh",
    "by": "fdr_by",
}

pvalue_lists = st.lists(st.floats(0.0, 1.0), min_size=1, max_size=15)


@pytest.mark.filterwarnings("ignore:divide by zero:RuntimeWarning")
@settings(max_examples=300, deadline=None)
@given(p=pvalue_lists, method=st.sampled_from(sorted(STATSMODELS)))
def test_adjust_matches_statsmodels(p, method):
    ours = adjust_pvalues(p, method)
    ref = multipletests(p, method=STATSMODELS[method])[1]
    assert np.allclose(ours, np.clip(ref, 0, 1), atol=1e-12)


@settings(max_examples=300, deadline=None)
@given(p=pvalue_lists, method=st.sampled_from([m for m in AdjustMethod]))
def test_adjust_dominance(p, method):
    adj = adjust_pvalues(p, method)
    assert all(0.0 <= a <= 1.0 for a in adj)
    if method is AdjustMethod.NONE:
        assert adj == pytest.approx(p)
    else:
        assert all(a >= x - 1e-15 for a, x in zip(adj, p))
    bonf = adjust_pvalues(p, "bonferroni")
    holm = adjust_pvalues(p, "holm")
    assert all(b >= h - 1e-15 >= x - 2e-15 for b, h, x in zip(bonf, holm, p))


@settings(max_examples=200, deadline=None)
@given(p=pvalue_lists, method=st.sampled_from(["holm", "hochberg", "hommel", "bh", "by"]))
def test_adjust_preserves_order(p, method):
    adj = adjust_pvalues(p, method)
    order = np.argsort(p, kind="stable")
    assert all(adj[i] <= adj[j] + 1e-15 for i, j in zip(order, order[1:]))


designs = st.builds(
    lambda B, G, seed: np.random.default_rng(seed).normal(size=(B, G)),
    st.integers(3, 25),
    st.integers(3, 7),
    st.integers(0, 2**32 - 1),
)


@settings(max_examples=60, deadline=None)
@given(values=designs)
def test_nemenyi_threshold_matches_critical_difference(values):
    ranks = rank_within_blocks(BlockDesign(values))
    cd = nemenyi_critical_difference(ranks.G, ranks.B, studentized_range_quantile(0.95, ranks.G))
    for r in nemenyi(ranks, 0.05):
        if abs(r.mean_rank_diff - cd) > 1e-9:
            assert r.significant == (r.mean_rank_diff > cd)


@settings(max_examples=60, deadline=None)
@given(values=designs)
def test_pair_count_and_symmetry(values):
    design = BlockDesign(values)
    G = design.n_groups
    swapped = BlockDesign(values[:, ::-1], group_labels=design.group_labels[::-1])
    for fn in (nemenyi, conover):
        a = {frozenset((r.group_i, r.group_j)): r for r in fn(rank_within_blocks(design))}
        b = {frozenset((r.group_i, r.group_j)): r for r in fn(rank_within_blocks(swapped))}
        assert len(a) == G * (G - 1) // 2
        for k in a:
            assert a[k].p_value == pytest.approx(b[k].p_value, abs=1e-12)
            assert a[k].mean_rank_diff == pytest.approx(b[k].mean_rank_diff, abs=1e-12)
