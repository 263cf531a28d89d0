"""JSON report assembly."""

from __future__ import annotations

import hashlib
import json
import math
from importlib import resources
from typing import Any

from . import __version__
from .friedman import FriedmanResult
from .posthoc import PairwiseComparison
from .splot import SPlotReport
from .tables import emit_table
from .ranking import BlockDesign, TieMethod


def _num(x: float) -> float | None:
    return float(x) if math.isfinite(x) else None


def design_digest(design: BlockDesign) -> str:
    """SHA-256 of the design's canonical long-format CSV."""
    return hashlib.sha256(emit_table(design, "long").encode("utf-8")).hexdigest()


def friedman_dict(res: FriedmanResult) -> dict[str, Any]:
    return {
        "statistic": res.statistic,
        "df": res.df,
        "p_value": res.p_value,
        "rank_sums": res.rank_sums,
        "G": res.G,
        "B": res.B,
    }


def splot_dict(rep: SPlotReport) -> dict[str, Any]:
    return {
        "groups": rep.group_labels,
        "s": rep.components.s,
        "rank_sums": rep.components.rank_sums,
        "gamma_fit": {
            "shape": rep.fit.shape,
            "rate": rep.fit.rate,
            "target_mean": rep.fit.target_mean,
            "target_skewness": rep.fit.target_skewness,
        },
        "family_alpha": rep.family_alpha,
        "per_test_alpha": rep.per_test_alpha,
        "adjust": rep.adjust.value,
        "decision_limit": rep.decision_limit,
        "flagged": rep.flagged,
        "contributions": rep.contributions,
        "p_values": rep.p_values,
        "overall_reject": rep.overall_reject,
    }


def pairwise_dict(rows: list[PairwiseComparison]) -> list[dict[str, Any]]:
    return [
        {
            "group_i": r.group_i,
            "group_j": r.group_j,
            "mean_rank_diff": r.mean_rank_diff,
            "statistic": _num(r.statistic),
            "p_value": r.p_value,
            "significant": r.significant,
        }
        for r in rows
    ]


def build_report(
    design: BlockDesign,
    friedman: FriedmanResult,
    splot: SPlotReport,
    ties: TieMethod,
    posthoc: dict[str, list[PairwiseComparison]] | None = None,
    posthoc_adjust: str | None = None,
) -> dict[str, Any]:
    return {
        "friedman": friedman_dict(friedman),
        "splot": splot_dict(splot),
        "posthoc": None if posthoc is None else {k: pairwise_dict(v) for k, v in posthoc.items()},
        "metadata": {
            "input_sha256": design_digest(design),
            "blocks": list(design.block_labels),
            "groups": list(design.group_labels),
            "alpha": splot.family_alpha,
            "adjust": splot.adjust.value,
            "posthoc_adjust": posthoc_adjust,
            "ties": ties.kind,
            "seed": ties.seed,
            "tool": "friedman-splot",
            "version": __version__,
        },
    }


def dumps(report: dict[str, Any]) -> str:
    return json.dumps(report, indent=2, allow_nan=False) + "\n"


def schema() -> dict[str, Any]:
    text = (resources.files("friedman_splot") / "data" / "report.schema.json").read_text(encoding="utf-8")
    return json.loads(text)
