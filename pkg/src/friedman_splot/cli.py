"""Command-line entry point.

Exit codes: 0 success, 1 usage error, 2 data or I/O error, 3 numeric failure.
"""

from __future__ import annotations

import argparse
import sys
from pathlib import Path
from typing import Sequence

from . import __version__
from .errors import ConvergenceError, DataError, DegenerateError, DomainError
from .friedman import friedman_statistic
from .posthoc import AdjustMethod, PairwiseComparison, conover, nemenyi
from .ranking import TIE_KINDS, TieMethod, rank_within_blocks
from .report import build_report, dumps, friedman_dict, pairwise_dict
from .sim import (
    DISTRIBUTIONS,
    MOMENT_GRID_B,
    MOMENT_GRID_G,
    TYPE1_GRID_B,
    TYPE1_GRID_G,
    SimConfig,
    moments_csv,
    samples_csv,
    simulate_s_moments,
    simulate_s_samples,
    simulate_type1,
    type1_csv,
)
from .splot import SINGLE_STEP, splot_from_ranks
from .svg import render_splot_svg
from .tables import FORMATS, parse_table

EXIT_OK, EXIT_USAGE, EXIT_DATA, EXIT_NUMERIC = 0, 1, 2, 3


class _Parser(argparse.ArgumentParser):
    def error(self, message: str):  # type: ignore[override]
        self.print_usage(sys.stderr)
        self.exit(EXIT_USAGE, f"{self.prog}: error: {message}\n")


def _probability(text: str) -> float:
    try:
        value = float(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not a number: {text!r}") from None
    if not 0.0 < value < 1.0:
        raise argparse.ArgumentTypeError(f"must lie strictly between 0 and 1: {text!r}")
    return value


def _positive_int(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 1:
        raise argparse.ArgumentTypeError(f"must be positive: {text!r}")
    return value


def _seed(text: str) -> int:
    try:
        value = int(text)
    except ValueError:
        raise argparse.ArgumentTypeError(f"not an integer: {text!r}") from None
    if value < 0:
        raise argparse.ArgumentTypeError(f"must be non-negative: {text!r}")
    return value


def _ties_arg(text: str) -> str:
    kind = text.partition(":")[0]
    if kind not in TIE_KINDS:
        raise argparse.ArgumentTypeError(f"expected one of {', '.join(TIE_KINDS)} (random may take :SEED)")
    return text


def _add_data_args(p: argparse.ArgumentParser) -> None:
    p.add_argument("input", help="CSV file, or - for standard input")
    p.add_argument("--format", choices=FORMATS, default="wide", help="input layout (default: wide)")
    p.add_argument("--ties", type=_ties_arg, default="average", help="tie method (default: average)")
    p.add_argument("--seed", type=_seed, default=None, help="seed for --ties random")


def _add_sim_args(p: argparse.ArgumentParser, groups, blocks) -> None:
    p.add_argument("--groups", "-G", type=int, nargs="+", default=list(groups), metavar="G")
    p.add_argument("--blocks", "-B", type=int, nargs="+", default=list(blocks), metavar="B")
    p.add_argument("--dist", nargs="+", choices=DISTRIBUTIONS, default=list(DISTRIBUTIONS))
    p.add_argument("--reps", type=_positive_int, default=10_000, help="replications (default: 10000)")
    p.add_argument("--seed", type=_seed, default=12345, help="master seed (default: 12345)")
    p.add_argument("--workers", type=_positive_int, default=1, help="worker threads; output does not depend on it")
    p.add_argument("--ties", type=_ties_arg, default="average")
    p.add_argument("--out", type=Path, default=None, help="CSV output file (default: stdout)")


def build_parser() -> argparse.ArgumentParser:
    parser = _Parser(prog="friedman-splot", description="Friedman test, S-plot and post-hoc comparisons.")
    parser.add_argument("--version", action="version", version=f"%(prog)s {__version__}")
    sub = parser.add_subparsers(dest="command", required=True, parser_class=_Parser)

    p = sub.add_parser("test", help="Friedman chi-square test")
    _add_data_args(p)
    p.add_argument("--json", action="store_true", help="print JSON instead of text")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("splot", help="S-plot report (JSON) and figure (SVG)")
    _add_data_args(p)
    p.add_argument("--alpha", type=_probability, default=0.05, help="family-wise alpha (default: 0.05)")
    p.add_argument("--adjust", choices=[m.value for m in SINGLE_STEP], default="bonferroni")
    p.add_argument("--posthoc", action="store_true", help="include Nemenyi and Conover tables in the report")
    p.add_argument("--out", type=Path, default=None, help="JSON output file (default: stdout); the SVG goes next to it")
    p.add_argument("--svg", type=Path, default=None, help="SVG output file")

    p = sub.add_parser("posthoc", help="Nemenyi and/or Conover pairwise comparisons")
    _add_data_args(p)
    p.add_argument("--method", choices=("nemenyi", "conover", "both"), default="both")
    p.add_argument("--alpha", type=_probability, default=0.05)
    p.add_argument("--adjust", choices=[m.value for m in AdjustMethod], default="none",
                   help="p-value adjustment for Conover (default: none)")
    p.add_argument("--json", action="store_true")
    p.add_argument("--out", type=Path, default=None)

    p = sub.add_parser("simulate-moments", help="empirical moments of S_g under H0 (CSV)")
    _add_sim_args(p, MOMENT_GRID_G, MOMENT_GRID_B)
    p.add_argument("--samples-dir", type=Path, default=None, help="also dump raw S_g samples, one CSV per cell")

    p = sub.add_parser("simulate-type1", help="empirical type I error of F and the S-plot (CSV)")
    _add_sim_args(p, TYPE1_GRID_G, TYPE1_GRID_B)
    p.add_argument("--alpha", type=_probability, nargs="+", default=[0.05])
    p.add_argument("--adjust", choices=[m.value for m in SINGLE_STEP], default="bonferroni")
    return parser


def _emit(text: str, out: Path | None) -> None:
    if out is None:
        sys.stdout.write(text)
    else:
        out.write_text(text, encoding="utf-8")


def _pairwise_text(title: str, rows: list[PairwiseComparison]) -> str:
    lines = [title, f"{'pair':<12}{'diff':>10}{'statistic':>12}{'p-value':>10}  significant"]
    for r in rows:
        lines.append(
            f"{r.group_i + '-' + r.group_j:<12}{r.mean_rank_diff:>10.4f}{r.statistic:>12.4f}"
            f"{r.p_value:>10.4f}  {'yes' if r.significant else 'no'}"
        )
    return "\n".join(lines) + "\n"


def _cmd_test(args, design, ties) -> None:
    ranks = rank_within_blocks(design, ties)
    res = friedman_statistic(ranks)
    if args.json:
        _emit(dumps({"friedman": friedman_dict(res)}), args.out)
        return
    sums = "  ".join(f"{g}={r:.4f}" for g, r in zip(design.group_labels, res.rank_sums))
    _emit(
        f"Friedman test (G={res.G}, B={res.B}, ties={ties})\n"
        f"statistic  {res.statistic:.4f}\n"
        f"df         {res.df}\n"
        f"p-value    {res.p_value:.4f}\n"
        f"rank sums  {sums}\n",
        args.out,
    )


def _cmd_splot(args, design, ties) -> None:
    ranks = rank_within_blocks(design, ties)
    res = friedman_statistic(ranks)
    rep = splot_from_ranks(ranks, args.alpha, args.adjust)
    posthoc = None
    if args.posthoc:
        posthoc = {"nemenyi": nemenyi(ranks, args.alpha), "conover": conover(ranks, args.alpha)}
    report = build_report(design, res, rep, ties, posthoc, "none" if args.posthoc else None)
    _emit(dumps(report), args.out)
    svg_path = args.svg
    if svg_path is None and args.out is not None:
        svg_path = args.out.with_suffix(".svg")
    if svg_path is not None:
        render_splot_svg(rep, svg_path)


def _cmd_posthoc(args, design, ties) -> None:
    ranks = rank_within_blocks(design, ties)
    tables = {}
    if args.method in ("nemenyi", "both"):
        tables["nemenyi"] = nemenyi(ranks, args.alpha)
    if args.method in ("conover", "both"):
        tables["conover"] = conover(ranks, args.alpha, args.adjust)
    if args.json:
        _emit(dumps({k: pairwise_dict(v) for k, v in tables.items()}), args.out)
        return
    parts = []
    if "nemenyi" in tables:
        parts.append(_pairwise_text(f"Nemenyi (alpha={args.alpha:g})", tables["nemenyi"]))
    if "conover" in tables:
        parts.append(_pairwise_text(f"Conover (alpha={args.alpha:g}, adjust={args.adjust})", tables["conover"]))
    _emit("\n".join(parts), args.out)


def _sim_ties(args) -> TieMethod:
    return TieMethod.parse(args.ties, args.seed if args.ties == "random" else None)


def _cmd_simulate_moments(args) -> None:
    ties = _sim_ties(args)
    results = []
    for G in args.groups:
        for B in args.blocks:
            for dist in args.dist:
                config = SimConfig(G, B, dist, replications=args.reps, seed=args.seed, ties=ties)
                samples = simulate_s_samples(config, args.workers)
                if args.samples_dir is not None:
                    args.samples_dir.mkdir(parents=True, exist_ok=True)
                    (args.samples_dir / f"s_samples_G{G}_B{B}_{dist}.csv").write_text(samples_csv(samples))
                results.append((config, simulate_s_moments(config, samples=samples)))
    _emit(moments_csv(results), args.out)


def _cmd_simulate_type1(args) -> None:
    ties = _sim_ties(args)
    results = []
    for G in args.groups:
        for B in args.blocks:
            for dist in args.dist:
                for alpha in args.alpha:
                    config = SimConfig(
                        G, B, dist, family_alpha=alpha, replications=args.reps,
                        seed=args.seed, adjust=args.adjust, ties=ties,
                    )
                    results.append((config, simulate_type1(config, args.workers)))
    _emit(type1_csv(results), args.out)


def main(argv: Sequence[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        if args.command in ("test", "splot", "posthoc"):
            ties = TieMethod.parse(args.ties, args.seed)
            design = parse_table(args.input, args.format)
            {"test": _cmd_test, "splot": _cmd_splot, "posthoc": _cmd_posthoc}[args.command](args, design, ties)
        elif args.command == "simulate-moments":
            _cmd_simulate_moments(args)
        else:
            _cmd_simulate_type1(args)
    except DataError as exc:
        print(f"friedman-splot: data error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except OSError as exc:
        print(f"friedman-splot: I/O error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (DomainError, ConvergenceError, DegenerateError) as exc:
        print(f"friedman-splot: numeric failure: {exc}", file=sys.stderr)
        return EXIT_NUMERIC
    return EXIT_OK


def run() -> None:
    sys.exit(main())


if __name__ == "__main__":
    run()
