"""Block designs and within-block ranking."""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DataError, DomainError

TIE_KINDS = ("average", "first", "last", "random", "max", "min")


@dataclass(frozen=True)
class TieMethod:
    """How tied values inside one block share ranks.

    ``random`` breaks ties by a seeded shuffle, so results are reproducible
    for a fixed ``seed``.
    """

    kind: str = "average"
    seed: int | None = None

    def __post_init__(self) -> None:
        if self.kind not in TIE_KINDS:
            raise DomainError(f"unknown tie method {self.kind!r}; expected one of {', '.join(TIE_KINDS)}")
        if self.kind == "random":
            if self.seed is None:
                object.__setattr__(self, "seed", 0)
            elif int(self.seed) != self.seed or self.seed < 0:
                raise DomainError(f"random tie seed must be a non-negative integer, got {self.seed!r}")
        elif self.seed is not None:
            raise DomainError(f"tie method {self.kind!r} takes no seed")

    @classmethod
    def parse(cls, text: str, seed: int | None = None) -> "TieMethod":
        """Parse ``"average"``, ``"random"`` or ``"random:SEED"``."""
        kind, _, tail = text.partition(":")
        if tail:
            if kind != "random":
                raise DomainError(f"tie method {kind!r} takes no seed")
            try:
                seed = int(tail)
            except ValueError:
                raise DomainError(f"bad tie seed {tail!r}") from None
        if kind != "random":
            seed = None
        return cls(kind, seed)

    def __str__(self) -> str:
        return f"random:{self.seed}" if self.kind == "random" else self.kind


@dataclass(frozen=True)
class BlockDesign:
    """A complete B x G table; rows are blocks, columns are groups."""

    values: np.ndarray
    block_labels: tuple[str, ...] = field(default=())
    group_labels: tuple[str, ...] = field(default=())

    def __post_init__(self) -> None:
        try:
            values = np.array(self.values, dtype=float)
        except (TypeError, ValueError) as exc:
            raise DataError(f"design values are not numeric: {exc}") from None
        if values.ndim != 2:
            raise DataError(f"design must be two-dimensional, got shape {values.shape}")
        n_blocks, n_groups = values.shape
        if n_blocks < 1:
            raise DataError("design needs at least one block")
        if n_groups < 2:
            raise DataError("design needs at least two groups")
        if not np.all(np.isfinite(values)):
            b, g = np.argwhere(~np.isfinite(values))[0]
            raise DataError(f"non-finite value in block {b + 1}, group {g + 1}")
        values.setflags(write=False)
        blocks = tuple(str(s) for s in self.block_labels) or tuple(str(i + 1) for i in range(n_blocks))
        groups = tuple(str(s) for s in self.group_labels) or tuple(_default_group_label(i) for i in range(n_groups))
        if len(blocks) != n_blocks:
            raise DataError(f"{len(blocks)} block labels for {n_blocks} blocks")
        if len(groups) != n_groups:
            raise DataError(f"{len(groups)} group labels for {n_groups} groups")
        _reject_duplicates(blocks, "block")
        _reject_duplicates(groups, "group")
        object.__setattr__(self, "values", values)
        object.__setattr__(self, "block_labels", blocks)
        object.__setattr__(self, "group_labels", groups)

    @property
    def n_blocks(self) -> int:
        return self.values.shape[0]

    @property
    def n_groups(self) -> int:
        return self.values.shape[1]

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, BlockDesign):
            return NotImplemented
        return (
            self.block_labels == other.block_labels
            and self.group_labels == other.group_labels
            and np.array_equal(self.values, other.values)
        )

    __hash__ = None  # type: ignore[assignment]


def _default_group_label(i: int) -> str:
    label = ""
    i += 1
    while i:
        i, r = divmod(i - 1, 26)
        label = chr(ord("A") + r) + label
    return label


def _reject_duplicates(labels: Sequence[str], what: str) -> None:
    seen: set[str] = set()
    for label in labels:
        if label in seen:
            raise DataError(f"duplicate {what} label {label!r}")
        seen.add(label)


@dataclass(frozen=True)
class RankMatrix:
    ranks: np.ndarray
    tie_method: TieMethod
    group_labels: tuple[str, ...] = ()

    def __post_init__(self) -> None:
        ranks = np.array(self.ranks, dtype=float)
        if ranks.ndim != 2 or ranks.shape[1] < 2 or ranks.shape[0] < 1:
            raise DataError(f"rank matrix must be B x G with G >= 2, got shape {ranks.shape}")
        ranks.setflags(write=False)
        object.__setattr__(self, "ranks", ranks)
        labels = tuple(self.group_labels) or tuple(_default_group_label(i) for i in range(ranks.shape[1]))
        if len(labels) != ranks.shape[1]:
            raise DataError(f"{len(labels)} group labels for {ranks.shape[1]} groups")
        object.__setattr__(self, "group_labels", labels)

    @property
    def B(self) -> int:
        return self.ranks.shape[0]

    @property
    def G(self) -> int:
        return self.ranks.shape[1]


def _ordinal(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, axis=-1, kind="stable")
    ranks = np.empty(values.shape, dtype=float)
    positions = np.broadcast_to(np.arange(1, values.shape[-1] + 1, dtype=float), values.shape)
    np.put_along_axis(ranks, order, positions, axis=-1)
    return ranks


def rank_rows(values: np.ndarray, kind: str = "average", rng: np.random.Generator | None = None) -> np.ndarray:
    """Rank along the last axis (1 = smallest) for arrays of any leading shape."""
    values = np.asarray(values, dtype=float)
    if kind == "first":
        return _ordinal(values)
    if kind == "last":
        return _ordinal(values[..., ::-1])[..., ::-1]
    if kind == "random":
        if rng is None:
            raise DomainError("random tie breaking needs a generator")
        perm = np.argsort(rng.random(values.shape), axis=-1)
        shuffled = _ordinal(np.take_along_axis(values, perm, axis=-1))
        ranks = np.empty_like(shuffled)
        np.put_along_axis(ranks, perm, shuffled, axis=-1)
        return ranks
    if kind not in ("average", "min", "max"):
        raise DomainError(f"unknown tie method {kind!r}")

    n = values.shape[-1]
    order = np.argsort(values, axis=-1, kind="stable")
    sorted_vals = np.take_along_axis(values, order, axis=-1)
    idx = np.broadcast_to(np.arange(n), values.shape)
    new_run = np.ones(values.shape, dtype=bool)
    new_run[..., 1:] = sorted_vals[..., 1:] != sorted_vals[..., :-1]
    run_end = np.ones(values.shape, dtype=bool)
    run_end[..., :-1] = new_run[..., 1:]
    # first and last sorted position of each element's tie run
    lo = np.maximum.accumulate(np.where(new_run, idx, 0), axis=-1)
    hi = np.flip(np.minimum.accumulate(np.flip(np.where(run_end, idx, n - 1), axis=-1), axis=-1), axis=-1)
    if kind == "min":
        sorted_ranks = lo + 1.0
    elif kind == "max":
        sorted_ranks = hi + 1.0
    else:
        sorted_ranks = 0.5 * (lo + hi) + 1.0
    ranks = np.empty(values.shape, dtype=float)
    np.put_along_axis(ranks, order, sorted_ranks, axis=-1)
    return ranks


def rank_within_blocks(design: BlockDesign, ties: TieMethod | None = None) -> RankMatrix:
    """Rank each block independently, smallest value first."""
    ties = ties or TieMethod()
    rng = np.random.Generator(np.random.Philox(ties.seed)) if ties.kind == "random" else None
    ranks = rank_rows(design.values, ties.kind, rng)
    return RankMatrix(ranks, ties, design.group_labels)


def rank_sums(ranks: RankMatrix) -> list[float]:
    return [float(v) for v in ranks.ranks.sum(axis=0)]
