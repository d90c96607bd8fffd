"""Poisson bootstrap for witness significance.

Each replicate redraws every histogram cell as an independent Poisson variate
with the observed count as its mean, re-normalizes, and re-evaluates the
witness margin.  Streams come from a counter-based generator keyed by
``(seed..., replicate, attempt)``, so any replicate can be reproduced in
isolation and results never depend on evaluation order.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Sequence, Union

import numpy as np

from .errors import DegenerateBootstrapError, UsageError
from .grids import CountTensor, Histogram
from .witness import Direction, evaluate

__all__ = [
    "BootstrapReport",
    "replicate_rng",
    "poisson_resample",
    "sample_counts",
    "witness_significance",
]

SeedLike = Union[int, Sequence[int]]

#: Fewer replicates than this gives a uselessly noisy significance estimate.
MIN_REPLICATES = 100

_MAX_REDRAWS = 1000


def _seed_key(seed: SeedLike) -> tuple[int, ...]:
    if isinstance(seed, (int, np.integer)) and not isinstance(seed, bool):
        key = (int(seed),)
    else:
        try:
            key = tuple(int(s) for s in seed)  # type: ignore[union-attr]
        except (TypeError, ValueError):
            raise UsageError(f"seed must be an int or a sequence of ints, got {seed!r}") from None
    if not key or any(s < 0 for s in key):
        raise UsageError(f"seed entries must be non-negative integers, got {seed!r}")
    return key


def replicate_rng(seed: SeedLike, index: int, attempt: int = 0) -> np.random.Generator:
    """Independent generator for one bootstrap replicate."""
    key = _seed_key(seed) + (int(index), int(attempt))
    return np.random.Generator(np.random.Philox(np.random.SeedSequence(key)))


def poisson_resample(counts: CountTensor, rng: np.random.Generator) -> CountTensor:
    """Redraw each cell as Poisson with the observed count as mean."""
    lam = counts.counts.astype(np.float64)
    return CountTensor(rng.poisson(lam=lam))


def sample_counts(means: np.ndarray, rng: np.random.Generator) -> CountTensor:
    """Poisson counts around arbitrary non-negative expected values."""
    lam = np.asarray(means, dtype=np.float64)
    if (lam < 0).any() or not np.isfinite(lam).all():
        raise UsageError("expected counts must be finite and non-negative")
    return CountTensor(rng.poisson(lam=lam))


def _hist_blocks(obj, name: str) -> tuple[Histogram, ...]:
    if isinstance(obj, Histogram):
        return (obj,)
    try:
        blocks = tuple(obj)
    except TypeError:
        blocks = ()
    if not blocks or not all(isinstance(b, Histogram) for b in blocks):
        raise UsageError(f"{name} must be a Histogram or a sequence of Histograms")
    return blocks


@dataclass(frozen=True)
class BootstrapReport:
    """Summary of the bootstrap margin distribution.

    ``significance`` is margin_mean / margin_std (sample std, ddof=1), in
    units of bootstrap standard deviations; its sign follows the margin, so
    values above +3 certify a violation at the conventional threshold.
    """

    direction: Direction
    base: float
    n_boot: int
    seed: tuple[int, ...]
    margin_mean: float
    margin_std: float
    significance: float
    rejected_replicates: int


def witness_significance(
    position: Histogram | Sequence[Histogram],
    momentum: Histogram | Sequence[Histogram],
    *,
    direction: Direction = Direction.B_GIVEN_A,
    n_boot: int = 1000,
    seed: SeedLike = 0,
    base: float = 2.0,
) -> BootstrapReport:
    """Bootstrap the witness margin from observed counts.

    Replicates where any histogram comes back empty cannot be normalized;
    they are redrawn from a fresh substream and counted in
    ``rejected_replicates``.
    """
    direction = Direction(direction)
    key = _seed_key(seed)
    if not isinstance(n_boot, (int, np.integer)) or n_boot < MIN_REPLICATES:
        raise UsageError(f"n_boot must be an integer >= {MIN_REPLICATES}, got {n_boot!r}")
    n_boot = int(n_boot)
    pos_blocks = _hist_blocks(position, "position")
    mom_blocks = _hist_blocks(momentum, "momentum")

    margins = np.empty(n_boot)
    rejected = 0
    for i in range(n_boot):
        for attempt in range(_MAX_REDRAWS):
            rng = replicate_rng(key, i, attempt)
            pos_rep = [poisson_resample(b.counts, rng) for b in pos_blocks]
            mom_rep = [poisson_resample(b.counts, rng) for b in mom_blocks]
            if all(c.total > 0 for c in pos_rep + mom_rep):
                break
            rejected += 1
        else:
            raise DegenerateBootstrapError(
                f"replicate {i} stayed empty after {_MAX_REDRAWS} redraws"
            )
        pos = [
            Histogram(counts=c, grid=b.grid).normalize()
            for c, b in zip(pos_rep, pos_blocks)
        ]
        mom = [
            Histogram(counts=c, grid=b.grid).normalize()
            for c, b in zip(mom_rep, mom_blocks)
        ]
        margins[i] = evaluate(pos, mom, direction=direction, base=base).margin

    mean = float(margins.mean())
    std = float(margins.std(ddof=1))
    if std == 0.0:
        raise DegenerateBootstrapError("all bootstrap margins are identical; no spread to report")
    return BootstrapReport(
        direction=direction,
        base=base,
        n_boot=n_boot,
        seed=key,
        margin_mean=mean,
        margin_std=std,
        significance=mean / std,
        rejected_replicates=rejected,
    )
