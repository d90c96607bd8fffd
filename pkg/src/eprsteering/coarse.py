"""Coarse-graining and resolution sweeps.

Downsampling merges adjacent windows, which is exactly what re-binning the
raw events onto the coarser grid would have produced; counts stay counts and
probabilities stay normalized.  The sweep helpers re-evaluate witnesses at
every reachable resolution of a square base grid.
"""

from __future__ import annotations

from dataclasses import dataclass, replace
from typing import Sequence

import numpy as np

from .bootstrap import BootstrapReport, witness_significance
from .errors import NonDivisibleFactorError, UsageError
from .grids import AxisGrid, GridSpec, Histogram, JointDistribution
from .witness import Direction, WitnessResult, evaluate

__all__ = [
    "block_sum",
    "downsample",
    "CurvePoint",
    "resolution_curve",
    "MapCell",
    "ResolutionSweep",
    "asymmetry_map",
]


def _check_factor(factor: int, size: int, axis: int) -> int:
    if not isinstance(factor, (int, np.integer)) or isinstance(factor, bool):
        raise UsageError(f"downsampling factor must be an integer, got {factor!r}")
    factor = int(factor)
    if factor < 1:
        raise UsageError(f"downsampling factor must be >= 1, got {factor}")
    if size % factor != 0:
        raise NonDivisibleFactorError(
            f"factor {factor} does not divide the {size} windows of axis {axis}"
        )
    return factor


def block_sum(arr: np.ndarray, factors: Sequence[int]) -> np.ndarray:
    """Aggregate an array over contiguous blocks, one factor per axis."""
    arr = np.asarray(arr)
    if len(factors) != arr.ndim:
        raise UsageError(f"need {arr.ndim} factors for a rank-{arr.ndim} tensor, got {len(factors)}")
    interleaved: list[int] = []
    for axis, (size, factor) in enumerate(zip(arr.shape, factors)):
        factor = _check_factor(factor, size, axis)
        interleaved += [size // factor, factor]
    return arr.reshape(interleaved).sum(axis=tuple(range(1, 2 * arr.ndim, 2)))


def _coarser_axis(ax: AxisGrid, factor: int) -> AxisGrid:
    return AxisGrid(
        n_windows=ax.n_windows // factor,
        window_width=ax.window_width * factor,
        origin=ax.origin,
    )


def _coarser_grid(grid: GridSpec, factor_a: int, factor_b: int) -> GridSpec:
    return GridSpec(
        observable=grid.observable,
        axes_a=tuple(_coarser_axis(ax, factor_a) for ax in grid.axes_a),
        axes_b=tuple(_coarser_axis(ax, factor_b) for ax in grid.axes_b),
    )


def downsample(data: Histogram | JointDistribution, factor_a: int, factor_b: int):
    """Merge windows in groups of ``factor_a`` (party A) and ``factor_b`` (party B).

    The factor applies to every axis of its party.  Returns the same type it
    was given, on the correspondingly coarser grid.
    """
    if isinstance(data, Histogram):
        grid = data.grid
        arr = data.counts.counts
    elif isinstance(data, JointDistribution):
        grid = data.grid
        arr = data.probs
    else:
        raise UsageError(f"downsample expects Histogram or JointDistribution, got {type(data).__name__}")
    n = grid.n_dims
    factors = [factor_a] * n + [factor_b] * n
    coarse = block_sum(arr, factors)
    new_grid = _coarser_grid(grid, int(factor_a), int(factor_b))
    if isinstance(data, Histogram):
        return Histogram(counts=coarse, grid=new_grid)
    return JointDistribution(probs=coarse, grid=new_grid)


def _base_resolution(*grids: GridSpec) -> int:
    counts = {ax.n_windows for g in grids for ax in g.axes_a + g.axes_b}
    if len(counts) != 1:
        raise UsageError(
            f"resolution sweeps need the same window count on every axis, got {sorted(counts)}"
        )
    return counts.pop()


def _divisors(n: int) -> list[int]:
    return [d for d in range(2, n + 1) if n % d == 0]


@dataclass(frozen=True)
class CurvePoint:
    """Witness evaluation at one per-axis resolution.

    ``inv_window_product`` is the product over dimensions of
    ``1 / (width_x * width_k)`` for the steered party, the natural x-axis for
    resolution plots.
    """

    resolution: int
    inv_window_product: float
    lhs: float
    bound: float
    margin: float


def resolution_curve(
    position: Histogram | JointDistribution,
    momentum: Histogram | JointDistribution,
    resolutions: Sequence[int] | None = None,
    direction: Direction = Direction.B_GIVEN_A,
    base: float = 2.0,
) -> tuple[CurvePoint, ...]:
    """Point-estimate witness margins across symmetric coarse-grainings.

    Both parties are downsampled together, so the sweep walks square
    resolutions ``r`` that divide the (square) base grid.  Defaults to every
    divisor >= 2 in increasing order.
    """
    direction = Direction(direction)
    if isinstance(position, Histogram):
        position = position.normalize()
    if isinstance(momentum, Histogram):
        momentum = momentum.normalize()
    n0 = _base_resolution(position.grid, momentum.grid)
    if resolutions is None:
        resolutions = _divisors(n0)
    points = []
    for r in resolutions:
        if not isinstance(r, (int, np.integer)) or r < 1 or n0 % int(r) != 0:
            raise NonDivisibleFactorError(f"resolution {r!r} does not divide the base grid of {n0}")
        f = n0 // int(r)
        pos_r = downsample(position, f, f)
        mom_r = downsample(momentum, f, f)
        res = evaluate(pos_r, mom_r, direction=direction, base=base)
        steered = "A" if direction is Direction.A_GIVEN_B else "B"
        inv = 1.0
        for wx, wk in zip(pos_r.grid.widths(steered), mom_r.grid.widths(steered)):
            inv /= wx * wk
        points.append(
            CurvePoint(
                resolution=int(r),
                inv_window_product=inv,
                lhs=res.lhs,
                bound=res.bound,
                margin=res.margin,
            )
        )
    return tuple(points)


@dataclass(frozen=True)
class MapCell:
    """One (party A resolution, party B resolution) cell of an asymmetry map."""

    resolution_a: int
    resolution_b: int
    result: WitnessResult
    report: BootstrapReport


@dataclass(frozen=True)
class ResolutionSweep:
    """Asymmetric resolution sweep with per-cell bootstrap significance."""

    direction: Direction
    base: float
    resolutions_a: tuple[int, ...]
    resolutions_b: tuple[int, ...]
    n_boot: int
    seed: int
    cells: tuple[MapCell, ...]

    def _matrix(self, getter) -> np.ndarray:
        out = np.empty((len(self.resolutions_a), len(self.resolutions_b)))
        for cell in self.cells:
            i = self.resolutions_a.index(cell.resolution_a)
            j = self.resolutions_b.index(cell.resolution_b)
            out[i, j] = getter(cell)
        return out

    def margins(self) -> np.ndarray:
        return self._matrix(lambda c: c.result.margin)

    def significances(self) -> np.ndarray:
        return self._matrix(lambda c: c.report.significance)


def asymmetry_map(
    position: Histogram,
    momentum: Histogram,
    resolutions_a: Sequence[int],
    resolutions_b: Sequence[int],
    *,
    direction: Direction = Direction.B_GIVEN_A,
    n_boot: int = 1000,
    seed: int = 0,
    base: float = 2.0,
) -> ResolutionSweep:
    """Witness margins over a grid of per-party resolutions.

    Each cell downsamples the two parties independently, evaluates the
    witness on the observed counts, and attaches Poisson-bootstrap
    significance.  Cell randomness is keyed by ``(seed, res_a, res_b)``, so
    results do not depend on sweep order.
    """
    direction = Direction(direction)
    for name, h in (("position", position), ("momentum", momentum)):
        if not isinstance(h, Histogram):
            raise UsageError(f"{name} must be a Histogram (counts are needed for the bootstrap)")
    n0 = _base_resolution(position.grid, momentum.grid)
    res_a = tuple(int(r) for r in resolutions_a)
    res_b = tuple(int(r) for r in resolutions_b)
    if not res_a or not res_b:
        raise UsageError("resolution lists must be non-empty")
    cells = []
    for ra in res_a:
        for rb in res_b:
            for r in (ra, rb):
                if r < 1 or n0 % r != 0:
                    raise NonDivisibleFactorError(
                        f"resolution {r} does not divide the base grid of {n0}"
                    )
            fa, fb = n0 // ra, n0 // rb
            pos_rr = downsample(position, fa, fb)
            mom_rr = downsample(momentum, fa, fb)
            point = evaluate(pos_rr.normalize(), mom_rr.normalize(), direction=direction, base=base)
            report = witness_significance(
                pos_rr,
                mom_rr,
                direction=direction,
                n_boot=n_boot,
                seed=[seed, ra, rb],
                base=base,
            )
            point = replace(point, significance_sigma=report.significance)
            cells.append(MapCell(resolution_a=ra, resolution_b=rb, result=point, report=report))
    return ResolutionSweep(
        direction=direction,
        base=base,
        resolutions_a=res_a,
        resolutions_b=res_b,
        n_boot=n_boot,
        seed=seed,
        cells=tuple(cells),
    )
