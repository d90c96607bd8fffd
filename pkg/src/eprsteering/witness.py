"""Entropic steering witnesses for windowed position/momentum measurements.

Two families are implemented, both functions of discrete histograms only:

* conditional witness: sum of the steered party's conditional entropies for
  the two conjugate observables, compared against a bound built from that
  party's window widths.  ``margin = bound - lhs``; a positive margin is a
  violation and certifies steering in the stated direction.
* symmetric witness: sum of the two mutual informations, compared against a
  viewing-area bound.  ``margin = lhs - bound``; a positive margin certifies
  steering in both directions at once.

Either way ``margin > 0`` means "witness fired", so callers can treat the
sign uniformly.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum
from typing import Sequence, Union

from .entropy import _check_base, conditional_entropy, mutual_information
from .errors import (
    DimensionMismatchError,
    NonpositiveExtentError,
    NonpositiveWindowError,
    UsageError,
)
from .grids import JointDistribution, Observable, Party

__all__ = [
    "PI_E",
    "Direction",
    "WitnessResult",
    "per_dim_bound",
    "min_resolution",
    "conditional_witness",
    "symmetric_witness",
    "evaluate",
]

PI_E = math.pi * math.e

ObservableInput = Union[JointDistribution, Sequence[JointDistribution]]


class Direction(str, Enum):
    """Steering direction a witness certifies."""

    B_GIVEN_A = "B_given_A"
    A_GIVEN_B = "A_given_B"
    SYMMETRIC = "symmetric"


@dataclass(frozen=True)
class WitnessResult:
    """Outcome of one witness evaluation.

    ``bound_terms`` holds the additive pieces of the bound: one entry per
    transverse dimension for the conditional witness, and the two per-party
    candidates (A, B) whose max is taken for the symmetric witness.
    ``margin > 0`` certifies steering in either convention.
    """

    direction: Direction
    base: float
    lhs: float
    bound: float
    margin: float
    mode: str
    n_dims: int
    bound_terms: tuple[float, ...]
    significance_sigma: float | None = None

    @property
    def violated(self) -> bool:
        return self.margin > 0.0


def per_dim_bound(width_x: float, width_k: float, base: float = 2.0) -> float:
    """One dimension's contribution to the conditional bound, log(pi*e/(dx*dk)).

    Positive only when the window product resolves below pi*e; otherwise the
    conditional witness cannot fire on this dimension no matter the data.
    """
    base = _check_base(base)
    for name, width in (("width_x", width_x), ("width_k", width_k)):
        width = float(width)
        if not math.isfinite(width) or width <= 0.0:
            raise NonpositiveWindowError(f"{name} must be finite and > 0, got {width!r}")
    return (math.log(PI_E) - math.log(width_x) - math.log(width_k)) / math.log(base)


def min_resolution(extent_x: float, extent_k: float) -> int:
    """Smallest per-axis window count that makes the conditional bound positive.

    For square grids over fixed extents the bound per dimension is
    log(N^2 * pi*e / (L_x * L_k)); it must be strictly positive, so exact ties
    resolve upward.
    """
    for name, extent in (("extent_x", extent_x), ("extent_k", extent_k)):
        extent = float(extent)
        if not math.isfinite(extent) or extent <= 0.0:
            raise NonpositiveExtentError(f"{name} must be finite and > 0, got {extent!r}")
    ratio = (float(extent_x) * float(extent_k)) / PI_E
    return int(math.floor(math.sqrt(ratio))) + 1


def _blocks(obj: ObservableInput, observable: Observable) -> tuple[JointDistribution, ...]:
    if isinstance(obj, JointDistribution):
        blocks: tuple[JointDistribution, ...] = (obj,)
    else:
        blocks = tuple(obj)
    if not blocks:
        raise UsageError(f"no {observable.value} distributions given")
    for b in blocks:
        if not isinstance(b, JointDistribution):
            raise UsageError(
                f"{observable.value} input must be JointDistribution(s), got {type(b).__name__}"
            )
        if b.grid.observable is not observable:
            raise UsageError(
                f"expected a {observable.value} distribution, got one on a "
                f"{b.grid.observable.value} grid"
            )
    return blocks


def _paired_blocks(
    position: ObservableInput, momentum: ObservableInput
) -> tuple[tuple[JointDistribution, ...], tuple[JointDistribution, ...], str, int]:
    pos = _blocks(position, Observable.POSITION)
    mom = _blocks(momentum, Observable.MOMENTUM)
    n_pos = sum(b.n_dims for b in pos)
    n_mom = sum(b.n_dims for b in mom)
    if n_pos != n_mom:
        raise DimensionMismatchError(
            f"position covers {n_pos} dimension(s) but momentum covers {n_mom}"
        )
    if n_pos > 2:
        raise UsageError(f"at most 2 transverse dimensions supported, got {n_pos}")
    mode = "independent-axes" if max(len(pos), len(mom)) > 1 else "full-joint"
    return pos, mom, mode, n_pos


def _flat_widths(blocks: tuple[JointDistribution, ...], party: Party) -> list[float]:
    return [w for b in blocks for w in b.grid.widths(party)]


def _flat_extents(blocks: tuple[JointDistribution, ...], party: Party) -> list[float]:
    return [e for b in blocks for e in b.grid.extents(party)]


def conditional_witness(
    position: ObservableInput,
    momentum: ObservableInput,
    direction: Direction = Direction.B_GIVEN_A,
    base: float = 2.0,
) -> WitnessResult:
    """Directed entropic witness from position and momentum histograms.

    ``position`` / ``momentum`` are full-joint distributions, or sequences of
    per-dimension distributions treated as independent blocks (their
    conditional entropies add).
    """
    base = _check_base(base)
    direction = Direction(direction)
    if direction is Direction.SYMMETRIC:
        raise UsageError("use symmetric_witness for the symmetric direction")
    pos, mom, mode, n_dims = _paired_blocks(position, momentum)
    conditioning: Party = "A" if direction is Direction.B_GIVEN_A else "B"
    steered: Party = "B" if conditioning == "A" else "A"

    lhs = sum(conditional_entropy(b, given=conditioning, base=base).value for b in pos)
    lhs += sum(conditional_entropy(b, given=conditioning, base=base).value for b in mom)

    widths_x = _flat_widths(pos, steered)
    widths_k = _flat_widths(mom, steered)
    terms = tuple(per_dim_bound(wx, wk, base) for wx, wk in zip(widths_x, widths_k))
    bound = sum(terms)
    return WitnessResult(
        direction=direction,
        base=base,
        lhs=lhs,
        bound=bound,
        margin=bound - lhs,
        mode=mode,
        n_dims=n_dims,
        bound_terms=terms,
    )


def symmetric_witness(
    position: ObservableInput,
    momentum: ObservableInput,
    base: float = 2.0,
) -> WitnessResult:
    """Mutual-information witness; firing certifies steering in both directions."""
    base = _check_base(base)
    pos, mom, mode, n_dims = _paired_blocks(position, momentum)

    lhs = sum(mutual_information(b, base=base).value for b in pos)
    lhs += sum(mutual_information(b, base=base).value for b in mom)

    log_base = math.log(base)
    candidates = []
    for party in ("A", "B"):
        extents_x = _flat_extents(pos, party)
        extents_k = _flat_extents(mom, party)
        nats = sum(
            math.log(lx) + math.log(lk) - math.log(PI_E)
            for lx, lk in zip(extents_x, extents_k)
        )
        candidates.append(nats / log_base)
    bound = max(candidates)
    return WitnessResult(
        direction=Direction.SYMMETRIC,
        base=base,
        lhs=lhs,
        bound=bound,
        margin=lhs - bound,
        mode=mode,
        n_dims=n_dims,
        bound_terms=tuple(candidates),
    )


def evaluate(
    position: ObservableInput,
    momentum: ObservableInput,
    direction: Direction = Direction.B_GIVEN_A,
    base: float = 2.0,
) -> WitnessResult:
    """Dispatch to the conditional or symmetric witness by direction."""
    direction = Direction(direction)
    if direction is Direction.SYMMETRIC:
        return symmetric_witness(position, momentum, base=base)
    return conditional_witness(position, momentum, direction=direction, base=base)
