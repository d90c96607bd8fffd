"""Shannon information measures on discrete probability tensors.

All quantities are computed in nats internally and rebased on the way out, so
identities hold to float64 roundoff regardless of the requested base.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Union

import numpy as np

from .errors import (
    NegativeProbabilityError,
    NotNormalizedError,
    NumericalError,
    UsageError,
)
from .grids import JointDistribution, Party

__all__ = [
    "EntropyValue",
    "entropy",
    "conditional_entropy",
    "mutual_information",
    "ZERO_FLOOR",
]

#: Cells at or below this probability are treated as exact zeros and
#: contribute nothing, which keeps 0*log(0) out of the sums.
ZERO_FLOOR = 1e-300

#: Raw arrays (not wrapped in JointDistribution) must sum to one this tightly.
_SUM_TOL = 1e-9

DistLike = Union[JointDistribution, np.ndarray]


def _check_base(base: float) -> float:
    base = float(base)
    if not math.isfinite(base) or base <= 1.0:
        raise UsageError(f"log base must be finite and > 1, got {base!r}")
    return base


@dataclass(frozen=True)
class EntropyValue:
    """A scalar information quantity together with the log base it is in."""

    value: float
    base: float

    def __post_init__(self) -> None:
        object.__setattr__(self, "value", float(self.value))
        object.__setattr__(self, "base", _check_base(self.base))

    def rebase(self, base: float) -> "EntropyValue":
        """The same quantity expressed in another log base."""
        base = _check_base(base)
        return EntropyValue(self.value * math.log(self.base) / math.log(base), base)

    def __float__(self) -> float:
        return self.value


def _validated_probs(dist: DistLike) -> np.ndarray:
    if isinstance(dist, JointDistribution):
        return dist.probs
    arr = np.asarray(dist, dtype=np.float64)
    if not np.isfinite(arr).all():
        raise NumericalError("probability tensor has non-finite entries")
    if (arr < 0).any():
        raise NegativeProbabilityError(
            f"probability tensor has negative entries (min {arr.min():.3e})"
        )
    total = float(arr.sum())
    if abs(total - 1.0) > _SUM_TOL:
        raise NotNormalizedError(f"probability tensor sums to {total!r} (tol {_SUM_TOL:g})")
    return arr


def _shannon_nats(p: np.ndarray) -> float:
    q = p[p > ZERO_FLOOR]
    return float(-(q * np.log(q)).sum())


def _party_split(dist: DistLike) -> tuple[np.ndarray, int]:
    """Validated probabilities plus the number of leading party-A axes."""
    if isinstance(dist, JointDistribution):
        return dist.probs, dist.n_dims
    arr = _validated_probs(dist)
    if arr.ndim != 2:
        raise UsageError(
            "party structure is ambiguous for raw arrays unless they are 2-D; "
            "wrap higher-rank tensors in JointDistribution"
        )
    return arr, 1


def entropy(dist: DistLike, base: float = 2.0) -> EntropyValue:
    """Shannon entropy of the whole tensor viewed as one distribution."""
    base = _check_base(base)
    p = _validated_probs(dist)
    return EntropyValue(_shannon_nats(p) / math.log(base), base)


def conditional_entropy(dist: DistLike, given: Party = "A", base: float = 2.0) -> EntropyValue:
    """Entropy of one party's outcome given the other's, H(other | given).

    Computed as H(joint) - H(given party's marginal), which is exact for
    discrete distributions and keeps zero cells harmless.
    """
    base = _check_base(base)
    if given not in ("A", "B"):
        raise UsageError(f"given must be 'A' or 'B', got {given!r}")
    p, n = _party_split(dist)
    sum_axes = tuple(range(n, 2 * n)) if given == "A" else tuple(range(n))
    marg = p.sum(axis=sum_axes)
    nats = _shannon_nats(p) - _shannon_nats(marg)
    return EntropyValue(nats / math.log(base), base)


def mutual_information(dist: DistLike, base: float = 2.0) -> EntropyValue:
    """Mutual information between the two parties, I(A;B) = H(A)+H(B)-H(A,B)."""
    base = _check_base(base)
    p, n = _party_split(dist)
    marg_a = p.sum(axis=tuple(range(n, 2 * n)))
    marg_b = p.sum(axis=tuple(range(n)))
    nats = _shannon_nats(marg_a) + _shannon_nats(marg_b) - _shannon_nats(p)
    return EntropyValue(nats / math.log(base), base)
