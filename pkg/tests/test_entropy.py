import math

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st
from hypothesis.extra import numpy as hnp

from eprsteering import (
    AxisGrid,
    EntropyValue,
    GridSpec,
    JointDistribution,
    NegativeProbabilityError,
    NotNormalizedError,
    Observable,
    UsageError,
    conditional_entropy,
    entropy,
    mutual_information,
)

# Joint distribution used across the frozen-value tests:
#   [[1/2, 1/4], [1/8, 1/8]]
FROZEN_JOINT_H = 1.75
FROZEN_COND_B_GIVEN_A = 0.9387218755408672
FROZEN_MUTUAL = 0.015712127384097885


def dist_2x2() -> JointDistribution:
    ax = AxisGrid(2, 1.0)
    grid = GridSpec(Observable.POSITION, (ax,), (ax,))
    return JointDistribution(np.array([[0.5, 0.25], [0.125, 0.125]]), grid)


def normalized(arr: np.ndarray) -> np.ndarray:
    total = arr.sum()
    if total <= 0:
        return np.full_like(arr, 1.0 / arr.size)
    return arr / total


joint_arrays = hnp.arrays(
    dtype=np.float64,
    shape=st.tuples(st.integers(2, 9), st.integers(2, 9)),
    elements=st.floats(0.0, 1.0, allow_nan=False),
)


def test_frozen_joint_entropy():
    assert float(entropy(dist_2x2())) == pytest.approx(FROZEN_JOINT_H, abs=1e-12)


def test_frozen_conditional_entropy():
    value = conditional_entropy(dist_2x2(), given="A")
    assert float(value) == pytest.approx(FROZEN_COND_B_GIVEN_A, abs=1e-12)


def test_frozen_mutual_information():
    value = mutual_information(dist_2x2())
    assert float(value) == pytest.approx(FROZEN_MUTUAL, abs=1e-12)


def test_entropy_value_rebase_round_trip():
    v = entropy(dist_2x2(), base=2.0)
    w = v.rebase(math.e)
    assert w.base == math.e
    assert w.value == pytest.approx(v.value * math.log(2.0), rel=1e-14)
    assert w.rebase(2.0).value == pytest.approx(v.value, rel=1e-14)


@pytest.mark.parametrize("base", [1.0, 0.5, 0.0, -2.0, float("nan")])
def test_invalid_base_rejected(base):
    with pytest.raises(UsageError):
        entropy(dist_2x2(), base=base)


def test_deterministic_distribution_has_zero_entropy():
    ax = AxisGrid(2, 1.0)
    grid = GridSpec(Observable.POSITION, (ax,), (ax,))
    probs = np.zeros((2, 2))
    probs[1, 0] = 1.0
    dist = JointDistribution(probs, grid)
    assert float(entropy(dist)) == 0.0
    assert float(conditional_entropy(dist, given="A")) == 0.0
    assert float(mutual_information(dist)) == pytest.approx(0.0, abs=1e-15)


def test_uniform_distribution_attains_log_size():
    ax = AxisGrid(8, 1.0)
    grid = GridSpec(Observable.POSITION, (ax,), (ax,))
    dist = JointDistribution(np.full((8, 8), 1 / 64), grid)
    assert float(entropy(dist)) == pytest.approx(6.0, abs=1e-12)
    assert float(conditional_entropy(dist, given="B")) == pytest.approx(3.0, abs=1e-12)


def test_raw_array_inputs_accepted():
    probs = np.array([[0.5, 0.25], [0.125, 0.125]])
    assert float(entropy(probs)) == pytest.approx(FROZEN_JOINT_H, abs=1e-12)
    assert float(conditional_entropy(probs, given="A")) == pytest.approx(
        FROZEN_COND_B_GIVEN_A, abs=1e-12
    )


def test_raw_array_must_be_normalized():
    with pytest.raises(NotNormalizedError):
        entropy(np.array([[0.5, 0.25], [0.125, 0.0]]))


def test_raw_array_rejects_negative():
    with pytest.raises(NegativeProbabilityError):
        entropy(np.array([[0.75, 0.5], [-0.25, 0.0]]))


def test_conditional_requires_two_axes_for_raw_arrays():
    with pytest.raises(UsageError):
        conditional_entropy(np.full((2, 2, 2), 1 / 8), given="A")
    with pytest.raises(UsageError):
        mutual_information(np.full(4, 0.25))


def test_unknown_party_label_rejected():
    with pytest.raises(UsageError):
        conditional_entropy(dist_2x2(), given="X")


# ------------------------------------------------------------- properties


@given(joint_arrays)
@settings(max_examples=80, deadline=None)
def test_chain_rule_both_directions(arr):
    p = normalized(arr)
    h_joint = float(entropy(p, base=2.0))
    h_a = float(entropy(p.sum(axis=1), base=2.0))
    h_b = float(entropy(p.sum(axis=0), base=2.0))
    assert float(conditional_entropy(p, given="A")) == pytest.approx(
        h_joint - h_a, abs=1e-12
    )
    assert float(conditional_entropy(p, given="B")) == pytest.approx(
        h_joint - h_b, abs=1e-12
    )


@given(joint_arrays)
@settings(max_examples=80, deadline=None)
def test_mutual_information_symmetry_and_bounds(arr):
    p = normalized(arr)
    mi = float(mutual_information(p))
    h_a = float(entropy(p.sum(axis=1)))
    h_b = float(entropy(p.sum(axis=0)))
    assert mi >= -1e-12
    assert mi <= min(h_a, h_b) + 1e-12
    # Bayes symmetry: H(A) - H(A|B) == H(B) - H(B|A)
    asym = h_a - float(conditional_entropy(p, given="B"))
    bsym = h_b - float(conditional_entropy(p, given="A"))
    assert asym == pytest.approx(bsym, abs=1e-12)
    assert mi == pytest.approx(bsym, abs=1e-12)


@given(joint_arrays)
@settings(max_examples=80, deadline=None)
def test_conditioning_cannot_increase_entropy(arr):
    p = normalized(arr)
    h_b = float(entropy(p.sum(axis=0)))
    assert float(conditional_entropy(p, given="A")) <= h_b + 1e-12


def test_product_distribution_has_zero_mutual_information():
    rng = np.random.default_rng(11)
    pa = normalized(rng.random(6))
    pb = normalized(rng.random(5))
    mi = float(mutual_information(np.outer(pa, pb)))
    assert mi == pytest.approx(0.0, abs=1e-12)


def test_entropy_value_float_protocol():
    v = EntropyValue(1.5, 2.0)
    assert float(v) == 1.5
    assert v.rebase(2.0) == v
