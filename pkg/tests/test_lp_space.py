import math

import pytest
from hypothesis import given, settings, strategies as st
from pydantic import ValidationError

from app.exceptions.lp_space import InvalidExponentError
from app.schemas.lp_space import SparseVector
from app.services.lp_space import LpSpaceService

coefficients = st.floats(min_value=-10.0, max_value=10.0, allow_nan=False, allow_infinity=False)
vectors = st.dictionaries(st.integers(min_value=1, max_value=12), coefficients, max_size=8).map(
    lambda entries: SparseVector(entries=entries)
)
exponents = st.sampled_from([0.25, 0.5, 2.0 / 3.0, 1.0])


def test_quasi_norm_of_two_unit_vectors():
    lp = LpSpaceService(0.5)
    v = SparseVector(entries={1: 1.0, 2: 1.0})
    assert lp.p_power(v) == 2.0
    assert lp.quasi_norm(v) == 4.0
    assert lp.quasi_norm(SparseVector.zero()) == 0.0


@pytest.mark.parametrize("p", [0.0, -0.5, 1.5])
def test_exponent_outside_range_is_rejected(p):
    with pytest.raises(InvalidExponentError):
        LpSpaceService(p)


def test_sparse_vector_strips_zeros_and_sorts():
    v = SparseVector(entries={5: 1.0, 2: 0.0, 3: -2.0})
    assert v.support() == [3, 5]
    assert v.coefficient(2) == 0.0
    assert len(v) == 2


@pytest.mark.parametrize("entries", [{0: 1.0}, {-3: 1.0}, {1: math.inf}, {1: math.nan}])
def test_sparse_vector_rejects_bad_entries(entries):
    with pytest.raises(ValidationError):
        SparseVector(entries=entries)


def test_combine_cancels_exactly():
    v = SparseVector(entries={1: 0.1, 2: 0.3})
    w = SparseVector(entries={1: 0.1})
    assert (v - w).entries == {2: 0.3}
    assert (v + (-v)).is_zero()
    assert LpSpaceService.linear_combine([(2.0, w), (-1.0, w + w)]).is_zero()


@given(v=vectors, w=vectors, p=exponents)
@settings(max_examples=300)
def test_p_subadditivity(v, w, p):
    lp = LpSpaceService(p)
    assert lp.p_power(v + w) <= (lp.p_power(v) + lp.p_power(w)) * (1.0 + 1e-12) + 1e-300


@given(v=vectors, alpha=coefficients, p=exponents)
@settings(max_examples=300)
def test_homogeneity(v, alpha, p):
    lp = LpSpaceService(p)
    assert lp.quasi_norm(v.scale(alpha)) == pytest.approx(abs(alpha) * lp.quasi_norm(v), rel=1e-9, abs=1e-300)


@given(v=vectors, w=vectors)
def test_distance_is_symmetric(v, w):
    lp = LpSpaceService(0.5)
    assert lp.distance(v, w) == pytest.approx(lp.distance(w, v), rel=1e-12)
