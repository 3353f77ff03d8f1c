from fractions import Fraction as F

import pytest
from hypothesis import given, strategies as st

from superairy.graded import GradedBasis, SparseGradedTensor, koszul_sign, move_to_front_sign, sort_sign
from superairy.scalars import QSqrt3, as_scalar, scalar_from_json, scalar_to_json
from superairy.weyl import GradedAlgebra, series_exp, series_log


def test_qsqrt3_field_ops():
    s = QSqrt3(0, 1)
    assert s * s == 3
    x = QSqrt3(F(1, 2), F(2, 3))
    assert x * (1 / x) == 1
    assert (x - x) == 0
    assert as_scalar(QSqrt3(5, 0)) == F(5)


@pytest.mark.parametrize("v", [F(-7, 3), F(0), F(12), QSqrt3(F(1, 2), F(-3, 4))])
def test_scalar_json_round_trip(v):
    assert scalar_from_json(scalar_to_json(v)) == v


def test_scalar_json_integers_have_no_denominator():
    assert scalar_to_json(F(2)) == "2"
    assert scalar_to_json(F(-6, 4)) == "-3/2"


def test_koszul_signs():
    p = (1, 1, 0)
    assert koszul_sign((1, 0, 2), p) == -1
    assert koszul_sign((2, 1, 0), p) == -1
    assert koszul_sign((0, 2, 1), p) == 1
    assert sort_sign((3, 2), (0, 0, 1, 1)) == -1
    assert sort_sign((2, 2), (0, 0, 1, 1)) == 0
    assert move_to_front_sign((2, 1, 3), 2, (0, 0, 1, 1)) == -1


@given(st.permutations(range(5)), st.lists(st.integers(0, 1), min_size=5, max_size=5))
def test_koszul_sign_is_a_character(perm, parities):
    # applying a permutation then its inverse is the identity, so the signs must agree
    inv = [0] * 5
    for k, pk in enumerate(perm):
        inv[pk] = k
    moved = [parities[pk] for pk in perm]
    assert koszul_sign(perm, parities) * koszul_sign(inv, moved) == 1


def test_tensor_graded_symmetry():
    b = GradedBasis.from_labels([0, 1, 1])
    C = SparseGradedTensor(b, 3, ((1, 2),))
    C.set((1, 2, 3), 5)
    assert C.get((1, 3, 2)) == -5
    with pytest.raises(ValueError):
        C.set((1, 2, 2), 1)
    with pytest.raises(ValueError):
        C.set((1, 1, 2), 1)       # odd entry


def test_basis_validation():
    with pytest.raises(ValueError):
        GradedBasis((0, 2))
    with pytest.raises(ValueError):
        GradedBasis((0, 0), has_extra_fermion=True)


def test_weyl_relations():
    a = GradedAlgebra((0, 0, 1, 1))
    d1, x1 = {(0, (), (1,)): 1}, {(0, (1,), ()): 1}
    d2, t2 = {(0, (), (2,)): 1}, {(0, (2,), ()): 1}
    assert a.supercommutator(d1, x1) == {(0, (), ()): 1}
    assert a.supercommutator(d2, t2) == {(0, (), ()): 1}      # anticommutator for odd pairs
    assert a.supercommutator(d1, t2) == {}
    t3 = {(0, (3,), ()): 1}
    assert a.mul(t2, t3) == {(0, (2, 3), ()): 1}
    assert a.mul(t3, t2) == {(0, (2, 3), ()): -1}
    assert a.mul(t2, t2) == {}


def test_series_exp_log_inverse():
    a = GradedAlgebra((0, 0, 1, 1))
    S = {(-1, (1, 1, 1)): F(1, 3), (0, (2, 3)): F(-1), (0, (1, 2, 3)): F(2)}
    assert series_log(a, series_exp(a, S, 6), 6) == {k: v for k, v in S.items()}
