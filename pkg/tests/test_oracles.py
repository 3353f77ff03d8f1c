from fractions import Fraction as F

import pytest

from superairy.oracles import compare_twisted_boson, log_series, oracle_free_energy, solve_partition_function


def test_kw_low_orders():
    Fo = oracle_free_energy(-1, 2)
    assert Fo[(0, (1, 1, 1))] == F(-1, 4)
    assert Fo[(1, (2,))] == F(-1, 16)


def test_bgw_depends_on_D1():
    a = oracle_free_energy(0, 2, F(1, 16))
    b = oracle_free_energy(0, 2, F(0))
    assert a[(1, (1,))] == F(-1, 8) and b[(1, (1,))] == F(-1, 16)


def test_Z_normalised():
    Z = solve_partition_function(-1, 3)
    assert Z[(0, ())] == 1
    assert all(m for (_, m) in Z if (_, m) != (0, ()))


def test_log_of_exp_like_series():
    Z = {(0, ()): F(1), (-1, (1, 1, 1)): F(1)}
    L = log_series(Z, 2)
    assert L[(-1, (1, 1, 1))] == 1 and L[(-2, (1,) * 6)] == F(-1, 2)


@pytest.mark.parametrize("N", [-1, 0])
def test_recursion_matches_solve_level3(N):
    assert compare_twisted_boson(N, 3) == []


def test_unsupported_N():
    with pytest.raises(ValueError):
        oracle_free_energy(2, 2)
