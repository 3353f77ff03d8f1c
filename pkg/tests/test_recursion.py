from fractions import Fraction as F

import pytest

from superairy.catalog import instantiate
from superairy.recursion import (FreeEnergyTable, check_z2_symmetry, compute_free_energy, get_F, level,
                                 partition_coefficients, partition_series)
from superairy.weyl import series_exp, series_truncate


def _annihilation_residual(t, Z, degree):
    alg = t.algebra()
    out = {}
    for i in t.basis.labels():
        if i == 0:
            continue
        r = {k: v for k, v in series_truncate(alg.apply(t.operator(i), Z), degree).items() if v}
        if r:
            out[i] = r
    return out


@pytest.mark.parametrize("id_", ["1|2-susy", "worked-example", "osp(1|2)", "2|1-susy", "frobenius-grassmann"])
def test_Z_is_annihilated(id_):
    t = instantiate(id_)
    tab = compute_free_energy(t, 5)
    Z = partition_series(tab, 5)
    assert _annihilation_residual(t, Z, 5) == {}


def test_printed_one_two_F_is_not_annihilated():
    t = instantiate("1|2-susy")
    printed = {(-1, (1, 1, 1)): F(1, 3), (-1, (1, 1, 1, 1, 1)): F(-1, 5), (-1, (1, 2, 3)): F(1),
               (-1, (1, 1, 1, 2, 3)): F(-1), (0, (1, 1)): F(-1), (0, (2, 3)): F(-1), (1, (1,)): F(1)}
    Z = series_exp(t.algebra(), printed, 5)
    assert _annihilation_residual(t, Z, 3) != {}


def test_one_two_values():
    tab = compute_free_energy(instantiate("1|2-susy"), 4)
    assert get_F(tab, 0, (1, 1, 1)) == 2              # 1/3 x^3 with the 1/3! convention
    assert get_F(tab, 0, (1, 2, 3)) == 1
    assert get_F(tab, 0, (1, 3, 2)) == -1             # odd indices anticommute
    assert get_F(tab, 1, (2, 3)) == -1
    assert get_F(tab, 1, (1, 1)) == -1                # -1/2 hbar x^2
    assert get_F(tab, 2, (1,)) == 0


def test_partition_coefficients_sorted_and_normalised():
    coeffs = partition_coefficients(compute_free_energy(instantiate("1|2-susy"), 3), 3)
    keys = [(c.hbar_power, c.monomial) for c in coeffs]
    assert keys == sorted(keys)
    assert (0, ()) in keys and coeffs[keys.index((0, ()))].value == 1


def test_levels_and_lazy_extension():
    assert level(0, 3) == 1 and level(1, 1) == 1 and level(2, 0) == 2
    t = instantiate("worked-example")
    tab = FreeEnergyTable(t)
    tab.extend(2)
    small = dict(tab.entries)
    tab.extend(4)
    assert all(tab.entries[k] == v for k, v in small.items())
    with pytest.raises(ValueError):
        compute_free_energy(t, 0)


def test_zero_structure_has_empty_table():
    t = instantiate("1|1-abelian-1", {"A": 0, "B": 0, "C": 0, "D": 0})
    assert not [v for _, _, v in compute_free_energy(t, 5).items() if v]


@pytest.mark.parametrize("id_", ["1|2-susy", "osp(1|2)", "2|1-extra"])
def test_z2_symmetry(id_):
    assert check_z2_symmetry(compute_free_energy(instantiate(id_), 6), 6).passed
