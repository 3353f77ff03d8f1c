from fractions import Fraction as F

import pytest

from superairy.catalog import (CATALOG, CatalogError, frobenius_to_airy, frobenius_trivial, instantiate,
                               list_entries, support_bound, two_one_printed)
from superairy.scalars import QSqrt3
from superairy.structure import commutator_residual, verify_airy


def test_catalog_size_and_ids():
    ids = list_entries()
    assert len(ids) >= 12
    for needed in ("1|2-susy", "osp(1|2)", "worked-example", "2|1-extra", "twisted-boson/1"):
        assert needed in ids


def test_one_two_read_off():
    t = instantiate("1|2-susy")
    # L = hbar d_x - x^2 - theta1 theta2 + hbar^2 d_x^2 + hbar^2 d_1 d_2
    assert t.A.get((1, 1, 1)) == 2
    assert t.A.get((1, 2, 3)) == 1
    assert t.C.get((1, 1, 1)) == -2
    assert t.C.get((1, 2, 3)) == -1
    assert t.D == {}


def test_twisted_boson_kw_constants():
    t = instantiate("twisted-boson/1", {"N": -1}, 10)
    assert t.A.get((1, 1, 1)) == F(-1, 4)        # +1/8 (x^1)^2
    assert t.D == {2: F(-1, 16)}                 # +hbar/16 at i = 2


def test_osp_lives_over_qsqrt3():
    t = instantiate("osp(1|2)")
    assert t.has_sqrt3()
    assert any(isinstance(v, QSqrt3) for _, v in list(t.A.items()) + list(t.B.items()) + list(t.C.items()))
    assert verify_airy(t).passed


def test_operators_close_under_commutator():
    t = instantiate("1|2-susy")
    for i in t.basis.labels():
        for j in t.basis.labels():
            assert commutator_residual(t, i, j) == {}


def test_corrupted_A_detected():
    t = instantiate("1|2-susy")
    t.A.set((2, 1, 3), 7)
    rep = verify_airy(t)
    assert not rep.passed
    assert [v for v in rep.violations if v[0] == "A"]


def test_two_one_printed_only_closes_at_B_one():
    assert verify_airy(two_one_printed({"B": 1})).passed
    rep = verify_airy(two_one_printed({"B": F(1, 3)}))
    assert {v[0] for v in rep.violations} >= {"BB-CA"}
    assert verify_airy(instantiate("2|1-susy", {"A": 2, "B": F(1, 3), "D": -1})).passed


def test_frobenius_one_dimensional():
    t = frobenius_to_airy(frobenius_trivial(), {1: 1}, {1: 1}, {1: 1}, {1: F(3)})
    assert t.A.get((1, 1, 1)) == 1 and t.B.get((1, 1, 1)) == 1 and t.C.get((1, 1, 1)) == 1
    assert t.f == {}
    assert verify_airy(t).passed


def test_frobenius_rejects_bad_form():
    with pytest.raises(ValueError):
        bad = frobenius_trivial()
        bad.form = {}
        frobenius_to_airy(bad, {1: 1}, {1: 1}, {1: 1})


def test_errors():
    with pytest.raises(CatalogError):
        instantiate("nope")
    with pytest.raises(CatalogError):
        instantiate("untwisted-boson/1", {"N": -1}, 20)
    with pytest.raises(CatalogError):
        instantiate("twisted-boson/1", {"N": -1}, 1)
    with pytest.raises(CatalogError):
        support_bound("nope", {}, 1, 1)


def test_support_bound_finite_is_dimension():
    assert support_bound("1|2-susy", {}, 3, 3) == 3


@pytest.mark.parametrize("id_", [i for i in list_entries() if CATALOG[i].infinite])
def test_truncations_verify(id_):
    for p in CATALOG[id_].grid:
        for T in (support_bound(id_, p, 0, 4), support_bound(id_, p, 0, 6)):
            assert verify_airy(instantiate(id_, p, T)).passed, (id_, p, T)
