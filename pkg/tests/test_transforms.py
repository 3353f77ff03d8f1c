from fractions import Fraction as F

import pytest

from superairy.catalog import CATALOG, instantiate, list_entries, one_two_gauged
from superairy.recursion import compute_free_energy, partition_series
from superairy.structure import verify_airy
from superairy.transforms import (ClassicalStructure, GaugeData, GaugeOrderError, bosonic_reduction,
                                  check_lagrangian, classical_limit, cocycle, d_ambiguity_contains,
                                  free_energy_from_Z, from_coefficients, gauge_transform_structure,
                                  gauge_transform_Z, normal_order_quantize, poisson_closure,
                                  weyl_quantize, weyl_quantize_hamiltonian)

S = GaugeData({(1, 1): F(1, 2), (2, 3): F(1, 2)})


def test_gauge_operator_form():
    t = instantiate("1|2-susy")
    # D_s/hbar = hbar (1/2 d_x^2 + d_1 d_2)
    assert S.operator(t.basis) == {(1, (), (1, 1)): F(1, 2), (1, (), (2, 3)): F(1)}


def test_gauge_structure_and_Z_agree():
    t = instantiate("1|2-susy")
    tg = gauge_transform_structure(t, S)
    assert verify_airy(tg).passed
    assert tg.D == {}                         # the conjugation produces no constant
    assert one_two_gauged().D == {1: F(1)}    # the printed L' carries -hbar
    Zp = from_coefficients(gauge_transform_Z(compute_free_energy(t, 6), S, 6))
    assert Zp == partition_series(compute_free_energy(tg, 6), 6)


def test_gauge_result_is_genus_zero():
    tg = gauge_transform_structure(instantiate("1|2-susy"), S)
    assert all(g == 0 for g, _, v in compute_free_energy(tg, 6).items() if v)


def test_free_energy_from_Z_inverts_exponential():
    t = instantiate("worked-example")
    tab = compute_free_energy(t, 5)
    F_back = free_energy_from_Z(t.algebra(), partition_series(tab, 5), 5)
    assert {k: v for k, v in F_back.items() if v} == {(g, i): v for g, i, v in tab.items(5) if v}


def test_gauge_order_too_high():
    t = instantiate("1|2-susy")
    with pytest.raises(GaugeOrderError):
        gauge_transform_structure(t, GaugeData({(1, 1, 1): F(1)}))


@pytest.mark.parametrize("id_", ["1|2-susy", "worked-example", "osp(1|2)", "frobenius-grassmann"])
def test_classical_limit_closes_and_lagrangian(id_):
    t = instantiate(id_)
    cl = classical_limit(t)
    f, residual = poisson_closure(cl)
    assert residual == {}
    assert check_lagrangian(cl, compute_free_energy(t, 4), 5).passed


def test_lagrangian_detects_wrong_F():
    t = instantiate("1|2-susy")
    tab = compute_free_energy(t, 4)
    tab.entries[(0, (1, 1, 1))] += 1
    assert not check_lagrangian(classical_limit(t), tab, 4).passed


def test_bosonic_reduction_drops_fermions():
    red = bosonic_reduction(classical_limit(instantiate("1|2-susy")))
    assert all(not p for p in red.basis.parities[1:])
    assert len(red.hamiltonians) == 1


def test_classical_structure_needs_linear_term():
    b = instantiate("1|2-susy").basis
    with pytest.raises(ValueError):
        ClassicalStructure(b, {1: {((1,), ()): F(1)}})


def test_weyl_symbol_of_mixed_term():
    # x y -> hbar x d + hbar/2 for an even variable; theta eta -> hbar theta d - hbar/2 for an odd one
    assert weyl_quantize_hamiltonian({((1,), (1,)): F(1)}, (0, 0)) == {(1, (1,), (1,)): F(1), (1, (), ()): F(1, 2)}
    assert weyl_quantize_hamiltonian({((1,), (1,)): F(1)}, (0, 1)) == {(1, (1,), (1,)): F(1), (1, (), ()): F(-1, 2)}


def test_osp_normal_ordering_cocycle():
    cl = classical_limit(instantiate("osp(1|2)"))
    res = cocycle(cl, "normal")
    assert any(res.zeta.values())
    assert res.cocycle_condition
    assert res.D == {2: F(3, 4)} == instantiate("osp(1|2)").D     # the printed -3/4 hbar
    assert res.ambiguity == []
    assert not verify_airy(normal_order_quantize(cl)).passed


@pytest.mark.parametrize("id_", [i for i in list_entries() if not CATALOG[i].infinite])
def test_weyl_round_trip_up_to_D(id_):
    for p in CATALOG[id_].grid:
        t = instantiate(id_, p)
        cl = classical_limit(t)
        w = weyl_quantize(cl)
        assert (w.A.entries, w.B.entries, w.C.entries) == (t.A.entries, t.B.entries, t.C.entries)
        diff = {k: t.D.get(k, 0) - w.D.get(k, 0) for k in set(t.D) | set(w.D)}
        assert d_ambiguity_contains(cl, diff), (id_, p, diff)
        assert not any(cocycle(cl, "weyl").zeta.values())
