"""Acceptance criteria 1-10. Run with `pytest -v tests/test_acceptance.py` (a per-criterion
PASS/FAIL summary is printed at the end) or `python3 tests/test_acceptance.py`."""
import time
from fractions import Fraction as F

import pytest
import sympy as sp

from superairy.catalog import CATALOG, instantiate, list_entries, one_two_gauged, support_bound
from superairy.graphs import compare_with_recursion
from superairy.oracles import compare_twisted_boson, oracle_free_energy
from superairy.recursion import FreeEnergyTable, check_z2_symmetry, compute_free_energy, partition_series
from superairy.structure import verify_airy
from superairy.transforms import (GaugeData, apply_exp, check_lagrangian, classical_limit, cocycle,
                                  d_ambiguity_contains, gauge_transform_structure, series_inverse,
                                  weyl_quantize)
from superairy.weyl import series_exp, series_mul

FINITE = [i for i in list_entries() if not CATALOG[i].infinite]
INFINITE = [i for i in list_entries() if CATALOG[i].infinite]


def _cases(ids):
    return [(i, p) for i in ids for p in (CATALOG[i].grid or [CATALOG[i].defaults])]


def _build(id_, p, level):
    if CATALOG[id_].infinite:
        return instantiate(id_, p, support_bound(id_, p, 0, level + 2))
    return instantiate(id_, p)


# (1|2) example: x = index 1, theta^1 = 2, theta^2 = 3; e stands for theta^1 theta^2
X, H, E = sp.symbols("x hbar e")


def _taylor(expr, max_degree, hbar_shift=0):
    """{(hbar power + shift, monomial): coefficient} for degree 2*(hbar power + shift) + len <= max_degree."""
    out = {}
    ser = sp.series(expr, X, 0, max_degree + 3).removeO().expand()
    for term in sp.Add.make_args(ser):
        poly = sp.Poly(term, X, H, E)
        for (px, ph, pe), c in zip(poly.monoms(), poly.coeffs()):
            a = ph + hbar_shift
            mono = (1,) * px + ((2, 3) if pe else ())
            if 2 * a + len(mono) <= max_degree:
                out[(a, mono)] = F(int(c.p), int(c.q))
    return out


# -- 1 ------------------------------------------------------------------------------------

def test_criterion_01_constraint_suite():
    t0 = time.perf_counter()
    cases = _cases(list_entries())
    failed = []
    for id_, p in cases:
        t = _build(id_, p, 2) if CATALOG[id_].infinite else instantiate(id_, p)
        rep = verify_airy(t)
        if not rep.passed:
            failed.append((id_, p, rep.violations[:3]))
    assert not failed
    assert len(set(i for i, _ in cases)) >= 12
    assert time.perf_counter() - t0 < 10


# -- 2 ------------------------------------------------------------------------------------

# printed free energy of the (1|2) example as {(g, monomial): coefficient}, 1/n! convention
PRINTED_F = {
    (0, (1, 1, 1)): F(1, 3),
    (0, (1, 1, 1, 1, 1)): F(-1, 5),
    (0, (1, 2, 3)): F(1),
    (0, (1, 1, 1, 2, 3)): F(-1),
    (1, (1, 1)): F(-1),
    (1, (2, 3)): F(-1),
    (2, (1,)): F(1),
}
PRINTED_HBAR_SLIPS = {(1, (1, 1)), (2, (1,))}


def _one_two_series(level):
    t0 = time.perf_counter()
    tab = compute_free_energy(instantiate("1|2-susy"), level)
    s = tab.series(level)
    assert time.perf_counter() - t0 < 1
    return s


def test_criterion_02_printed_terms_reproduced():
    s = _one_two_series(4)
    for key, val in PRINTED_F.items():
        if key not in PRINTED_HBAR_SLIPS:
            assert s.get(key, 0) == val, key


@pytest.mark.xfail(strict=True, reason="printed hbar x^2 and hbar^2 x coefficients do not satisfy L Z = 0")
def test_criterion_02_printed_hbar_terms():
    s = _one_two_series(4)
    for key in PRINTED_HBAR_SLIPS:
        assert s.get(key, 0) == PRINTED_F[key], key


# -- 3 ------------------------------------------------------------------------------------

@pytest.mark.parametrize("beta", [F(0), F(3, 2), F(-2)])
def test_criterion_03_two_one_extra(beta):
    t0 = time.perf_counter()
    tab = compute_free_energy(instantiate("2|1-extra", {"beta": beta}), 6)
    # Z = exp(x^2 theta^0 theta^1 / hbar): x^2 is index 2, theta^0 index 0, theta^1 index 3
    assert {k: v for k, v in tab.series(6).items() if v} == {(0, (0, 2, 3)): F(1)}
    assert time.perf_counter() - t0 < 1


# -- 4 ------------------------------------------------------------------------------------

def test_criterion_04_classical_closed_form():
    t0 = time.perf_counter()
    r = sp.sqrt(1 + 4 * X ** 2)
    Fcl = sp.log(2 * X + r) / 8 + X * r / 4 - X / 2 + (r + 2 * X - 1) / (r + 2 * X + 1) * E
    closed = {m: v for (a, m), v in _taylor(Fcl, 7).items() if a == 0 and v}
    t = instantiate("1|2-susy")
    tab = compute_free_energy(t, 5)
    engine = {m: v for (g, m), v in tab.series(5).items() if g == 0 and v}
    assert closed == engine
    rep = check_lagrangian(classical_limit(t), tab, 7)
    assert rep.passed, rep.violations[:5]
    assert time.perf_counter() - t0 < 1


# -- 5 ------------------------------------------------------------------------------------

S_EXAMPLE = {(1, 1): F(1, 2), (2, 3): F(1, 2)}     # D = 1/2 d_x^2 + d_1 d_2


def _printed_Fprime():
    return -X * (X + 1) / 4 - (1 + 4 * H) * sp.log(1 - 2 * X) / 8 + (X + 2 * H) / (1 - 2 * X) * E


def _gauge_identity_residual(Fprime, degree=6):
    """e^{F'/hbar} pushed through sum (-hbar)^k/k! D^k, normalised, minus Z from the recursion."""
    t = instantiate("1|2-susy")
    alg = t.algebra()
    logZp = _taylor(Fprime, degree, hbar_shift=-1)
    Zp = series_exp(alg, {k: v for k, v in logZp.items() if v}, degree)
    X_op = GaugeData({k: -v for k, v in S_EXAMPLE.items()}).operator(t.basis)
    W = apply_exp(alg, X_op, Zp, degree)
    norm = {k: v for k, v in W.items() if not k[1]}
    W = series_mul(alg, series_inverse(alg, norm, degree), W, degree)
    Z = partition_series(compute_free_energy(t, degree), degree)
    return {k: W.get(k, 0) - Z.get(k, 0) for k in set(W) | set(Z) if W.get(k, 0) != Z.get(k, 0)}


def test_criterion_05_gauge_operators():
    tg = gauge_transform_structure(instantiate("1|2-susy"), GaugeData(S_EXAMPLE))
    printed = one_two_gauged()
    assert verify_airy(tg).passed
    assert (tg.A.entries, tg.B.entries, tg.C.entries) == (printed.A.entries, printed.B.entries, printed.C.entries)


def test_criterion_05_gauge_identity_genus_zero_part():
    t0 = time.perf_counter()
    assert _gauge_identity_residual(_printed_Fprime().subs(H, 0)) == {}
    assert time.perf_counter() - t0 < 5


@pytest.mark.xfail(strict=True, reason="printed F' carries an order-hbar part that solves the printed L' "
                                       "(extra -hbar constant) rather than the conjugated operator")
def test_criterion_05_gauge_identity_printed_Fprime():
    assert _gauge_identity_residual(_printed_Fprime()) == {}


# -- 6 ------------------------------------------------------------------------------------

def test_criterion_06_z2_symmetry():
    t0 = time.perf_counter()
    failed = []
    for id_, p in _cases(list_entries()):
        level = 5 if CATALOG[id_].infinite else 8
        tab = compute_free_energy(_build(id_, p, level), level)
        rep = check_z2_symmetry(tab, level)
        if not rep.passed:
            failed.append((id_, p, rep.violations[:3]))
    assert not failed
    assert time.perf_counter() - t0 < 120


# -- 7 ------------------------------------------------------------------------------------

def test_criterion_07_graph_oracle():
    t0 = time.perf_counter()
    checked, failed = 0, []
    for id_, p in _cases(list_entries()):
        t = _build(id_, p, 4)
        if t.basis.has_extra_fermion:
            continue
        bad = compare_with_recursion(t, FreeEnergyTable(t), 4)
        checked += 1
        if bad:
            failed.append((id_, p, bad[:3]))
    assert not failed
    assert checked >= 20
    assert time.perf_counter() - t0 < 60


# -- 8 ------------------------------------------------------------------------------------

@pytest.mark.parametrize("N,D1", [(-1, F(1, 16)), (0, F(1, 16)), (0, F(0))])
def test_criterion_08_independent_solve(N, D1):
    t0 = time.perf_counter()
    assert compare_twisted_boson(N, 4, D1) == []
    assert len([v for v in oracle_free_energy(N, 4, D1).values() if v]) >= 5
    assert time.perf_counter() - t0 < 60


# -- 9 ------------------------------------------------------------------------------------

@pytest.mark.parametrize("id_", ["osp(1|2)", "worked-example"])
def test_criterion_09_weyl_round_trip(id_):
    t = instantiate(id_)
    cl = classical_limit(t)
    w = weyl_quantize(cl)
    assert (w.A.entries, w.B.entries, w.C.entries) == (t.A.entries, t.B.entries, t.C.entries)
    diff = {k: t.D.get(k, 0) - w.D.get(k, 0) for k in set(t.D) | set(w.D)}
    assert d_ambiguity_contains(cl, diff)


def test_criterion_09_weyl_cocycle_vanishes():
    t0 = time.perf_counter()
    for id_, p in _cases(FINITE):
        res = cocycle(classical_limit(instantiate(id_, p)), "weyl")
        assert not any(res.zeta.values()), (id_, p)
    assert time.perf_counter() - t0 < 5


# -- 10 -----------------------------------------------------------------------------------

def test_criterion_10_truncation_stability():
    t0 = time.perf_counter()
    Ns = set()
    for id_, p in _cases(INFINITE):
        T = support_bound(id_, p, 0, 6)
        tabs = []
        for bound in (T, 2 * T):
            t = instantiate(id_, p, bound)
            tab = compute_free_energy(t, 4)
            tabs.append({(g, tuple(t.basis.name(a) for a in idx)): v for g, idx, v in tab.items(4)})
        assert tabs[0] == tabs[1], (id_, p)
        Ns.add((id_, p["N"]))
    for id_ in INFINITE:
        assert len({n for i, n in Ns if i == id_}) >= 2, id_
    assert time.perf_counter() - t0 < 120


if __name__ == "__main__":
    import sys
    sys.exit(pytest.main(["-q", __file__]))
