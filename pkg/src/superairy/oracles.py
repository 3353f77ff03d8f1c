"""Independent degree-by-degree solve of the twisted free-boson constraints.

H_i Z = 0 is solved directly on commutative polynomials in hbar and x_1, x_2, ...,
without the Weyl engine or the recursion. Degree counts 2*(hbar power) + (x degree), so
H_i = hbar d_i + Q_i with Q_i raising degree by one more than hbar d_i. Then
hbar d_i Z_d = -Q_i Z_{d-1} fixes every monomial of Z_d containing x_i, and the
equations for different i must agree (that agreement is part of the check).
"""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, List, Tuple

from .catalog import instantiate, support_bound
from .recursion import FreeEnergyTable

# a monomial is (hbar power, sorted tuple of variable subscripts)
Mono = Tuple[int, Tuple[int, ...]]
Poly = Dict[Mono, Fraction]


class OracleInconsistent(ValueError):
    pass


def _add(P: Poly, m: Mono, c) -> None:
    v = P.get(m, 0) + c
    if v:
        P[m] = v
    else:
        P.pop(m, None)


def _d(m: Tuple[int, ...], j: int):
    """d/dx_j of x^m as (multiplicity, remaining monomial) or None."""
    k = m.count(j)
    if not k:
        return None
    lst = list(m)
    lst.remove(j)
    return k, tuple(lst)


def _times(m: Tuple[int, ...], *js: int) -> Tuple[int, ...]:
    return tuple(sorted(m + js))


def twisted_hamiltonian_Q(N: int, i: int, D1: Fraction, Z: Poly) -> Poly:
    """Q_i Z where H_i = hbar d_i + Q_i for the twisted free boson at N = -1 or N = 0."""
    out: Poly = {}
    if N == -1:
        # x^{j-i+2} d_j for j >= i-1; second derivatives over j + k = i-1
        for (a, m), c in Z.items():
            for j in set(m):
                if j >= i - 1:
                    k, rest = _d(m, j)
                    _add(out, (a + 1, _times(rest, j - i + 2)), c * k * Fraction(2 * j - 2 * i + 3, 2))
            for j in range(1, i - 1):
                r1 = _d(m, j)
                if r1 is None:
                    continue
                r2 = _d(r1[1], i - 1 - j)
                if r2 is not None:
                    _add(out, (a + 2, r2[1]), c * r1[0] * r2[0] * Fraction(1, 2))
            if i == 1:
                _add(out, (a, _times(m, 1, 1)), c * Fraction(1, 8))
            if i == 2:
                _add(out, (a + 1, m), c * Fraction(1, 16))
    elif N == 0:
        for (a, m), c in Z.items():
            for j in set(m):
                if j >= i:
                    k, rest = _d(m, j)
                    _add(out, (a + 1, _times(rest, j - i + 1)), c * k * Fraction(2 * j - 2 * i + 1, 2))
            for j in range(1, i):
                r1 = _d(m, j)
                if r1 is None:
                    continue
                r2 = _d(r1[1], i - j)
                if r2 is not None:
                    _add(out, (a + 2, r2[1]), c * r1[0] * r2[0] * Fraction(1, 2))
            if i == 1:
                _add(out, (a + 1, m), c * (Fraction(1, 16) + D1))
    else:
        raise ValueError("oracle covers N = -1 and N = 0 only")
    return out


def solve_partition_function(N: int, max_degree: int, D1: Fraction = Fraction(1, 16),
                             n_vars: int | None = None) -> Poly:
    """Z through degree max_degree with Z(0) = 1 and no pure-hbar terms."""
    M = n_vars or 3 * max_degree + 4
    Z: Poly = {(0, ()): Fraction(1)}
    prev: Poly = dict(Z)
    for d in range(1, max_degree + 1):
        new: Poly = {}
        for i in range(1, M + 1):
            R = twisted_hamiltonian_Q(N, i, D1, prev)
            for (a, m), c in R.items():
                # hbar d_i x^{m'} = hbar * mult * x^m  with  m' = m + i
                mono = (a - 1, _times(m, i))
                if 2 * mono[0] + len(mono[1]) != d:
                    raise OracleInconsistent(f"degree bookkeeping broke at {mono}")
                if max(mono[1]) > M:
                    continue
                val = -c / mono[1].count(i)
                old = new.get(mono)
                if old is not None and old != val:
                    raise OracleInconsistent(f"constraints disagree on {mono}: {old} vs {val}")
                new[mono] = val
        # every monomial of Z_d must have been reached through each of its variables
        for (a, m), c in new.items():
            for j in set(m):
                if j <= M:
                    R = twisted_hamiltonian_Q(N, j, D1, prev)
                    got = -R.get((a + 1, tuple(sorted(_d(m, j)[1]))), 0) / m.count(j)
                    if got != c:
                        raise OracleInconsistent(f"monomial {m} inconsistent for i = {j}")
        new = {k: v for k, v in new.items() if v}
        Z.update(new)
        prev = new
    return Z


def _mul(P: Poly, Q: Poly, max_degree: int) -> Poly:
    out: Poly = {}
    for (a, m), c in P.items():
        for (b, n), e in Q.items():
            mono = (a + b, tuple(sorted(m + n)))
            if 2 * mono[0] + len(mono[1]) <= max_degree:
                _add(out, mono, c * e)
    return out


def log_series(Z: Poly, max_degree: int) -> Poly:
    """log Z for Z = 1 + U with every term of U of positive degree."""
    U = {k: v for k, v in Z.items() if k != (0, ())}
    out: Poly = {}
    power: Poly = {(0, ()): Fraction(1)}
    k = 1
    while True:
        power = _mul(power, U, max_degree)
        if not power:
            return out
        for mono, c in power.items():
            _add(out, mono, c * Fraction((-1) ** (k + 1), k))
        k += 1


def oracle_free_energy(N: int, max_level: int, D1: Fraction = Fraction(1, 16)) -> Dict[Tuple[int, Tuple[int, ...]], Fraction]:
    """F_{g,n}[a_1..a_n] (1/n! convention, subscripts as indices) from log Z = F/hbar."""
    Z = solve_partition_function(N, max_level, D1)
    out = {}
    for (a, m), c in log_series(Z, max_level).items():
        mult = 1
        for j in set(m):
            for r in range(2, m.count(j) + 1):
                mult *= r
        out[(a + 1, m)] = c * mult
    return out


def compare_twisted_boson(N: int, max_level: int, D1: Fraction = Fraction(1, 16)) -> List[str]:
    """Mismatches between the recursion and the independent solve; empty list means agreement."""
    params = {"N": N, "D": {1: D1}} if N == 0 else {"N": N}
    bound = support_bound("twisted-boson/1", params, 0, max_level + 2)
    t = instantiate("twisted-boson/1", params, bound)
    table = FreeEnergyTable(t)
    table.extend(max_level)
    sub = {}
    for idx, name in enumerate(t.basis.names):
        if name.startswith("x"):
            sub[idx] = int(name[1:])
    engine = {}
    for g, idx, v in table.items(max_level):
        if v and len(idx) >= 1:
            engine[(g, tuple(sorted(sub[k] for k in idx)))] = v
    oracle = {k: v for k, v in oracle_free_energy(N, max_level, D1).items() if v}
    bad = []
    for key in sorted(set(engine) | set(oracle)):
        if engine.get(key, 0) != oracle.get(key, 0):
            bad.append(f"F{key}: recursion {engine.get(key, 0)} vs solve {oracle.get(key, 0)}")
    return bad
