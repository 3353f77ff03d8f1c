"""Free energy F_{g,n}[a_1..a_n] by the graded topological recursion, and Z = exp(F/hbar)."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass
from fractions import Fraction
from itertools import product
from math import comb, factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .graded import move_to_front_sign, sort_sign
from .structure import ConstraintReport, SQASTensors
from .weyl import GradedAlgebra, Series, series_exp, series_truncate

HALF = Fraction(1, 2)
ENUMERATE_LIMIT = 4000


def level(g: int, n: int) -> int:
    return 2 * g + n - 2


def stable(g: int, n: int) -> bool:
    return n >= 1 and 2 * g + n >= 3


@dataclass(frozen=True)
class SeriesCoefficient:
    hbar_power: int
    monomial: Tuple[int, ...]
    value: object


class FreeEnergyTable:
    """Memoized F_{g,n} keyed by (g, ascending tuple). Extends lazily by whole levels."""

    def __init__(self, t: SQASTensors):
        self.structure = t
        self.entries: Dict[Tuple[int, Tuple[int, ...]], object] = {}
        self.frontier = 0
        self.p = t.basis.parities
        self.cols = tuple(t.basis.columns())
        self.labels = set(t.basis.labels())
        self.tracker: Optional[List[Tuple[int, int]]] = None
        # nonzero supports per (g, n)
        self.support: Dict[Tuple[int, int], List[Tuple[int, ...]]] = defaultdict(list)
        v = t.view()
        self._Bia = v["Bia"]
        self._Bup = v["Bup"]
        self._C = v["C"]
        self._Cpair = defaultdict(list)   # (b, c) -> [(i, v)]
        for i, rows in v["C"].items():
            for b, c, val in rows:
                self._Cpair[(b, c)].append((i, val))

    # -- lookups -----------------------------------------------------------
    def _raw(self, g: int, idx: Tuple[int, ...]):
        """Signed value of F_g[idx] for an arbitrary ordering; reads stored data only."""
        n = len(idx)
        if not stable(g, n):
            return 0
        if self.tracker is not None:
            self.tracker.append((g, n))
        s = sort_sign(idx, self.p)
        if not s:
            return 0
        v = self.entries.get((g, tuple(sorted(idx))))
        if v is None:
            return 0
        return v if s == 1 else -v

    def get(self, g: int, indices: Sequence[int]):
        idx = tuple(indices)
        if not idx:
            raise ValueError("indices must be nonempty")
        if g < 0:
            raise ValueError("g must be nonnegative")
        for a in idx:
            self.structure.basis.check_index(a)
        if not stable(g, len(idx)):
            return Fraction(0)
        lev = level(g, len(idx))
        if lev > self.frontier:
            self.extend(lev)
        v = self._raw(g, idx)
        return v if v else Fraction(0)

    # -- the recursion -----------------------------------------------------
    def rhs(self, g: int, i: int, phi: Tuple[int, ...]):
        """Right-hand side of the recursion for F_{g,n+1}[i, phi] (phi sorted)."""
        p = self.p
        n = len(phi)
        t = self.structure
        raw = self._raw
        total = 0
        if g == 0 and n == 2:
            total += t.A.get((i, phi[0], phi[1]))
        if g == 1 and n == 0:
            total += t.D.get(i, 0)
        # B-term: move a_k to the front, replace it by b
        seen = set()
        for k, a in enumerate(phi):
            if a in seen:
                continue
            seen.add(a)
            rows = self._Bia.get((i, a))
            if not rows:
                continue
            sgn = move_to_front_sign(phi, k, p) * phi.count(a)
            rest = phi[:k] + phi[k + 1:]
            for b, v in rows:
                w = raw(g, (b,) + rest)
                if w:
                    total += sgn * v * w
        Ci = self._C.get(i)
        if not Ci:
            return total
        # loop term
        if g >= 1:
            for b, c, v in Ci:
                w = raw(g - 1, (c, b) + phi)
                if w:
                    total += HALF * v * w
        # splitting term over sub-multisets of phi
        for phi1, phi2, mult in _splits(phi, p):
            n1, n2 = len(phi1), len(phi2)
            for g1 in range(g + 1):
                g2 = g - g1
                if not stable(g1, n1 + 1) or not stable(g2, n2 + 1):
                    continue
                acc = 0
                for b, c, v in Ci:
                    w1 = raw(g1, (b,) + phi1)
                    if not w1:
                        continue
                    w2 = raw(g2, (c,) + phi2)
                    if w2:
                        acc += v * w1 * w2
                if acc:
                    total += HALF * mult * acc
        return total

    def compute_entry(self, g: int, idx: Tuple[int, ...]):
        """F_g[idx] for a sorted tuple, via the first label index (index 0 uses the auxiliary rule)."""
        p = self.p
        if not sort_sign(idx, p):
            return 0
        pos = 0
        while idx[pos] == 0:
            pos += 1
            if pos == len(idx):
                return 0
        i = idx[pos]
        sgn = move_to_front_sign(idx, pos, p)
        val = self.rhs(g, i, idx[:pos] + idx[pos + 1:])
        return val if sgn == 1 else -val

    def extend(self, max_level: int) -> None:
        while self.frontier < max_level:
            lev = self.frontier + 1
            new = {}
            for g in range(0, lev // 2 + 2):
                n = lev + 2 - 2 * g
                if not stable(g, n):
                    continue
                for idx in self._candidates(g, n):
                    v = self.compute_entry(g, idx)
                    if v:
                        new[(g, idx)] = v
            # levels are barriers: publish after the whole level is done
            for (g, idx), v in sorted(new.items()):
                self.entries[(g, idx)] = v
                self.support[(g, len(idx))].append(idx)
            self.frontier = lev

    # -- candidate supports ------------------------------------------------
    def _count_tuples(self, n: int) -> int:
        ev = sum(1 for a in self.cols if not self.p[a])
        od = len(self.cols) - ev
        tot = 0
        for k in range(0, min(od, n) + 1, 2):
            m = n - k
            tot += comb(od, k) * (comb(ev + m - 1, m) if ev else (1 if m == 0 else 0))
        return tot

    def _candidates(self, g: int, n: int) -> List[Tuple[int, ...]]:
        if self._count_tuples(n) <= ENUMERATE_LIMIT:
            return list(_all_tuples(self.cols, self.p, n))
        return sorted(self._propagate(g, n))

    def _propagate(self, g: int, n: int):
        """Tuples whose recursion right-hand side has at least one nonzero term."""
        p = self.p
        t = self.structure
        out = set()

        def emit(lst):
            if sort_sign(lst, p):
                out.add(tuple(sorted(lst)))

        if g == 0 and n == 3:
            for (i, a, b), _ in t.A.items():
                emit((i, a, b))
        if g == 1 and n == 1:
            for i in t.D:
                out.add((i,))
        # B-term: from (g, n-1) entries
        for T in self.support.get((g, n - 1), ()):
            for b in set(T):
                k = T.index(b)
                rest = T[:k] + T[k + 1:]
                for i, a, _ in self._Bup.get(b, ()):
                    emit(rest + (i, a))
        # loop term: from (g-1, n+1) entries
        if g >= 1:
            for T in self.support.get((g - 1, n + 1), ()):
                L = list(T)
                for x in range(len(L)):
                    for y in range(len(L)):
                        if x == y:
                            continue
                        for i, _ in self._Cpair.get((L[x], L[y]), ()):
                            rest = [L[z] for z in range(len(L)) if z != x and z != y]
                            emit(tuple(rest) + (i,))
        # split term: pointed supports
        pointed = {}
        for (g1, n1), lst in self.support.items():
            if g1 > g or n1 > n:
                continue
            d = defaultdict(set)
            for T in lst:
                for b in set(T):
                    k = T.index(b)
                    d[b].add(T[:k] + T[k + 1:])
            pointed[(g1, n1)] = d
        for g1 in range(g + 1):
            g2 = g - g1
            for n1 in range(1, n):
                n2 = n - n1
                P1 = pointed.get((g1, n1))
                P2 = pointed.get((g2, n2))
                if not P1 or not P2:
                    continue
                for (b, c), rows in self._Cpair.items():
                    s1 = P1.get(b)
                    s2 = P2.get(c)
                    if not s1 or not s2:
                        continue
                    labels = {i for i, _ in rows}
                    for f1 in s1:
                        for f2 in s2:
                            for i in labels:
                                emit(f1 + f2 + (i,))
        return out

    # -- views -------------------------------------------------------------
    def items(self, max_level: Optional[int] = None):
        for (g, idx), v in sorted(self.entries.items()):
            if max_level is None or level(g, len(idx)) <= max_level:
                yield g, idx, v

    def series(self, max_level: Optional[int] = None) -> Series:
        """F as a series {(g, monomial): coeff} using the 1/n! convention."""
        out = {}
        for g, idx, v in self.items(max_level):
            out[(g, idx)] = v / _mult_factorial(idx)
        return out


def _mult_factorial(idx: Tuple[int, ...]) -> int:
    r = 1
    i = 0
    while i < len(idx):
        j = i
        while j < len(idx) and idx[j] == idx[i]:
            j += 1
        r *= factorial(j - i)
        i = j
    return r


def _all_tuples(cols: Sequence[int], p: Sequence[int], n: int):
    """Ascending tuples of length n with distinct odd entries and even total parity."""
    cols = list(cols)

    def rec(start, left, par, acc):
        if left == 0:
            if par == 0:
                yield tuple(acc)
            return
        for k in range(start, len(cols)):
            a = cols[k]
            nxt = k + 1 if p[a] else k
            acc.append(a)
            yield from rec(nxt, left - 1, par ^ p[a], acc)
            acc.pop()

    yield from rec(0, n, 0, [])


def _splits(phi: Tuple[int, ...], p: Sequence[int]):
    """Sub-multisets phi1 of a sorted tuple with complement, Koszul sign and multiplicity."""
    runs = []
    i = 0
    while i < len(phi):
        j = i
        while j < len(phi) and phi[j] == phi[i]:
            j += 1
        runs.append((phi[i], j - i))
        i = j
    for counts in product(*[range(m + 1) for _, m in runs]):
        phi1 = []
        phi2 = []
        mult = 1
        for (a, m), k in zip(runs, counts):
            phi1.extend([a] * k)
            phi2.extend([a] * (m - k))
            mult *= comb(m, k)
        # unshuffle sign: odd elements of phi2 that precede odd elements of phi1
        inv = 0
        odd2_seen = 0
        for (a, m), k in zip(runs, counts):
            if p[a]:
                if k:
                    inv += odd2_seen
                else:
                    odd2_seen += 1
        yield tuple(phi1), tuple(phi2), (-mult if inv & 1 else mult)


def compute_free_energy(t: SQASTensors, max_level: int) -> FreeEnergyTable:
    if max_level < 1:
        raise ValueError("max_level must be at least 1")
    tab = FreeEnergyTable(t)
    tab.extend(max_level)
    return tab


def get_F(table: FreeEnergyTable, g: int, indices: Sequence[int]):
    return table.get(g, indices)


def check_z2_symmetry(table: FreeEnergyTable, max_level: int) -> ConstraintReport:
    """Recompute each stored entry with every other label placed first and compare."""
    table.extend(max_level)
    p = table.p
    rep = ConstraintReport()
    for g, idx, v in list(table.items(max_level)):
        tried = set()
        for pos, i in enumerate(idx):
            if i == 0 or i in tried:
                continue
            tried.add(i)
            sgn = move_to_front_sign(idx, pos, p)
            alt = table.rhs(g, i, idx[:pos] + idx[pos + 1:])
            if (alt if sgn == 1 else -alt) != v:
                rep.add("Z2", (g,) + idx, v - (alt if sgn == 1 else -alt))
    # entries computed as zero must also be symmetric; probe the candidate sets too
    for lev in range(1, max_level + 1):
        for g in range(0, lev // 2 + 2):
            n = lev + 2 - 2 * g
            if not stable(g, n) or table._count_tuples(n) > ENUMERATE_LIMIT:
                continue
            for idx in _all_tuples(table.cols, p, n):
                if (g, idx) in table.entries:
                    continue
                for pos, i in enumerate(idx):
                    if i == 0:
                        continue
                    alt = table.rhs(g, i, idx[:pos] + idx[pos + 1:])
                    if alt:
                        rep.add("Z2", (g,) + idx, alt)
                        break
    return rep


def partition_coefficients(table: FreeEnergyTable, max_degree: int) -> List[SeriesCoefficient]:
    """Z = exp(F/hbar) in the ring R, truncated at 2a + b <= max_degree."""
    Z = partition_series(table, max_degree)
    return [SeriesCoefficient(a, m, v) for (a, m), v in sorted(Z.items())]


def partition_series(table: FreeEnergyTable, max_degree: int) -> Series:
    # a term hbar^g x^n of F sits at degree 2(g-1)+n = level in F/hbar
    table.extend(max(1, max_degree))
    alg = GradedAlgebra(table.p)
    F_over_h = {(g - 1, m): v for (g, m), v in table.series(max_degree).items()}
    return series_truncate(series_exp(alg, F_over_h, max_degree), max_degree)
