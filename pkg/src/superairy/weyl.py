"""Graded Weyl algebra with formal hbar, and truncated Grassmann-polynomial series.

Operators are dicts {(h, X, D): coeff} meaning coeff * hbar^h * x^X * d^D, normal ordered
(coordinates left of derivatives). X and D are ascending index tuples; odd indices appear
at most once.
"""
from __future__ import annotations

from functools import lru_cache
from fractions import Fraction
from typing import Dict, Iterable, Sequence, Tuple

Key = Tuple[object, Tuple[int, ...], Tuple[int, ...]]
Op = Dict[Key, object]


class GradedAlgebra:
    """Multiplication rules for a fixed list of parities (shared by ops and series)."""

    def __init__(self, parities: Sequence[int]):
        self.parities = tuple(int(p) for p in parities)
        self.mono_mul = lru_cache(maxsize=None)(self._mono_mul)
        self.deriv = lru_cache(maxsize=None)(self._deriv)
        self.dx = lru_cache(maxsize=None)(self._dx)

    # -- monomials ---------------------------------------------------------
    def mono_parity(self, m: Tuple[int, ...]) -> int:
        p = self.parities
        return sum(p[a] for a in m) & 1

    def _mono_mul(self, m1: Tuple[int, ...], m2: Tuple[int, ...]):
        """x^m1 * x^m2 = sign * x^merged, or (0, None)."""
        if not m1:
            return 1, m2
        if not m2:
            return 1, m1
        p = self.parities
        odd2 = [b for b in m2 if p[b]]
        inv = 0
        if odd2:
            for a in m1:
                if p[a]:
                    for b in odd2:
                        if b == a:
                            return 0, None
                        if b < a:
                            inv += 1
        return (-1 if inv & 1 else 1), tuple(sorted(m1 + m2))

    def _deriv(self, d: int, m: Tuple[int, ...]):
        """Left derivative d/dx^d of x^m: list of (coeff, monomial)."""
        p = self.parities
        if d not in m:
            return ()
        pos = m.index(d)
        rest = m[:pos] + m[pos + 1:]
        if p[d]:
            sign = -1 if sum(p[a] for a in m[:pos]) & 1 else 1
            return ((sign, rest),)
        return ((m.count(d), rest),)

    def _dx(self, D: Tuple[int, ...], X: Tuple[int, ...]):
        """Normal order d^D x^X: tuple of (coeff, X', D')."""
        if not D:
            return ((1, X, ()),)
        if not X:
            return ((1, (), D),)
        d = D[-1]
        head = D[:-1]
        p = self.parities
        # d_d x^X = (d_d X) + (-1)^{|d||X|} x^X d_d
        first = [(c, Xp, ()) for c, Xp in self.deriv(d, X)]
        sgn = -1 if (p[d] and self.mono_parity(X)) else 1
        first.append((sgn, X, (d,)))
        out: Dict[Tuple, int] = {}
        for c, Xp, Dp in first:
            for c2, X2, D2 in self.dx(head, Xp):
                s, Dm = self.mono_mul(D2, Dp)
                if s == 0:
                    continue
                k = (X2, Dm)
                out[k] = out.get(k, 0) + c * c2 * s
        return tuple((c, k[0], k[1]) for k, c in out.items() if c)

    # -- operators ---------------------------------------------------------
    def op_parity(self, op: Op) -> int:
        par = None
        for (h, X, D), c in op.items():
            q = (self.mono_parity(X) + self.mono_parity(D)) & 1
            if par is None:
                par = q
            elif par != q:
                raise ValueError("operator is not homogeneous")
        return par or 0

    def mul(self, P: Op, Q: Op) -> Op:
        out: Op = {}
        for (h1, X1, D1), c1 in P.items():
            for (h2, X2, D2), c2 in Q.items():
                cc = c1 * c2
                for c, Xm, Dm in self.dx(D1, X2):
                    s1, Xf = self.mono_mul(X1, Xm)
                    if s1 == 0:
                        continue
                    s2, Df = self.mono_mul(Dm, D2)
                    if s2 == 0:
                        continue
                    k = (h1 + h2, Xf, Df)
                    v = out.get(k, 0) + cc * (c * s1 * s2)
                    if v:
                        out[k] = v
                    else:
                        out.pop(k, None)
        return out

    def supercommutator(self, P: Op, Q: Op) -> Op:
        if not P or not Q:
            return {}
        sgn = -1 if (self.op_parity(P) and self.op_parity(Q)) else 1
        return add_ops(self.mul(P, Q), self.mul(Q, P), 1, -sgn)

    def apply(self, op: Op, series: "Series") -> "Series":
        """Act with an operator on a series (hbar tracked in the key)."""
        out: Dict = {}
        for (h, X, D), c in op.items():
            cur = dict(series)
            for d in reversed(D):
                nxt: Dict = {}
                for (a, m), v in cur.items():
                    for cc, mm in self.deriv(d, m):
                        k = (a, mm)
                        nxt[k] = nxt.get(k, 0) + v * cc
                cur = {k: v for k, v in nxt.items() if v}
            for (a, m), v in cur.items():
                s, mm = self.mono_mul(X, m)
                if s == 0:
                    continue
                k = (a + h, mm)
                out[k] = out.get(k, 0) + v * c * s
        return {k: v for k, v in out.items() if v}


def add_ops(P: Op, Q: Op, a=1, b=1) -> Op:
    out = {k: v * a for k, v in P.items()} if a != 1 else dict(P)
    for k, v in Q.items():
        w = out.get(k, 0) + v * b
        if w:
            out[k] = w
        else:
            out.pop(k, None)
    return {k: v for k, v in out.items() if v}


def scale_op(P: Op, c) -> Op:
    return {k: v * c for k, v in P.items() if v * c}


def op_from_terms(terms: Iterable[Tuple[object, Sequence[int], Sequence[int], object]], alg: GradedAlgebra) -> Op:
    """Build an operator from (h, X, D, coeff) with X, D in any order (signs applied)."""
    from .graded import sort_sign
    out: Op = {}
    for h, X, D, c in terms:
        sx = sort_sign(X, alg.parities)
        sd = sort_sign(D, alg.parities)
        if not sx or not sd:
            continue
        k = (h, tuple(sorted(X)), tuple(sorted(D)))
        v = out.get(k, 0) + c * sx * sd
        if v:
            out[k] = v
        else:
            out.pop(k, None)
    return out


# -- series in the ring R: dicts {(hbar power, monomial): coeff} ------------------
Series = Dict[Tuple[object, Tuple[int, ...]], object]


def series_degree(key) -> object:
    a, m = key
    return 2 * a + len(m)


def series_truncate(S: Series, max_degree) -> Series:
    return {k: v for k, v in S.items() if v and series_degree(k) <= max_degree}


def series_add(S: Series, T: Series, a=1, b=1) -> Series:
    out = {k: v * a for k, v in S.items()}
    for k, v in T.items():
        out[k] = out.get(k, 0) + v * b
    return {k: v for k, v in out.items() if v}


def series_mul(alg: GradedAlgebra, S: Series, T: Series, max_degree=None) -> Series:
    out: Dict = {}
    for (a1, m1), v1 in S.items():
        d1 = 2 * a1 + len(m1)
        for (a2, m2), v2 in T.items():
            if max_degree is not None and d1 + 2 * a2 + len(m2) > max_degree:
                continue
            s, m = alg.mono_mul(m1, m2)
            if s == 0:
                continue
            k = (a1 + a2, m)
            out[k] = out.get(k, 0) + v1 * v2 * s
    return {k: v for k, v in out.items() if v}


def series_exp(alg: GradedAlgebra, S: Series, max_degree) -> Series:
    """exp(S) for S without constant term; every term of S must have degree >= 1."""
    for k in S:
        if series_degree(k) < 1:
            raise ValueError("exp needs terms of positive degree")
    result: Series = {(0, ()): Fraction(1)}
    term: Series = {(0, ()): Fraction(1)}
    k = 1
    while True:
        term = series_mul(alg, term, S, max_degree)
        if not term:
            break
        term = {key: v / k for key, v in term.items()}
        result = series_add(result, term)
        k += 1
    return result


def series_log(alg: GradedAlgebra, S: Series, max_degree) -> Series:
    """log(S) for S with constant term 1 and other terms of positive degree."""
    if S.get((0, ())) != 1:
        raise ValueError("log needs constant term 1")
    U = {k: v for k, v in S.items() if k != (0, ())}
    for k in U:
        if series_degree(k) < 1:
            raise ValueError("log needs the remainder to have positive degree")
    result: Series = {}
    power: Series = {(0, ()): Fraction(1)}
    k = 1
    while True:
        power = series_mul(alg, power, U, max_degree)
        if not power:
            break
        sign = 1 if k % 2 else -1
        result = series_add(result, power, 1, Fraction(sign, k))
        k += 1
    return result


def series_deriv(alg: GradedAlgebra, S: Series, d: int) -> Series:
    out: Dict = {}
    for (a, m), v in S.items():
        for c, mm in alg.deriv(d, m):
            k = (a, mm)
            out[k] = out.get(k, 0) + v * c
    return {k: v for k, v in out.items() if v}
