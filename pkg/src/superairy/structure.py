"""Quadratic super Airy structures: tensors A, B, C, D, f and the constraint checker."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Dict, List, Optional, Tuple

from .graded import GradedBasis, SparseGradedTensor
from .scalars import as_scalar
from .weyl import GradedAlgebra, Op, add_ops, op_from_terms, scale_op

CONSTRAINT_IDS = ("A", "f", "BA", "BB-CA", "CB", "CA-BD")


def new_A(basis):
    return SparseGradedTensor(basis, 3, ((1, 2),))


def new_B(basis):
    return SparseGradedTensor(basis, 3, ())


def new_C(basis):
    return SparseGradedTensor(basis, 3, ((1, 2),))


@dataclass
class SQASTensors:
    """L_i = hbar d_i - 1/2 A_iab x^a x^b - hbar B_ia^b x^a d_b - 1/2 hbar^2 C_i^ab d_a d_b - hbar D_i.

    f maps (i, j, k) to the structure constant f_ij^k (derived from B when left empty).
    check_bounds = (label bound, column bound) restricts verification for truncations.
    """

    basis: GradedBasis
    A: SparseGradedTensor = None
    B: SparseGradedTensor = None
    C: SparseGradedTensor = None
    D: Dict[int, object] = field(default_factory=dict)
    f: Dict[Tuple[int, int, int], object] = field(default_factory=dict)
    name: str = ""
    source: str = ""
    check_bounds: Optional[Tuple[int, int]] = None

    def __post_init__(self):
        if self.A is None:
            self.A = new_A(self.basis)
        if self.B is None:
            self.B = new_B(self.basis)
        if self.C is None:
            self.C = new_C(self.basis)
        self.D = {int(i): as_scalar(v) for i, v in self.D.items() if as_scalar(v)}
        for i in self.D:
            self.basis.check_index(i, label=True)
            if self.basis.parity(i):
                raise ValueError(f"D_{i} on an odd label")
        for tens in (self.A, self.B, self.C):
            for idx, _ in tens.items():
                self.basis.check_index(idx[0], label=True)
        if not self.f:
            self.f = derive_f(self)
        self._cache = {}

    # sparse views used by the recursion and the checker; built once
    def view(self):
        if "view" in self._cache:
            return self._cache["view"]
        A_rows = defaultdict(list)       # i -> [(a, b, v)]
        for (i, a, b), v in self.A.items_full():
            A_rows[i].append((a, b, v))
        B_rows = defaultdict(list)       # i -> [(a, b, v)]
        B_ia = defaultdict(list)         # (i, a) -> [(b, v)]
        B_up = defaultdict(list)         # b -> [(i, a, v)]
        for (i, a, b), v in self.B.items():
            B_rows[i].append((a, b, v))
            B_ia[(i, a)].append((b, v))
            B_up[b].append((i, a, v))
        C_rows = defaultdict(list)       # i -> [(a, b, v)]
        for (i, a, b), v in self.C.items_full():
            C_rows[i].append((a, b, v))
        v = dict(A=dict(A_rows), B=dict(B_rows), Bia=dict(B_ia), Bup=dict(B_up), C=dict(C_rows))
        self._cache["view"] = v
        return v

    def active_labels(self):
        v = self.view()
        act = set(v["A"]) | set(v["B"]) | set(v["C"]) | set(self.D)
        return sorted(act)

    def has_sqrt3(self) -> bool:
        from .scalars import QSqrt3
        vals = list(self.A.entries.values()) + list(self.B.entries.values())
        vals += list(self.C.entries.values()) + list(self.D.values()) + list(self.f.values())
        return any(isinstance(x, QSqrt3) for x in vals)

    def algebra(self) -> GradedAlgebra:
        if "alg" not in self._cache:
            self._cache["alg"] = GradedAlgebra(self.basis.parities)
        return self._cache["alg"]

    def operator(self, i: int) -> Op:
        """L_i in the graded Weyl algebra."""
        self.basis.check_index(i, label=True)
        v = self.view()
        half = Fraction(1, 2)
        terms = [(1, (), (i,), Fraction(1))]
        for a, b, c in v["A"].get(i, ()):
            terms.append((0, (a, b), (), -half * c))
        for a, b, c in v["B"].get(i, ()):
            terms.append((1, (a,), (b,), -c))
        for a, b, c in v["C"].get(i, ()):
            terms.append((2, (), (a, b), -half * c))
        if i in self.D:
            terms.append((1, (), (), -self.D[i]))
        return op_from_terms(terms, self.algebra())


def derive_f(t: SQASTensors) -> Dict[Tuple[int, int, int], object]:
    """f_ij^k = (-1)^{|i||j|} B_ij^k - B_ji^k over labels."""
    p = t.basis.parities
    out: Dict[Tuple[int, int, int], object] = {}
    labels = set(t.basis.labels())
    for (i, j, k), v in t.B.items():
        if j not in labels or k == 0:
            continue
        s = -1 if (p[i] and p[j]) else 1
        out[(i, j, k)] = out.get((i, j, k), 0) + s * v
        out[(j, i, k)] = out.get((j, i, k), 0) - v
    return {k: v for k, v in sorted(out.items()) if v}


@dataclass
class ConstraintReport:
    violations: List[Tuple[str, Tuple[int, ...], object]] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.violations

    def add(self, cid, idx, residual):
        self.violations.append((cid, tuple(idx), residual))

    def to_json(self):
        from .scalars import scalar_to_json
        return {
            "passed": self.passed,
            "violations": [
                {"constraint": c, "indices": list(i), "residual": scalar_to_json(r)}
                for c, i, r in self.violations
            ],
        }


def _sgn(p, i, j):
    return -1 if (p[i] and p[j]) else 1


def _acc(d, k, v):
    w = d.get(k, 0) + v
    if w:
        d[k] = w
    else:
        d.pop(k, None)


class _Checker:
    def __init__(self, t: SQASTensors):
        self.t = t
        self.p = t.basis.parities
        v = t.view()
        self.A = v["A"]
        self.B = v["B"]
        self.Bia = v["Bia"]
        self.C = v["C"]
        # A_j indexed by first column: j -> c -> [(b, v)]
        self.A_first = {j: _group_first(rows) for j, rows in self.A.items()}
        self.B_first = {j: _group_first(rows) for j, rows in self.B.items()}
        self.labels = set(t.basis.labels())

    def Bij(self, i, j):
        return [(k, v) for k, v in self.Bia.get((i, j), ()) if k in self.labels]

    def lhs_BA(self, i, j):
        p = self.p
        T1 = {}
        Af = self.A_first.get(j, {})
        for a, c, v in self.B.get(i, ()):
            for b, w in Af.get(c, ()):
                _acc(T1, (a, b), v * w)
        out = dict(T1)
        for (x, y), v in T1.items():
            _acc(out, (y, x), _sgn(p, x, y) * v)
        s = _sgn(p, i, j)
        for k, v in self.Bij(i, j):
            for a, b, w in self.A.get(k, ()):
                _acc(out, (a, b), s * v * w)
        return out

    def lhs_BBCA(self, i, j):
        p = self.p
        out = {}
        Bf = self.B_first.get(j, {})
        for a, c, v in self.B.get(i, ()):
            for b, w in Bf.get(c, ()):
                _acc(out, (a, b), v * w)
        Af = self.A_first.get(j, {})
        for b, c, v in self.C.get(i, ()):
            for a, w in Af.get(c, ()):
                _acc(out, (a, b), _sgn(p, a, b) * v * w)
        s = _sgn(p, i, j)
        for k, v in self.Bij(i, j):
            for a, b, w in self.B.get(k, ()):
                _acc(out, (a, b), s * v * w)
        return out

    def lhs_CB(self, i, j):
        p = self.p
        T1 = {}
        Bf = self.B_first.get(j, {})
        for a, c, v in self.C.get(i, ()):
            for b, w in Bf.get(c, ()):
                _acc(T1, (a, b), v * w)
        out = dict(T1)
        for (x, y), v in T1.items():
            _acc(out, (y, x), _sgn(p, x, y) * v)
        s = _sgn(p, i, j)
        for k, v in self.Bij(i, j):
            for a, b, w in self.C.get(k, ()):
                _acc(out, (a, b), s * v * w)
        return out

    def lhs_CABD(self, i, j):
        tot = 0
        Af = self.A_first.get(j, {})
        for b, a, v in self.C.get(i, ()):
            for bb, w in Af.get(a, ()):
                if bb == b:
                    tot += Fraction(1, 2) * v * w
        s = _sgn(self.p, i, j)
        for k, v in self.Bij(i, j):
            if k in self.t.D:
                tot += s * v * self.t.D[k]
        return tot


def _group_first(rows):
    g = defaultdict(list)
    for a, b, v in rows:
        g[a].append((b, v))
    return dict(g)


def verify_airy(t: SQASTensors, bounds: Optional[Tuple[int, int]] = None) -> ConstraintReport:
    """Evaluate every constraint of the quadratic system; report nonzero residuals.

    bounds = (label bound, column bound): only residuals with labels and free indices within
    the bounds are checked (truncated families). Defaults to t.check_bounds.
    """
    if bounds is None:
        bounds = t.check_bounds
    lab_max, col_max = bounds if bounds else (t.basis.M, t.basis.M)
    rep = ConstraintReport()
    chk = _Checker(t)
    p = t.basis.parities
    labels = [i for i in t.basis.labels() if i <= lab_max]
    active = set(t.active_labels())
    cols_ok = lambda idx: all(a <= col_max for a in idx)

    # (A): A_jia = (-1)^{|i||j|} A_ija
    seen = set()
    for (k, a, b), _ in sorted(t.A.items_full()):
        if a not in chk.labels:
            continue
        i, j = k, a
        key = (min(i, j), max(i, j), b)
        if key in seen:
            continue
        seen.add(key)
        i, j = key[0], key[1]
        if i > lab_max or j > lab_max or b > col_max:
            continue
        r = t.A.get((j, i, b)) - _sgn(p, i, j) * t.A.get((i, j, b))
        if r:
            rep.add("A", (i, j, b), r)

    # (f): consistency of f with B, and the symmetric condition on B_ij^0
    derived = derive_f(t)
    if t.f != derived:
        for key in sorted(set(t.f) | set(derived)):
            if max(key[:2]) > lab_max:
                continue
            r = t.f.get(key, 0) - derived.get(key, 0)
            if r:
                rep.add("f", key, r)
    if t.basis.has_extra_fermion:
        for (i, j, k), _ in t.B.items():
            if k != 0 or j not in chk.labels or i > lab_max or j > lab_max:
                continue
            r = _sgn(p, i, j) * t.B.get((i, j, 0)) - t.B.get((j, i, 0))
            if r:
                rep.add("f", (i, j, 0), r)

    # pairwise constraints: every unordered pair with at least one active label
    for i in labels:
        for j in labels:
            if j < i or (i not in active and j not in active):
                continue
            s = _sgn(p, i, j)
            for cid, fn in (("BA", chk.lhs_BA), ("BB-CA", chk.lhs_BBCA), ("CB", chk.lhs_CB)):
                L1 = fn(i, j)
                L2 = fn(j, i)
                res = dict(L1)
                for k2, v in L2.items():
                    _acc(res, k2, -s * v)
                for ab, r in sorted(res.items()):
                    if cols_ok(ab):
                        rep.add(cid, (i, j) + ab, r)
            r = chk.lhs_CABD(i, j) - s * chk.lhs_CABD(j, i)
            if r:
                rep.add("CA-BD", (i, j), r)
    return rep


def commutator_residual(t: SQASTensors, i: int, j: int) -> Op:
    """[L_i, L_j] - hbar f_ij^k L_k as a normal-ordered operator (zero map iff consistent)."""
    if i == 0 or j == 0:
        raise ValueError("there is no operator with label 0")
    alg = t.algebra()
    Li, Lj = t.operator(i), t.operator(j)
    res = alg.supercommutator(Li, Lj)
    for (a, b, k), v in t.f.items():
        if a == i and b == j:
            Lk = t.operator(k)
            shifted = {(h + 1, X, D): c for (h, X, D), c in Lk.items()}
            res = add_ops(res, scale_op(shifted, v), 1, -1)
    return res


def restrict_op(op: Op, col_max: int) -> Op:
    return {k: v for k, v in op.items() if all(a <= col_max for a in k[1] + k[2])}


def tensors_from_operators(basis: GradedBasis, ops: Dict[int, Op], name: str = "", source: str = "",
                           check_bounds=None, strict_linear: bool = True) -> SQASTensors:
    """Read A, B, C, D off normal-ordered operators of the form hbar d_i + quadratic + constant.

    Raises ValueError for terms outside the quadratic form (or a wrong linear term when strict).
    """
    half_inv = Fraction(2)
    t = SQASTensors(basis, name=name, source=source, check_bounds=check_bounds)
    for i, op in sorted(ops.items()):
        basis.check_index(i, label=True)
        lin_ok = False
        for (h, X, D), c in sorted(op.items(), key=lambda kv: repr(kv[0])):
            if not c:
                continue
            if h == 1 and not X and D == (i,):
                if c != 1:
                    raise ValueError(f"operator {i}: linear term hbar d_{i} has coefficient {c}")
                lin_ok = True
            elif h == 0 and len(X) == 2 and not D:
                a, b = X
                t.A.set((i, a, b), -c if a != b else -half_inv * c)
            elif h == 1 and len(X) == 1 and len(D) == 1:
                t.B.set((i, X[0], D[0]), -c)
            elif h == 2 and not X and len(D) == 2:
                a, b = D
                t.C.set((i, a, b), -c if a != b else -half_inv * c)
            elif h == 1 and not X and not D:
                t.D[i] = -c
            else:
                raise ValueError(f"operator {i}: term hbar^{h} x{X} d{D} is outside the quadratic form")
        if strict_linear and not lin_ok:
            raise ValueError(f"operator {i} lacks its linear term")
    t.f = {}
    t.__post_init__()
    return t
