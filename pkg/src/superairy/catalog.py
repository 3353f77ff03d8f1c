"""Every example structure: literal finite tensors and truncated generators for the mode families."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Callable, Dict, List, Optional, Sequence, Tuple

from .graded import GradedBasis
from .scalars import SQRT3, as_scalar
from .structure import SQASTensors, tensors_from_operators
from .weyl import GradedAlgebra, add_ops, op_from_terms, scale_op

F = Fraction
HALF = F(1, 2)


class CatalogError(ValueError):
    pass


@dataclass
class CatalogEntry:
    id: str
    description: str
    source: str
    defaults: Dict[str, object]
    builder: Callable[[Dict[str, object], Optional[int]], SQASTensors]
    infinite: bool = False
    grid: List[Dict[str, object]] = field(default_factory=list)
    n_range: Optional[Tuple[int, Optional[int]]] = None
    extra_fermion: bool = False


def _build(names: Sequence[str], parities: Sequence[int], ops, extra: bool, name: str, source: str):
    """names/parities list x^1..x^M (plus "theta0" first when extra); ops maps label name -> terms.

    Terms are (c, h, X names, D names) with X and D in written order.
    """
    if extra:
        names, parities = list(names[1:]), list(parities[1:])
    basis = GradedBasis.from_labels(parities, extra_fermion=extra, names=names)
    idx = {n: k for k, n in enumerate(basis.names)}
    alg = GradedAlgebra(basis.parities)
    built = {}
    for lab, terms in ops.items():
        i = idx[lab]
        tt = [(1, (), (i,), F(1))]
        for c, h, X, D in terms:
            tt.append((h, tuple(idx[v] for v in X), tuple(idx[v] for v in D), as_scalar(c)))
        built[i] = op_from_terms(tt, alg)
    return tensors_from_operators(basis, built, name=name, source=source)


# -- (1|1) families ------------------------------------------------------------------------

def _one_one(kind: str):
    def build(p, _trunc):
        A, B, C, D = (as_scalar(p.get(k, 0)) for k in "ABCD")
        L0 = [(-HALF * A, 0, "xx", ""), (-B, 1, "x", "x"), (-HALF * C, 2, "", "xx"), (-D, 1, "", "")]
        if kind == "abelian-1":
            G = [(-1, 1, "x", "t")]
            L = [(-HALF * A, 0, "xx", ""), (-1, 1, "x", "x"), (-1, 1, "t", "t"), (-D, 1, "", "")]
        elif kind == "abelian-2":
            G = [(-1, 2, "", "xt")]
            L = [(-HALF * C, 2, "", "xx"), (-D, 1, "", "")]
        elif kind == "abelian-3":
            G, L = [], L0
        elif kind == "affine-1":
            G = [(-1, 1, "x", "t")]
            L = [(-HALF * A, 0, "xx", ""), (-1, 1, "x", "x"), (-2, 1, "t", "t"), (-D, 1, "", "")]
        elif kind == "affine-2":
            G = [(-1, 2, "", "xt")]
            L = [(-1, 1, "t", "t"), (-HALF * C, 2, "", "xx"), (-D, 1, "", "")]
        elif kind == "affine-3":
            G, L = [], [(-1, 1, "t", "t")] + L0
        else:
            raise CatalogError(kind)
        return _build(["x", "t"], [0, 1], {"x": L, "t": G}, False, kind, "(1|1) classification")
    return build


def _susy(kind: int):
    """L = (2/hbar) G^2 for the three SUSY forms of G."""
    def build(p, _trunc):
        basis = GradedBasis.from_labels([0, 1], names=["x", "t"])
        alg = GradedAlgebra(basis.parities)
        x, t = 1, 2
        G = [(1, (), (t,), F(1)), (1, (t,), (x,), HALF)]
        if kind == 1:
            G.append((1, (x,), (t,), HALF))
        elif kind == 2:
            G.append((2, (), (x, t), F(-1)))
        Gop = op_from_terms(G, alg)
        sq = alg.mul(Gop, Gop)
        L = {(h - 1, X, D): 2 * c for (h, X, D), c in sq.items()}
        return tensors_from_operators(basis, {x: L, t: Gop}, name=f"susy-{kind}", source="(1|1) SUSY algebra")
    return build


# -- (2|1) and (1|2) examples ----------------------------------------------------------------

def _two_one(p, _trunc, printed: bool = False):
    """L2 carries the factor B on x d_y; the printed form (without B) closes only at B = 1."""
    A, B, D = (as_scalar(p.get(k, 0)) for k in "ABD")
    L1 = [(-HALF * A, 0, "xx", ""), (-(HALF + B), 1, "t", "t"), (-(1 + B), 1, "y", "y"),
          (-B, 1, "x", "x"), (-D, 1, "", "")]
    L2 = [(-1 if printed else -B, 1, "x", "y")]
    G = [(HALF, 1, "t", "y"), (-B, 1, "x", "t")]
    return _build(["x", "y", "t"], [0, 0, 1], {"x": L1, "y": L2, "t": G}, False,
                  "2|1-susy" + ("-printed" if printed else ""), "(2|1) extended SUSY, no extra fermion")


def two_one_printed(params=None) -> SQASTensors:
    """The (2|1) operators exactly as printed (L2 = hbar d_y - hbar x d_y)."""
    return _two_one(dict({"A": 0, "B": 0, "D": 0}, **(params or {})), None, printed=True)


def _two_one_extra(p, _trunc):
    beta = as_scalar(p.get("beta", 0))
    L1 = [(-2, 1, ["x1"], ["x1"]), (-1, 1, ["x2"], ["x2"]), (-HALF, 1, ["th1"], ["th1"]),
          (F(3, 2), 1, ["theta0"], ["theta0"])]
    L2 = [(-beta, 1, ["x2"], ["x1"]), (-1, 0, ["theta0", "th1"], [])]
    G = [(1, 0, ["theta0", "x2"], []), (HALF, 1, ["th1"], ["x2"]), (-HALF * beta, 2, [], ["theta0", "x1"])]
    return _build(["theta0", "x1", "x2", "th1"], [1, 0, 0, 1], {"x1": L1, "x2": L2, "th1": G}, True,
                  "2|1-extra", "(2|1) extended SUSY with extra fermion")


def _one_two(p, _trunc):
    L = [(-1, 0, ["x", "x"], []), (-1, 0, ["t1", "t2"], []), (1, 2, [], ["x", "x"]), (1, 2, [], ["t1", "t2"])]
    G1 = [(-1, 0, ["x", "t2"], []), (1, 1, ["x"], ["t1"]), (-1, 1, ["t2"], ["x"]), (1, 2, [], ["x", "t1"])]
    G2 = [(1, 0, ["x", "t1"], []), (1, 1, ["x"], ["t2"]), (1, 1, ["t1"], ["x"]), (1, 2, [], ["x", "t2"])]
    return _build(["x", "t1", "t2"], [0, 1, 1], {"x": L, "t1": G1, "t2": G2}, False,
                  "1|2-susy", "(1|2) example with fermion-dependent free energy")


def one_two_gauged() -> SQASTensors:
    """First-order operators L', G1', G2' obtained from the (1|2) example by the quadratic gauge."""
    L = [(-1, 0, ["x", "x"], []), (-2, 1, ["x"], ["x"]), (-1, 1, [], []), (-1, 0, ["t1", "t2"], []),
         (-1, 1, ["t1"], ["t1"]), (-1, 1, ["t2"], ["t2"])]
    G1 = [(-1, 0, ["x", "t2"], []), (-2, 1, ["t2"], ["x"])]
    G2 = [(1, 0, ["x", "t1"], []), (2, 1, ["t1"], ["x"])]
    return _build(["x", "t1", "t2"], [0, 1, 1], {"x": L, "t1": G1, "t2": G2}, False,
                  "1|2-susy-gauged", "(1|2) example after gauge transformation")


def _worked(p, _trunc):
    q4 = F(1, 4)
    Q1 = [(-1, 0, ["q", "k2"], []), (HALF, 1, ["q"], ["k1"]), (HALF, 1, ["k2"], ["q"]), (-q4, 2, [], ["q", "k1"])]
    Q2 = [(1, 0, ["q", "k1"], []), (-HALF, 1, ["q"], ["k2"]), (HALF, 1, ["k1"], ["q"]), (-q4, 2, [], ["q", "k2"])]
    H = [(1, 0, ["q", "q"], []), (-1, 0, ["k1", "k2"], []), (HALF, 1, ["k1"], ["k1"]), (-HALF, 1, ["k2"], ["k2"]),
         (-q4, 2, [], ["q", "q"]), (q4, 2, [], ["k1", "k2"])]
    return _build(["q", "k1", "k2"], [0, 1, 1], {"q": H, "k1": Q1, "k2": Q2}, False,
                  "worked-example", "classification scheme worked example (Weyl quantized)")


def _osp(p, _trunc):
    s3 = SQRT3
    y1 = [(-s3, 0, ["theta0", "t1"], []), (-12, 0, ["x1", "x1"], []), (F(-3, 2), 1, ["x2"], ["x1"]),
          (F(-10, 3), 1, ["x3"], ["x2"]), (2 * s3, 1, ["t1"], ["theta0"]), (1, 1, ["t2"], ["t1"])]
    y2 = [(-HALF, 1, ["x1"], ["x1"]), (F(-3, 2), 1, ["x2"], ["x2"]), (F(-5, 2), 1, ["x3"], ["x3"]),
          (-1, 1, ["t1"], ["t1"]), (-2, 1, ["t2"], ["t2"]), (F(-3, 4), 1, [], [])]
    y3 = [(F(-16, 3), 1, ["x1"], ["x2"]), (F(-3, 2), 1, ["x2"], ["x3"]), (s3 * HALF, 1, ["theta0"], ["t1"]),
          (4, 1, ["t1"], ["t2"]), (F(3, 16), 2, [], ["x1", "x1"]), (-s3, 2, [], ["t1", "theta0"])]
    xi1 = [(s3, 0, ["x1", "theta0"], []), (-HALF, 1, ["t1"], ["x1"]), (F(1, 3), 1, ["t2"], ["x2"]),
           (2 * s3, 1, ["x1"], ["theta0"]), (F(-3, 2), 1, ["x2"], ["t1"]), (5, 1, ["x3"], ["t2"])]
    xi2 = [(s3 * F(1, 8), 1, ["theta0"], ["x1"]), (F(-4, 3), 1, ["t1"], ["x2"]), (HALF, 1, ["t2"], ["x3"]),
           (2, 1, ["x1"], ["t1"]), (F(-3, 2), 1, ["x2"], ["t2"]), (s3 * F(1, 4), 2, [], ["theta0", "x1"])]
    return _build(["theta0", "x1", "x2", "x3", "t1", "t2"], [1, 0, 0, 0, 1, 1],
                  {"x1": y1, "x2": y2, "x3": y3, "t1": xi1, "t2": xi2}, True,
                  "osp(1|2)", "osp(1|2) representation with extra fermion")


# -- super Frobenius algebras ------------------------------------------------------------

@dataclass
class SuperFrobeniusAlgebra:
    """Basis e_1..e_n (basis.labels()), products e_i e_j = sum m[(i, j)][k] e_k, bilinear form phi."""

    basis: GradedBasis
    mult: Dict[Tuple[int, int], Dict[int, object]]
    form: Dict[Tuple[int, int], object]
    unit: int = 1

    def product(self, u: Dict[int, object], v: Dict[int, object]) -> Dict[int, object]:
        out: Dict[int, object] = {}
        for i, a in u.items():
            for j, b in v.items():
                for k, c in self.mult.get((i, j), {}).items():
                    out[k] = out.get(k, 0) + a * b * c
        return {k: c for k, c in out.items() if c}

    def phi(self, u: Dict[int, object], v: Dict[int, object]):
        return sum((a * b * self.form.get((i, j), 0) for i, a in u.items() for j, b in v.items()), F(0))

    def validate(self) -> None:
        labs = list(self.basis.labels())
        p = self.basis.parities
        e = lambda i: {i: F(1)}
        for (i, j), v in self.mult.items():
            for k in v:
                if (p[i] + p[j] + p[k]) % 2:
                    raise ValueError("product does not respect the grading")
        for (i, j), v in self.form.items():
            if v and (p[i] + p[j]) % 2:
                raise ValueError("form pairs elements of different parity")
        for i in labs:
            for j in labs:
                s = -1 if p[i] and p[j] else 1
                if self.product(e(i), e(j)) != {k: s * c for k, c in self.product(e(j), e(i)).items()}:
                    raise ValueError("product is not supercommutative")
                for k in labs:
                    if self.product(self.product(e(i), e(j)), e(k)) != self.product(e(i), self.product(e(j), e(k))):
                        raise ValueError("product is not associative")
        if self.product(e(self.unit), e(labs[0])) != e(labs[0]):
            raise ValueError("unit is not a unit")
        import sympy
        G = sympy.Matrix([[self.form.get((i, j), 0) for j in labs] for i in labs])
        if G.det() == 0:
            raise ValueError("form is degenerate")

    def dual_basis(self) -> Dict[int, Dict[int, object]]:
        """e^j with phi(e_i, e^j) = delta."""
        import sympy
        labs = list(self.basis.labels())
        G = sympy.Matrix([[sympy.Rational(str(self.form.get((i, j), 0))) for j in labs] for i in labs])
        Minv = G.inv()   # phi(e_i, sum_k M_jk e_k) = sum_k M_jk G_ik = delta_ij  => M = (G^T)^-1 = Minv^T
        out = {}
        for jj, j in enumerate(labs):
            out[j] = {k: F(int(Minv[kk, jj].p), int(Minv[kk, jj].q)) for kk, k in enumerate(labs) if Minv[kk, jj] != 0}
        return out


def frobenius_to_airy(alg: SuperFrobeniusAlgebra, theta_A, theta_B, theta_C, D=None, name="frobenius") -> SQASTensors:
    alg.validate()
    p = alg.basis.parities
    for th in (theta_A, theta_B, theta_C):
        if any(p[k] for k, c in th.items() if c):
            raise ValueError("theta elements must be even")
    unit = {alg.unit: F(1)}
    eps = lambda u: alg.phi(u, unit)
    dual = alg.dual_basis()
    labs = list(alg.basis.labels())
    e = lambda i: {i: F(1)}
    t = SQASTensors(alg.basis, name=name, source="super Frobenius algebra")
    for i in labs:
        for j in labs:
            for k in labs:
                v = eps(alg.product(alg.product(alg.product(theta_A, e(i)), e(j)), e(k)))
                if v:
                    t.A.set((i, j, k), v)
                v = eps(alg.product(alg.product(alg.product(theta_B, e(i)), e(j)), dual[k]))
                if v:
                    t.B.set((i, j, k), v)
                v = eps(alg.product(alg.product(alg.product(theta_C, e(i)), dual[j]), dual[k]))
                if v:
                    t.C.set((i, j, k), v)
    t.D = dict(D or {})
    t.f = {}
    t.__post_init__()
    return t


def frobenius_trivial() -> SuperFrobeniusAlgebra:
    b = GradedBasis.from_labels([0], names=["1"])
    return SuperFrobeniusAlgebra(b, {(1, 1): {1: F(1)}}, {(1, 1): F(1)})


def frobenius_grassmann2() -> SuperFrobeniusAlgebra:
    """Exterior algebra on eta1, eta2 with the Berezin form: basis 1, eta1, eta2, eta1 eta2."""
    b = GradedBasis.from_labels([0, 1, 1, 0], names=["1", "eta1", "eta2", "eta12"])
    m = {}
    for i in range(1, 5):
        m[(1, i)] = {i: F(1)}
        m[(i, 1)] = {i: F(1)}
    m[(2, 3)] = {4: F(1)}
    m[(3, 2)] = {4: F(-1)}
    form = {(1, 4): F(1), (4, 1): F(1), (2, 3): F(1), (3, 2): F(-1)}
    return SuperFrobeniusAlgebra(b, m, form)


def _frob_trivial(p, _trunc):
    one = {1: F(1)}
    return frobenius_to_airy(frobenius_trivial(), one, one, one, {1: as_scalar(p.get("D1", 0))}, "frobenius-1d")


def _frob_grassmann(p, _trunc):
    one = {1: F(1)}
    thA = {1: F(1), 4: as_scalar(p.get("a", 0))}
    D = {k: as_scalar(p[f"D{k}"]) for k in (1, 4) if f"D{k}" in p}
    return frobenius_to_airy(frobenius_grassmann2(), thA, one, one, D, "frobenius-grassmann")


# -- infinite families from free boson / boson-fermion modes --------------------------------
#
# A mode is a dict {(e2, X, D): c} in variables indexed like the final basis, where e2 is twice
# the hbar power (so sqrt(hbar) factors stay integral). Products use the graded Weyl algebra with
# the e2 tags added. Modes beyond the truncation are None and drop out.

@dataclass
class _ModeSpace:
    boson: str          # "untwisted", "twisted" or "none"
    fermion: str        # "untwisted" (half-integer), "twisted" (integer, psi_0 present) or "none"
    b0: bool            # bosonic zero mode b_0 = sqrt(hbar) d_{x^0} present
    extra: Optional[Tuple[str, int]]   # variable used as index 0
    T: int              # largest variable subscript kept

    def __post_init__(self):
        vars_ = []
        for k in range(0, self.T + 1):
            if self.boson == "untwisted" and (k >= 1 or self.b0):
                vars_.append(("x", k))
            if self.boson == "twisted" and k >= 1:
                vars_.append(("x", k))
            if self.fermion in ("untwisted", "twisted") and k >= 1:
                vars_.append(("t", k))
            if self.fermion == "twisted" and k == 0:
                vars_.append(("t", 0))
        if self.extra is not None:
            vars_.remove(self.extra)
            vars_ = [self.extra] + vars_
        else:
            vars_ = [None] + vars_
        self.vars = vars_
        self.index = {v: k for k, v in enumerate(vars_) if v is not None}
        par = [1 if (v is not None and v[0] == "t") else 0 for v in vars_]
        if self.extra is None:
            par[0] = 0
        names = [("_" if v is None else f"{v[0] if v[0] == 'x' else 'theta'}{v[1]}") for v in vars_]
        if self.extra is not None and self.extra == ("t", 0):
            names[0] = "phi0"
        self.basis = GradedBasis(tuple(par), self.extra is not None, tuple(names))
        self.alg = GradedAlgebra(self.basis.parities)

    def _var(self, kind, k):
        return self.index.get((kind, k))

    def b(self, s: Fraction):
        """Bosonic mode b_s (s integer for untwisted, half-integer for twisted)."""
        if self.boson == "untwisted":
            k = int(s)
            if k == 0:
                v = self._var("x", 0) if self.b0 else None
                return None if v is None else {(1, (), (v,)): F(1)}
            if k > 0:
                v = self._var("x", k)
                return None if v is None else {(1, (), (v,)): F(1)}
            v = self._var("x", -k)
            return None if v is None else {(-1, (v,), ()): F(-k)}
        if self.boson == "twisted":
            k = s + HALF
            if s > 0:
                v = self._var("x", int(k))
                return None if v is None else {(1, (), (v,)): F(1)}
            v = self._var("x", int(-s + HALF))
            return None if v is None else {(-1, (v,), ()): -s}
        return None

    def psi(self, r: Fraction):
        if self.fermion == "untwisted":
            if r > 0:
                v = self._var("t", int(r + HALF))
                return None if v is None else {(1, (), (v,)): F(1)}
            v = self._var("t", int(-r + HALF))
            return None if v is None else {(-1, (v,), ()): F(1)}
        if self.fermion == "twisted":
            m = int(r)
            if m == 0:
                # psi_0 in the rescaled coordinate phi0 = theta0 / sqrt(2)
                v = self._var("t", 0)
                return {(-1, (v,), ()): F(1), (1, (), (v,)): HALF}
            if m > 0:
                v = self._var("t", m)
                return None if v is None else {(1, (), (v,)): F(1)}
            v = self._var("t", -m)
            return None if v is None else {(-1, (v,), ()): F(1)}
        return None

    def boson_range(self, m):
        if self.boson == "untwisted":
            return [F(k) for k in range(-self.T, self.T + 1)]
        if self.boson == "twisted":
            return [F(2 * k + 1, 2) for k in range(-self.T - 1, self.T + 1)]
        return []

    def fermion_range(self):
        if self.fermion == "untwisted":
            return [F(2 * k + 1, 2) for k in range(-self.T - 1, self.T + 1)]
        if self.fermion == "twisted":
            return [F(k) for k in range(-self.T, self.T + 1)]
        return []

    def mul(self, P, Q):
        return self.alg.mul(P, Q)

    def virasoro(self, m: Fraction):
        """hbar L_m without central constants, as {(e2, X, D): c}."""
        out = {}
        for k in self.boson_range(m):
            l = m - k
            if k > l:
                continue
            P, Q = self.b(k), self.b(l)
            if P is None or Q is None:
                continue
            prod = self.mul(P, Q)
            # (1/2) sum over ordered pairs: (k, l) and (l, k) give the same normal-ordered product
            out = add_ops(out, scale_op(prod, HALF if k == l else F(1)))
        for r in self.fermion_range():
            # (1/2)(r + m/2) :psi_{-r} psi_{m+r}:
            c = HALF * (r + m * HALF)
            if not c:
                continue
            a, bb = -r, m + r
            P, Q = self.psi(a), self.psi(bb)
            if P is None or Q is None:
                continue
            if a <= bb:
                prod = self.mul(P, Q)
            else:
                prod = scale_op(self.mul(Q, P), -1)
            out = add_ops(out, scale_op(prod, c))
        return {(e + 2, X, D): c for (e, X, D), c in out.items()}

    def supercurrent(self, r: Fraction):
        """hbar G_r = hbar sum_s b_{r-s} psi_s."""
        out = {}
        for s in self.fermion_range():
            P, Q = self.b(r - s), self.psi(s)
            if P is None or Q is None:
                continue
            out = add_ops(out, self.mul(P, Q))
        return {(e + 2, X, D): c for (e, X, D), c in out.items()}


def _halve(op):
    out = {}
    for (e, X, D), c in op.items():
        if e % 2:
            raise AssertionError("odd power of sqrt(hbar) survived")
        out[(e // 2, X, D)] = c
    return out


@dataclass
class _FamilySpec:
    boson: str
    fermion: str
    b0: bool
    extra: Optional[Tuple[str, int]]
    boson_labels_from: int        # H_i for i >= this (0 or 1)
    fermion_labels_from: int      # F_j for theta^j with j >= this
    aux: bool                     # H(y_0) auxiliary operator
    d_max: Callable[[int], int]   # D_i allowed for i <= d_max(N)
    constant: Callable[[int, int], Fraction]   # explicit central constant for H_i
    n_min: int
    fermion_index: Callable[[int, int], Fraction]   # mode for F_j (j, N)
    boson_index: Callable[[int, int], Fraction]     # Virasoro index for H_i
    shift_note: str = ""


def _zero_const(i, N):
    return F(0)


FAMILIES: Dict[str, Dict[str, _FamilySpec]] = {}


def _family(name, cls, spec):
    FAMILIES.setdefault(name, {})[cls] = spec


_Lm = lambda i, N: F(i + N - 1)
# free boson, untwisted
_family("untwisted-boson", 1, _FamilySpec("untwisted", "none", True, None, 0, 0, False,
                                          lambda N: N - 1, _zero_const, 0, None, _Lm))
_family("untwisted-boson", 2, _FamilySpec("untwisted", "none", True, None, 1, 0, True,
                                          lambda N: N + 1, _zero_const, -1, None, _Lm))
_family("untwisted-boson", 3, _FamilySpec("untwisted", "none", False, None, 1, 0, False,
                                          lambda N: N + 1, _zero_const, -1, None, _Lm))
# free boson, twisted
_family("twisted-boson", 1, _FamilySpec("twisted", "none", False, None, 1, 0, False,
                                        lambda N: N + 1, lambda i, N: F(1, 16) if i == 1 - N else F(0), -1,
                                        None, _Lm))
# boson-fermion, untwisted (NS)
_SVu_F = lambda j, N: F(2 * j - 1, 2) + N - 1
_family("sv-untwisted", 1, _FamilySpec("untwisted", "untwisted", True, None, 0, 1, False,
                                       lambda N: N - 1, _zero_const, 0, _SVu_F, _Lm))
_family("sv-untwisted", 2, _FamilySpec("untwisted", "untwisted", True, None, 1, 1, True,
                                       lambda N: N - 1, _zero_const, 1, _SVu_F, _Lm))
_family("sv-untwisted", 3, _FamilySpec("untwisted", "untwisted", True, ("t", 1), 1, 2, True,
                                       lambda N: N + 1, _zero_const, -1, _SVu_F, _Lm))
# sigma-twisted (Ramond): twisted boson, half-integer fermion
_SVs_F = lambda j, N: F(j + N - 1)
_family("sv-sigma", 1, _FamilySpec("twisted", "untwisted", False, None, 1, 1, False,
                                   lambda N: N, _zero_const, 0, _SVs_F, _Lm))
_family("sv-sigma", 2, _FamilySpec("twisted", "untwisted", False, ("t", 1), 1, 2, False,
                                   lambda N: N + 1, _zero_const, 0, _SVs_F, _Lm))
# mu-twisted (Ramond): untwisted boson, integer fermion with zero mode
_family("sv-mu", 1, _FamilySpec("untwisted", "twisted", True, ("t", 0), 0, 1, False,
                                lambda N: N - 1, _zero_const, 1, _SVs_F, _Lm))
_family("sv-mu", 2, _FamilySpec("untwisted", "twisted", True, ("t", 0), 1, 1, True,
                                lambda N: N, _zero_const, 0, _SVs_F, _Lm))
# rho-twisted (NS): twisted boson, integer fermion with zero mode
_family("sv-rho", 1, _FamilySpec("twisted", "twisted", False, ("t", 0), 1, 1, False,
                                 lambda N: N + 1, lambda i, N: F(1, 8) if i == 1 - N else F(0), -1,
                                 lambda j, N: F(2 * j - 1, 2) + N, _Lm))


def generate_family(family: str, cls: int, N: int, T: int, D: Optional[Dict[int, object]] = None,
                    C0=0, D0=0) -> SQASTensors:
    """Truncated structure of a mode family: variables with subscript <= T.

    D maps label subscripts i to the printed constants (operator gets + hbar D_i).
    """
    spec = FAMILIES[family][cls]
    if N < spec.n_min:
        raise CatalogError(f"{family} class {cls} needs N >= {spec.n_min}")
    if T < 1:
        raise CatalogError("truncation must be >= 1")
    D = {int(k): as_scalar(v) for k, v in (D or {}).items() if as_scalar(v)}
    for i in D:
        if i > spec.d_max(N) or i < spec.boson_labels_from or (i == 0 and spec.aux):
            raise CatalogError(f"D_{i} is not a free constant for {family} class {cls} at N={N}")
    ms = _ModeSpace(spec.boson, spec.fermion, spec.b0, spec.extra, T)
    ops = {}
    for (kind, k), idx in ms.index.items():
        if idx == 0:
            continue
        if kind == "x":
            if k == 0 and spec.aux:
                op = {(1, (), (idx,)): F(1)}
                if C0:
                    op[(2, (), (idx, idx))] = as_scalar(C0) * HALF
                if D0:
                    op[(1, (), ())] = as_scalar(D0)
                ops[idx] = op
                continue
            if k < spec.boson_labels_from:
                continue
            quad = _halve(ms.virasoro(spec.boson_index(k, N)))
            op = add_ops({(1, (), (idx,)): F(1)}, quad)
            const = spec.constant(k, N) + D.get(k, 0)
            if const:
                op = add_ops(op, {(1, (), ()): const})
        else:
            if k < spec.fermion_labels_from:
                continue
            quad = _halve(ms.supercurrent(spec.fermion_index(k, N)))
            op = add_ops({(1, (), (idx,)): F(1)}, quad)
        ops[idx] = op
    # certified region: residuals whose contractions stay below T
    K = max(0, (T - abs(N) - 2) // 2)
    cert = max([i for (kind, k), i in ms.index.items() if k <= K] + [0])
    name = f"{family}/{cls}/N={N}"
    t = tensors_from_operators(ms.basis, ops, name=name, source=f"mode family {family} class {cls}",
                               check_bounds=(cert, cert))
    return t


# -- registry -----------------------------------------------------------------------------

def _family_builder(family: str, cls: int):
    def build(p, trunc):
        N = int(p.get("N", FAMILIES[family][cls].n_min))
        D = {int(k): v for k, v in dict(p.get("D", {})).items()}
        T = trunc if trunc is not None else support_bound(f"{family}/{cls}", p, 2, 2)
        return generate_family(family, cls, N, T, D, p.get("C0", 0), p.get("D0", 0))
    return build


def _fam_grid(family: str, cls: int) -> List[Dict[str, object]]:
    spec = FAMILIES[family][cls]
    out = []
    for N in (spec.n_min, spec.n_min + 1):
        out.append({"N": N})
        lo = max(spec.boson_labels_from, 1)
        Ds = {i: F(i + 2, 3) for i in range(lo, spec.d_max(N) + 1)}
        extra = {"C0": F(2, 5), "D0": F(-1, 7)} if spec.aux else {}
        if Ds or extra:
            out.append(dict({"N": N, "D": Ds}, **extra))
    if family == "sv-sigma" and cls == 2:
        out.append({"N": 0, "D": {1: F(1, 16)}})
    if family == "twisted-boson":
        out.append({"N": 0, "D": {1: F(1, 16)}})
    return out


def _entries() -> Dict[str, CatalogEntry]:
    E: Dict[str, CatalogEntry] = {}

    def add(e):
        E[e.id] = e

    abc = [{"A": 0, "B": 0, "C": 0, "D": 0}, {"A": 3, "B": F(1, 2), "C": -2, "D": F(5, 4)}]
    for k, desc in (("abelian-1", "G=(1-x)hd_t"), ("abelian-2", "G=(1-hd_x)hd_t"), ("abelian-3", "G=hd_t, L=L0"),
                    ("affine-1", "G=(1-x)hd_t"), ("affine-2", "G=(1-hd_x)hd_t"), ("affine-3", "G=hd_t, L=-h t d_t + L0")):
        add(CatalogEntry(f"1|1-{k}", f"(1|1) {k.split('-')[0]} algebra, family {k[-1]}: {desc}",
                         "(1|1) classification", {"A": 0, "B": 0, "C": 0, "D": 0}, _one_one(k), grid=abc))
    for k in (1, 2, 3):
        add(CatalogEntry(f"1|1-susy-{k}", f"(1|1) SUSY algebra, form {k} of G", "(1|1) SUSY",
                         {}, _susy(k), grid=[{}]))
    add(CatalogEntry("2|1-susy", "(2|1) SUSY with dilatation, no extra fermion", "(2|1) example",
                     {"A": 0, "B": 0, "D": 0}, _two_one, grid=[{"A": 0, "B": 0, "D": 0}, {"A": 2, "B": F(1, 3), "D": -1}]))
    add(CatalogEntry("2|1-extra", "(2|1) SUSY with dilatation, extra fermion theta0", "(2|1) example",
                     {"beta": 0}, _two_one_extra, grid=[{"beta": 0}, {"beta": F(3, 2)}], extra_fermion=True))
    add(CatalogEntry("1|2-susy", "(1|2) superalgebra with fermion-dependent free energy", "(1|2) example",
                     {}, _one_two, grid=[{}]))
    add(CatalogEntry("worked-example", "classification worked example (Q1, Q2, H)", "worked example",
                     {}, _worked, grid=[{}]))
    add(CatalogEntry("osp(1|2)", "osp(1|2) representation over Q(sqrt3)", "osp(1|2)",
                     {}, _osp, grid=[{}], extra_fermion=True))
    add(CatalogEntry("frobenius-1d", "one-dimensional Frobenius algebra, theta_A=theta_B=theta_C=1",
                     "super Frobenius", {"D1": 0}, _frob_trivial, grid=[{"D1": 0}, {"D1": F(1, 2)}]))
    add(CatalogEntry("frobenius-grassmann", "exterior algebra on two odd generators with the Berezin form",
                     "super Frobenius", {"a": 0}, _frob_grassmann,
                     grid=[{"a": 0}, {"a": 2, "D1": F(1, 3), "D4": -1}]))
    for family, classes in FAMILIES.items():
        for cls, spec in classes.items():
            add(CatalogEntry(f"{family}/{cls}", f"{family} class {cls}", f"mode family {family}",
                             {"N": spec.n_min, "D": {}}, _family_builder(family, cls), infinite=True,
                             grid=_fam_grid(family, cls), n_range=(spec.n_min, None),
                             extra_fermion=spec.extra is not None))
    return E


CATALOG: Dict[str, CatalogEntry] = _entries()


def list_entries() -> List[str]:
    return sorted(CATALOG)


def instantiate(id: str, params: Optional[Dict[str, object]] = None, truncation: Optional[int] = None) -> SQASTensors:
    if id not in CATALOG:
        raise CatalogError(f"unknown catalog entry {id!r}")
    e = CATALOG[id]
    p = dict(e.defaults)
    p.update(params or {})
    if not e.infinite:
        unknown = set(p) - set(e.defaults) - ({"D1", "D4"} if id == "frobenius-grassmann" else set())
        if unknown:
            raise CatalogError(f"unknown parameters {sorted(unknown)} for {id}")
        t = e.builder(p, None)
        if truncation is not None and truncation < t.basis.M:
            raise CatalogError("truncation below the dimension of a finite entry")
        return t
    N = int(p.get("N"))
    if e.n_range and N < e.n_range[0]:
        raise CatalogError(f"{id} requires N >= {e.n_range[0]}")
    if truncation is not None and truncation < 2 + abs(N):
        raise CatalogError("truncation below minimal support")
    return e.builder(p, truncation)


def support_bound(id: str, params: Optional[Dict[str, object]], g: int, n: int) -> int:
    """Truncation (largest mode subscript) at which all F up to level 2g+n-2 are exact.

    Finite entries return their dimension. For the mode families every operator shifts mode
    subscripts by at most |N|+1 per recursion step, and nonzero F at level L only involve
    subscripts up to (L+1)(|N|+2); the extra slack keeps every contraction inside the truncation.
    """
    if id not in CATALOG:
        raise CatalogError(f"unknown catalog entry {id!r}")
    e = CATALOG[id]
    if not e.infinite:
        return e.builder(dict(e.defaults), None).basis.M
    p = dict(e.defaults)
    p.update(params or {})
    N = abs(int(p.get("N", 0)))
    L = max(1, 2 * g + n - 2)
    return (L + 1) * (N + 2) + 2
