"""Gauge transformations, classical limit, bosonic reduction, Weyl quantization and the cocycle."""
from __future__ import annotations

from collections import defaultdict
from dataclasses import dataclass, field
from fractions import Fraction
from math import factorial
from typing import Dict, List, Optional, Sequence, Tuple

from .graded import GradedBasis, sort_sign
from .linalg import InconsistentSystem, solve
from .recursion import FreeEnergyTable, SeriesCoefficient, partition_series
from .scalars import as_scalar
from .structure import ConstraintReport, SQASTensors, tensors_from_operators
from .weyl import (GradedAlgebra, Op, Series, add_ops, scale_op, series_add,
                   series_log, series_mul, series_truncate)

HALF = Fraction(1, 2)

# classical polynomials: {(X, Y): coeff} meaning coeff * x^X y_Y with x's left of y's
Poly = Dict[Tuple[Tuple[int, ...], Tuple[int, ...]], object]


class GaugeOrderError(ValueError):
    """Raised when a gauge transformation leaves the quadratic class; carries the offending terms."""

    def __init__(self, msg: str, higher_order: Dict[int, Op]):
        super().__init__(msg)
        self.higher_order = higher_order


# -- gauge data ---------------------------------------------------------------------------

@dataclass
class GaugeData:
    """Symmetric even tensors s^{a_1..a_k}, k >= 2, keyed by ascending tuples.

    They define D_s = sum_k hbar^k s^{a_1..a_k} d_{a_1}..d_{a_k}, summed over all orderings
    of the indices, and act by L -> exp(D_s/hbar) L exp(-D_s/hbar).
    """

    terms: Dict[Tuple[int, ...], object] = field(default_factory=dict)

    def __post_init__(self):
        clean = {}
        for idx, v in self.terms.items():
            idx = tuple(idx)
            v = as_scalar(v)
            if len(idx) < 2:
                raise ValueError("gauge terms need at least two indices")
            if not v:
                continue
            clean[idx] = v
        self.terms = clean

    def canonical(self, basis: GradedBasis) -> Dict[Tuple[int, ...], object]:
        p = basis.parities
        out: Dict[Tuple[int, ...], object] = {}
        for idx, v in self.terms.items():
            for a in idx:
                basis.check_index(a)
            if basis.tuple_parity(idx):
                raise ValueError(f"gauge term {idx} is odd")
            s = sort_sign(idx, p)
            if not s:
                raise ValueError(f"gauge term {idx} repeats an odd index")
            k = tuple(sorted(idx))
            out[k] = out.get(k, 0) + s * v
        return {k: v for k, v in out.items() if v}

    def order(self) -> int:
        return max((len(k) for k in self.terms), default=0)

    def operator(self, basis: GradedBasis) -> Op:
        """D_s / hbar as a Weyl-algebra element."""
        out: Op = {}
        for idx, v in self.canonical(basis).items():
            mult = factorial(len(idx))
            for a in set(idx):
                mult //= factorial(idx.count(a))
            out[(len(idx) - 1, (), idx)] = v * mult
        return out


def conjugate(op: Op, X: Op, alg: GradedAlgebra) -> Op:
    """exp(X) op exp(-X) = sum_n ad_X^n(op) / n!; terminates for polynomial op and X in derivatives only."""
    result = dict(op)
    term = dict(op)
    n = 1
    while term:
        term = alg.supercommutator(X, term)
        if not term:
            break
        term = scale_op(term, Fraction(1, n))
        result = add_ops(result, term)
        n += 1
        if n > 64:
            raise RuntimeError("conjugation did not terminate")
    return result


def gauge_transform_operators(t: SQASTensors, s: GaugeData) -> Dict[int, Op]:
    alg = t.algebra()
    X = s.operator(t.basis)
    return {i: conjugate(t.operator(i), X, alg) for i in t.basis.labels()}


def gauge_transform_structure(t: SQASTensors, s: GaugeData) -> SQASTensors:
    """Conjugated operators read back as quadratic tensors; f is unchanged by construction."""
    ops = gauge_transform_operators(t, s)
    allowed = {(0, 2, 0), (1, 1, 1), (2, 0, 2), (1, 0, 1), (1, 0, 0)}
    bad = {}
    for i, op in ops.items():
        extra = {k: v for k, v in op.items() if (k[0], len(k[1]), len(k[2])) not in allowed}
        if extra:
            bad[i] = extra
    if bad:
        raise GaugeOrderError("gauge transformation leaves the quadratic class", bad)
    out = tensors_from_operators(t.basis, ops, name=(t.name + "-gauged") if t.name else "gauged",
                                 source=t.source, check_bounds=t.check_bounds)
    return out


def gauge_transform_Z(table: FreeEnergyTable, s: GaugeData, max_degree: int) -> List[SeriesCoefficient]:
    """Z' = N^{-1} exp(D_s/hbar) Z, truncated at total degree 2*(hbar power) + (monomial length)."""
    t = table.structure
    alg = t.algebra()
    Z = partition_series(table, max_degree)
    Zp = apply_exp(alg, s.operator(t.basis), Z, max_degree)
    norm = {k: v for k, v in Zp.items() if not k[1]}
    if norm.get((0, ())) != 1:
        raise ValueError("normalization must start with 1")
    Zp = series_mul(alg, series_inverse(alg, norm, max_degree), Zp, max_degree)
    return to_coefficients(Zp)


def apply_exp(alg: GradedAlgebra, X: Op, S: Series, max_degree: int) -> Series:
    """exp(X) S for X built from derivatives that never lowers the total degree."""
    out = dict(S)
    term = dict(S)
    n = 1
    while term:
        term = alg.apply(X, term)
        term = {k: v * Fraction(1, n) for k, v in series_truncate(term, max_degree).items()}
        out = series_add(out, term)
        n += 1
    return series_truncate(out, max_degree)


def series_inverse(alg: GradedAlgebra, S: Series, max_degree: int) -> Series:
    """1/S for S with constant term 1."""
    U = {k: -v for k, v in S.items() if k != (0, ())}
    out: Series = {(0, ()): Fraction(1)}
    power: Series = {(0, ()): Fraction(1)}
    while True:
        power = series_mul(alg, power, U, max_degree)
        if not power:
            return out
        out = series_add(out, power)


def to_coefficients(S: Series) -> List[SeriesCoefficient]:
    return [SeriesCoefficient(a, m, v) for (a, m), v in sorted(S.items(), key=lambda kv: (kv[0][0], kv[0][1])) if v]


def from_coefficients(coeffs: Sequence[SeriesCoefficient]) -> Series:
    return {(c.hbar_power, tuple(c.monomial)): c.value for c in coeffs if c.value}


def free_energy_from_Z(alg: GradedAlgebra, Z: Series, max_degree: int) -> Dict[Tuple[int, Tuple[int, ...]], object]:
    """log Z = F/hbar, returned as {(g, sorted indices): F_{g,n}} in the 1/n! convention."""
    logZ = series_log(alg, Z, max_degree)
    out = {}
    for (a, m), v in logZ.items():
        g = a + 1
        mult = 1
        for x in set(m):
            mult *= factorial(m.count(x))
        out[(g, m)] = v * mult
    return out


# -- classical side ------------------------------------------------------------------------

@dataclass
class ClassicalStructure:
    """Hamiltonians L_i^cl(x, y) as polynomials; the linear part of L_i^cl must be exactly y_i."""

    basis: GradedBasis
    hamiltonians: Dict[int, Poly]
    name: str = ""
    require_airy: bool = True

    def __post_init__(self):
        self.hamiltonians = {i: {k: v for k, v in h.items() if v} for i, h in self.hamiltonians.items()}
        if self.require_airy:
            for i, h in self.hamiltonians.items():
                low = {k: v for k, v in h.items() if len(k[0]) + len(k[1]) <= 1}
                if low != {((), (i,)): 1}:
                    raise ValueError(f"linear part of hamiltonian {i} is not y_{i}")

    def algebra(self) -> GradedAlgebra:
        return GradedAlgebra(self.basis.parities)


def lift(poly: Poly) -> Op:
    """Normal-ordered quantization y_a -> hbar d_a (derivatives to the right)."""
    return {(len(Y), X, Y): c for (X, Y), c in poly.items() if c}


def classical_part(op: Op, shift: int = 0) -> Poly:
    """Terms hbar^h x^X d^D with h - shift == len(D), read as x^X y_D."""
    return {(X, D): c for (h, X, D), c in op.items() if c and h - shift == len(D)}


def poisson_bracket(alg: GradedAlgebra, P: Poly, Q: Poly) -> Poly:
    return classical_part(alg.supercommutator(lift(P), lift(Q)), shift=1)


def classical_limit(t: SQASTensors) -> ClassicalStructure:
    ham = {i: classical_part(t.operator(i)) for i in t.basis.labels()}
    return ClassicalStructure(t.basis, ham, name=t.name)


def poisson_closure(cl: ClassicalStructure):
    """(f, residual): f_ij^k read from the y_k coefficient of {L_i, L_j}; residual must vanish."""
    alg = cl.algebra()
    f = {}
    residual = {}
    labs = sorted(cl.hamiltonians)
    for i in labs:
        for j in labs:
            br = poisson_bracket(alg, cl.hamiltonians[i], cl.hamiltonians[j])
            rest = dict(br)
            for (X, Y), c in br.items():
                if not X and len(Y) == 1 and Y[0] in cl.hamiltonians:
                    k = Y[0]
                    f[(i, j, k)] = c
            for (i2, j2, k), c in list(f.items()):
                if (i2, j2) != (i, j):
                    continue
                for key, v in cl.hamiltonians[k].items():
                    w = rest.get(key, 0) - c * v
                    if w:
                        rest[key] = w
                    else:
                        rest.pop(key, None)
            if rest:
                residual[(i, j)] = rest
    return f, residual


def _series_x(alg: GradedAlgebra, table: FreeEnergyTable, max_degree: int) -> Dict[Tuple[int, ...], object]:
    """The genus-zero part of F as {monomial: coeff} up to the given degree."""
    out = {}
    for g, idx, v in table.items(max_degree - 2):
        if g == 0 and len(idx) <= max_degree:
            mult = 1
            for x in set(idx):
                mult *= factorial(idx.count(x))
            out[idx] = v / mult
    return out


def _mul_x(alg: GradedAlgebra, P, Q, max_degree):
    out = {}
    for m1, v1 in P.items():
        for m2, v2 in Q.items():
            if len(m1) + len(m2) > max_degree:
                continue
            s, m = alg.mono_mul(m1, m2)
            if s:
                out[m] = out.get(m, 0) + s * v1 * v2
    return {k: v for k, v in out.items() if v}


def check_lagrangian(cl: ClassicalStructure, table: FreeEnergyTable, max_degree: int) -> ConstraintReport:
    """Substitute y_a = d_a F_cl into every L_i^cl and report monomials of degree <= max_degree that survive."""
    alg = cl.algebra()
    Fcl = _series_x(alg, table, max_degree + 1)
    if table.frontier < max_degree - 1:
        table.extend(max_degree - 1)
        Fcl = _series_x(alg, table, max_degree + 1)
    dF = {}
    for a in cl.basis.columns():
        d = {}
        for m, v in Fcl.items():
            for c, mm in alg.deriv(a, m):
                d[mm] = d.get(mm, 0) + c * v
        dF[a] = {k: v for k, v in d.items() if v}
    rep = ConstraintReport()
    for i, h in sorted(cl.hamiltonians.items()):
        total: Dict[Tuple[int, ...], object] = {}
        for (X, Y), c in h.items():
            term = {X: c}
            for b in Y:
                term = _mul_x(alg, term, dF[b], max_degree)
                if not term:
                    break
            for m, v in term.items():
                if len(m) <= max_degree:
                    total[m] = total.get(m, 0) + v
        for m, v in sorted(total.items()):
            if v:
                rep.add("lagrangian", (i,) + m, v)
    return rep


def bosonic_reduction(cl: ClassicalStructure) -> ClassicalStructure:
    """Keep even labels and drop every monomial containing an odd variable; variables are renumbered."""
    p = cl.basis.parities
    even = [a for a in cl.basis.labels() if not p[a]]
    ren = {a: k + 1 for k, a in enumerate(even)}
    names = [cl.basis.name(a) for a in even]
    basis = GradedBasis.from_labels([0] * len(even), names=names)
    ham = {}
    for i in even:
        h = {}
        for (X, Y), c in cl.hamiltonians.get(i, {}).items():
            if any(p[a] for a in X + Y):
                continue
            h[(tuple(ren[a] for a in X), tuple(ren[a] for a in Y))] = c
        ham[ren[i]] = h
    return ClassicalStructure(basis, ham, name=(cl.name + "-bosonic") if cl.name else "bosonic")


def weyl_quantize_hamiltonian(poly: Poly, parities: Sequence[int]) -> Op:
    """Quadratic (or lower) hamiltonian with x^a y_b -> hbar x^a d_b + (hbar/2)(-1)^{|a|} delta_ab."""
    out: Op = {}
    for (X, Y), c in poly.items():
        if len(X) + len(Y) > 2:
            raise ValueError("Weyl quantization is implemented for quadratic hamiltonians")
        k = (len(Y), X, Y)
        out[k] = out.get(k, 0) + c
        if len(X) == 1 and len(Y) == 1 and X[0] == Y[0]:
            sgn = -1 if parities[X[0]] else 1
            out[(1, (), ())] = out.get((1, (), ()), 0) + c * sgn * HALF
    return {k: v for k, v in out.items() if v}


def weyl_quantize(cl: ClassicalStructure) -> SQASTensors:
    ops = {i: weyl_quantize_hamiltonian(h, cl.basis.parities) for i, h in cl.hamiltonians.items()}
    return tensors_from_operators(cl.basis, ops, name=(cl.name + "-weyl") if cl.name else "weyl")


def normal_order_quantize(cl: ClassicalStructure) -> SQASTensors:
    return tensors_from_operators(cl.basis, {i: lift(h) for i, h in cl.hamiltonians.items()},
                                  name=(cl.name + "-normal") if cl.name else "normal")


@dataclass
class CocycleResult:
    zeta: Dict[Tuple[int, int], object]
    cocycle_condition: bool
    shift: Optional[Dict[int, object]]          # d with f_ij^k d_k = zeta_ij, i.e. L_i -> L_i + hbar d_i
    D: Optional[Dict[int, object]]              # the same shift in tensor convention (D = -d)
    ambiguity: List[Dict[int, object]]          # basis of even functionals vanishing on [g, g]
    obstruction: Optional[str] = None


def _quantized_ops(cl: ClassicalStructure, ordering: str) -> Dict[int, Op]:
    if ordering == "normal":
        return {i: lift(h) for i, h in cl.hamiltonians.items()}
    if ordering == "weyl":
        return {i: weyl_quantize_hamiltonian(h, cl.basis.parities) for i, h in cl.hamiltonians.items()}
    raise ValueError(f"unknown ordering {ordering!r}")


def cocycle(cl: ClassicalStructure, ordering: str = "normal") -> CocycleResult:
    """zeta_ij = ([L_i, L_j] - hbar f_ij^k L_k)/hbar^2 for the chosen ordering, with its coboundary solution."""
    alg = cl.algebra()
    p = cl.basis.parities
    f, residual = poisson_closure(cl)
    if residual:
        raise ValueError("classical hamiltonians do not close under the Poisson bracket")
    ops = _quantized_ops(cl, ordering)
    labs = sorted(ops)
    zeta = {}
    for i in labs:
        for j in labs:
            r = alg.supercommutator(ops[i], ops[j])
            for (i2, j2, k), c in f.items():
                if (i2, j2) == (i, j):
                    hbar_Lk = {(h + 1, X, D): v for (h, X, D), v in ops[k].items()}
                    r = add_ops(r, hbar_Lk, 1, -c)
            bad = {k: v for k, v in r.items() if k != (2, (), ())}
            if bad:
                raise ValueError(f"[L_{i}, L_{j}] - hbar f L has non-constant terms")
            z = r.get((2, (), ()), 0)
            if z:
                zeta[(i, j)] = z
    # graded cocycle condition: zeta([x,y],z) = zeta(x,[y,z]) - (-1)^{|x||y|} zeta(y,[x,z])
    ok = True
    fk = defaultdict(list)
    for (i, j, k), c in f.items():
        fk[(i, j)].append((k, c))
    for i in labs:
        for j in labs:
            for l in labs:
                lhs = sum((c * zeta.get((k, l), 0) for k, c in fk[(i, j)]), Fraction(0))
                r1 = sum((c * zeta.get((i, k), 0) for k, c in fk[(j, l)]), Fraction(0))
                r2 = sum((c * zeta.get((j, k), 0) for k, c in fk[(i, l)]), Fraction(0))
                sgn = -1 if p[i] and p[j] else 1
                if lhs - r1 + sgn * r2:
                    ok = False
    even = [k for k in labs if not p[k]]
    rows = []
    for i in labs:
        for j in labs:
            row = {k: c for k, c in fk[(i, j)] if k in even}
            if row or zeta.get((i, j)):
                rows.append((row, zeta.get((i, j), 0)))
    obstruction = None
    try:
        shift, _ = solve(rows, even)
        shift = {k: v for k, v in shift.items() if v}
        D = {k: -v for k, v in shift.items()}
    except InconsistentSystem as exc:
        shift = D = None
        obstruction = f"cocycle is not a coboundary: {exc}"
    _, kernel = solve([(row, 0) for row, _ in rows], even)
    return CocycleResult(zeta, ok, shift, D, kernel, obstruction)


def d_ambiguity_contains(cl: ClassicalStructure, diff: Dict[int, object]) -> bool:
    """True when the D-difference vanishes on the commutator ideal, i.e. f_ij^k diff_k = 0."""
    f, _ = poisson_closure(cl)
    acc = defaultdict(lambda: Fraction(0))
    for (i, j, k), c in f.items():
        acc[(i, j)] += c * diff.get(k, 0)
    return not any(v for v in acc.values())
