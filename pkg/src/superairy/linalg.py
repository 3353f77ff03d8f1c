"""Exact sparse linear systems over the scalar field (Fraction or Q(sqrt3))."""
from __future__ import annotations

from fractions import Fraction
from typing import Dict, Hashable, List, Optional, Sequence, Tuple

Row = Dict[Hashable, object]


class InconsistentSystem(ValueError):
    pass


def solve(rows: Sequence[Tuple[Row, object]], unknowns: Optional[Sequence[Hashable]] = None):
    """Solve sum_v row[v] * X[v] = rhs for every (row, rhs).

    Returns (particular solution with free variables set to 0, null-space basis). Raises
    InconsistentSystem when some equation reduces to 0 = c with c != 0.
    """
    pivots: Dict[Hashable, Tuple[Row, object]] = {}
    order: List[Hashable] = []
    for row, rhs in rows:
        r = {k: v for k, v in row.items() if v}
        c = rhs
        # reduce against existing pivots until stable
        changed = True
        while changed:
            changed = False
            for k in list(r):
                if k in pivots and k in r:
                    prow, prhs = pivots[k]
                    f = r[k]
                    for kk, vv in prow.items():
                        w = r.get(kk, 0) - f * vv
                        if w:
                            r[kk] = w
                        else:
                            r.pop(kk, None)
                    c = c - f * prhs
                    changed = True
        if not r:
            if c:
                raise InconsistentSystem(f"inconsistent equation: 0 = {c}")
            continue
        key = min(r, key=_order_key)
        inv = 1 / r[key] if not isinstance(r[key], int) else Fraction(1, r[key])
        r = {k: v * inv for k, v in r.items()}
        c = c * inv
        # keep pivots fully reduced
        for k, (prow, prhs) in list(pivots.items()):
            if key in prow:
                f = prow[key]
                nrow = dict(prow)
                for kk, vv in r.items():
                    w = nrow.get(kk, 0) - f * vv
                    if w:
                        nrow[kk] = w
                    else:
                        nrow.pop(kk, None)
                pivots[k] = (nrow, prhs - f * c)
        pivots[key] = (r, c)
        order.append(key)
    variables = set(unknowns or ())
    for prow, _ in pivots.values():
        variables.update(prow)
    free = sorted((v for v in variables if v not in pivots), key=_order_key)
    sol = {}
    for k, (prow, prhs) in pivots.items():
        if prhs:
            sol[k] = prhs
    kernel = []
    for fv in free:
        vec = {fv: Fraction(1)}
        for k, (prow, _) in pivots.items():
            if fv in prow:
                vec[k] = -prow[fv]
        kernel.append(vec)
    return sol, kernel


def _order_key(k):
    return repr(k)
