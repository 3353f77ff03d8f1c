"""Z2-graded index bookkeeping: parities, Koszul signs, canonical tuples, sparse tensors."""
from __future__ import annotations

from dataclasses import dataclass, field
from enum import IntEnum
from fractions import Fraction
from itertools import permutations
from typing import Dict, Iterable, Iterator, Optional, Sequence, Tuple

from .scalars import Scalar, as_scalar


class Parity(IntEnum):
    EVEN = 0
    ODD = 1

    def __add__(self, other):
        return Parity((int(self) + int(other)) % 2)

    __radd__ = __add__


@dataclass(frozen=True)
class GradedBasis:
    """Variables x^0..x^M. Index 0 exists only when has_extra_fermion (and is odd)."""

    parities: Tuple[int, ...]
    has_extra_fermion: bool = False
    names: Optional[Tuple[str, ...]] = None

    def __post_init__(self):
        object.__setattr__(self, "parities", tuple(int(p) for p in self.parities))
        if any(p not in (0, 1) for p in self.parities):
            raise ValueError("parities must be 0 or 1")
        if not self.parities:
            raise ValueError("basis needs at least the slot for index 0")
        if self.has_extra_fermion and self.parities[0] != 1:
            raise ValueError("extra fermion x^0 must be odd")
        if self.names is not None:
            object.__setattr__(self, "names", tuple(self.names))
            if len(self.names) != len(self.parities):
                raise ValueError("names must match parities")

    @classmethod
    def from_labels(cls, label_parities: Sequence[int], extra_fermion: bool = False, names=None):
        """Build from parities of x^1..x^M; index 0 is prepended."""
        ps = (1 if extra_fermion else 0,) + tuple(label_parities)
        if names is not None:
            names = (("theta0" if extra_fermion else "_"),) + tuple(names)
        return cls(ps, extra_fermion, names)

    @property
    def size(self) -> int:
        return len(self.parities)

    @property
    def M(self) -> int:
        return len(self.parities) - 1

    def labels(self) -> range:
        return range(1, self.size)

    def columns(self) -> range:
        return range(0 if self.has_extra_fermion else 1, self.size)

    def parity(self, a: int) -> int:
        return self.parities[a]

    def check_index(self, a: int, label: bool = False) -> None:
        if not isinstance(a, int) or a < 0 or a >= self.size:
            raise ValueError(f"index {a!r} out of range for basis of size {self.size}")
        if a == 0 and (label or not self.has_extra_fermion):
            raise ValueError("index 0 is not available here")

    def name(self, a: int) -> str:
        if self.names is not None:
            return self.names[a]
        return f"x{a}"

    def tuple_parity(self, idx: Iterable[int]) -> int:
        p = self.parities
        return sum(p[a] for a in idx) & 1


def koszul_sign(permutation: Sequence[int], parities: Sequence[int]) -> int:
    """Sign for reordering graded symbols s_0..s_{n-1} into s_{perm[0]}..s_{perm[n-1]}."""
    n = len(permutation)
    if len(parities) != n:
        raise ValueError("permutation and parities differ in length")
    if sorted(permutation) != list(range(n)):
        raise ValueError("not a permutation")
    inv = 0
    for k in range(n):
        pk = permutation[k]
        if not parities[pk]:
            continue
        for l in range(k + 1, n):
            pl = permutation[l]
            if pl < pk and parities[pl]:
                inv += 1
    return -1 if inv & 1 else 1


def sort_sign(idx: Sequence[int], parities: Sequence[int]) -> int:
    """Koszul sign of sorting idx ascending; 0 if an odd index repeats."""
    odd = [a for a in idx if parities[a]]
    if len(odd) < 2:
        return 1
    if len(set(odd)) != len(odd):
        return 0
    inv = 0
    for k in range(len(odd)):
        ok = odd[k]
        for l in range(k + 1, len(odd)):
            if odd[l] < ok:
                inv += 1
    return -1 if inv & 1 else 1


def canonicalize(idx: Sequence[int], coeff, basis: GradedBasis):
    for a in idx:
        basis.check_index(a)
    s = sort_sign(idx, basis.parities)
    return tuple(sorted(idx)), (coeff * s if s else coeff * 0)


def move_to_front_sign(idx: Sequence[int], pos: int, parities: Sequence[int]) -> int:
    """Sign of moving idx[pos] to the front."""
    if not parities[idx[pos]]:
        return 1
    return -1 if sum(parities[a] for a in idx[:pos]) & 1 else 1


@dataclass
class SparseGradedTensor:
    """Sparse tensor over a graded basis.

    Slot 0 is the label slot. symmetry_groups lists slot positions within which the tensor is
    graded-symmetric; only the sorted representative is stored.
    """

    basis: GradedBasis
    arity: int
    symmetry_groups: Tuple[Tuple[int, ...], ...] = ()
    entries: Dict[Tuple[int, ...], Scalar] = field(default_factory=dict)

    def _canon(self, idx: Tuple[int, ...]):
        if len(idx) != self.arity:
            raise ValueError(f"expected {self.arity} indices, got {idx}")
        sign = 1
        idx = list(idx)
        p = self.basis.parities
        for grp in self.symmetry_groups:
            sub = [idx[s] for s in grp]
            s = sort_sign(sub, p)
            if s == 0:
                return None, 0
            sign *= s
            for s_pos, v in zip(grp, sorted(sub)):
                idx[s_pos] = v
        return tuple(idx), sign

    def set(self, idx, value) -> None:
        idx = tuple(idx)
        for a in idx:
            self.basis.check_index(a)
        value = as_scalar(value)
        if value and self.basis.tuple_parity(idx):
            raise ValueError(f"entry {idx} is not even")
        c, sign = self._canon(idx)
        if c is None:
            if value:
                raise ValueError(f"entry {idx} has a repeated odd index in a symmetric group")
            return
        if value:
            self.entries[c] = value * sign
        else:
            self.entries.pop(c, None)

    def add(self, idx, value) -> None:
        c, sign = self._canon(tuple(idx))
        if c is None:
            return
        v = self.entries.get(c, 0) + as_scalar(value) * sign
        if v:
            if self.basis.tuple_parity(c):
                raise ValueError(f"entry {c} is not even")
            self.entries[c] = v
        else:
            self.entries.pop(c, None)

    def get(self, idx) -> Scalar:
        c, sign = self._canon(tuple(idx))
        if c is None:
            return Fraction(0)
        v = self.entries.get(c)
        if v is None:
            return Fraction(0)
        return v * sign

    def items(self) -> Iterator[Tuple[Tuple[int, ...], Scalar]]:
        return iter(sorted(self.entries.items()))

    def items_full(self) -> Iterator[Tuple[Tuple[int, ...], Scalar]]:
        """All nonzero entries, expanded over every ordering inside symmetry groups."""
        for idx, v in sorted(self.entries.items()):
            seen = set()
            for full in self._expand(idx):
                if full in seen:
                    continue
                seen.add(full)
                yield full, self.get(full)

    def _expand(self, idx):
        variants = [tuple(idx)]
        for grp in self.symmetry_groups:
            nxt = []
            for v in variants:
                for perm in permutations(grp):
                    w = list(v)
                    for s_pos, src in zip(grp, perm):
                        w[s_pos] = v[src]
                    nxt.append(tuple(w))
            variants = nxt
        return variants

    def __len__(self):
        return len(self.entries)

    def copy(self) -> "SparseGradedTensor":
        return SparseGradedTensor(self.basis, self.arity, self.symmetry_groups, dict(self.entries))
