"""JSON documents for structures, coefficient tables and gauge data.

Serialization is canonical: entries sorted, rationals "p/q" in lowest terms, keys sorted,
so equal objects produce identical bytes.
"""
from __future__ import annotations

import json
from typing import Any, Dict, Iterable, List, Optional, Tuple

from .graded import GradedBasis
from .recursion import FreeEnergyTable
from .scalars import scalar_from_json, scalar_to_json
from .structure import SQASTensors, new_A, new_B, new_C
from .transforms import GaugeData


class DocumentError(ValueError):
    """Malformed or inconsistent input document."""


def dumps(doc: Dict[str, Any], fmt: str = "json") -> str:
    if fmt == "pretty":
        return json.dumps(doc, sort_keys=True, indent=2) + "\n"
    return json.dumps(doc, sort_keys=True, separators=(",", ":")) + "\n"


def loads(text: str) -> Dict[str, Any]:
    try:
        doc = json.loads(text)
    except json.JSONDecodeError as exc:
        raise DocumentError(f"invalid JSON: {exc}") from exc
    if not isinstance(doc, dict):
        raise DocumentError("top level must be a JSON object")
    return doc


def _entries(items: Iterable[Tuple[Tuple[int, ...], Any]]) -> List[Dict[str, Any]]:
    return [{"indices": list(idx), "value": scalar_to_json(v)} for idx, v in sorted(items) if v]


# -- structures ----------------------------------------------------------------------------

def structure_to_doc(t: SQASTensors) -> Dict[str, Any]:
    basis: Dict[str, Any] = {
        "size": t.basis.size,
        "parities": list(t.basis.parities),
        "extra_fermion": t.basis.has_extra_fermion,
    }
    if t.basis.names is not None:
        basis["names"] = list(t.basis.names)
    meta: Dict[str, Any] = {"name": t.name, "source": t.source}
    if t.check_bounds is not None:
        meta["check_bounds"] = list(t.check_bounds)
    return {
        "basis": basis,
        "A": _entries(t.A.items()),
        "B": _entries(t.B.items()),
        "C": _entries(t.C.items()),
        "D": _entries(((i,), v) for i, v in t.D.items()),
        "f": _entries(t.f.items()),
        "metadata": meta,
    }


def _fill(tensor, rows, what: str) -> None:
    seen: Dict[Tuple[int, ...], Any] = {}
    for row in rows:
        idx, val = _row(row, 3, what)
        canon, sign = tensor._canon(idx)
        if canon is None:
            if val:
                raise DocumentError(f"{what}{list(idx)}: repeated odd index in a symmetric pair")
            continue
        if canon in seen and seen[canon] != val * sign:
            raise DocumentError(f"{what}{list(idx)} conflicts with an earlier entry for the same slot")
        seen[canon] = val * sign
        try:
            tensor.set(idx, val)
        except ValueError as exc:
            raise DocumentError(f"{what}{list(idx)}: {exc}") from exc


def _row(row, arity: int, what: str):
    if not isinstance(row, dict) or "indices" not in row or "value" not in row:
        raise DocumentError(f"{what} entries need 'indices' and 'value'")
    idx = row["indices"]
    if not isinstance(idx, list) or len(idx) != arity or not all(isinstance(a, int) for a in idx):
        raise DocumentError(f"{what} entry {idx!r} must list {arity} integer indices")
    try:
        val = scalar_from_json(row["value"])
    except (ValueError, TypeError, ZeroDivisionError) as exc:
        raise DocumentError(f"{what}{idx}: bad value {row['value']!r}") from exc
    return tuple(idx), val


def structure_from_doc(doc: Dict[str, Any]) -> SQASTensors:
    try:
        b = doc["basis"]
        parities = b["parities"]
        basis = GradedBasis(tuple(parities), bool(b.get("extra_fermion", False)), b.get("names"))
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad basis: {exc}") from exc
    if "size" in b and b["size"] != basis.size:
        raise DocumentError("basis size does not match parities")
    A, B, C = new_A(basis), new_B(basis), new_C(basis)
    try:
        _fill(A, doc.get("A", []), "A")
        _fill(B, doc.get("B", []), "B")
        _fill(C, doc.get("C", []), "C")
        D = dict(_row(r, 1, "D") for r in doc.get("D", []))
        f = dict(_row(r, 3, "f") for r in doc.get("f", []))
        meta = doc.get("metadata", {}) or {}
        bounds = meta.get("check_bounds")
        return SQASTensors(basis, A, B, C, {i[0]: v for i, v in D.items()}, f,
                           name=meta.get("name", ""), source=meta.get("source", ""),
                           check_bounds=tuple(bounds) if bounds else None)
    except DocumentError:
        raise
    except (KeyError, TypeError, ValueError, IndexError) as exc:
        raise DocumentError(str(exc)) from exc


# -- coefficient tables --------------------------------------------------------------------

def table_to_doc(table: FreeEnergyTable, max_level: int) -> Dict[str, Any]:
    entries = [{"g": g, "indices": list(idx), "value": scalar_to_json(v)}
               for g, idx, v in table.items(max_level) if v]
    entries.sort(key=lambda e: (e["g"], e["indices"]))
    return {"structure": table.structure.name, "entries": entries, "level": max_level}


def table_from_doc(doc: Dict[str, Any]) -> Dict[Tuple[int, Tuple[int, ...]], Any]:
    try:
        return {(int(e["g"]), tuple(e["indices"])): scalar_from_json(e["value"]) for e in doc["entries"]}
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad coefficient table: {exc}") from exc


def series_to_doc(coeffs, name: str, max_degree: int) -> Dict[str, Any]:
    """Partition-function coefficients {hbar power, monomial, value}."""
    rows = [{"hbar": c.hbar_power, "indices": list(c.monomial), "value": scalar_to_json(c.value)}
            for c in coeffs if c.value]
    rows.sort(key=lambda r: (r["hbar"], r["indices"]))
    return {"structure": name, "series": rows, "max_degree": max_degree}


# -- gauge data ----------------------------------------------------------------------------

def gauge_from_doc(doc: Dict[str, Any]) -> GaugeData:
    """{"s": [{"indices": [...], "value": "p/q"}, ...]}"""
    try:
        terms = {}
        for row in doc["s"]:
            idx = tuple(row["indices"])
            terms[idx] = scalar_from_json(row["value"])
        return GaugeData(terms)
    except (KeyError, TypeError, ValueError) as exc:
        raise DocumentError(f"bad gauge document: {exc}") from exc


def gauge_to_doc(s: GaugeData) -> Dict[str, Any]:
    return {"s": _entries(s.terms.items())}


def canonicalize(doc: Dict[str, Any]) -> Dict[str, Any]:
    """Canonical form of a structure document (parse then serialize)."""
    return structure_to_doc(structure_from_doc(doc))


def read_structure(path: Optional[str] = None, text: Optional[str] = None) -> SQASTensors:
    if text is None:
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as exc:
            raise DocumentError(f"cannot read {path}: {exc}") from exc
    return structure_from_doc(loads(text))
