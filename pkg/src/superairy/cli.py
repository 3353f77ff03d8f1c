"""Command-line interface.

Exit codes: 0 pass, 1 mathematical failure, 2 input error, 3 unsupported operation.
INPUT is either a path to a structure document or a catalog id.
"""
from __future__ import annotations

import json
import os
import sys
from fractions import Fraction
from typing import Any, Dict, Optional

import click

from . import catalog
from .graphs import UnsupportedStructure, compare_with_recursion
from .io import (DocumentError, dumps, gauge_from_doc, loads, read_structure, series_to_doc,
                 structure_to_doc, table_from_doc, table_to_doc)
from .recursion import FreeEnergyTable
from .scalars import scalar_to_json
from .structure import verify_airy
from .transforms import check_lagrangian, classical_limit, gauge_transform_structure, gauge_transform_Z

EXIT_OK, EXIT_FAIL, EXIT_INPUT, EXIT_UNSUPPORTED = 0, 1, 2, 3


class _Exit(Exception):
    def __init__(self, code: int, msg: str):
        super().__init__(msg)
        self.code = code


def _exact(obj):
    """JSON params to exact values: strings and numbers become Fractions, dict keys stay."""
    if isinstance(obj, dict):
        return {k: _exact(v) for k, v in obj.items()}
    if isinstance(obj, list):
        return [_exact(v) for v in obj]
    if isinstance(obj, bool) or obj is None:
        return obj
    if isinstance(obj, (int, float, str)):
        try:
            return Fraction(str(obj)) if isinstance(obj, float) else Fraction(obj)
        except ValueError as exc:
            raise _Exit(EXIT_INPUT, f"parameter value {obj!r} is not a rational") from exc
    return obj


def _params(raw: Optional[str]) -> Dict[str, Any]:
    if not raw:
        return {}
    try:
        p = json.loads(raw)
    except json.JSONDecodeError as exc:
        raise _Exit(EXIT_INPUT, f"--params is not valid JSON: {exc}") from exc
    if not isinstance(p, dict):
        raise _Exit(EXIT_INPUT, "--params must be a JSON object")
    p = _exact(p)
    if "N" in p:
        p["N"] = int(p["N"])
    return p


def _load(source: str, params: Optional[str], truncation: Optional[int], max_level: Optional[int] = None):
    if os.path.exists(source):
        try:
            return read_structure(source)
        except DocumentError as exc:
            raise _Exit(EXIT_INPUT, str(exc)) from exc
    if source in catalog.CATALOG:
        p = _params(params)
        try:
            if truncation is None and catalog.CATALOG[source].infinite:
                truncation = catalog.support_bound(source, p, 0, (max_level or 2) + 2)
            return catalog.instantiate(source, p, truncation)
        except (catalog.CatalogError, ValueError, TypeError) as exc:
            raise _Exit(EXIT_INPUT, str(exc)) from exc
    raise _Exit(EXIT_INPUT, f"{source!r} is neither a file nor a catalog id")


def _emit(doc, out: Optional[str], fmt: str) -> None:
    text = dumps(doc, fmt)
    if out:
        with open(out, "w", encoding="utf-8") as fh:
            fh.write(text)
    else:
        click.echo(text, nl=False)


def _run(fn):
    try:
        code = fn()
    except _Exit as exc:
        click.echo(f"error: {exc}", err=True)
        sys.exit(exc.code)
    sys.exit(code or EXIT_OK)


_fmt = click.option("--format", "fmt", type=click.Choice(["json", "pretty"]), default="json", show_default=True)
_params_opt = click.option("--params", default=None, help="JSON object with catalog parameters.")
_trunc = click.option("--truncation", type=int, default=None, help="Mode cutoff for infinite families.")
_out = click.option("--out", type=click.Path(dir_okay=False), default=None)


@click.group()
def main():
    """Quadratic super Airy structures: verification, free energies and transforms."""


@main.command()
@click.argument("source")
@_params_opt
@_trunc
@_fmt
def verify(source, params, truncation, fmt):
    """Check every constraint; exit 1 if any residual is nonzero."""
    def go():
        t = _load(source, params, truncation)
        rep = verify_airy(t)
        _emit(rep.to_json(), None, fmt)
        return EXIT_OK if rep.passed else EXIT_FAIL
    _run(go)


@main.command()
@click.argument("source")
@click.option("--max-level", type=int, default=4, show_default=True)
@_params_opt
@_trunc
@_out
@_fmt
def compute(source, max_level, params, truncation, out, fmt):
    """Free energy table F_{g,n} for all 2g+n-2 <= max-level."""
    def go():
        if max_level < 0:
            raise _Exit(EXIT_INPUT, "--max-level must be non-negative")
        t = _load(source, params, truncation, max_level)
        table = FreeEnergyTable(t)
        table.extend(max_level)
        _emit(table_to_doc(table, max_level), out, fmt)
    _run(go)


class _DocTable:
    def __init__(self, entries):
        self.entries = entries

    def get(self, g, idx):
        return self.entries.get((g, tuple(idx)), Fraction(0))


@main.command("compare-oracle")
@click.argument("source")
@click.option("--max-level", type=int, default=4, show_default=True)
@click.option("--table", "table_path", type=click.Path(dir_okay=False), default=None,
              help="Compare this coefficient table document instead of a fresh recursion.")
@_params_opt
@_trunc
def compare_oracle(source, max_level, table_path, params, truncation):
    """Graph sum against the recursion (or a supplied table)."""
    def go():
        t = _load(source, params, truncation, max_level)
        if t.basis.has_extra_fermion:
            raise _Exit(EXIT_UNSUPPORTED, "graph sum does not cover structures with an extra fermion")
        if table_path:
            try:
                with open(table_path, encoding="utf-8") as fh:
                    table = _DocTable(table_from_doc(loads(fh.read())))
            except (OSError, DocumentError) as exc:
                raise _Exit(EXIT_INPUT, str(exc)) from exc
        else:
            table = FreeEnergyTable(t)
            table.extend(max_level)
        try:
            bad = compare_with_recursion(t, table, max_level)
        except UnsupportedStructure as exc:
            raise _Exit(EXIT_UNSUPPORTED, str(exc)) from exc
        for g, idx, gv, rv in bad:
            click.echo(f"mismatch g={g} indices={list(idx)} graph={gv} table={rv}")
        click.echo("agree" if not bad else f"{len(bad)} mismatches")
        return EXIT_FAIL if bad else EXIT_OK
    _run(go)


@main.command()
@click.argument("source")
@click.option("--gauge", "gauge_doc", required=True,
              help="Gauge document (path or inline JSON): {\"s\": [{\"indices\": [...], \"value\": \"p/q\"}]}.")
@click.option("--series", "max_degree", type=int, default=None,
              help="Also transform Z through this total degree and emit the series instead.")
@_params_opt
@_trunc
@_out
@_fmt
def gauge(source, gauge_doc, max_degree, params, truncation, out, fmt):
    """Conjugate the operators by exp(D_s/hbar), or transform Z."""
    def go():
        t = _load(source, params, truncation)
        text = gauge_doc
        if os.path.exists(gauge_doc):
            with open(gauge_doc, encoding="utf-8") as fh:
                text = fh.read()
        try:
            s = gauge_from_doc(loads(text))
        except DocumentError as exc:
            raise _Exit(EXIT_INPUT, str(exc)) from exc
        try:
            if max_degree is None:
                _emit(structure_to_doc(gauge_transform_structure(t, s)), out, fmt)
            else:
                table = FreeEnergyTable(t)
                table.extend(max_degree)
                _emit(series_to_doc(gauge_transform_Z(table, s, max_degree), t.name, max_degree), out, fmt)
        except ValueError as exc:
            raise _Exit(EXIT_UNSUPPORTED, str(exc)) from exc
    _run(go)


@main.command()
@click.argument("source")
@click.option("--max-degree", type=int, default=5, show_default=True)
@_params_opt
@_trunc
@_out
@_fmt
def classical(source, max_degree, params, truncation, out, fmt):
    """Classical hamiltonians and the Lagrangian check of the genus-zero free energy."""
    def go():
        t = _load(source, params, truncation)
        cl = classical_limit(t)
        table = FreeEnergyTable(t)
        table.extend(max(max_degree - 1, 0))
        rep = check_lagrangian(cl, table, max_degree)
        ham = {str(i): [{"x": list(X), "y": list(Y), "value": scalar_to_json(c)} for (X, Y), c in sorted(h.items())]
               for i, h in sorted(cl.hamiltonians.items())}
        _emit({"structure": t.name, "hamiltonians": ham, "lagrangian": rep.to_json()}, out, fmt)
        return EXIT_OK if rep.passed else EXIT_FAIL
    _run(go)


@main.group("catalog")
def catalog_group():
    """List or instantiate catalog entries."""


@catalog_group.command("list")
def catalog_list():
    for e in catalog.list_entries():
        click.echo(e)


@catalog_group.command("show")
@click.argument("entry")
@_params_opt
@_trunc
@_out
@_fmt
def catalog_show(entry, params, truncation, out, fmt):
    """Emit the structure document of a catalog entry."""
    def go():
        if entry not in catalog.CATALOG:
            raise _Exit(EXIT_INPUT, f"unknown catalog entry {entry!r}")
        _emit(structure_to_doc(_load(entry, params, truncation)), out, fmt)
    _run(go)


if __name__ == "__main__":  # pragma: no cover
    main()
