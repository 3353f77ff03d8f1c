from fractions import Fraction as F
from math import factorial

import pytest

from superairy.catalog import instantiate
from superairy.graphs import (UnsupportedStructure, brute_force_graphs, canonical_form, colourings,
                              enumerate_graphs, graph_sum, graph_weight, is_valid)
from superairy.recursion import compute_free_energy, get_F

# sum over classes of 1/|Aut|, computed independently by stub matching
EXPECTED = {(0, 3): F(1), (0, 4): F(3), (0, 5): F(15), (1, 1): F(1), (1, 2): F(2), (1, 3): F(8), (2, 1): F(5, 2)}


@pytest.mark.parametrize("g,n1", sorted(EXPECTED))
def test_enumeration_matches_brute_force(g, n1):
    graphs = enumerate_graphs(g, n1)
    assert all(is_valid(G, g, n1 - 1) for G in graphs)
    assert sum(F(1, G.automorphisms) for G in graphs) == EXPECTED[(g, n1)]
    bf = brute_force_graphs(g, n1)
    V = 2 * g - 2 + n1
    assert {canonical_form(G)[0]: G.automorphisms for G in graphs} == {k: factorial(V) // c for k, c in bf.items()}


def test_unstable_is_empty():
    assert enumerate_graphs(0, 2) == []


@pytest.mark.parametrize("g,root,leaves", [(0, 1, (1, 2, 3)), (1, 1, (1,)), (1, 2, (3,)), (0, 1, (1, 1, 1))])
def test_explicit_colourings_match_graph_sum(g, root, leaves):
    t = instantiate("1|2-susy")
    total = F(0)
    for G in enumerate_graphs(g, len(leaves) + 1):
        for col in colourings(G, list(t.basis.columns()), root, leaves):
            total += graph_weight(G, col, t) / G.automorphisms
    assert total == graph_sum(g, root, leaves, t)
    assert total == get_F(compute_free_energy(t, 3), g, (root,) + leaves)


def test_extra_fermion_unsupported():
    with pytest.raises(UnsupportedStructure):
        graph_sum(0, 1, (1, 1), instantiate("osp(1|2)"))
