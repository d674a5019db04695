"""Patterns, generators, isomorphism, quotients, labelled algebra, minors."""

import random

import pytest

from symcirc import width
from symcirc.errors import ArityMismatch, IndexOutOfRange, InvalidParameter
from symcirc.pattern import (
    BipartiteMultigraph,
    LabelledPattern,
    are_isomorphic,
    drop_label,
    enumerate_bipartite_multigraphs,
    find_minor,
    glue,
    make_complete_binary_tree,
    make_complete_bipartite,
    make_cycle,
    make_grid,
    make_path,
    quotient,
    tensor_union,
)


def test_make_path():
    p1 = make_path(1)
    assert (p1.a_count, p1.b_count, p1.num_edge_slots()) == (1, 0, 0)
    p2 = make_path(2)
    assert (p2.a_count, p2.b_count, p2.num_edge_slots()) == (1, 1, 1)
    p5 = make_path(5)
    assert (p5.a_count, p5.b_count, p5.num_edge_slots()) == (3, 2, 4)
    with pytest.raises(InvalidParameter):
        make_path(0)


def test_make_grid():
    g = make_grid(1, 1)
    assert g.num_vertices() == 1 and not g.edges
    g = make_grid(2, 2)
    assert g.num_vertices() == 4 and g.num_edge_slots() == 4
    g = make_grid(3, 3)
    assert g.num_vertices() == 9 and g.num_edge_slots() == 12
    with pytest.raises(InvalidParameter):
        make_grid(0, 3)


def test_make_complete_binary_tree():
    assert make_complete_binary_tree(1).num_vertices() == 1
    t = make_complete_binary_tree(2)
    assert t.num_vertices() == 3 and t.num_edge_slots() == 2
    assert make_complete_binary_tree(7).num_vertices() == 7


def test_norm_counts_multiplicities():
    g = BipartiteMultigraph(1, 1, {(0, 0): 2})
    assert g.norm() == 4


def test_isomorphism_examples():
    p3 = make_path(3)
    relabelled = BipartiteMultigraph(2, 1, {(1, 0): 1, (0, 0): 1})
    assert are_isomorphic(p3, relabelled)
    single = BipartiteMultigraph(1, 1, {(0, 0): 1})
    double = BipartiteMultigraph(1, 1, {(0, 0): 2})
    assert not are_isomorphic(single, double)
    assert not are_isomorphic(make_path(4), make_complete_bipartite(1, 3))


def test_isomorphism_is_equivalence_and_permutation_invariant():
    rng = random.Random(1)
    graphs = enumerate_bipartite_multigraphs(4, 4, max_mult=2)[:40]
    for g in graphs:
        assert are_isomorphic(g, g)
        # Permute both sides independently at random.
        pa = list(range(g.a_count))
        pb = list(range(g.b_count))
        rng.shuffle(pa)
        rng.shuffle(pb)
        edges = {(pa[i], pb[j]): m for (i, j), m in g.edges.items()}
        h = BipartiteMultigraph(g.a_count, g.b_count, edges)
        assert are_isomorphic(g, h)
    for g in graphs[:12]:
        for h in graphs[:12]:
            assert are_isomorphic(g, h) == are_isomorphic(h, g)


def test_quotient_examples():
    edge = make_path(2)
    collapsed = quotient(edge, {0: "A", 1: "A"})
    assert collapsed.num_vertices() == 1 and not collapsed.edges
    unchanged = quotient(edge, {0: "A", 1: "B"})
    assert are_isomorphic(unchanged, edge)
    # P_3 with both endpoints A-coloured: contract one edge, keep the other.
    p3 = make_path(3)
    q = quotient(p3, {0: "A", 1: "B", 2: "A"})
    assert q.num_vertices() == 2 and q.num_edge_slots() == 1


def test_quotient_respects_colouring_as_bipartition():
    rng = random.Random(7)
    for g in enumerate_bipartite_multigraphs(5, 6, max_mult=2)[:50]:
        s = {v: rng.choice("AB") for v in g.vertices()}
        q = quotient(g, s)
        # Every surviving edge has one endpoint per side by construction;
        # the graph type enforces it, so just sanity-check slot conservation.
        assert q.num_edge_slots() <= g.num_edge_slots()


def test_tensor_union_examples():
    j = LabelledPattern(BipartiteMultigraph(1, 0), (0,), ())
    edge = LabelledPattern(make_path(2), (0,), (0,))
    t = tensor_union(j, edge)
    assert t.graph.num_vertices() == 3
    assert t.arity() == (2, 1)
    empty = LabelledPattern(BipartiteMultigraph(0, 0))
    t2 = tensor_union(edge, empty)
    assert t2.graph == edge.graph and t2.arity() == edge.arity()
    two = tensor_union(edge, edge)
    assert two.graph.num_vertices() == 4 and two.graph.num_edge_slots() == 2
    assert two.arity() == (2, 2)


def test_glue_examples():
    edge = LabelledPattern(make_path(2), (0,), (0,))
    doubled = glue(edge, edge)
    assert doubled.graph.num_vertices() == 2
    assert doubled.graph.edges == {(0, 0): 2}
    # Gluing with the all-labelled edgeless pattern is the identity.
    j = LabelledPattern(BipartiteMultigraph(1, 1), (0,), (0,))
    same = glue(edge, j)
    assert are_isomorphic(same.graph, edge.graph)
    # P_3 labelled at both endpoints glued with itself gives a 4-cycle.
    p3 = LabelledPattern(make_path(3), (0, 1), ())
    cycle = glue(p3, p3)
    assert are_isomorphic(cycle.graph, make_cycle(4))


def test_glue_arity_mismatch():
    edge = LabelledPattern(make_path(2), (0,), (0,))
    j = LabelledPattern(BipartiteMultigraph(1, 1), (0,), ())
    with pytest.raises(ArityMismatch):
        glue(edge, j)


def test_drop_label():
    edge = LabelledPattern(make_path(2), (0,), ())
    dropped = drop_label(edge, "A", 0)
    assert dropped.arity() == (0, 0)
    readded = LabelledPattern(dropped.graph, (0,), ())
    assert readded == edge
    j2 = LabelledPattern(BipartiteMultigraph(2, 0), (0, 1), ())
    assert drop_label(j2, "A", 1).arity() == (1, 0)
    with pytest.raises(IndexOutOfRange):
        drop_label(edge, "A", 1)


def _labelled_tw(p):
    return width.labelled_treewidth(p)[0]


def _labelled_pw(p):
    return width.labelled_pathwidth(p)[0]


def test_tensor_union_width_bounds():
    # Recompute exact labelled widths and compare against the closure bounds.
    rng = random.Random(3)
    cases = [
        (LabelledPattern(make_path(3), (0,), ()), LabelledPattern(make_path(2), (0,), (0,))),
        (LabelledPattern(make_cycle(4), (0,), (0,)), LabelledPattern(make_path(4), (0, 1), ())),
        (LabelledPattern(make_complete_bipartite(2, 2), (0,), (0,)),
         LabelledPattern(make_path(2), (), (0,))),
    ]
    for f, g in cases:
        lf, rf = f.arity()
        lg, rg = g.arity()
        t = tensor_union(f, g)
        k = _labelled_tw(f) + 1
        k2 = _labelled_tw(g) + 1
        bound_tw = max(k, k2, lf + lg + rf + rg)
        assert _labelled_tw(t) + 1 <= bound_tw
        kp = _labelled_pw(f) + 1
        kp2 = _labelled_pw(g) + 1
        bound_pw = min(max(kp, kp2 + lf + rf), max(kp2, kp + lf + rf))
        assert _labelled_pw(t) + 1 <= bound_pw


def test_tensor_union_rooted_depth_bound():
    f = LabelledPattern(make_path(3), (0,), ())
    g = LabelledPattern(make_path(2), (0,), (0,))
    kf, qf, cf = width.rooted_certificate(f)
    kg, qg, cg = width.rooted_certificate(g)
    t = tensor_union(f, g)
    lf, rf = f.arity()
    lg, rg = g.arity()
    q_bound = max(qf + lg + rg, qg + lf + rf)
    k_bound = max(kf + 1, kg + 1, lf + lg + rf + rg)
    kt, qt, ct = width.rooted_certificate(t)
    ok, why = width.validate_decomposition(t.graph, ct)
    assert ok, why
    assert t.labelled_vertices_global() <= ct.bags[ct.root]
    assert kt + 1 <= k_bound and qt <= q_bound


def test_glue_width_bounds():
    cases = [
        (LabelledPattern(make_path(3), (0, 1), ()), LabelledPattern(make_path(3), (0, 1), ())),
        (LabelledPattern(make_path(2), (0,), (0,)), LabelledPattern(make_path(4), (0,), (0,))),
    ]
    for f, g in cases:
        l, r = f.arity()
        glued = glue(f, g)
        k = max(_labelled_tw(f), _labelled_tw(g)) + 1
        assert _labelled_tw(glued) + 1 <= k
        kp = _labelled_pw(f) + 1
        kp2 = _labelled_pw(g) + 1
        bound_pw = min(max(kp, kp2 + l + r), max(kp2, kp + l + r))
        assert _labelled_pw(glued) + 1 <= bound_pw


def test_repeat_gluing_bound():
    # F_1 ... F_s in P^k glued repeatedly stays within P^{k + labels}.
    f = LabelledPattern(make_path(2), (0,), (0,))
    k = _labelled_pw(f) + 1
    acc = f
    for _ in range(3):
        acc = glue(acc, f)
    assert _labelled_pw(acc) + 1 <= k + 2


def test_find_minor_examples():
    p2, p3, p4 = make_path(2), make_path(3), make_path(4)
    assert find_minor(p2, p4) is not None
    assert find_minor(make_cycle(4), p4) is None
    witness = find_minor(p3, make_grid(2, 2))
    assert witness is not None
    witness.validate(p3, make_grid(2, 2))


def test_find_minor_rejects_multigraph_pattern():
    double = BipartiteMultigraph(1, 1, {(0, 0): 2})
    with pytest.raises(InvalidParameter):
        find_minor(double, make_path(3))


def test_minor_witness_validates_exhaustively():
    cases = [
        (make_path(3), make_cycle(4)),
        (make_cycle(4), make_grid(2, 3)),
        (make_complete_bipartite(1, 3), make_grid(2, 3)),
    ]
    for s, f in cases:
        witness = find_minor(s, f)
        assert witness is not None
        assert witness.validate(s, f)


def test_graph_json_round_trip():
    for g in enumerate_bipartite_multigraphs(4, 5, max_mult=2)[:30]:
        assert BipartiteMultigraph.from_json(g.to_json()) == g
    p = LabelledPattern(make_path(3), (0, 1), ())
    assert LabelledPattern.from_json(p.to_json()) == p
