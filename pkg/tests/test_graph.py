import itertools
import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from causalab.errors import NotADag, SchemaViolation, UnknownNode
from causalab.graph import (
    CausalGraph,
    d_separated,
    descendants,
    find_cycles,
    from_json,
    to_json,
    topological_order,
)
from oracles import brute_force_d_separated, random_dag


class TestFindCycles:
    def test_chain_is_acyclic(self):
        g = CausalGraph("ABC", [("A", "B"), ("B", "C")])
        assert find_cycles(g) == []

    def test_two_cycle(self):
        # the model stores i->j and j->i as separate constructions
        g = CausalGraph("AB", [("A", "B")])
        g2 = CausalGraph("AB", [("A", "B"), ("B", "A")])
        cycles = find_cycles(g2)
        assert len(cycles) == 1
        assert set(cycles[0].nodes) == {"A", "B"}
        assert find_cycles(g) == []

    def test_three_cycle_with_isolated_node(self):
        g = CausalGraph("ABCD", [("A", "B"), ("B", "C"), ("C", "A")])
        cycles = find_cycles(g)
        assert len(cycles) == 1
        assert set(cycles[0].nodes) == {"A", "B", "C"}

    def test_two_disjoint_cycles(self):
        g = CausalGraph(
            "ABCDEF",
            [("A", "B"), ("B", "C"), ("C", "A"),
             ("D", "E"), ("E", "F"), ("F", "D")],
        )
        assert len(find_cycles(g)) == 2

    def test_cycle_edges_are_real(self):
        g = CausalGraph(
            "ABCDE",
            [("A", "B"), ("B", "C"), ("C", "A"), ("C", "D"), ("D", "E")],
        )
        (cycle,) = find_cycles(g)
        ring = list(cycle.nodes) + [cycle.nodes[0]]
        for a, b in zip(ring, ring[1:]):
            assert g.mark(a, b) == 1

    def test_undirected_edges_ignored(self):
        g = CausalGraph("ABC", undirected=[("A", "B"), ("B", "C"), ("A", "C")])
        assert find_cycles(g) == []


class TestTopologicalOrder:
    def test_unique_order(self):
        g = CausalGraph("ABC", [("A", "B"), ("A", "C"), ("B", "C")])
        assert topological_order(g) == ["A", "B", "C"]

    def test_tie_break_is_canonical(self):
        g = CausalGraph(["B", "A"])
        assert topological_order(g) == ["B", "A"]

    def test_diamond(self):
        g = CausalGraph("ABCD", [("A", "B"), ("A", "C"), ("B", "D"), ("C", "D")])
        assert topological_order(g) == ["A", "B", "C", "D"]

    def test_cycle_raises(self):
        g = CausalGraph("AB", [("A", "B"), ("B", "A")])
        with pytest.raises(NotADag):
            topological_order(g)

    def test_undirected_raises(self):
        g = CausalGraph("AB", undirected=[("A", "B")])
        with pytest.raises(NotADag):
            topological_order(g)

    def test_matches_cycle_detection(self):
        rng = random.Random(7)
        for _ in range(50):
            n = rng.randint(2, 6)
            names = [f"V{i}" for i in range(n)]
            edges = [
                (a, b) for a in names for b in names
                if a != b and rng.random() < 0.3
            ]
            seen = set()
            edges = [e for e in edges
                     if not (e in seen or (e[1], e[0]) in seen or seen.add(e))]
            g = CausalGraph(names, edges)
            if find_cycles(g):
                with pytest.raises(NotADag):
                    topological_order(g)
            else:
                order = topological_order(g)
                pos = {v: k for k, v in enumerate(order)}
                assert all(pos[a] < pos[b] for a, b in g.directed_edges())


class TestDescendants:
    def test_chain(self):
        g = CausalGraph("ABC", [("A", "B"), ("B", "C")])
        assert descendants(g, "A") == {"B", "C"}
        assert descendants(g, "C") == set()

    def test_unknown_node(self):
        g = CausalGraph("AB")
        with pytest.raises(UnknownNode):
            descendants(g, "Z")

    def test_mek_reaches_erk(self):
        g = CausalGraph(
            ["Raf", "Mek", "Erk", "Akt"],
            [("Raf", "Mek"), ("Mek", "Erk"), ("Erk", "Akt")],
        )
        assert "Erk" in descendants(g, "Mek")


class TestDSeparation:
    def test_chain_blocked(self):
        g = CausalGraph("XYZ", [("X", "Y"), ("Y", "Z")])
        assert d_separated(g, "X", "Z", {"Y"})
        assert not d_separated(g, "X", "Z", set())

    def test_collider(self):
        g = CausalGraph("XYZ", [("X", "Z"), ("Y", "Z")])
        assert d_separated(g, "X", "Y", set())
        assert not d_separated(g, "X", "Y", {"Z"})

    def test_collider_descendant_unblocks(self):
        g = CausalGraph("XYZW", [("X", "Z"), ("Y", "Z"), ("Z", "W")])
        assert not d_separated(g, "X", "Y", {"W"})

    def test_not_a_dag(self):
        g = CausalGraph("AB", undirected=[("A", "B")])
        with pytest.raises(NotADag):
            d_separated(g, "A", "B", set())

    def test_symmetry_and_oracle_agreement(self):
        rng = random.Random(123)
        for _ in range(40):
            g = random_dag(rng, rng.randint(3, 6), 0.5)
            names = list(g.nodes)
            for x, y in itertools.combinations(names, 2):
                rest = [v for v in names if v not in (x, y)]
                for r in range(len(rest) + 1):
                    for z in itertools.combinations(rest, r):
                        expected = brute_force_d_separated(g, x, y, set(z))
                        assert d_separated(g, x, y, set(z)) == expected
                        assert d_separated(g, y, x, set(z)) == expected

    def test_local_markov_property(self):
        # x is d-separated from non-descendant non-parents given parents(x)
        rng = random.Random(77)
        for _ in range(25):
            g = random_dag(rng, rng.randint(3, 7), 0.4)
            for x in g.nodes:
                parents = set(g.parents(x))
                desc = descendants(g, x)
                for y in g.nodes:
                    if y == x or y in parents or y in desc:
                        continue
                    assert d_separated(g, x, y, parents)


class TestSerialization:
    def test_empty_graph(self):
        assert to_json(CausalGraph([])) == '{"nodes": [], "edges": []}'

    def test_single_directed_edge(self):
        doc = to_json(CausalGraph("AB", [("A", "B")]))
        assert '"from": "A"' in doc and '"kind": "directed"' in doc

    def test_undirected_listed_once_in_order(self):
        g = CausalGraph(["B", "A"], undirected=[("A", "B")])
        parsed = from_json(to_json(g))
        assert parsed == g
        assert '"from": "B", "to": "A"' in to_json(g)  # canonical order

    def test_bad_documents(self):
        with pytest.raises(SchemaViolation):
            from_json("not json")
        with pytest.raises(SchemaViolation):
            from_json('{"nodes": ["A"]}')
        with pytest.raises(SchemaViolation):
            from_json('{"nodes": ["A"], "edges": [], "extra": 1}')
        with pytest.raises(SchemaViolation):
            from_json('{"nodes": ["A", "B"], '
                      '"edges": [{"from": "A", "to": "B", "kind": "spooky"}]}')
        with pytest.raises(SchemaViolation):
            from_json('{"nodes": ["A", "B"], '
                      '"edges": [{"from": "A", "to": "B", "kind": "bidirected"}]}')
        with pytest.raises(SchemaViolation):
            from_json('{"nodes": ["A", "A"], "edges": []}')


@st.composite
def cpdag_graphs(draw):
    n = draw(st.integers(min_value=0, max_value=10))
    names = [f"N{i}" for i in range(n)]
    directed = []
    undirected = []
    for i in range(n):
        for j in range(i + 1, n):
            kind = draw(st.sampled_from(["none", "fwd", "rev", "undir"]))
            if kind == "fwd":
                directed.append((names[i], names[j]))
            elif kind == "rev":
                directed.append((names[j], names[i]))
            elif kind == "undir":
                undirected.append((names[i], names[j]))
    return CausalGraph(names, directed, undirected)


@settings(max_examples=100, deadline=None)
@given(cpdag_graphs())
def test_json_round_trip_identity(g):
    assert from_json(to_json(g)) == g
