import json

import pytest
from hypothesis import given
from hypothesis import strategies as st

from qcrystal.cartan import builtin
from qcrystal.crystal import (
    INF,
    CrystalGraph,
    CrystalNode,
    DepthInsufficient,
    graph_isomorphic,
    parse,
    serialize,
    tensor_crystal_algebraic,
    tensor_crystal_combinatorial,
    tensor_graphs,
    tensor_rule_edges,
)
from qcrystal.freealg import binf
from qcrystal.vrep import crystal

SL2, IMAG2, GKM2, MONSTER = (builtin(n) for n in ["sl2", "imag2", "gkm2", "monster3"])


def components(g):
    adj = {b.id: set() for b in g.nodes}
    for s, d, _ in g.edges:
        adj[s].add(d)
        adj[d].add(s)
    seen, sizes = set(), []
    for start in adj:
        if start in seen:
            continue
        stack, size = [start], 0
        seen.add(start)
        while stack:
            x = stack.pop()
            size += 1
            for y in adj[x] - seen:
                seen.add(y)
                stack.append(y)
        sizes.append(size)
    return sorted(sizes)


def chain(k):
    nodes = [CrystalNode(f"n{j}", (j,), (k - 1,), (j,), (k - 1 - j,)) for j in range(k)]
    edges = [(f"n{j}", f"n{j + 1}", 0) for j in range(k - 1)]
    return CrystalGraph(nodes, edges, {"labels": ["1"], "rank": 1, "depth": k})


def test_tensor_rule_examples_sl2():
    _, g = crystal(SL2, (1,), 2)
    v = next(b for b in g.nodes if b.alpha == (0,))
    fv = next(b for b in g.nodes if b.alpha == (1,))
    _, f_target = tensor_rule_edges(v, v, 0, g, g)
    assert f_target == (fv.id, v.id)
    _, f_target = tensor_rule_edges(fv, v, 0, g, g)
    assert f_target == (fv.id, fv.id)


def test_infinite_phi_always_acts_left():
    _, g1 = crystal(IMAG2, (1,), 3)
    _, g2 = crystal(IMAG2, (1,), 3)
    b1 = next(b for b in g1.nodes if b.alpha == (1,))
    for b2 in g2.nodes:
        if sum(b2.alpha) + 2 > 3:
            continue
        _, f_target = tensor_rule_edges(b1, b2, 0, g1, g2)
        assert f_target is not None and f_target[1] == b2.id


def test_sl2_clebsch_gordan():
    comb, alg = tensor_graphs(SL2, (1,), (1,), 2)
    assert len(comb.nodes) == 4
    assert components(comb) == [1, 3]
    assert graph_isomorphic(comb, alg).isomorphic


def test_tensor_with_trivial_crystal():
    _, g = crystal(GKM2, (1, 1), 3)
    _, triv = crystal(GKM2, (0, 0), 3)
    t = tensor_crystal_combinatorial(g, triv, GKM2, 3)
    assert graph_isomorphic(t, g).isomorphic


@pytest.mark.parametrize(
    "datum,lam,mu",
    [(SL2, (1,), (1,)), (GKM2, (1, 1), (0, 1)), (GKM2, (1, 0), (0, 1)), (IMAG2, (1,), (1,)), (MONSTER, (1, 0, 0), (0, 0, 1))],
)
def test_combinatorial_matches_algebraic(datum, lam, mu):
    comb, alg = tensor_graphs(datum, lam, mu, 3)
    iso = graph_isomorphic(comb, alg)
    assert iso.isomorphic, iso.certificate
    assert comb == alg


def test_algebraic_highest_weight_unique_at_zero():
    alg = tensor_crystal_algebraic(GKM2, (1, 1), (0, 1), 3)
    tops = [b for b in alg.nodes if all(alg.e(b.id, i) is None for i in range(2)) and not any(b.alpha)]
    assert len(tops) == 1 and tops[0].id == "0.0#0|0.0#0"


def test_imaginary_tensor_moves_left():
    alg = tensor_crystal_algebraic(IMAG2, (1,), (1,), 3)
    cur = "0#0|0#0"
    for l in range(3):
        nxt = alg.f(cur, 0)
        assert nxt == f"{l + 1}#0|0#0"
        cur = nxt


def test_tensor_associativity():
    _, a = crystal(GKM2, (1, 0), 3)
    _, b = crystal(GKM2, (0, 1), 3)
    _, c = crystal(GKM2, (1, 1), 3)
    left = tensor_crystal_combinatorial(tensor_crystal_combinatorial(a, b, GKM2, 3), c, GKM2, 3)
    right = tensor_crystal_combinatorial(a, tensor_crystal_combinatorial(b, c, GKM2, 3), GKM2, 3)
    assert graph_isomorphic(left, right).isomorphic


def test_depth_guard():
    _, a = crystal(GKM2, (1, 0), 2)
    with pytest.raises(DepthInsufficient):
        tensor_crystal_combinatorial(a, a, GKM2, 3)


def test_isomorphism_examples():
    g = chain(3)
    iso = graph_isomorphic(g, g)
    assert iso.isomorphic and all(k == v for k, v in iso.witness.items())
    iso = graph_isomorphic(chain(3), chain(2))
    assert not iso.isomorphic and "node" in iso.certificate


def test_isomorphism_detects_relabelled_edge():
    g = chain(3)
    h = CrystalGraph(g.nodes, [("n0", "n1", 0)], g.meta)
    assert not graph_isomorphic(g, h).isomorphic


def test_serialize_examples():
    empty = CrystalGraph([], [], {})
    d = json.loads(serialize(empty, "json"))
    assert d["nodes"] == [] and d["edges"] == [] and d["schema"] == "crystal/1"
    _, g = crystal(SL2, (1,), 1)
    d = json.loads(serialize(g, "json"))
    assert len(d["nodes"]) == 2 and [e["i"] for e in d["edges"]] == ["1"]
    dot = serialize(g, "dot").decode()
    assert dot.startswith("digraph crystal {") and '[label="1"]' in dot and '[label="(1)"]' in dot


def test_infinity_rendered_as_inf():
    _, g = crystal(IMAG2, (1,), 2)
    text = serialize(g, "json").decode()
    assert '"inf"' in text and "Infinity" not in text


@given(st.sampled_from([("sl2", (2,)), ("imag2", (1,)), ("gkm2", (1, 1)), ("monster3", (0, 1, 0))]), st.integers(0, 3))
def test_round_trip_and_byte_stability(case, depth):
    name, lam = case
    _, g = crystal(builtin(name), lam, depth)
    raw = serialize(g, "json")
    back = parse(raw)
    assert back == g
    assert serialize(back, "json") == raw
    assert serialize(g, "dot") == serialize(parse(raw), "dot")
    assert [b.phi for b in back.ordered().nodes] == [b.phi for b in g.ordered().nodes]


def test_binf_has_infinite_phi_on_imaginary():
    _, g = binf(GKM2, 2)
    assert all(b.phi[1] is INF for b in g.nodes)
