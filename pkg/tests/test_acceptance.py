"""The nine acceptance criteria, each timed against its budget.

Every test prints one PASS/FAIL line; the lines are repeated in the pytest
terminal summary.  Run standalone with ``python tests/test_acceptance.py``.
"""

import time
from contextlib import contextmanager
from importlib import resources

import pytest

from oracles import plain_power_rank, random_rationals
from qcrystal.cartan import builtin, roots_up_to
from qcrystal.crystal import INF, graph_isomorphic, tensor_graphs
from qcrystal.freealg import FVector, binf, binf_data, kform, star, um_basis
from qcrystal.globalbasis import balanced_check, global_basis
from qcrystal.harness import crystal_gram, load_config, run_suite, sample_lattice_elements
from qcrystal.qarith import ONE, qpow
from qcrystal.vrep import crystal, crystal_data, fn_dimension, specialized_rank

RESULTS = []


@contextmanager
def criterion(num, title, budget):
    start = time.perf_counter()
    status, detail = "FAIL", ""
    try:
        yield
        elapsed = time.perf_counter() - start
        if elapsed < budget:
            status = "PASS"
        else:
            detail = f" (over budget {budget:g} s)"
    except Exception as exc:
        elapsed = time.perf_counter() - start
        detail = f" ({type(exc).__name__})"
        raise
    finally:
        line = f"criterion {num}: {status} {title} [{elapsed:.2f} s]{detail}"
        RESULTS.append(line)
        print(line)
    assert status == "PASS", line


def test_criterion_1_sl2_chains():
    d = builtin("sl2")
    with criterion(1, "sl2 chains m = 0..5", 1.0):
        for m in range(6):
            _, g = crystal(d, (m,), m + 2)
            nodes = g.ordered().nodes
            assert len(nodes) == m + 1
            assert len(g.edges) == m
            for l, b in enumerate(nodes):
                assert b.alpha == (l,)
                assert b.eps == (l,) and b.phi == (m - l,)
                if l < m:
                    assert g.f(b.id, 0) == nodes[l + 1].id


def test_criterion_2_imaginary_rank_one():
    d = builtin("imag2")
    with criterion(2, "imag2 singleton and 7-chain with phi = inf", 1.0):
        _, g = crystal(d, (0,), 4)
        assert len(g.nodes) == 1 and not g.edges
        _, g = crystal(d, (3,), 6)
        nodes = g.ordered().nodes
        assert len(nodes) == 7 and len(g.edges) == 6
        for l, b in enumerate(nodes):
            assert b.eps == (l,) and b.phi == (INF,)
            if l < 6:
                assert g.f(b.id, 0) == nodes[l + 1].id


def test_criterion_3_gram_ranks():
    xs = random_rationals(3, seed=2024)
    with criterion(3, "Gram rank = specialized rank = #B (gkm2, monster3, |alpha| <= 4)", 120.0):
        for name, lam in [("gkm2", (1, 1)), ("monster3", (1, 0, 1))]:
            d = builtin(name)
            data = crystal_data(d, lam, 4)
            for alpha in roots_up_to(d.n, 4):
                dim = data.module.dim(alpha)
                assert dim == len(data.B[alpha]), (name, alpha)
                for x in xs:
                    assert specialized_rank(d, lam, alpha, x) == dim, (name, alpha, x)


def test_criterion_4_tensor_rule():
    cases = [("sl2", (1,), (1,)), ("gkm2", (1, 1), (0, 1)), ("monster3", (1, 0, 0), (0, 1, 0))]
    with criterion(4, "combinatorial and algebraic tensor crystals isomorphic at depth 3", 120.0):
        for name, lam, mu in cases:
            comb, alg = tensor_graphs(builtin(name), lam, mu, 3)
            iso = graph_isomorphic(comb, alg)
            assert iso.isomorphic, (name, iso.certificate)
            assert len(comb.nodes) > 1


def test_criterion_5_string_count():
    d = builtin("gkm2")
    with criterion(5, "dim f_i^n V = #{eps_i >= n} on gkm2", 120.0):
        for lam in [(1, 1), (2, 1), (0, 2)]:
            data, g = crystal(d, lam, 4)
            m = data.module
            for alpha in m.alphas:
                nodes = g.nodes_at(alpha)
                for i in range(d.n):
                    for n in range(1, 4):
                        count = sum(1 for b in nodes if b.eps[i] >= n)
                        assert fn_dimension(m, i, alpha, n) == count, (lam, alpha, i, n)
                        assert plain_power_rank(m, i, alpha, n) == count, (lam, alpha, i, n)


def _labels(elems, datum):
    return {a: [e.export(datum) for e in es] for a, es in elems.items() if es}


def test_criterion_6_global_bases():
    sl2, imag2, gkm2 = builtin("sl2"), builtin("imag2"), builtin("gkm2")
    with criterion(6, "global bases: rank one, gkm2 certificates and balance", 300.0):
        for m in range(6):
            got = _labels(global_basis(crystal_data(sl2, (m,), m + 1)), sl2)
            want = {(k,): [[["1" if k == 0 else ("f1" if k == 1 else f"f1^({k})"), "1"]]] for k in range(m + 1)}
            assert got == want
        for a in (1, 2, 3):
            got = _labels(global_basis(crystal_data(imag2, (a,), 4)), imag2)
            want = {(k,): [[["1" if k == 0 else ("f1" if k == 1 else f"f1^{k}"), "1"]]] for k in range(5)}
            assert got == want
        data = crystal_data(gkm2, (1, 1), 3)
        elems = global_basis(data)
        assert sum(len(es) for es in elems.values()) == sum(len(b) for b in data.B.values())
        for alpha, es in elems.items():
            assert all(e.ok() for e in es), alpha
            assert balanced_check(data, es, alpha).passed, alpha


def test_criterion_7_statement_suite():
    base = resources.files("qcrystal") / "data"
    with criterion(7, "statements A-O on four data, negative control fails", 600.0):
        report = run_suite(load_config(base / "default.toml"))
        assert report.passed, report.to_text()
        seen = {(r.statement, r.datum) for r in report.reports}
        for name in ("sl2", "imag2", "gkm2", "monster3"):
            for sid in "ABCDEFGHIJKLMNO":
                assert (sid, name) in seen
        assert all(r.instances > 0 for r in report.reports if r.statement in "ABCDEFGHIJKLMNO")
        big = [r for r in report.reports if r.statement in "LMNO" and r.lam == [5] * len(r.lam)]
        assert len(big) == 16
        bad = run_suite(load_config(base / "corrupted.toml"))
        assert not bad.passed
        assert any(r.failures for r in bad.reports)


def test_criterion_8_orthogonality():
    cases = [("sl2", (3,)), ("imag2", (2,)), ("gkm2", (1, 1)), ("monster3", (1, 0, 1))]
    with criterion(8, "crystal-limit Gram diagonal, positive integers, 1 when a_ii != 0", 120.0):
        for name, lam in cases:
            d = builtin(name)
            for data in (crystal_data(d, lam, 3), binf_data(d, 3)):
                for alpha in data.module.alphas:
                    g = crystal_gram(data, alpha)
                    for a, row in enumerate(g):
                        for b, x in enumerate(row):
                            if a != b:
                                assert x == 0, (name, alpha, a, b)
                            else:
                                assert x > 0 and x.denominator == 1, (name, alpha, x)
                                if d.all_real_nonzero_diagonal():
                                    assert x == 1, (name, alpha, x)


def _as_fvector(space, coords):
    out = FVector()
    for w, c in zip(space.basis_words, coords):
        if c:
            out = out + FVector.word(w, c)
    return out


def test_criterion_9_star_invariance():
    d = builtin("gkm2")
    with criterion(9, "star images of 100 L(inf) samples stay in L(inf)", 120.0):
        data = binf_data(d, 4)
        samples = sample_lattice_elements(data, 100, 4, seed=9)
        assert len(samples) == 100
        for alpha, coords in samples:
            space = um_basis(alpha, d)
            u = _as_fvector(space, coords)
            us = star(u)
            norm = kform(us, us, d)
            assert not norm or norm.val0() >= 0
            star_coords = space.reduce(us)
            assert data.lattices[alpha].contains(star_coords)
            # membership by the form agrees with lattice membership, also off the lattice
            for scale in (ONE, qpow(-1)):
                v = [scale * x if x else x for x in star_coords]
                vn = kform(_as_fvector(space, v), _as_fvector(space, v), d)
                in_form = not vn or vn.val0() >= 0
                assert in_form == data.lattices[alpha].contains(v)


if __name__ == "__main__":
    import sys

    sys.exit(pytest.main([__file__, "-q"]))
