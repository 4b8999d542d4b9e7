import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import laurent_polys
from oracles import plain_power_rank, random_rationals, rank_one_norm
from qcrystal.cartan import builtin, roots_up_to
from qcrystal.crystal import INF
from qcrystal.freealg import FVector
from qcrystal.graded import shift
from qcrystal.linalg import QMatrix, matvec
from qcrystal.qarith import ONE, ZERO, qbrace, qint, qpow
from qcrystal.vrep import (
    NotDominant,
    apply_e,
    cform,
    crystal,
    crystal_data,
    fn_dimension,
    module,
    pi_lambda,
    specialized_rank,
    v_basis,
)

SL2, IMAG2, HEIS, GKM2, MONSTER = (builtin(n) for n in ["sl2", "imag2", "heis", "gkm2", "monster3"])


def w(*letters):
    return FVector.word(letters)


def test_e_on_f_v_sl2():
    assert apply_e(0, w(0), (1,), SL2) == FVector.one()


@pytest.mark.parametrize("lam", [1, 2, 3])
@pytest.mark.parametrize("n", [1, 2, 3])
def test_imaginary_e_on_powers(lam, n):
    d = IMAG2
    c = d.c(0)
    got = v_basis((lam,), (n - 1,), d).reduce(apply_e(0, w(*([0] * n)), (lam,), d))
    want_scalar = qbrace(n, 0, d) * qint(lam + c * (n - 1), 0, d)
    want = v_basis((lam,), (n - 1,), d).reduce(w(*([0] * (n - 1))).scale(want_scalar))
    assert got == want


def test_imaginary_e_kills_low_pairing():
    m = module(MONSTER, (1, 1, 1), 3)
    for alpha in roots_up_to(3, 3):
        if m.dim(alpha) and m.pairing(1, alpha) <= 2 * MONSTER.c(1) and alpha[1]:
            assert m.e_matrix(1, alpha).is_zero()


def test_cform_examples():
    assert cform(FVector.one(), FVector.one(), (2,), SL2) == ONE
    assert cform(w(0), w(0), (1,), SL2) == ONE
    # closed form for a_ii = -2, lambda(h) = 1 gives 1
    assert cform(w(0), w(0), (1,), IMAG2) == ONE
    assert cform(w(0), w(0), (2,), IMAG2) == ONE + qpow(2)


@pytest.mark.parametrize("datum", [SL2, IMAG2, HEIS, builtin("sl2").__class__(A=((-4,),), s=(1,))])
@pytest.mark.parametrize("a", [0, 1, 2, 4])
def test_rank_one_norms_match_closed_form(datum, a):
    m = module(datum, (a,), 4)
    for n in range(1, 5):
        if m.dim((n,)) == 0:
            assert rank_one_norm(datum, a, n) == ZERO
            continue
        scale = ONE
        if datum.A[0][0] == 2:
            for k in range(1, n + 1):
                scale = scale * qint(k, 0, datum)
        vec = [scale.inverse()] if [tuple(x) for x in m.space((n,)).basis_words] == [(0,) * n] else None
        assert vec is not None
        assert m.cform((n,), vec, vec) == rank_one_norm(datum, a, n)


def test_sl2_dims():
    for mm in range(4):
        m = module(SL2, (mm,), 5)
        assert [m.dim((n,)) for n in range(6)] == [1 if n <= mm else 0 for n in range(6)]


def test_imaginary_zero_pairing_kills():
    assert v_basis((0,), (1,), IMAG2).dim == 0
    assert pi_lambda(w(0), (0,), IMAG2) == []


def test_pi_lambda_examples():
    assert pi_lambda(FVector.one(), (1,), SL2) == [ONE]
    assert v_basis((1,), (2,), SL2).dim == 0


def test_gkm2_dims_match_specialization():
    for alpha in roots_up_to(2, 3):
        exact = v_basis((0, 1), alpha, GKM2).dim
        for x in random_rationals(3, seed=7):
            assert specialized_rank(GKM2, (0, 1), alpha, x) == exact


def test_not_dominant():
    with pytest.raises(NotDominant):
        module(SL2, (-1,), 2)


@st.composite
def module_vectors(draw):
    name, lam = draw(st.sampled_from([("gkm2", (1, 1)), ("gkm2", (0, 2)), ("monster3", (1, 0, 1)), ("imag2", (2,))]))
    d = builtin(name)
    m = module(d, lam, 3)
    alphas = [a for a in roots_up_to(d.n, 3) if m.dim(a)]
    alpha = draw(st.sampled_from(alphas))
    coords = draw(st.lists(laurent_polys(max_terms=2, lo=-1, hi=1, coeff=2), min_size=m.dim(alpha), max_size=m.dim(alpha)))
    return m, alpha, coords


@given(module_vectors(), st.data())
def test_contravariance(mv, data):
    m, alpha, v = mv
    for i in range(m.n):
        beta = shift(alpha, i, -1)
        if beta is None or m.dim(beta) == 0:
            continue
        u = data.draw(st.lists(laurent_polys(max_terms=2, lo=-1, hi=1, coeff=2), min_size=m.dim(beta), max_size=m.dim(beta)))
        assert m.cform(alpha, m.apply_f(i, beta, u), v) == m.cform(beta, u, m.qKe(i, alpha, v))


@given(module_vectors())
def test_istring_reconstructs(mv):
    m, alpha, v = mv
    for i in range(m.n):
        total = [ZERO] * m.dim(alpha)
        for n, un in m.istring(i, alpha, v):
            beta = shift(alpha, i, -n)
            if shift(beta, i, -1):
                assert not any(m.apply_e(i, beta, un))
            total = [a + b for a, b in zip(total, matvec(m.fdiv(i, beta, n), un))]
        assert total == list(v)


@given(module_vectors())
def test_e_tilde_undoes_f_tilde(mv):
    m, alpha, v = mv
    for i in range(m.n):
        up = shift(alpha, i, 1)
        if not m.in_range(up):
            continue
        fv = matvec(m.f_tilde(i, alpha), v)
        back = matvec(m.e_tilde(i, up), fv) if m.dim(up) else [ZERO] * m.dim(alpha)
        # components whose string ends at f_i^{(n)} u_n are lost
        expect = list(v)
        for n, un in m.istring(i, alpha, v):
            beta = shift(alpha, i, -n)
            if m.dim(up) == 0 or not any(matvec(m.fdiv(i, beta, n + 1), un)):
                expect = [a - b for a, b in zip(expect, matvec(m.fdiv(i, beta, n), un))]
        assert back == expect


def test_qi_op():
    m = module(GKM2, (0, 1), 3)
    v = [ONE]
    assert m.Qi_op(1, (0, 0), v) == v
    assert m.Qi_op(1, (0, 1), [ONE]) == [ONE + ONE]


def test_sl2_crystal_chain():
    for mm in range(6):
        _, g = crystal(SL2, (mm,), mm + 1)
        nodes = sorted(g.nodes, key=lambda b: b.alpha)
        assert len(nodes) == mm + 1
        assert [(b.eps[0], b.phi[0]) for b in nodes] == [(l, mm - l) for l in range(mm + 1)]


def test_imaginary_crystals():
    _, g = crystal(IMAG2, (0,), 4)
    assert len(g.nodes) == 1 and not g.edges
    _, g = crystal(IMAG2, (1,), 4)
    assert sorted(b.eps[0] for b in g.nodes) == [0, 1, 2, 3, 4]
    assert all(b.phi[0] is INF for b in g.nodes)


def test_string_counts_gkm2():
    data = crystal_data(GKM2, (1, 1), 4)
    g = data.graph()
    m = data.module
    for alpha in m.alphas:
        for i in range(2):
            for n in range(1, 4):
                count = sum(1 for b in g.nodes_at(alpha) if b.eps[i] >= n)
                assert fn_dimension(m, i, alpha, n) == count == plain_power_rank(m, i, alpha, n)


@pytest.mark.parametrize("name,lam,depth", [("gkm2", (2, 1), 5), ("monster3", (1, 0, 2), 3)])
def test_phi_formula_matches_string_length(name, lam, depth):
    d = builtin(name)
    _, g = crystal(d, lam, depth)
    checked = 0
    for b in g.nodes:
        for i in d.real_indices:
            l, cur = 0, b.id
            while True:
                nxt = g.f(cur, i)
                if nxt is None:
                    break
                l, cur = l + 1, nxt
            if sum(g.by_id[cur].alpha) == depth:
                continue  # the string may continue past the cutoff
            assert b.phi[i] == l, (b.id, i)
            checked += 1
    assert checked > 0
