import pytest

from qcrystal.cartan import builtin
from qcrystal.freealg import FVector, binf, binf_data, um_basis, um_equal
from qcrystal.globalbasis import (
    BarDomain,
    DegreeBudgetExceeded,
    NonUniqueSolution,
    GlobalSolver,
    balanced_check,
    bar_vec,
    export_json,
    global_basis,
    integral_string_check,
    laurent_member,
    solve_global,
)
from qcrystal.graded import is_zero_residue
from qcrystal.qarith import ONE, Q, ZERO, qpow
from qcrystal.vrep import crystal, crystal_data, pi_lambda, v_basis

SL2, IMAG2, GKM2 = builtin("sl2"), builtin("imag2"), builtin("gkm2")
q = Q


def bar_any(v):
    # bar on rational coefficients, unlike bar_vec which insists on Laurent ones
    return FVector({w: c.bar() for w, c in v.terms.items()})


def labels(elem, datum):
    return [(lab, c) for lab, c in elem.export(datum)]


def test_bar_vec_examples():
    v = FVector.word((0, 1), q)
    assert bar_vec(v) == FVector.word((0, 1), qpow(-1))
    assert bar_vec(bar_vec(v)) == v
    fixed = FVector.word((0, 0), q + qpow(-1))
    assert bar_vec(fixed) == fixed
    with pytest.raises(BarDomain):
        bar_vec(FVector.word((0,), (ONE + q).inverse()))


@pytest.mark.parametrize("m", range(5))
def test_rank_one_real_divided_powers(m):
    data = crystal_data(SL2, (m,), m)
    elems = global_basis(data)
    for k in range(m + 1):
        (e,) = elems[(k,)]
        want = "1" if k == 0 else ("f1" if k == 1 else f"f1^({k})")
        assert labels(e, SL2) == [(want, "1")]
        assert e.ok()


def test_rank_one_imaginary_powers():
    data = crystal_data(IMAG2, (1,), 4)
    elems = global_basis(data)
    for k in range(5):
        (e,) = elems[(k,)]
        want = "1" if k == 0 else ("f1" if k == 1 else f"f1^{k}")
        assert labels(e, IMAG2) == [(want, "1")]


def test_highest_weight_at_degree_zero():
    data = crystal_data(GKM2, (1, 1), 2)
    e = solve_global(data, (0, 0), 0, D=0)
    assert e.coeffs == {(): ONE} and e.degree == 0


def test_binf_rank_one():
    data = binf_data(SL2, 3)
    elems = global_basis(data)
    assert [labels(elems[(k,)][0], SL2)[0][0] for k in range(4)] == ["1", "f1", "f1^(2)", "f1^(3)"]


@pytest.mark.parametrize("depth", [2, 3])
def test_gkm2_certificates_and_balance(depth):
    data = crystal_data(GKM2, (1, 1), depth)
    elems = global_basis(data)
    for alpha, es in elems.items():
        assert all(e.ok() for e in es), [e.certificates for e in es]
        rep = balanced_check(data, es, alpha)
        assert rep.passed, rep.failures


def test_elements_are_bar_invariant_vectors():
    lam = (1, 1)
    data = crystal_data(GKM2, lam, 3)
    for alpha, es in global_basis(data).items():
        space = v_basis(lam, alpha, GKM2)
        for e in es:
            fv = e.as_fvector(GKM2)
            assert space.reduce(fv) == list(e.coords)
            assert space.reduce(bar_any(fv)) == list(e.coords)


def test_binf_elements_bar_invariant_in_um():
    data = binf_data(GKM2, 3)
    for alpha, es in global_basis(data).items():
        for e in es:
            fv = e.as_fvector(GKM2)
            assert um_equal(bar_any(fv), fv, GKM2)


def test_binf_global_basis_projects_to_module_basis():
    lam = (1, 1)
    binf_d = binf_data(GKM2, 3)
    vd = crystal_data(GKM2, lam, 3)
    g_inf = global_basis(binf_d)
    g_lam = global_basis(vd)
    for alpha, es in g_inf.items():
        for k, e in enumerate(es):
            image = pi_lambda(e.as_fvector(GKM2), lam, GKM2)
            if vd.module.dim(alpha) == 0:
                continue
            res = vd.residue(alpha, image)
            if is_zero_residue(res):
                assert not any(image)
            else:
                j = vd.locate(alpha, res)
                assert j is not None
                assert image == list(g_lam[alpha][j].coords)


def test_balanced_trivial_weights():
    data = crystal_data(SL2, (3,), 3)
    elems = global_basis(data)
    for alpha in [(0,), (1,), (2,)]:
        assert balanced_check(data, elems[alpha], alpha).passed


def test_degree_budget():
    from qcrystal.harness import corrupt_lattice

    # with the lattice vector rescaled by 1/q, the lift of f v needs q + 1/q
    data = corrupt_lattice(crystal_data(SL2, (2,), 2), (1,), 0, "q^-1")
    with pytest.raises(DegreeBudgetExceeded):
        GlobalSolver(data, budget=0).solve((1,), 0, D=0)
    # and then q + 1/q + a*(1) works for every a: the broken lattice loses uniqueness
    with pytest.raises(NonUniqueSolution):
        GlobalSolver(data, budget=2).solve((1,), 0, D=0)


def test_laurent_member():
    vecs = [[ONE, ZERO], [ZERO, ONE]]
    assert laurent_member(vecs, [q + 1, qpow(-1)], 1) == [q + 1, qpow(-1)]
    assert laurent_member(vecs, [(ONE - q).inverse(), ZERO], 2) is None


def test_integral_string_rank_one():
    data = crystal_data(SL2, (3,), 3)
    _, g = crystal(SL2, (3,), 3)
    elems = global_basis(data)
    for k in range(4):
        for n in range(0, k + 1):
            assert integral_string_check(data, g, elems[(k,)], 0, n, (k,)).passed
        rep = integral_string_check(data, g, elems[(k,)], 0, k + 1, (k,))
        assert rep.passed and rep.instances == 0


def test_integral_strings_gkm2():
    data = crystal_data(GKM2, (1, 1), 3)
    _, g = crystal(GKM2, (1, 1), 3)
    elems = global_basis(data)
    for alpha, es in elems.items():
        for i in range(2):
            for n in range(1, 3):
                rep = integral_string_check(data, g, es, i, n, alpha)
                assert rep.passed, rep.failures


def test_export_is_stable():
    data = crystal_data(GKM2, (1, 1), 2)
    a = export_json(global_basis(data), GKM2, {"lambda": [1, 1]})
    b = export_json(global_basis(data), GKM2, {"lambda": [1, 1]})
    assert a == b and a.startswith('{"schema":"global/1"')
