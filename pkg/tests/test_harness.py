from importlib import resources

import pytest

from qcrystal.cartan import builtin
from qcrystal.harness import (
    INVARIANTS,
    LARGE_LAMBDA,
    STATEMENTS,
    CaseContext,
    StatementReport,
    check_key_lemma,
    check_pq_lemma,
    check_statement,
    corrupt_lattice,
    crystal_gram,
    load_config,
    run_suite,
    sample_lattice_elements,
)
from qcrystal.vrep import crystal_data


def data_path(name):
    return resources.files("qcrystal") / "data" / name


def test_report_vacuity():
    rep = StatementReport("A", "sl2", [1], [1], 3)
    assert rep.vacuous and not rep.passed
    rep.instances = 2
    assert rep.passed
    rep.fail(alpha=[1], value=3)
    assert not rep.passed and rep.failures == [{"alpha": [1], "value": 3}]
    na = StatementReport("key_lemma", "sl2", [], [1], 3, applicable=False)
    assert not na.vacuous and na.passed


def test_empty_suite_is_not_a_pass():
    rep = run_suite({"cases": []})
    assert not rep.passed
    assert "VACUOUS" in rep.to_text()


@pytest.mark.parametrize("sid", STATEMENTS)
def test_each_statement_gkm2(sid):
    rep = check_statement(sid, builtin("gkm2"), (1, 1), (0, 1), 2)
    assert rep.passed, rep.failures
    assert rep.instances > 0


@pytest.mark.parametrize("sid", LARGE_LAMBDA)
def test_large_lambda_statements(sid):
    rep = check_statement(sid, builtin("gkm2"), (4, 4), (0, 1), 2)
    assert rep.passed and rep.instances > 0


def test_default_config_passes():
    cfg = load_config(data_path("default.toml"))
    report = run_suite(cfg)
    assert report.passed, report.to_text()
    names = {r.statement for r in report.reports}
    assert set(STATEMENTS) <= names and set(INVARIANTS) <= names
    assert all(r.instances > 0 for r in report.reports if r.applicable)


def test_negative_control_fails_with_witness():
    cfg = load_config(data_path("corrupted.toml"))
    report = run_suite(cfg)
    assert not report.passed
    bad = report.failures()
    assert bad and all(r.failures for r in bad)
    assert "witness:" in report.to_text()


def test_corrupt_lattice_only_touches_one_vector():
    data = crystal_data(builtin("sl2"), (2,), 2)
    bad = corrupt_lattice(data, (1,), 0, "q^-1")
    assert bad.lattices[(0,)] is data.lattices[(0,)]
    assert bad.lattices[(1,)].vectors != data.lattices[(1,)].vectors


@pytest.mark.parametrize("name", ["sl2", "imag2", "gkm2"])
def test_pq_lemma(name):
    rep = check_pq_lemma(builtin(name), 2, 6)
    assert rep.passed, rep.failures


def test_pq_lemma_needs_large_lambda():
    # lambda(h) = 1 truncates the sl2 string at length 1, so (f^2, f^2) has no partner
    rep = check_pq_lemma(builtin("sl2"), 2, 1)
    assert not rep.passed


def test_key_lemma():
    assert check_key_lemma(builtin("gkm2"), (0, 1), 3).passed
    rank_one = check_key_lemma(builtin("sl2"), (1,), 3)
    assert not rank_one.applicable and rank_one.passed


def test_crystal_gram_identity_when_diagonal_nonzero():
    g = crystal_gram(crystal_data(builtin("sl2"), (3,), 3), (2,))
    assert g == [[1]]


def test_sampled_elements_deterministic():
    data = crystal_data(builtin("gkm2"), (1, 1), 3)
    a = sample_lattice_elements(data, 10, 3, seed=5)
    b = sample_lattice_elements(data, 10, 3, seed=5)
    assert [(x, [str(c) for c in v]) for x, v in a] == [(x, [str(c) for c in v]) for x, v in b]
    for alpha, vec in a:
        assert data.lattices[alpha].contains(vec)


def test_context_psi_adjoint_shape():
    ctx = CaseContext(builtin("gkm2"), (1, 1), (0, 1), 2)
    for alpha in [(0, 0), (1, 0), (1, 1)]:
        p = ctx.psi(alpha)
        assert p.rows == ctx.Vsum.module.dim(alpha)


def test_membership_invariant_seeded():
    from qcrystal.harness import check_membership

    ctx = CaseContext(builtin("gkm2"), (1, 1), (0, 1), 3)
    a, b = check_membership(ctx, count=20, seed=3), check_membership(ctx, count=20, seed=3)
    assert a.passed and a.instances == b.instances > 0
    bad = CaseContext(builtin("gkm2"), (1, 1), (0, 1), 3, corrupt={"alpha": [1, 0], "factor": "q^-1"})
    assert not check_membership(bad, count=40, seed=3).passed
