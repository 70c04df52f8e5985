from fractions import Fraction as F

import pytest

from mcdual import axioms as ax
from mcdual.algebra import Dual, FunctionAlgebra, Product, SabotagedScalar, Scalar
from mcdual.posets import chain


def test_single_axioms():
    rep = ax.check_axiom(Scalar(), ax.AxiomId("2c"), ax.Strategy.exhaustive(3))
    assert rep.passed and rep.checked == 9
    rep = ax.check_axiom(Scalar(), ax.AxiomId("8", (2, 1, F(1, 4))), ax.Strategy.exhaustive(2))
    assert rep.passed and rep.checked == 125


def test_sabotaged_table_counterexample():
    A = SabotagedScalar()
    rep = ax.check_axiom(A, ax.AxiomId("11"), ax.Strategy.exhaustive(3))
    assert not rep.passed
    assert ax.recheck(A, rep)
    assert rep.assignment == (F(1, 8), F(1, 8), F(1, 4))
    rep = ax.check_axiom(A, ax.AxiomId("11"), ax.Strategy.exhaustive(2))
    assert rep.counterexample == {"α": "1/4", "β": "1/4", "γ": "1/2"}
    assert ax.check_axiom(A, ax.AxiomId("9"), ax.Strategy.exhaustive(3)).passed


def test_ids_cover_all_groups():
    ids = ax.mc_axiom_ids(3, nm_bound=3)
    groups = {i.group for i in ids}
    assert {"5", "6", "7", "8", "9", "10", "11", "12"} <= groups
    assert sum(i.group == "8" for i in ids) == 16 * 9


@pytest.mark.parametrize(
    "A,strategy",
    [
        (Scalar(), ax.Strategy.exhaustive(2)),
        (Dual(Scalar()), ax.Strategy.exhaustive(2)),
        (FunctionAlgebra(chain(3)), ax.Strategy.sampled(3, 40, seed=1)),
        (Product([Scalar(), Scalar()]), ax.Strategy.sampled(2, 40, seed=2)),
    ],
    ids=["scalar", "dual", "chain3", "product"],
)
def test_models_pass(A, strategy):
    reports = ax.check_all_mc(A, strategy, nm_bound=2)
    reports += ax.check_mc_infty(A, strategy, n_bound=6, spec_samples=30) if not isinstance(A, Dual) else []
    reports += ax.check_derived(A, strategy)
    assert all(r.passed for r in reports), [r.line() for r in reports if not r.passed]


def test_mc_infty_scalar():
    reports = ax.check_mc_infty(Scalar(), ax.Strategy.exhaustive(3), n_bound=8, spec_samples=100)
    assert {r.axiom.group: r.passed for r in reports} == {"D1": True, "D2": True, "D3": True, "D4": True}


def test_sabotaged_fails_more_than_tables():
    reports = ax.check_all_mc(SabotagedScalar(), ax.Strategy.exhaustive(2), nm_bound=1)
    failed = {r.axiom.group for r in reports if not r.passed}
    assert "11" in failed and "6" in failed
    for r in reports:
        if not r.passed:
            assert ax.recheck(SabotagedScalar(), r)


def test_report_rendering():
    rep = ax.check_axiom(Scalar(), ax.AxiomId("1a"), ax.Strategy.exhaustive(1))
    assert rep.line().startswith("PASS 1a")
    assert rep.to_json()["passed"] is True
    s = ax.summarize([rep])
    assert s == {"total": 1, "passed": 1, "failed": 0, "failures": []}


def test_sampled_strategy_is_reproducible():
    A = FunctionAlgebra(chain(3))
    s = ax.Strategy.sampled(3, 20, seed=9)
    first = [r.to_json() for r in ax.check_derived(A, s)]
    assert first == [r.to_json() for r in ax.check_derived(A, s)]
