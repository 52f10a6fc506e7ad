import numpy as np
import pytest

from cmoments.errors import UnknownSuiteError
from cmoments.harness import (
    SUITES,
    Relation,
    make_report,
    matrix_digest,
    resolve_suites,
    run_examples,
    run_suite,
    three_atom_observations,
    trial_rng,
)


def test_report_relations():
    assert make_report("x", "d", 1.0, 1.0 + 1e-7, "Eq", 1e-6).passed
    assert not make_report("x", "d", 1.0, 1.1, Relation.EQ, 1e-6).passed
    le = make_report("x", "d", 1.0, 2.0, "Le", 1e-9)
    assert le.passed and le.residual == -1.0
    ge = make_report("x", "d", 1.0, 2.0, "Ge", 1e-9)
    assert not ge.passed and ge.residual == 1.0
    assert make_report("x", "d", 2.0, 2.0 + 1e-10, "Ge", 1e-9).passed


def test_report_dict_fields():
    d = make_report("id", "dig", 1, 2, "Le", 0.1).to_dict()
    assert list(d) == ["check_id", "inputs_digest", "lhs", "rhs", "relation", "residual", "tolerance", "passed"]
    assert d["relation"] == "Le"


def test_digest_and_rng_are_deterministic():
    A = np.eye(3)
    assert matrix_digest(A) == matrix_digest(A.copy()) and len(matrix_digest(A)) == 16
    assert matrix_digest(A) != matrix_digest(2 * A)
    a = trial_rng(1, "hermitian_weak", 3).standard_normal(4)
    assert np.array_equal(a, trial_rng(1, "hermitian_weak", 3).standard_normal(4))
    assert not np.array_equal(a, trial_rng(1, "hermitian_weak", 4).standard_normal(4))
    assert not np.array_equal(a, trial_rng(1, "hermitian_strong", 3).standard_normal(4))


def test_resolve_suites():
    assert resolve_suites("all") == list(SUITES)
    assert resolve_suites("normal-strong") == ["normal_strong"]
    with pytest.raises(UnknownSuiteError):
        resolve_suites("nope")


def test_examples_suite():
    reports = run_examples()
    assert len(reports) == 6
    status = {r.check_id: r.passed for r in reports}
    assert status["cube_roots.strong"] and status["cube_roots.weak"]
    assert status["diag_1_i_0.lower"] and status["diag_1_m1.k2"] and status["diag_1_m1.k4"]
    # the stated tracial value is compared as given; it does not match direct evaluation
    tracial = next(r for r in reports if r.check_id == "diag_1_i_0.tracial")
    assert tracial.lhs == pytest.approx(0.6397943678888283, abs=1e-15)
    assert not tracial.passed


@pytest.mark.parametrize("suite", ["hermitian_weak", "hermitian_strong", "nonnormal_weak"])
def test_small_suites_pass(suite):
    reports = run_suite(suite, seed=7, trials=2, k_list=(2, 3))
    assert reports and all(r.passed for r in reports)


def test_suite_is_reproducible():
    a = [r.to_dict() for r in run_suite("normal_strong", seed=3, trials=2, k_list=(2, 5))]
    b = [r.to_dict() for r in run_suite("normal_strong", seed=3, trials=2, k_list=(2, 5))]
    assert a == b


def test_normal_strong_holds_for_small_k():
    # the disc-radius formulas are checked at k = 2, 3, where they are sharp
    reports = run_suite("normal_strong", seed=11, trials=3, k_list=(2, 3))
    assert all(r.passed for r in reports)


def test_three_atom_observations_are_consistent():
    found = three_atom_observations(seed=1, trials=4, k_list=(2, 4))
    assert found == three_atom_observations(seed=1, trials=4, k_list=(2, 4))
    for row in found:
        assert row["three_atom"] - row["two_atom"] == pytest.approx(row["excess"]) and row["excess"] > 1e-6
