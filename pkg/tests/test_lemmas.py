import numpy as np
import pytest

from boundkey.lemmas import (lemma_a1_suite, lemma_a2_scan, lemma_a2_suite, lemma_v1, lemma_v2,
                             lemma_v3, lemma_v3_conditions, lemma_v4, lemma_v_suite, m_matrix,
                             m_tilde_matrix, perturbed_key_matrix, ppt_suite)
from boundkey.linalg import op_abs
from boundkey.states import construction_one, ghz, seed_unitary, smolin_family, x_matrix


def test_m_matrices_layout():
    a, b = np.eye(1), 2 * np.eye(1)
    assert np.allclose(m_matrix(a, b, 3), [[2, 2, 2], [2, 2, 2], [2, 2, 2]])
    assert np.allclose(m_tilde_matrix(a, b, 3), [[2, 2, 2], [2, 1, 0], [2, 0, 1]])
    with pytest.raises(ValueError):
        m_matrix(np.eye(2), np.eye(3), 2)


def test_a1_boundary_case_scalar():
    # A = |B| exactly: both forms sit at the edge of positivity
    b = np.array([[1j]])
    for n in (2, 3, 4):
        assert np.linalg.eigvalsh(m_matrix(op_abs(b), b, n)).min() > -1e-12
        assert np.linalg.eigvalsh(m_tilde_matrix(op_abs(b), b, n)).min() > -1e-12


def test_a1_fails_without_domination():
    b = np.array([[1.0]])
    assert np.linalg.eigvalsh(m_matrix(0.5 * b, b, 2)).min() < 0


def test_a1_suite_small():
    rep = lemma_a1_suite(50, 1, 5)
    assert rep.passed
    assert len(rep.cases) == 50


def test_a2():
    rng = np.random.default_rng(0)
    a = perturbed_key_matrix(3, 1e-3, rng)
    res = lemma_a2_scan(a, 0, 1e-3)
    assert res["passed"]
    with pytest.raises(ValueError):
        lemma_a2_scan(np.eye(3) / 3, 0, 1e-3)
    assert lemma_a2_suite(trials=5).passed


@pytest.mark.parametrize("dim,n", [(2, 2), (3, 2), (2, 3), (3, 3)])
def test_v1_v2(dim, n):
    assert lemma_v1(dim, n).passed
    assert lemma_v2(dim, n).passed


def test_v3_holds_for_usable_dimensions():
    for dim in (3, 4):
        for n in (2, 3):
            c = lemma_v3(dim, n).cases[0]
            assert c["conditions"] and c["conclusion"]


def test_v3_conditions_fail_for_qubit_shield():
    res = lemma_v3_conditions(x_matrix(2, 3))
    assert not res["conditions"]
    assert res["norm_gap"] == pytest.approx(0.0, abs=1e-12)
    assert lemma_v3(2, 3).passed


def test_v4_equality_two_parties():
    rep = lemma_v4(seed_unitary("vandermonde", 3), 2)
    assert rep.passed


def test_v4_three_parties_only_inequality():
    rep = lemma_v4(seed_unitary("vandermonde", 3), 3)
    assert rep.cases[0]["passed"]
    assert not rep.passed
    assert all(c["inequality_margin"] > -1e-10 for c in rep.cases)


def test_v_suite_dispatch():
    assert lemma_v_suite("V1", 2, 2).suite == "V1"
    with pytest.raises(ValueError):
        lemma_v_suite("V9", 2, 2)


def test_ppt_suite_reports():
    assert ppt_suite(construction_one(3, 2)).passed
    rep = ppt_suite(ghz(3, 2))
    assert not rep.passed
    rep = ppt_suite(smolin_family(2))
    assert not rep.passed
    assert rep.worst_margin == pytest.approx(-0.125)
    js = rep.to_json()
    assert js["suite"] == "PPT" and len(js["cases"]) == 4
