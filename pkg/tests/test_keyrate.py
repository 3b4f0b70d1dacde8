import math

import numpy as np
import pytest

from boundkey.cq import CqState, cq_trace_distance, measure_to_cq
from boundkey.keyrate import (CURVE_HEADER, classical_mutual_information, cq_one, cq_two,
                              dw_best, dw_bound, ed_lower_bound, eve_mutual_information, key_curve,
                              relative_entropy_bound, thm_iv3_check)
from boundkey.linalg import ComplexMatrix, binary_entropy, shannon_entropy
from boundkey.protocol import weights
from boundkey.states import (PditSpec, ghz, ideal_cq, omega, pdit, pdit_example, psi_bar_tuple,
                             psi_tuple, seed_unitary, shield_shape)


def dw_oracle(a, b, m):
    """DW bound of the family cq state from its probability table.

    Parties 1 and 2 agree on the all-equal blocks and on every flipped tuple
    that keeps them equal; Eve learns only which block pair was hit.
    """
    n = 3 if m == 3 else 2
    probs = {psi_tuple(0, n): a, psi_bar_tuple(0, n): a}
    for j in range(1, m + 1):
        probs[psi_tuple(j, n)] = b
        probs[psi_bar_tuple(j, n)] = b
    joint = {}
    for t, p in probs.items():
        joint[(t[0], t[1])] = joint.get((t[0], t[1]), 0) + p
    px = [sum(p for (x, _), p in joint.items() if x == v) for v in (0, 1)]
    py = [sum(p for (_, y), p in joint.items() if y == v) for v in (0, 1)]
    i12 = shannon_entropy(px) + shannon_entropy(py) - shannon_entropy(list(joint.values()))
    # Eve's label splits into {E0} and one label per off tuple; given the label,
    # party 1's bit is either fixed (off labels) or uniform (E0)
    h1_given_e = (2 * a) * 1.0
    i1e = shannon_entropy(px) - h1_given_e
    return i12 - i1e


def test_cq_one_matches_oracle():
    for n, m in [(2, 1), (3, 3)]:
        for k in (1, 5, 30):
            a, b = weights("one", 4, n, k)
            assert dw_bound(cq_one(4, n, k)) == pytest.approx(dw_oracle(a, b, m), abs=1e-12)


def test_ideal_cq_dw():
    for d in (2, 3, 5):
        for n in (2, 3):
            cq = ideal_cq(d, n)
            assert classical_mutual_information(cq, 1, 2) == pytest.approx(math.log2(d))
            assert eve_mutual_information(cq, 1) == pytest.approx(0.0, abs=1e-14)
            assert dw_best(cq) == pytest.approx(math.log2(d), abs=1e-12)


def test_eve_information_quantum_path():
    # Eve holds a copy of party 1's bit in orthogonal states
    eve = {(0, 0): np.diag([1.0, 0]), (1, 1): np.diag([0, 1.0])}
    cq = CqState(2, 2, {(0, 0): 0.5, (1, 1): 0.5}, eve)
    assert eve_mutual_information(cq, 1) == pytest.approx(1.0)
    assert dw_bound(cq) == pytest.approx(0.0, abs=1e-12)


def test_cq_validation():
    with pytest.raises(ValueError):
        CqState(2, 2, {(0, 0): 0.7, (1, 1): 0.7}, {(0, 0): 0, (1, 1): 0})
    with pytest.raises(ValueError):
        CqState(2, 2, {(0, 2): 1.0}, {(0, 2): 0})
    with pytest.raises(ValueError):
        dw_bound(ideal_cq(2, 2), 1, 3)


def test_cq_trace_distance_closed_form():
    a = ideal_cq(2, 2)
    eps = 0.1
    b = CqState(2, 2, {(0, 0): 0.5 - eps, (1, 1): 0.5, (0, 1): eps},
                {(0, 0): 0, (1, 1): 0, (0, 1): 0})
    assert cq_trace_distance(a, b) == pytest.approx(2 * eps)


def test_measure_pdit_gives_ideal_key():
    st = pdit_example(2, 2, (2, 1))
    cq = measure_to_cq(st)
    assert set(cq.support(1e-12)) == {(0, 0), (1, 1)}
    assert dw_best(cq.to_labels()) == pytest.approx(1.0, abs=1e-9)
    assert eve_mutual_information(cq, 1) == pytest.approx(0.0, abs=1e-9)


def test_measure_dense_input_needs_dims():
    with pytest.raises(ValueError):
        measure_to_cq(np.eye(4) / 4)
    cq = measure_to_cq(np.eye(4) / 4, d=2, n=2)
    assert all(p == pytest.approx(0.25) for p in cq.probs.values())


def test_key_curve_rows():
    pts = key_curve("two", 3, 3, [1, 2, 3])
    assert [p.k for p in pts] == [1, 2, 3]
    row = pts[0].row()
    assert len(row) == len(CURVE_HEADER)
    assert all(p.k_dw == max(0.0, p.k_dw_raw) for p in pts)
    assert all(p.k_scaled == pytest.approx(p.success_probability * p.k_dw) for p in pts)
    with pytest.raises(ValueError):
        key_curve("three", 3, 3, [1])
    with pytest.raises(ValueError):
        key_curve("two", 3, 3, [1], prob_model="odd")
    with pytest.raises(ValueError):
        key_curve("one", 3, 3, [])


def test_cq_two_independent_of_seed_choice():
    a = cq_two(seed_unitary("vandermonde", 4), 3, 6)
    b = cq_two(4, 3, 6)
    assert a.probs == b.probs


def test_thm_iv3_on_ideal_and_noisy():
    r = thm_iv3_check(ideal_cq(3, 3))
    assert r["Delta"] == pytest.approx(0.0, abs=1e-14)
    assert r["passed"]
    noisy = CqState(2, 3, {(0, 0, 0): 0.45, (1, 1, 1): 0.45, (0, 1, 0): 0.1},
                    {(0, 0, 0): 0, (1, 1, 1): 0, (0, 1, 0): 0})
    r = thm_iv3_check(noisy)
    assert r["passed"]
    assert r["delta"][2] == pytest.approx(0.2)
    # parties 1 and 3 still agree on the flipped tuple; only the bias remains
    assert r["delta"][3] == pytest.approx(0.1)
    assert r["Delta"] == pytest.approx(0.2)


def test_relative_entropy_bound_ghz():
    for d in (2, 3):
        r = relative_entropy_bound(ghz(d, 3), omega(d, 3))
        assert r["value"] == pytest.approx(math.log2(d), abs=1e-10)
        assert "separable" in r["caveat"]
    with pytest.raises(ValueError):
        relative_entropy_bound(ghz(2, 2), ComplexMatrix(2 * np.eye(4)))


def test_ed_bound_exhaustive_oracle_random_twist():
    rng = np.random.default_rng(2)
    q, _ = np.linalg.qr(rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4)))
    g = rng.normal(size=(4, 4)) + 1j * rng.normal(size=(4, 4))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    spec = PditSpec(2, 2, [np.eye(4), q], ComplexMatrix(rho, shield_shape(2, 2)))
    rep = ed_lower_bound(spec, restarts=20, seed=1)
    eta = rep.pairs[(0, 1)]["eta"]
    x = rho @ q.conj().T
    best = 0.0
    for _ in range(20000):
        v = rng.normal(size=(4, 2)) + 1j * rng.normal(size=(4, 2))
        v /= np.linalg.norm(v, axis=1, keepdims=True)
        best = max(best, abs(np.kron(v[0], v[1]).conj() @ x @ np.kron(v[2], v[3])))
    assert eta >= best - 1e-9
    assert eta <= np.linalg.svd(x, compute_uv=False)[0] + 1e-12
    r = rep.pairs[(0, 1)]
    # Cauchy-Schwarz through rho^(1/2)
    assert eta <= math.sqrt(r["a1"] * r["a2"]) + 1e-12
    # the same state given as the assembled private state
    rep2 = ed_lower_bound(pdit(spec), restarts=20, seed=1)
    assert rep2.value == pytest.approx(rep.value, abs=1e-9)


def test_ed_bound_formula():
    rep = ed_lower_bound(pdit_example(2, 2))
    r = rep.pairs[(0, 1)]
    ratio = r["eta"] / math.sqrt(r["a1"] * r["a2"])
    assert rep.value == pytest.approx(r["a_max"] * (1 - binary_entropy(0.5 + ratio / 2)))
    assert rep.to_json()["heuristic"] is True
