import math

import numpy as np
import pytest

from boundkey.cq import measure_to_cq
from boundkey.keyrate import cq_one
from boundkey.linalg import min_eigenvalue, trace_norm
from boundkey.protocol import norm_one, recurse_one, recurse_two
from boundkey.states import construction_one, construction_two, pdit_example, seed_unitary
from boundkey.twisting import (TwistingFamily, apply_twisting, closeness_report, power_closeness,
                               privacy_squeeze, reduce_to_key, row_norms, squeezing_twist,
                               sufficient_bound)


def test_twisting_preserves_spectrum():
    st = construction_one(2, 2)
    tw = TwistingFamily.random(st.d, st.n, st.shield_dim, np.random.default_rng(3))
    out = apply_twisting(st, tw)
    a = np.linalg.eigvalsh(st.assemble().data)
    b = np.linalg.eigvalsh(out.assemble().data)
    assert np.allclose(a, b, atol=1e-12)


def test_twisting_keeps_measured_cq_up_to_eve_unitary():
    st = construction_one(2, 2)
    tw = TwistingFamily.random(st.d, st.n, st.shield_dim, np.random.default_rng(4))
    a = measure_to_cq(st).invariants()
    b = measure_to_cq(apply_twisting(st, tw)).invariants()
    assert a["tuples"] == b["tuples"]
    assert np.allclose(a["probs"], b["probs"], atol=1e-10)
    assert np.allclose(a["gram"], b["gram"], atol=1e-10)
    for x, y in zip(a["spectra"], b["spectra"]):
        n = min(len(x), len(y))
        assert np.allclose(x[:n], y[:n], atol=1e-9)


def test_twisting_rejects_non_unitary():
    with pytest.raises(ValueError):
        TwistingFamily(2, 2, 2, {(0, 0): 2 * np.eye(2)})
    with pytest.raises(ValueError):
        TwistingFamily(2, 2, 2, {(0, 0): np.eye(3)})
    with pytest.raises(ValueError):
        apply_twisting(construction_one(2, 2), TwistingFamily(2, 2, 3))


def test_squeezing_makes_row_positive():
    st = construction_one(3, 3)
    tw = apply_twisting(st, squeezing_twist(st))
    norms = row_norms(st)
    for j in range(st.d):
        b = tw.block((0,) * 3, (j,) * 3)
        assert np.trace(b).real == pytest.approx(norms[j], abs=1e-12)


def test_privacy_squeeze_key_state():
    st = construction_one(3, 3)
    key = privacy_squeeze(st).data
    assert abs(np.trace(key) - 1) < 1e-12
    assert min_eigenvalue(key) > -1e-12
    assert key[0, 7].real == pytest.approx(row_norms(st)[1], abs=1e-12)
    plain = reduce_to_key(st).data
    assert abs(plain[0, 7]) <= key[0, 7].real + 1e-12


def test_squeezed_measurement_matches_cq_one():
    for k in (1, 2):
        out = recurse_one(2, 2, k)
        sq = apply_twisting(out.state, squeezing_twist(out.state))
        got = measure_to_cq(sq).to_labels()
        want = cq_one(2, 2, k)
        for t, p in want.probs.items():
            assert got.probs.get(t, 0.0) == pytest.approx(p, abs=1e-10)


def test_closeness_exact_pdit():
    rep = closeness_report(pdit_example(2, 3, (3, 1, 2)))
    assert rep.epsilon == pytest.approx(0.0, abs=1e-14)
    assert rep.sufficient_bound == pytest.approx(0.0, abs=1e-14)


def test_closeness_family_one():
    for k in (1, 2):
        rep = closeness_report(recurse_one(3, 3, k).state)
        assert rep.epsilon == pytest.approx(0.5 - 1 / norm_one(3, 3, k), abs=1e-12)
        assert rep.eta == pytest.approx(rep.epsilon, abs=1e-12)
        assert rep.to_json()["N"] == 3


def test_power_closeness_matches_dense():
    base = construction_two(seed_unitary("vandermonde", 2), 3)
    for k in (1, 2):
        a = power_closeness(base, k)
        b = closeness_report(recurse_two(seed_unitary("vandermonde", 2), 3, k).state)
        assert np.allclose(a.norms, b.norms, atol=1e-13)
    with pytest.raises(ValueError):
        power_closeness(base, 0)


def test_sufficient_bound():
    assert sufficient_bound(2, 3, 0.0) == 0.0
    eta = 1e-4
    s = 2 * math.sqrt(2 * eta)
    h = -(s * math.log2(s) + (1 - s) * math.log2(1 - s))
    assert sufficient_bound(2, 3, eta) == pytest.approx(math.sqrt(3 * s + h) + s)
    # entropy term saturates once its argument passes one half
    assert sufficient_bound(2, 2, 0.1) == pytest.approx(math.sqrt(2 * 2 * math.sqrt(0.2) + 1) + 2 * math.sqrt(0.2))
    with pytest.raises(ValueError):
        sufficient_bound(2, 2, -1)


def test_closeness_row_choice():
    st = pdit_example(2, 2)
    rep = closeness_report(st, row=(1, 1))
    assert rep.row == 1
    with pytest.raises(ValueError):
        closeness_report(st, row=(0, 1))


def test_trace_norm_is_twist_invariant_on_rows():
    st = construction_one(3, 2)
    tw = TwistingFamily.random(st.d, st.n, st.shield_dim, np.random.default_rng(9))
    assert np.allclose(row_norms(st), row_norms(apply_twisting(st, tw)))
    assert trace_norm(st.block((0, 0), (1, 1))) == pytest.approx(row_norms(st)[1])
