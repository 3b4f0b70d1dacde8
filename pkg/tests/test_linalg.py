import itertools
import math

import numpy as np
import pytest
from hypothesis import given, settings, strategies as st

from boundkey.linalg import (ComplexMatrix, Party, Shape, binary_entropy, herm_eig, is_psd,
                             jacobi_eigh, mutual_information, op_abs, partial_trace,
                             partial_transpose, party_transpose, relative_entropy, shannon_entropy,
                             spectral_norm, svd, tensor, trace_distance, trace_norm,
                             von_neumann_entropy)


def random_state(rng, dim, rank=None):
    rank = rank or dim
    g = rng.normal(size=(dim, rank)) + 1j * rng.normal(size=(dim, rank))
    rho = g @ g.conj().T
    return rho / np.trace(rho).real


def random_herm(rng, dim):
    g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    return (g + g.conj().T) / 2


def pt_oracle(m, dims, subs):
    """Entry-by-entry partial transpose on 0-based subsystems."""
    out = np.zeros_like(m)
    idx = list(itertools.product(*[range(d) for d in dims]))
    for r in idx:
        for c in idx:
            r2, c2 = list(r), list(c)
            for s in subs:
                r2[s], c2[s] = c[s], r[s]
            out[np.ravel_multi_index(r2, dims), np.ravel_multi_index(c2, dims)] = \
                m[np.ravel_multi_index(r, dims), np.ravel_multi_index(c, dims)]
    return out


def test_jacobi_matches_lapack():
    rng = np.random.default_rng(0)
    for dim in (1, 2, 5, 12, 30):
        h = random_herm(rng, dim)
        a, b = jacobi_eigh(h), herm_eig(h)
        assert np.allclose(a.values, b.values, atol=1e-12)
        assert np.max(np.abs(a.reconstruct() - h)) < 1e-12
        assert np.allclose(a.vectors.conj().T @ a.vectors, np.eye(dim), atol=1e-12)


def test_eig_rejects_non_hermitian():
    with pytest.raises(ValueError):
        herm_eig(np.array([[0, 1], [0, 0]]))
    with pytest.raises(ValueError):
        jacobi_eigh(np.array([[0, 1], [0, 0]]))


def test_partial_transpose_against_entrywise_oracle():
    rng = np.random.default_rng(1)
    dims = (2, 3, 2)
    m = random_state(rng, 12)
    a = ComplexMatrix(m, Shape.from_dims(dims))
    for subs in ([1], [2], [1, 3], [1, 2, 3]):
        got = partial_transpose(a, subs).data
        assert np.allclose(got, pt_oracle(m, dims, [s - 1 for s in subs]), atol=1e-15)
    assert np.allclose(partial_transpose(a, [1, 2, 3]).data, m.T)


def test_party_transpose_uses_labels():
    rng = np.random.default_rng(2)
    shape = Shape([Party(key=2, label=1), Party(key=2, label=2), Party(shield=3, label=1)])
    m = ComplexMatrix(random_state(rng, 12), shape)
    assert np.allclose(party_transpose(m, 1).data, partial_transpose(m, [1, 3]).data)
    with pytest.raises(ValueError):
        party_transpose(m, 5)


def test_partial_trace_of_product():
    rng = np.random.default_rng(3)
    a, b, c = random_state(rng, 2), random_state(rng, 3), random_state(rng, 2)
    abc = tensor(a, b, c)
    assert np.allclose(partial_trace(abc, [1, 3]).data, b)
    assert np.allclose(partial_trace(abc, [2]).data, np.kron(a, c))
    assert partial_trace(abc, [2]).shape.dims == (2, 2)


def test_index_out_of_range():
    m = ComplexMatrix(np.eye(4) / 4, Shape.from_dims([2, 2]))
    with pytest.raises(ValueError):
        partial_transpose(m, [0])
    with pytest.raises(ValueError):
        partial_trace(m, [3])


def test_svd_and_abs():
    rng = np.random.default_rng(4)
    a = rng.normal(size=(5, 5)) + 1j * rng.normal(size=(5, 5))
    u, s, vh = svd(a)
    assert np.allclose((u * s) @ vh, a)
    ab = op_abs(a)
    assert np.allclose(ab @ ab, a.conj().T @ a)
    assert math.isclose(trace_norm(a), s.sum(), rel_tol=1e-12)
    assert math.isclose(spectral_norm(a), s[0], rel_tol=1e-12)


def test_entropies_known_values():
    assert shannon_entropy([0.5, 0.5]) == pytest.approx(1.0)
    assert shannon_entropy([1.0, 0.0]) == 0.0
    assert binary_entropy(0.11) == pytest.approx(-0.11 * math.log2(0.11) - 0.89 * math.log2(0.89))
    assert von_neumann_entropy(np.eye(4) / 4) == pytest.approx(2.0)
    bell = np.zeros((4, 4))
    bell[np.ix_([0, 3], [0, 3])] = 0.5
    rho = ComplexMatrix(bell, Shape.from_dims([2, 2]))
    assert mutual_information(rho, [1]) == pytest.approx(2.0)
    assert relative_entropy(np.eye(2) / 2, np.eye(2) / 2) == pytest.approx(0.0, abs=1e-14)
    assert relative_entropy(np.diag([1.0, 0.0]), np.eye(2) / 2) == pytest.approx(1.0)
    assert relative_entropy(np.eye(2) / 2, np.diag([1.0, 0.0])) == math.inf


def test_trace_distance_unhalved():
    assert trace_distance(np.diag([1.0, 0.0]), np.diag([0.0, 1.0])) == pytest.approx(2.0)


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 6), st.integers(1, 6), st.integers(0, 2 ** 31))
def test_state_invariants(da, db, seed):
    rng = np.random.default_rng(seed)
    rho = ComplexMatrix(random_state(rng, da * db), Shape.from_dims([da, db]))
    # partial transpose keeps trace and hermiticity; a product is always PPT
    pt = partial_transpose(rho, [1]).data
    assert abs(np.trace(pt) - 1) < 1e-12
    assert np.allclose(pt, pt.conj().T)
    prod = tensor(random_state(rng, da), random_state(rng, db))
    assert is_psd(partial_transpose(prod, [2]))
    # entropy bounds and subadditivity
    s = von_neumann_entropy(rho)
    assert -1e-12 <= s <= math.log2(da * db) + 1e-12
    assert mutual_information(rho, [1]) >= -1e-10


@settings(max_examples=40, deadline=None)
@given(st.integers(1, 8), st.integers(0, 2 ** 31))
def test_norm_invariants(dim, seed):
    rng = np.random.default_rng(seed)
    a = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    b = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    assert trace_norm(a + b) <= trace_norm(a) + trace_norm(b) + 1e-10
    assert spectral_norm(a) <= trace_norm(a) + 1e-12
    q, _ = np.linalg.qr(rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim)))
    assert math.isclose(trace_norm(q @ a @ q.conj().T), trace_norm(a), rel_tol=1e-10)
    h = (a + a.conj().T) / 2
    assert np.allclose(jacobi_eigh(h).values, herm_eig(h).values, atol=1e-10)
