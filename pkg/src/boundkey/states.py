"""Multipartite key states: GHZ, private states and the two shielded families."""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Optional, Sequence

import numpy as np

from .blocks import BlockOperator, key_tuples
from .cq import CqState
from .linalg import ComplexMatrix, Party, Shape, is_hermitian, op_abs, partial_transpose

PAULIS = (
    np.array([[0, 1], [1, 0]], dtype=complex),
    np.array([[0, -1j], [1j, 0]], dtype=complex),
    np.array([[1, 0], [0, -1]], dtype=complex),
)


def _check_dn(d: int, n: int, min_d: int = 2) -> None:
    if int(d) != d or d < min_d:
        raise ValueError(f"dimension must be an integer >= {min_d}, got {d}")
    if int(n) != n or n < 2:
        raise ValueError(f"number of parties must be an integer >= 2, got {n}")


def diagonal_tuples(d: int, n: int):
    return [(i,) * n for i in range(d)]


def ghz(d: int, n: int) -> BlockOperator:
    """Normalized GHZ projector on N key registers of dimension d."""
    _check_dn(d, n)
    one = np.array([[1.0 / d]], dtype=complex)
    blocks = {(r, c): one for r in diagonal_tuples(d, n) for c in diagonal_tuples(d, n)}
    return BlockOperator(d, n, Shape(), blocks)


def omega(d: int, n: int) -> BlockOperator:
    """Dephased GHZ state: uniform mixture of the diagonal key tuples."""
    _check_dn(d, n)
    one = np.array([[1.0 / d]], dtype=complex)
    return BlockOperator(d, n, Shape(), {(t, t): one for t in diagonal_tuples(d, n)})


def ideal_cq(d: int, n: int) -> CqState:
    """Perfectly correlated uniform key, product with a fixed Eve state."""
    _check_dn(d, n)
    ts = diagonal_tuples(d, n)
    return CqState(d, n, {t: 1.0 / d for t in ts}, {t: 0 for t in ts})


def shield_shape(dim: int, n: int, copies: int = 1) -> Shape:
    """Shield factors of dimension ``dim``, copy-major, labelled by owner."""
    return Shape(Party(key=1, shield=dim, label=p)
                 for _ in range(copies) for p in range(1, n + 1))


def _ghz_vector(dim: int, n: int) -> np.ndarray:
    v = np.zeros(dim ** n, dtype=complex)
    step = sum(dim ** k for k in range(n))
    v[::step] = 1.0
    return v


def r_projector(dim: int, n: int) -> ComplexMatrix:
    """Projector onto span{|i...i>}."""
    diag = np.zeros(dim ** n)
    diag[::sum(dim ** k for k in range(n))] = 1.0
    return ComplexMatrix(np.diag(diag).astype(complex), shield_shape(dim, n))


def p_plus(dim: int, n: int) -> ComplexMatrix:
    """GHZ projector (unit trace) on N systems of dimension ``dim``."""
    v = _ghz_vector(dim, n) / np.sqrt(dim)
    return ComplexMatrix(np.outer(v, v.conj()), shield_shape(dim, n))


def p_projector(dim: int, n: int) -> ComplexMatrix:
    return ComplexMatrix(r_projector(dim, n).data - p_plus(dim, n).data, shield_shape(dim, n))


def q_projector(dim: int, n: int) -> ComplexMatrix:
    return ComplexMatrix(np.eye(dim ** n) - r_projector(dim, n).data, shield_shape(dim, n))


def x_matrix(dim: int, n: int) -> ComplexMatrix:
    """Real symmetric shield operator of unit trace norm used by family one."""
    _check_dn(dim, n)
    num = (dim - 2) * p_plus(dim, n).data - 2 * p_projector(dim, n).data + q_projector(dim, n).data
    return ComplexMatrix(num / (dim ** n + 2 * dim - 4), shield_shape(dim, n))


def s_matrix(dim: int, n: int) -> ComplexMatrix:
    """Unnormalized separable operator ``1 + dim P+ - 2R``."""
    _check_dn(dim, n)
    data = np.eye(dim ** n) + dim * p_plus(dim, n).data - 2 * r_projector(dim, n).data
    return ComplexMatrix(data, shield_shape(dim, n))


def psi_tuple(i: int, n: int) -> tuple:
    """Key tuple with a single 1 at party i; the all-zero tuple for i = 0."""
    return tuple(1 if p == i else 0 for p in range(1, n + 1))


def psi_bar_tuple(i: int, n: int) -> tuple:
    return tuple(1 - v for v in psi_tuple(i, n))


def _pt(m: ComplexMatrix, subs) -> ComplexMatrix:
    subs = [s for s in subs if s]
    return partial_transpose(m, subs) if subs else m


def off_tuple_count(n: int) -> int:
    """Number of distinct pairs {psi_j, psi_bar_j}, j >= 1 (collapses to 1 at N = 2)."""
    return n if n >= 3 else 1


def normalization_one(dim: int, n: int) -> float:
    c = dim ** n / (dim ** n + 2 * dim - 4)
    return 2.0 * (1.0 + off_tuple_count(n) * c)


def _assemble_family(n: int, shield: Shape, diag: Sequence[np.ndarray],
                     off: np.ndarray, norm: float) -> BlockOperator:
    blocks = {}
    for i, b in enumerate(diag):
        for t in (psi_tuple(i, n), psi_bar_tuple(i, n)):
            if (t, t) in blocks:
                # N = 2: psi_bar_1 = psi_2, and the two candidate blocks agree
                if np.max(np.abs(blocks[(t, t)] - b / norm)) > 1e-10:
                    raise ValueError(f"inconsistent blocks at coinciding tuple {t}")
                continue
            blocks[(t, t)] = b / norm
    zero, one = psi_tuple(0, n), psi_bar_tuple(0, n)
    blocks[(zero, one)] = off / norm
    blocks[(one, zero)] = off.conj().T / norm
    return BlockOperator(2, n, shield, blocks)


def construction_one(dim: int, n: int) -> BlockOperator:
    """PPT bound-entangled state with a dim-dimensional shield per party."""
    _check_dn(dim, n)
    x = x_matrix(dim, n)
    diag = [_pt(op_abs(_pt(x, [i])), [i]).data for i in range(n + 1)]
    return _assemble_family(n, x.shape, diag, x.data, normalization_one(dim, n))


def seed_unitary(kind: str, dim: int) -> np.ndarray:
    """Seed unitary: ``vandermonde`` (Fourier) or ``hadamard-power``."""
    if kind == "vandermonde":
        k = np.arange(dim)
        return np.exp(2j * np.pi * np.outer(k, k) / dim) / np.sqrt(dim)
    if kind in ("hadamard-power", "hadamard"):
        m = int(round(np.log2(dim)))
        if dim < 2 or 2 ** m != dim:
            raise ValueError(f"hadamard-power needs a power of two, got {dim}")
        h = np.array([[1, 1], [1, -1]], dtype=complex) / np.sqrt(2)
        out = np.array([[1]], dtype=complex)
        for _ in range(m):
            out = np.kron(out, h)
        return out
    raise ValueError(f"unknown seed unitary {kind!r}")


def is_unitary(u, tol: float = 1e-10) -> bool:
    u = np.asarray(u, dtype=complex)
    return u.ndim == 2 and u.shape[0] == u.shape[1] and \
        bool(np.max(np.abs(u @ u.conj().T - np.eye(u.shape[0]))) <= tol)


def is_flat(u, tol: float = 1e-10) -> bool:
    u = np.asarray(u, dtype=complex)
    return bool(np.max(np.abs(np.abs(u) - 1 / np.sqrt(u.shape[0]))) <= tol)


def is_hermitian_seed(u, tol: float = 1e-10) -> bool:
    return is_hermitian(np.asarray(u, dtype=complex), tol)


def x_tilde(u, n: int) -> ComplexMatrix:
    """``sum_ij u_ij |i...i><j...j|`` on N shield systems."""
    u = np.asarray(u, dtype=complex)
    dim = u.shape[0]
    step = sum(dim ** k for k in range(n))
    out = np.zeros((dim ** n, dim ** n), dtype=complex)
    idx = np.arange(dim) * step
    out[np.ix_(idx, idx)] = u
    return ComplexMatrix(out, shield_shape(dim, n))


def block_traces_two(u, n: int):
    """Traces of the unnormalized diagonal blocks at psi_0 and at psi_j, j >= 1."""
    u = np.asarray(u, dtype=complex)
    total = float(np.sum(np.abs(u)))
    if n == 2:
        # both shields transposed is a full transpose, of trace norm D
        return n * total, 2.0 * u.shape[0]
    return n * total, u.shape[0] + (n - 1) * total


def normalization_two(u, n: int) -> float:
    a, b = block_traces_two(u, n)
    return 2.0 * (a + off_tuple_count(n) * b)


def construction_two(u, n: int) -> BlockOperator:
    """PPT state built from a seed unitary ``u`` on each shield."""
    u = np.asarray(u, dtype=complex)
    if not is_unitary(u):
        raise ValueError("seed matrix is not unitary")
    dim = u.shape[0]
    _check_dn(dim, n)
    xt = x_tilde(u, n)
    parts = [partial_transpose(xt, [i]) for i in range(1, n + 1)]
    off = sum(p.data for p in parts)
    diag = [sum(op_abs(_pt(p, [j])).data for p in parts) for j in range(n + 1)]
    return _assemble_family(n, xt.shape, diag, off, normalization_two(u, n))


@dataclass
class PditSpec:
    """Twisted GHZ description: ``d`` unitaries acting on a shield state."""

    d: int
    n: int
    unitaries: Sequence[np.ndarray]
    rho: ComplexMatrix
    shield: Optional[Shape] = None

    def __post_init__(self):
        if len(self.unitaries) != self.d:
            raise ValueError(f"need {self.d} unitaries, got {len(self.unitaries)}")
        if self.shield is None:
            self.shield = self.rho.shape
        for u in self.unitaries:
            if not is_unitary(u):
                raise ValueError("twisting operator is not unitary")


def pdit(spec: PditSpec) -> BlockOperator:
    """Private state ``(1/d) sum_ij |i..i><j..j| (x) U_i rho U_j^dagger``."""
    rho = spec.rho.data
    tw = [np.asarray(u) @ rho for u in spec.unitaries]
    blocks = {}
    for i, r in enumerate(diagonal_tuples(spec.d, spec.n)):
        for j, c in enumerate(diagonal_tuples(spec.d, spec.n)):
            blocks[(r, c)] = tw[i] @ np.asarray(spec.unitaries[j]).conj().T / spec.d
    return BlockOperator(spec.d, spec.n, spec.shield, blocks)


def permutation_operator(perm: Sequence[int], dim: int) -> np.ndarray:
    """``sum |i_1..i_N><i_perm(1)..i_perm(N)|`` with ``perm`` 1-based."""
    n = len(perm)
    if sorted(perm) != list(range(1, n + 1)):
        raise ValueError(f"not a permutation of 1..{n}: {perm}")
    out = np.zeros((dim ** n, dim ** n), dtype=complex)
    for row in itertools.product(range(dim), repeat=n):
        col = tuple(row[p - 1] for p in perm)
        r = int(np.ravel_multi_index(row, (dim,) * n))
        c = int(np.ravel_multi_index(col, (dim,) * n))
        out[r, c] = 1.0
    return out


def pdit_example(dim: int, n: int, perm: Optional[Sequence[int]] = None) -> BlockOperator:
    """Bit-key private state twisted by a permutation of the shields."""
    _check_dn(dim, n)
    perm = tuple(range(1, n + 1)) if perm is None else tuple(perm)
    if len(perm) != n:
        raise ValueError(f"permutation must have length {n}")
    rho = ComplexMatrix(np.eye(dim ** n) / dim ** n, shield_shape(dim, n))
    spec = PditSpec(2, n, [permutation_operator(perm, dim), np.eye(dim ** n)], rho)
    return pdit(spec)


def smolin_family(n: int) -> ComplexMatrix:
    """Generalized Smolin state on 2n qubits."""
    if n < 1:
        raise ValueError("n must be at least 1")
    psi = np.array([0, 1, 1, 0], dtype=complex) / np.sqrt(2)
    rho2 = np.outer(psi, psi.conj())
    rho = rho2
    for k in range(1, n):
        acc = np.zeros((4 ** (k + 1), 4 ** (k + 1)), dtype=complex)
        for s in PAULIS + (np.eye(2, dtype=complex),):
            left = np.kron(np.eye(2 ** (2 * k - 1)), s)
            right = np.kron(np.eye(2), s)
            acc += np.kron(left @ rho @ left.conj().T, right @ rho2 @ right.conj().T)
        rho = acc / 4
    labels = [Party(key=2, label=q) for q in range(1, 2 * n + 1)]
    return ComplexMatrix(rho, Shape(labels))
