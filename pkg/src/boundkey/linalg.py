"""Dense complex linear algebra over labelled tensor-product spaces.

Every operator carries a :class:`Shape`, an ordered list of :class:`Party`
factors.  A factor has a key dimension and a shield dimension, its local
dimension is their product, and it may be tagged with the label of the party
that owns it.  Subsystem indices are 1-based over the factors.

All logarithms are base 2.  Trace norms are unhalved.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Optional, Sequence

import numpy as np

HERMITIAN_TOL = 1e-10
PSD_TOL = 1e-9
SUPPORT_TOL = 1e-10


@dataclass(frozen=True)
class Party:
    key: int = 1
    shield: int = 1
    label: Optional[int] = None

    def __post_init__(self):
        if self.key < 1 or self.shield < 1:
            raise ValueError(f"factor dimensions must be positive, got {self}")

    @property
    def dim(self) -> int:
        return self.key * self.shield


@dataclass(frozen=True)
class Shape:
    parties: tuple

    def __init__(self, parties: Iterable = ()):
        items = []
        for p in parties:
            if isinstance(p, Party):
                items.append(p)
            elif isinstance(p, (int, np.integer)):
                items.append(Party(key=int(p)))
            else:
                items.append(Party(*p))
        object.__setattr__(self, "parties", tuple(items))

    @classmethod
    def from_dims(cls, dims: Sequence[int]) -> "Shape":
        return cls(Party(key=int(d)) for d in dims)

    @property
    def dims(self) -> tuple:
        return tuple(p.dim for p in self.parties)

    @property
    def dim(self) -> int:
        return int(np.prod(self.dims, dtype=np.int64)) if self.parties else 1

    def __len__(self) -> int:
        return len(self.parties)

    def __add__(self, other: "Shape") -> "Shape":
        return Shape(self.parties + other.parties)

    def owned_by(self, label: int) -> tuple:
        """1-based indices of the factors tagged with ``label``."""
        return tuple(i + 1 for i, p in enumerate(self.parties) if p.label == label)

    def labels(self) -> tuple:
        seen = []
        for p in self.parties:
            if p.label is not None and p.label not in seen:
                seen.append(p.label)
        return tuple(seen)


class ComplexMatrix:
    """Square complex matrix tagged with a subsystem shape."""

    __slots__ = ("data", "shape")

    def __init__(self, data, shape: Optional[Shape] = None):
        arr = np.asarray(data, dtype=complex)
        if arr.ndim != 2 or arr.shape[0] != arr.shape[1]:
            raise ValueError(f"expected a square matrix, got array of shape {arr.shape}")
        if shape is None:
            shape = Shape.from_dims([arr.shape[0]])
        elif not isinstance(shape, Shape):
            shape = Shape(shape)
        if shape.dim != arr.shape[0]:
            raise ValueError(f"shape dims {shape.dims} do not match matrix size {arr.shape[0]}")
        self.data = arr
        self.shape = shape

    @property
    def dim(self) -> int:
        return self.data.shape[0]

    def __array__(self, dtype=None, copy=None):
        return self.data if dtype is None else self.data.astype(dtype)

    def __repr__(self) -> str:
        return f"ComplexMatrix(dim={self.dim}, dims={self.shape.dims})"

    def dagger(self) -> "ComplexMatrix":
        return ComplexMatrix(self.data.conj().T, self.shape)

    def trace(self) -> complex:
        return complex(np.trace(self.data))

    def with_data(self, data) -> "ComplexMatrix":
        return ComplexMatrix(data, self.shape)


def _as_array(a) -> np.ndarray:
    return a.data if isinstance(a, ComplexMatrix) else np.asarray(a, dtype=complex)


def _as_matrix(a) -> ComplexMatrix:
    return a if isinstance(a, ComplexMatrix) else ComplexMatrix(a)


@dataclass(frozen=True)
class Spectrum:
    values: np.ndarray
    vectors: np.ndarray

    def reconstruct(self) -> np.ndarray:
        return (self.vectors * self.values) @ self.vectors.conj().T


def tensor(*ops) -> ComplexMatrix:
    """Kronecker product; shapes are concatenated."""
    if not ops:
        raise ValueError("tensor needs at least one operand")
    mats = [_as_matrix(o) for o in ops]
    data = mats[0].data
    shape = mats[0].shape
    for m in mats[1:]:
        data = np.kron(data, m.data)
        shape = shape + m.shape
    return ComplexMatrix(data, shape)


def _check_subsystems(shape: Shape, subsystems) -> list:
    subs = sorted(set(int(s) for s in subsystems))
    for s in subs:
        if not 1 <= s <= len(shape):
            raise ValueError(f"subsystem index {s} out of range 1..{len(shape)}")
    return subs


def partial_transpose(a: ComplexMatrix, subsystems) -> ComplexMatrix:
    """Transpose the listed factors (1-based)."""
    a = _as_matrix(a)
    subs = _check_subsystems(a.shape, subsystems)
    if not subs:
        return ComplexMatrix(a.data.copy(), a.shape)
    dims = a.shape.dims
    n = len(dims)
    t = a.data.reshape(dims + dims)
    perm = list(range(2 * n))
    for s in subs:
        i = s - 1
        perm[i], perm[n + i] = n + i, i
    return ComplexMatrix(t.transpose(perm).reshape(a.dim, a.dim), a.shape)


def party_transpose(a: ComplexMatrix, label: int) -> ComplexMatrix:
    """Transpose every factor owned by party ``label``."""
    a = _as_matrix(a)
    subs = a.shape.owned_by(label)
    if not subs:
        raise ValueError(f"no factor is owned by party {label}")
    return partial_transpose(a, subs)


def partial_trace(a: ComplexMatrix, subsystems) -> ComplexMatrix:
    """Trace out the listed factors (1-based)."""
    a = _as_matrix(a)
    subs = _check_subsystems(a.shape, subsystems)
    dims = a.shape.dims
    n = len(dims)
    keep = [i for i in range(n) if i + 1 not in subs]
    t = a.data.reshape(dims + dims)
    row = list(range(n))
    col = [n + i if i in keep else i for i in range(n)]
    out_idx = keep + [n + i for i in keep]
    res = np.einsum(t, row + col, out_idx)
    kd = int(np.prod([dims[i] for i in keep], dtype=np.int64)) if keep else 1
    return ComplexMatrix(res.reshape(kd, kd), Shape(a.shape.parties[i] for i in keep))


def is_hermitian(a, tol: float = HERMITIAN_TOL) -> bool:
    arr = _as_array(a)
    scale = max(1.0, float(np.max(np.abs(arr)))) if arr.size else 1.0
    return bool(np.max(np.abs(arr - arr.conj().T), initial=0.0) <= tol * scale)


def herm_eig(a) -> Spectrum:
    """Eigendecomposition of a Hermitian matrix, eigenvalues ascending."""
    arr = _as_array(a)
    if not is_hermitian(arr):
        raise ValueError("matrix is not Hermitian within tolerance")
    arr = 0.5 * (arr + arr.conj().T)
    w, v = np.linalg.eigh(arr)
    return Spectrum(w, v)


def jacobi_eigh(a, tol: float = 1e-13, max_sweeps: int = 60) -> Spectrum:
    """Cyclic Jacobi eigensolver for complex Hermitian matrices.

    Slow but independent of LAPACK; intended for cross-checking small cases.
    """
    A = np.array(_as_array(a), dtype=complex)
    if not is_hermitian(A):
        raise ValueError("matrix is not Hermitian within tolerance")
    A = 0.5 * (A + A.conj().T)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    scale = max(1.0, float(np.linalg.norm(A)))
    for _ in range(max_sweeps):
        off = float(np.linalg.norm(A - np.diag(np.diag(A))))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300:
                    continue
                phase = apq / mag
                app, aqq = A[p, p].real, A[q, q].real
                theta = 0.5 * math.atan2(2 * mag, aqq - app)
                c, s = math.cos(theta), math.sin(theta)
                J = np.array([[c, s * phase], [-s * phase.conjugate(), c]])
                Ap = A[:, [p, q]] @ J
                A[:, [p, q]] = Ap
                A[[p, q], :] = J.conj().T @ A[[p, q], :]
                V[:, [p, q]] = V[:, [p, q]] @ J
    w = np.real(np.diag(A))
    order = np.argsort(w)
    return Spectrum(w[order], V[:, order])


def is_psd(a, tol: float = PSD_TOL) -> bool:
    arr = _as_array(a)
    w = herm_eig(arr).values
    scale = max(1.0, float(np.sum(np.abs(w))))
    return bool(w.size == 0 or w[0] >= -tol * scale)


def min_eigenvalue(a) -> float:
    return float(herm_eig(a).values[0])


def svd(a):
    """Thin SVD ``a = U diag(s) Wh`` with singular values descending."""
    return np.linalg.svd(_as_array(a))


def op_abs(a):
    """``sqrt(a^dagger a)``, preserving the shape tag when present."""
    arr = _as_array(a)
    _, s, wh = np.linalg.svd(arr)
    res = (wh.conj().T * s) @ wh
    res = 0.5 * (res + res.conj().T)
    return ComplexMatrix(res, a.shape) if isinstance(a, ComplexMatrix) else res


def trace_norm(a) -> float:
    return float(np.sum(np.linalg.svd(_as_array(a), compute_uv=False)))


def trace_distance(a, b) -> float:
    return trace_norm(_as_array(a) - _as_array(b))


def spectral_norm(a) -> float:
    arr = _as_array(a)
    return float(np.linalg.svd(arr, compute_uv=False)[0]) if arr.size else 0.0


def shannon_entropy(p) -> float:
    p = np.asarray(p, dtype=float).ravel()
    p = p[p > 0]
    return float(-np.sum(p * np.log2(p)))


def binary_entropy(x: float) -> float:
    if x <= 0.0 or x >= 1.0:
        return 0.0
    return float(-x * math.log2(x) - (1 - x) * math.log2(1 - x))


def von_neumann_entropy(rho, tol: float = PSD_TOL) -> float:
    w = herm_eig(rho).values
    if w.size and w[0] < -tol * max(1.0, float(np.sum(np.abs(w)))):
        raise ValueError(f"state has negative eigenvalue {w[0]:.3e}")
    w = np.clip(w, 0.0, None)
    return shannon_entropy(w)


def relative_entropy(rho, sigma) -> float:
    """``S(rho || sigma)``; infinite when the support condition fails."""
    r = _as_array(rho)
    s = herm_eig(sigma)
    weights = np.real(np.einsum("ik,ij,jk->k", s.vectors.conj(), r, s.vectors))
    small = s.values <= SUPPORT_TOL
    if np.any(weights[small] > SUPPORT_TOL):
        return math.inf
    cross = -float(np.sum(weights[~small] * np.log2(s.values[~small])))
    return cross - von_neumann_entropy(r)


def mutual_information(rho: ComplexMatrix, cut) -> float:
    """``I(X:Y)`` where X is the set of factors in ``cut`` and Y the rest."""
    rho = _as_matrix(rho)
    x = _check_subsystems(rho.shape, cut)
    y = [i for i in range(1, len(rho.shape) + 1) if i not in x]
    if not x or not y:
        raise ValueError("cut must split the factors into two nonempty parts")
    sx = von_neumann_entropy(partial_trace(rho, y))
    sy = von_neumann_entropy(partial_trace(rho, x))
    return sx + sy - von_neumann_entropy(rho)
