"""Correlation Bell expression for 2n qubits and a seeded local optimizer.

The first 2n - 1 parties share one setting index s and the last party has its
own index t; the value is |E(1,1) + E(1,2) + E(2,1) - E(2,2)|.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .linalg import ComplexMatrix
from .states import PAULIS

COEFFS = {(0, 0): 1.0, (0, 1): 1.0, (1, 0): 1.0, (1, 1): -1.0}


@dataclass(frozen=True)
class BellSettings:
    """Bloch vectors, array of shape (parties, 2 settings, 3)."""

    vectors: np.ndarray

    def __post_init__(self):
        v = np.asarray(self.vectors, dtype=float)
        if v.ndim != 3 or v.shape[1:] != (2, 3):
            raise ValueError(f"expected shape (parties, 2, 3), got {v.shape}")
        if np.max(np.abs(np.linalg.norm(v, axis=2) - 1.0)) > 1e-12:
            raise ValueError("Bloch vectors must have unit norm")
        object.__setattr__(self, "vectors", v)

    @classmethod
    def from_angles(cls, theta, phi) -> "BellSettings":
        theta, phi = np.asarray(theta, float), np.asarray(phi, float)
        v = np.stack([np.sin(theta) * np.cos(phi), np.sin(theta) * np.sin(phi), np.cos(theta)], axis=-1)
        return cls(v)

    def angles(self):
        v = self.vectors
        return np.arccos(np.clip(v[..., 2], -1, 1)), np.arctan2(v[..., 1], v[..., 0])

    def observable(self, party: int, setting: int) -> np.ndarray:
        n = self.vectors[party, setting]
        return sum(c * p for c, p in zip(n, PAULIS))


def _qubit_count(rho) -> int:
    arr = rho.data if isinstance(rho, ComplexMatrix) else np.asarray(rho)
    q = int(round(math.log2(arr.shape[0])))
    if 2 ** q != arr.shape[0] or q < 2 or q % 2:
        raise ValueError("state must live on an even number (>= 2) of qubits")
    if isinstance(rho, ComplexMatrix) and any(d != 2 for d in rho.shape.dims) and len(rho.shape) > 1:
        raise ValueError("state must be a qubit state")
    return q


def correlation_tensor(rho) -> np.ndarray:
    """``T[a_1..a_m] = Tr(rho sigma_a1 (x) ... (x) sigma_am)`` over x, y, z."""
    arr = rho.data if isinstance(rho, ComplexMatrix) else np.asarray(rho, dtype=complex)
    q = _qubit_count(rho)
    letters = "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"
    rows, cols, outs = letters[:q], letters[q:2 * q], letters[2 * q:3 * q]
    paulis = np.stack(PAULIS)
    operands = [arr.reshape((2,) * (2 * q))]
    subs = [rows + cols]
    for s in range(q):
        operands.append(paulis)
        subs.append(outs[s] + cols[s] + rows[s])
    t = np.einsum(",".join(subs) + "->" + outs, *operands, optimize=True)
    return np.real(t)


def _setting_vectors(settings: BellSettings, s: int, t: int):
    v = settings.vectors
    m = v.shape[0]
    return [v[p, s] for p in range(m - 1)] + [v[m - 1, t]]


def _signed_value(tensor: np.ndarray, settings: BellSettings) -> float:
    total = 0.0
    for (s, t), c in COEFFS.items():
        e = tensor
        for vec in _setting_vectors(settings, s, t):
            e = np.tensordot(vec, e, axes=([0], [0]))
        total += c * float(e)
    return total


def correlation(rho, settings: BellSettings, s: int, t: int) -> float:
    """``E`` with setting s on the first parties and t on the last one (0-based)."""
    arr = rho.data if isinstance(rho, ComplexMatrix) else np.asarray(rho, dtype=complex)
    op = np.array([[1.0 + 0j]])
    m = settings.vectors.shape[0]
    for p in range(m):
        op = np.kron(op, settings.observable(p, s if p < m - 1 else t))
    return float(np.real(np.trace(arr @ op)))


def bell_value(rho, settings: BellSettings) -> float:
    q = _qubit_count(rho)
    if settings.vectors.shape[0] != q:
        raise ValueError(f"settings cover {settings.vectors.shape[0]} parties, state has {q}")
    return abs(_signed_value(correlation_tensor(rho), settings))


def _gradient(tensor: np.ndarray, vecs: np.ndarray, party: int, setting: int) -> np.ndarray:
    """Coefficient vector of the signed value, linear in one Bloch vector."""
    m = vecs.shape[0]
    g = np.zeros(3)
    for (s, t), c in COEFFS.items():
        own = s if party < m - 1 else t
        if own != setting:
            continue
        e = tensor
        for p in reversed(range(m)):
            if p == party:
                continue
            e = np.tensordot(e, vecs[p, s if p < m - 1 else t], axes=([p], [0]))
        g += c * e
    return g


def bell_optimize(rho, restarts: int = 50, seed: int = 42, sweeps: int = 200, tol: float = 1e-13):
    """Seeded coordinate ascent over Bloch vectors; returns (value, settings).

    Each update replaces one Bloch vector by the unit vector that maximizes
    the expression with all others fixed.  The result is a lower bound on the
    true maximum.
    """
    tensor = correlation_tensor(rho)
    m = tensor.ndim
    rng = np.random.default_rng(seed)
    best_val, best = -1.0, None
    for _ in range(restarts):
        v = rng.normal(size=(m, 2, 3))
        v /= np.linalg.norm(v, axis=2, keepdims=True)
        val = _signed_value(tensor, BellSettings(v))
        for _ in range(sweeps):
            prev = val
            for p in range(m):
                for s in range(2):
                    g = _gradient(tensor, v, p, s)
                    norm = np.linalg.norm(g)
                    if norm > 1e-15:
                        v[p, s] = g / norm
            val = _signed_value(tensor, BellSettings(v))
            if val - prev <= tol:
                break
        if abs(val) > best_val:
            best_val, best = abs(val), BellSettings(v.copy())
    return best_val, best
