"""Twisting operations, privacy squeezing and closeness certificates."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Dict, Optional

import numpy as np

from .blocks import BlockOperator, key_tuples
from .linalg import ComplexMatrix, binary_entropy, svd, trace_norm

UNITARY_TOL = 1e-10


class TwistingFamily:
    """Controlled unitaries ``sum_t |t><t| (x) U_t``; missing ``U_t`` are identity."""

    def __init__(self, d: int, n: int, shield_dim: int, unitaries: Optional[Dict] = None):
        self.d = int(d)
        self.n = int(n)
        self.shield_dim = int(shield_dim)
        self.unitaries = {}
        for t, u in (unitaries or {}).items():
            u = np.asarray(u, dtype=complex)
            if u.shape != (self.shield_dim, self.shield_dim):
                raise ValueError(f"U_{t} has shape {u.shape}, expected {(self.shield_dim,) * 2}")
            if np.max(np.abs(u @ u.conj().T - np.eye(self.shield_dim))) > UNITARY_TOL:
                raise ValueError(f"U_{t} is not unitary")
            self.unitaries[tuple(int(v) for v in t)] = u

    def get(self, t) -> np.ndarray:
        u = self.unitaries.get(tuple(t))
        return np.eye(self.shield_dim, dtype=complex) if u is None else u

    @classmethod
    def random(cls, d: int, n: int, shield_dim: int, rng: np.random.Generator) -> "TwistingFamily":
        """Haar-random unitary for every key tuple."""
        us = {}
        for t in key_tuples(d, n):
            z = rng.normal(size=(shield_dim, shield_dim)) + 1j * rng.normal(size=(shield_dim, shield_dim))
            q, r = np.linalg.qr(z)
            us[t] = q * (np.diag(r) / np.abs(np.diag(r)))
        return cls(d, n, shield_dim, us)


def apply_twisting(rho: BlockOperator, t: TwistingFamily) -> BlockOperator:
    if (rho.d, rho.n, rho.shield_dim) != (t.d, t.n, t.shield_dim):
        raise ValueError("twisting does not match the operator's key or shield dimensions")
    blocks = {(r, c): t.get(r) @ b @ t.get(c).conj().T for (r, c), b in rho.blocks.items()}
    return BlockOperator(rho.d, rho.n, rho.shield, blocks, check=False)


def _row_tuple(rho: BlockOperator, row) -> tuple:
    if isinstance(row, (int, np.integer)):
        row = (int(row),) * rho.n
    row = tuple(int(v) for v in row)
    if len(row) != rho.n or len(set(row)) != 1 or not 0 <= row[0] < rho.d:
        raise ValueError(f"row must be a diagonal key tuple (i,...,i), got {row}")
    return row


def squeezing_twist(rho: BlockOperator, row=0, tol: float = 1e-14) -> TwistingFamily:
    """Twisting that turns every block of the chosen row into its trace norm."""
    row = _row_tuple(rho, row)
    i = row[0]
    parts = {}
    for j in range(rho.d):
        if j == i:
            continue
        b = rho.block(row, (j,) * rho.n)
        if np.max(np.abs(b), initial=0.0) <= tol:
            continue
        v, _, wh = svd(b)
        parts[j] = (v, wh.conj().T)
    unitaries = {}
    if parts:
        v_ref = parts[min(parts)][0].conj().T
        unitaries[row] = v_ref
        for j, (v, w) in parts.items():
            unitaries[(j,) * rho.n] = v_ref @ v @ w.conj().T
    return TwistingFamily(rho.d, rho.n, rho.shield_dim, unitaries)


def reduce_to_key(rho: BlockOperator) -> ComplexMatrix:
    """Trace out the shield blockwise."""
    kd = rho.d ** rho.n
    out = np.zeros((kd, kd), dtype=complex)
    tuples = {t: k for k, t in enumerate(key_tuples(rho.d, rho.n))}
    for (r, c), b in rho.blocks.items():
        out[tuples[r], tuples[c]] += np.trace(b)
    return ComplexMatrix(out, rho.key_shape)


def privacy_squeeze(rho: BlockOperator, row=0) -> ComplexMatrix:
    """Key-only state left after the squeezing twist and tracing the shield."""
    return reduce_to_key(apply_twisting(rho, squeezing_twist(rho, row)))


def row_norms(rho: BlockOperator, row=0) -> np.ndarray:
    row = _row_tuple(rho, row)
    return np.array([trace_norm(rho.block(row, (j,) * rho.n)) for j in range(rho.d)])


def effective_entropy(x: float) -> float:
    """Binary entropy, held at its maximum once the argument passes 1/2."""
    return 1.0 if x >= 0.5 else binary_entropy(x)


def sufficient_bound(d: int, n: int, eta: float) -> float:
    """Distance to some private state guaranteed by row norms within ``eta`` of 1/d."""
    if eta < 0:
        raise ValueError("eta must be nonnegative")
    s = 2.0 * math.sqrt(d * eta)
    return math.sqrt(2 * n * (s / 2) * math.log2(d) + effective_entropy(s)) + s


@dataclass
class ClosenessReport:
    d: int
    n: int
    row: int
    norms: np.ndarray
    epsilon: float
    sufficient_bound: Optional[float] = None
    eta: Optional[float] = None
    notes: list = field(default_factory=list)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "N": self.n,
            "row": self.row,
            "norms": [float(x) for x in self.norms],
            "epsilon": float(self.epsilon),
            "eta": None if self.eta is None else float(self.eta),
            "sufficient_bound": None if self.sufficient_bound is None else float(self.sufficient_bound),
            "notes": list(self.notes),
        }


def closeness_report(rho: BlockOperator, row=0, eta: Optional[float] = None) -> ClosenessReport:
    """Row block norms, their largest deviation from 1/d and the matching bound.

    For bit keys the deviation itself serves as ``eta``.  For larger keys the
    bound is only evaluated when ``eta`` is supplied.
    """
    r = _row_tuple(rho, row)
    norms = row_norms(rho, r)
    eps = float(np.max(np.abs(norms - 1.0 / rho.d)))
    notes = []
    if eta is None and rho.d == 2:
        # bit keys need only the single off-diagonal norm
        eta = max(0.0, 0.5 - float(norms[1 - r[0]]))
        notes.append("d = 2: eta taken from the off-diagonal norm deficit")
    elif eta is None:
        notes.append("d > 2: bound needs a caller-supplied eta")
    bound = None if eta is None else sufficient_bound(rho.d, rho.n, eta)
    return ClosenessReport(rho.d, rho.n, r[0], norms, eps, bound, eta, notes)


def power_closeness(base: BlockOperator, k: int, row=0) -> ClosenessReport:
    """Closeness report for ``k`` tensor copies of ``base`` without building them.

    Trace norms and traces are multiplicative over tensor powers, so the row
    norms follow from the single-copy blocks.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    r = _row_tuple(base, row)
    total = sum(np.trace(b).real ** k for (x, y), b in base.blocks.items() if x == y)
    norms = np.array([trace_norm(base.block(r, (j,) * base.n)) ** k for j in range(base.d)]) / total
    eps = float(np.max(np.abs(norms - 1.0 / base.d)))
    notes, eta = [], None
    if base.d == 2:
        eta = max(0.0, 0.5 - float(norms[1 - r[0]]))
        notes.append("d = 2: eta taken from the off-diagonal norm deficit")
    else:
        notes.append("d > 2: bound needs a caller-supplied eta")
    bound = None if eta is None else sufficient_bound(base.d, base.n, eta)
    return ClosenessReport(base.d, base.n, r[0], norms, eps, bound, eta, notes)
