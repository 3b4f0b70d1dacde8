"""Classical-quantum states produced by measuring key registers."""

from __future__ import annotations

from typing import Dict, Optional, Union

import numpy as np

from .blocks import BlockOperator, key_index, key_tuples
from .linalg import ComplexMatrix, herm_eig, trace_norm

EveState = Union[int, np.ndarray]


class CqState:
    """Distribution over key tuples with an Eve state attached to each.

    ``eve[t]`` is either an integer label, meaning the pure basis state with
    that index in an orthonormal family, or an explicit normalized density
    matrix.  Tuples missing from ``probs`` have probability zero.
    """

    def __init__(self, d: int, n: int, probs: Dict, eve: Dict, tol: float = 1e-9):
        self.d = int(d)
        self.n = int(n)
        self.probs = {tuple(int(v) for v in t): float(p) for t, p in probs.items()}
        self.eve = {tuple(int(v) for v in t): e for t, e in eve.items()}
        if set(self.probs) != set(self.eve):
            raise ValueError("probs and eve must have the same key tuples")
        for t in self.probs:
            if len(t) != self.n or not all(0 <= v < self.d for v in t):
                raise ValueError(f"key tuple {t} is not in {{0..{self.d - 1}}}^{self.n}")
        if any(p < -tol for p in self.probs.values()):
            raise ValueError("probabilities must be nonnegative")
        total = sum(self.probs.values())
        if abs(total - 1.0) > tol:
            raise ValueError(f"probabilities sum to {total}, expected 1")
        kinds = {isinstance(e, (int, np.integer)) for e in self.eve.values()}
        if len(kinds) > 1:
            raise ValueError("eve states must be all labels or all explicit")

    def __repr__(self) -> str:
        return f"CqState(d={self.d}, N={self.n}, support={len(self.probs)}, labelled={self.labelled})"

    @property
    def labelled(self) -> bool:
        return all(isinstance(e, (int, np.integer)) for e in self.eve.values())

    def support(self, tol: float = 0.0):
        return sorted(t for t, p in self.probs.items() if p > tol)

    def explicit(self, dim: Optional[int] = None) -> "CqState":
        """Replace labels by the matching basis projectors."""
        if not self.labelled:
            return self
        size = max(int(e) for e in self.eve.values()) + 1
        dim = size if dim is None else dim
        if dim < size:
            raise ValueError(f"Eve dimension {dim} is too small for {size} labels")
        eve = {}
        for t, e in self.eve.items():
            m = np.zeros((dim, dim), dtype=complex)
            m[int(e), int(e)] = 1.0
            eve[t] = m
        return CqState(self.d, self.n, self.probs, eve)

    def to_labels(self, tol: float = 1e-8) -> "CqState":
        """Relabel Eve states that are pairwise identical or orthogonal.

        Labels are assigned by first appearance in sorted tuple order, so two
        states with the same structure get the same labels.
        """
        if self.labelled:
            order = {}
            eve = {}
            for t in sorted(self.eve):
                e = int(self.eve[t])
                order.setdefault(e, len(order))
                eve[t] = order[e]
            return CqState(self.d, self.n, self.probs, eve)
        reps = []
        eve = {}
        for t in sorted(self.eve):
            rho = self.eve[t]
            for lab, ref in enumerate(reps):
                if trace_norm(rho - ref) <= tol:
                    eve[t] = lab
                    break
                if abs(np.trace(rho @ ref)) > tol:
                    raise ValueError(f"Eve state of {t} is neither equal nor orthogonal to label {lab}")
            else:
                eve[t] = len(reps)
                reps.append(rho)
        return CqState(self.d, self.n, self.probs, eve)

    def joint(self) -> np.ndarray:
        """Stack ``p_t * rho_t`` into an array indexed by key index."""
        ex = self.explicit()
        dim = next(iter(ex.eve.values())).shape[0]
        out = np.zeros((self.d ** self.n, dim, dim), dtype=complex)
        for t, p in ex.probs.items():
            out[key_index(t, self.d)] = p * ex.eve[t]
        return out

    def eve_average(self) -> np.ndarray:
        return self.joint().sum(axis=0)

    def invariants(self) -> dict:
        """Quantities unchanged by a unitary on Eve's system."""
        ex = self.explicit()
        ts = sorted(ex.probs)
        ops = [ex.probs[t] * ex.eve[t] for t in ts]
        gram = np.array([[np.trace(a @ b).real for b in ops] for a in ops])
        spectra = [np.sort(np.clip(herm_eig(o).values, 0, None))[::-1] for o in ops]
        return {"tuples": ts, "probs": np.array([ex.probs[t] for t in ts]),
                "gram": gram, "spectra": spectra}


def cq_trace_distance(a: CqState, b: CqState) -> float:
    """Trace distance between two cq states written in the same Eve frame."""
    if (a.d, a.n) != (b.d, b.n):
        raise ValueError("cq states have different key spaces")
    if a.labelled and b.labelled:
        size = max(int(e) for e in list(a.eve.values()) + list(b.eve.values())) + 1
        a, b = a.explicit(size), b.explicit(size)
    ja, jb = a.joint(), b.joint()
    if ja.shape != jb.shape:
        raise ValueError("cq states have different Eve dimensions")
    return float(sum(trace_norm(x - y) for x, y in zip(ja, jb)))


def measure_to_cq(rho, d: Optional[int] = None, n: Optional[int] = None,
                  tol: float = 1e-12) -> CqState:
    """Measure every key register of a purified state in the computational basis.

    ``rho`` is a :class:`BlockOperator` or a dense matrix whose first ``n``
    factors are the d-dimensional key registers.  Eve holds the purifying
    system, written in the eigenbasis of ``rho`` restricted to its support.
    """
    if isinstance(rho, BlockOperator):
        d, n = rho.d, rho.n
        arr = rho.assemble().data
    else:
        if d is None or n is None:
            raise ValueError("d and n are required for a dense input")
        arr = rho.data if isinstance(rho, ComplexMatrix) else np.asarray(rho, dtype=complex)
    kd = d ** n
    if arr.shape[0] % kd:
        raise ValueError(f"dimension {arr.shape[0]} is not a multiple of {kd}")
    sd = arr.shape[0] // kd
    spec = herm_eig(arr)
    keep = spec.values > tol
    lam = spec.values[keep]
    vecs = spec.vectors[:, keep]
    root = np.sqrt(lam)
    probs, eve = {}, {}
    for t in key_tuples(d, n):
        i = key_index(t, d)
        w = vecs[i * sd:(i + 1) * sd, :] * root
        sigma = w.T @ w.conj()
        p = float(np.trace(sigma).real)
        if p > tol:
            probs[t] = p
            eve[t] = sigma / p
    total = sum(probs.values())
    probs = {t: p / total for t, p in probs.items()}
    return CqState(d, n, probs, eve, tol=1e-6)
