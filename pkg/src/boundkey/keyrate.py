"""Key-rate lower and upper bounds built on classical-quantum states."""

from __future__ import annotations

import math
from collections import defaultdict
from dataclasses import dataclass, field
from typing import Optional, Sequence

import numpy as np

from .blocks import BlockOperator
from .cq import CqState
from .linalg import (binary_entropy, herm_eig, relative_entropy,
                     shannon_entropy, trace_norm, von_neumann_entropy)
from .protocol import log2_probability, weights
from .states import (PditSpec, diagonal_tuples, is_hermitian_seed, off_tuple_count,
                     psi_bar_tuple, psi_tuple, seed_unitary)

CURVE_HEADER = ("family", "D", "N", "k", "p_success", "K_DW", "K_DW_raw", "K_scaled")


def _family_cq(n: int, a: float, b: float) -> CqState:
    zero, one = psi_tuple(0, n), psi_bar_tuple(0, n)
    probs = {zero: a, one: a}
    eve = {zero: 0, one: 0}
    for j in range(1, off_tuple_count(n) + 1):
        probs[psi_tuple(j, n)] = b
        eve[psi_tuple(j, n)] = 2 * j - 1
        probs[psi_bar_tuple(j, n)] = b
        eve[psi_bar_tuple(j, n)] = 2 * j
    return CqState(2, n, probs, eve, tol=1e-12)


def cq_one(dim: int, n: int, k: int) -> CqState:
    """Measured privacy-squeezed output of k copies of the first family."""
    return _family_cq(n, *weights("one", dim, n, k))


def cq_two(u, n: int, k: int) -> CqState:
    """Same for the second family; only the dimension of the flat seed matters."""
    dim = u if isinstance(u, (int, np.integer)) else np.asarray(u).shape[0]
    return _family_cq(n, *weights("two", dim, n, k))


def _check_party(cq: CqState, i: int) -> int:
    if not 1 <= i <= cq.n:
        raise ValueError(f"party index {i} out of range 1..{cq.n}")
    return i - 1


def _marginal(cq: CqState, parties) -> dict:
    out = defaultdict(float)
    for t, p in cq.probs.items():
        out[tuple(t[q] for q in parties)] += p
    return out


def classical_mutual_information(cq: CqState, i: int, j: int) -> float:
    a, b = _check_party(cq, i), _check_party(cq, j)
    return (shannon_entropy(list(_marginal(cq, [a]).values()))
            + shannon_entropy(list(_marginal(cq, [b]).values()))
            - shannon_entropy(list(_marginal(cq, [a, b]).values())))


def eve_mutual_information(cq: CqState, i: int) -> float:
    """``I(A_i : E)``; Shannon-only when Eve's states are orthonormal labels."""
    a = _check_party(cq, i)
    if cq.labelled:
        joint = defaultdict(float)
        eve = defaultdict(float)
        for t, p in cq.probs.items():
            joint[(t[a], int(cq.eve[t]))] += p
            eve[int(cq.eve[t])] += p
        ha = shannon_entropy(list(_marginal(cq, [a]).values()))
        return ha + shannon_entropy(list(eve.values())) - shannon_entropy(list(joint.values()))
    cond = defaultdict(lambda: 0)
    for t, p in cq.probs.items():
        cond[t[a]] = cond[t[a]] + p * cq.eve[t]
    total = sum(cond.values())
    s_cond = 0.0
    for op in cond.values():
        w = float(np.trace(op).real)
        if w > 0:
            s_cond += w * von_neumann_entropy(op / w)
    return von_neumann_entropy(total) - s_cond


def dw_bound(cq: CqState, i: int = 1, j: int = 2) -> float:
    """One-way rate ``I(A_i:A_j) - I(A_i:E)`` in bits, parties 1-based."""
    if i == j:
        raise ValueError("dw_bound needs two different parties")
    _check_party(cq, j)
    return classical_mutual_information(cq, i, j) - eve_mutual_information(cq, i)


def dw_best(cq: CqState) -> float:
    """Best distinguished party against its worst partner."""
    best = -math.inf
    for i in range(1, cq.n + 1):
        worst = min(classical_mutual_information(cq, i, j) for j in range(1, cq.n + 1) if j != i)
        best = max(best, worst - eve_mutual_information(cq, i))
    return best


@dataclass
class ProtocolPoint:
    family: str
    dim: int
    n: int
    k: int
    success_probability: float
    k_dw: float
    k_dw_raw: float
    k_scaled: float

    def row(self) -> tuple:
        return (self.family, self.dim, self.n, self.k, self.success_probability,
                self.k_dw, self.k_dw_raw, self.k_scaled)


def key_curve(family: str, dim: int, n: int, ks: Sequence[int],
              prob_model: Optional[str] = None, seed: str = "vandermonde") -> list:
    """DW lower bound and probability-weighted bound along a range of k.

    ``prob_model`` selects the success probability of the second family:
    ``hermitian`` keeps every all-equal outcome, ``general`` only all zeros.
    By default it follows the seed unitary.
    """
    ks = list(ks)
    if not ks:
        raise ValueError("k range is empty")
    if family == "one":
        hermitian = True
    elif family == "two":
        if prob_model is None:
            hermitian = is_hermitian_seed(seed_unitary(seed, dim))
        elif prob_model in ("hermitian", "general"):
            hermitian = prob_model == "hermitian"
        else:
            raise ValueError(f"unknown probability model {prob_model!r}")
    else:
        raise ValueError(f"unknown family {family!r}")
    points = []
    for k in ks:
        cq = cq_one(dim, n, k) if family == "one" else cq_two(dim, n, k)
        raw = dw_bound(cq, 1, 2)
        p = 2.0 ** log2_probability(family, dim, n, k, hermitian)
        kdw = max(raw, 0.0)
        points.append(ProtocolPoint(family, dim, n, k, p, kdw, raw, p * kdw))
    return points


def _eve_ops(cq: CqState) -> dict:
    ex = cq.explicit()
    return {t: ex.probs[t] * ex.eve[t] for t in ex.probs}


def _ideal_eve(cq: CqState) -> np.ndarray:
    ops = _eve_ops(cq)
    diag = [ops[t] for t in diagonal_tuples(cq.d, cq.n) if t in ops]
    if not diag:
        ref = sum(ops.values())
    else:
        ref = sum(diag)
    return ref / float(np.trace(ref).real)


def thm_iv3_check(cq: CqState, slack: float = 1e-10) -> dict:
    """Global versus pairwise distances to the ideal key, party 1 distinguished.

    The ideal uses Eve's normalized average state on the correlated tuples.
    """
    ops = _eve_ops(cq)
    ref = _ideal_eve(cq)
    d, n = cq.d, cq.n
    diag = set(diagonal_tuples(d, n))
    delta = 0.0
    for t, op in ops.items():
        if t not in diag:
            delta += float(np.trace(op).real)
    for t in diag:
        delta += trace_norm(ops.get(t, 0 * ref) - ref / d)
    pairwise = {}
    for j in range(2, n + 1):
        red = defaultdict(lambda: 0 * ref)
        for t, op in ops.items():
            red[(t[0], t[j - 1])] = red[(t[0], t[j - 1])] + op
        dj = 0.0
        for a in range(d):
            for b in range(d):
                op = red[(a, b)]
                dj += trace_norm(op - ref / d) if a == b else float(np.trace(op).real)
        pairwise[j] = dj
    dmax = max(pairwise.values())
    forward = all(v <= delta + slack for v in pairwise.values())
    converse = delta <= (4 * n - 3) * dmax + slack
    return {"Delta": delta, "delta": pairwise, "forward": forward, "converse": converse,
            "passed": forward and converse}


@dataclass
class EdBoundReport:
    pairs: dict
    value: float
    restarts: int
    seed: int
    heuristic: bool = True
    notes: list = field(default_factory=lambda: ["product-vector search is heuristic; values are estimates"])

    def to_json(self) -> dict:
        out = {}
        for (i, j), r in self.pairs.items():
            out[f"{i},{j}"] = {k: (float(v) if np.isscalar(v) else v) for k, v in r.items()
                               if k not in ("f", "g")}
        return {"pairs": out, "value": float(self.value), "restarts": self.restarts,
                "seed": self.seed, "heuristic": self.heuristic, "notes": list(self.notes)}


def _site_dims(shape) -> list:
    """Local dimension of each shield party, grouping factors by owner."""
    labels = shape.labels()
    if not labels or any(p.label is None for p in shape.parties):
        return list(shape.dims), list(range(len(shape)))
    dims, order = [], []
    for lab in labels:
        idx = [k for k, p in enumerate(shape.parties) if p.label == lab]
        order.extend(idx)
        dims.append(int(np.prod([shape.parties[k].dim for k in idx])))
    return dims, order


def _twisted_blocks(state):
    """``d``, shield shape and ``(i, j) -> U_i rho U_j^dagger`` from a PditSpec or a private state."""
    if isinstance(state, PditSpec):
        rho = state.rho.data
        us = [np.asarray(u, dtype=complex) for u in state.unitaries]
        get = lambda i, j: us[i] @ rho @ us[j].conj().T
        return state.d, state.shield, get
    if isinstance(state, BlockOperator):
        diag = diagonal_tuples(state.d, state.n)
        get = lambda i, j: state.d * state.block(diag[i], diag[j])
        return state.d, state.shield, get
    raise TypeError("expected a PditSpec or a private-state BlockOperator")


def _regroup(m: np.ndarray, shape_dims, order) -> np.ndarray:
    n = len(shape_dims)
    t = m.reshape(tuple(shape_dims) * 2)
    t = t.transpose(list(order) + [n + k for k in order])
    return t.reshape(m.shape)


def _product(vecs) -> np.ndarray:
    out = np.array([1.0 + 0j])
    for v in vecs:
        out = np.kron(out, v)
    return out


def _eta_search(m: np.ndarray, dims, rng, restarts: int, sweeps: int = 500, tol: float = 1e-13):
    n = len(dims)
    t = m.reshape(tuple(dims) * 2)
    best = (-1.0, None, None)
    letters = "abcdefghijklmnopqrstuvwxyz"
    rows, cols = letters[:n], letters[n:2 * n]
    for _ in range(restarts):
        fs = [_unit(rng, dd) for dd in dims]
        gs = [_unit(rng, dd) for dd in dims]
        val = 0.0
        for _ in range(sweeps):
            prev = val
            for s in range(n):
                operands, subs = [t], [rows + cols]
                for q in range(n):
                    if q != s:
                        operands += [fs[q].conj(), gs[q]]
                        subs += [rows[q], cols[q]]
                local = np.einsum(",".join(subs) + "->" + rows[s] + cols[s], *operands)
                u, sv, vh = np.linalg.svd(local)
                fs[s] = u[:, 0]
                gs[s] = vh[0].conj()
                val = float(sv[0])
            if abs(val - prev) <= tol * max(1.0, val):
                break
        if val > best[0]:
            best = (val, [f.copy() for f in fs], [g.copy() for g in gs])
    return best


def _unit(rng, dim: int) -> np.ndarray:
    v = rng.normal(size=dim) + 1j * rng.normal(size=dim)
    return v / np.linalg.norm(v)


def ed_lower_bound(state, restarts: int = 20, seed: int = 42) -> EdBoundReport:
    """Distillable-entanglement estimate of a private state from product-vector overlaps."""
    d, shield, get = _twisted_blocks(state)
    dims, order = _site_dims(shield)
    if max(dims) > 6:
        raise ValueError(f"shield dimension per party {max(dims)} exceeds the search limit 6")
    shape_dims = list(shield.dims)
    rng = np.random.default_rng(seed)
    pairs = {}
    best_value = 0.0
    for i in range(d):
        for j in range(i + 1, d):
            m = _regroup(get(i, j), shape_dims, order)
            eta, fs, gs = _eta_search(m, dims, rng, restarts)
            f, g = _product(fs), _product(gs)
            a1 = float(np.real(f.conj() @ _regroup(get(i, i), shape_dims, order) @ f))
            a2 = float(np.real(g.conj() @ _regroup(get(j, j), shape_dims, order) @ g))
            amax = max(a1, a2)
            ratio = eta / math.sqrt(a1 * a2) if a1 > 0 and a2 > 0 else 0.0
            bound = amax * (1.0 - binary_entropy(min(1.0, 0.5 + ratio / 2)))
            pairs[(i, j)] = {"eta": eta, "a1": a1, "a2": a2, "a_max": amax, "bound": bound,
                             "f": fs, "g": gs}
            best_value = max(best_value, bound)
    return EdBoundReport(pairs, best_value, restarts, seed)


def relative_entropy_bound(rho, sigma) -> dict:
    """``S(rho || sigma)`` in bits; an upper bound on the key when ``sigma`` is separable.

    Separability of ``sigma`` is the caller's claim and is not checked.
    """
    r = rho.assemble() if hasattr(rho, "assemble") else rho
    s = sigma.assemble() if hasattr(sigma, "assemble") else sigma
    sv = herm_eig(s).values
    if sv[0] < -1e-9 or abs(sv.sum() - 1) > 1e-9:
        raise ValueError("candidate must be a unit-trace PSD matrix")
    value = relative_entropy(r, s)
    return {"value": value, "caveat": "valid upper bound only if the candidate is fully separable"}
