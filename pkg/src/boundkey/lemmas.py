"""Numerical checks of the matrix inequalities behind the constructions."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .blocks import BlockOperator
from .linalg import (ComplexMatrix, is_psd, min_eigenvalue, op_abs, partial_transpose,
                     party_transpose, spectral_norm, trace_norm)
from .states import seed_unitary, x_matrix, x_tilde

EIG_TOL = 1e-10
PPT_TOL = 1e-9


@dataclass
class LemmaReport:
    suite: str
    grid: dict
    cases: list = field(default_factory=list)
    tolerance: float = EIG_TOL

    @property
    def passed(self) -> bool:
        return all(c["passed"] for c in self.cases)

    @property
    def worst_margin(self) -> Optional[float]:
        margins = [c["margin"] for c in self.cases if c.get("margin") is not None]
        return min(margins) if margins else None

    def add(self, params: dict, margin: float, passed: bool, **extra) -> None:
        case = {"params": params, "margin": float(margin), "passed": bool(passed)}
        case.update(extra)
        self.cases.append(case)

    def to_json(self) -> dict:
        return {"suite": self.suite, "grid": self.grid, "tolerance": self.tolerance,
                "passed": self.passed, "worst_margin": self.worst_margin, "cases": self.cases}


def m_matrix(a, b, n: int) -> np.ndarray:
    """N x N block matrix with (N-1)A on the diagonal, B above and B^dagger below."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError("A and B must be square matrices of equal size")
    blocks = [[(n - 1) * a if r == c else (b if r < c else b.conj().T) for c in range(n)]
              for r in range(n)]
    return np.block(blocks)


def m_tilde_matrix(a, b, n: int) -> np.ndarray:
    """First block row (N-1)A, B, ..., B; below it A on the diagonal and B^dagger in column one."""
    a, b = np.asarray(a, dtype=complex), np.asarray(b, dtype=complex)
    if a.shape != b.shape or a.shape[0] != a.shape[1]:
        raise ValueError("A and B must be square matrices of equal size")
    z = np.zeros_like(a)
    blocks = []
    for r in range(n):
        row = []
        for c in range(n):
            if r == 0:
                row.append((n - 1) * a if c == 0 else b)
            elif c == 0:
                row.append(b.conj().T)
            else:
                row.append(a if r == c else z)
        blocks.append(row)
    return np.block(blocks)


def _random_unitary(rng, dim: int) -> np.ndarray:
    z = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
    q, r = np.linalg.qr(z)
    return q * (np.diag(r) / np.abs(np.diag(r)))


def lemma_a1_suite(trials: int = 500, seed: int = 42, max_dim: int = 8) -> LemmaReport:
    """Both block forms are PSD whenever B is normal and A dominates |B|."""
    rng = np.random.default_rng(seed)
    rep = LemmaReport("A1", {"trials": trials, "seed": seed, "max_dim": max_dim, "N": [2, 3, 4]})
    for trial in range(trials):
        n = int(rng.integers(2, 5))
        dim = int(rng.integers(1, max_dim + 1))
        u = _random_unitary(rng, dim)
        z = rng.normal(size=dim) + 1j * rng.normal(size=dim)
        b = (u * z) @ u.conj().T
        g = rng.normal(size=(dim, dim)) + 1j * rng.normal(size=(dim, dim))
        noise = rng.uniform(0, 1) * (g @ g.conj().T) / dim
        if rng.uniform() < 0.2:
            noise = 0 * noise
        a = op_abs(b) + noise
        m1 = min_eigenvalue(m_matrix(a, b, n))
        m2 = min_eigenvalue(m_tilde_matrix(a, b, n))
        margin = min(m1, m2)
        rep.add({"trial": trial, "N": n, "dim": dim}, margin, margin >= -EIG_TOL)
    return rep


def lemma_a2_scan(a, row: int, eps: float, tol: float = 1e-12) -> dict:
    """Observed spread of a PSD matrix whose chosen row sits within eps of 1/d."""
    a = np.asarray(a.data if isinstance(a, ComplexMatrix) else a, dtype=complex)
    d = a.shape[0]
    if not is_psd(a):
        raise ValueError("matrix is not PSD")
    if np.trace(a).real > 1 + tol:
        raise ValueError("matrix trace exceeds one")
    if np.max(np.abs(a[row] - 1.0 / d)) > eps + tol:
        raise ValueError(f"row {row} is not within eps of 1/d")
    diag = np.real(np.diag(a))
    lower = diag - (1.0 / d - 3 * eps)
    upper = (1.0 / d + 3 * (d - 1) * eps) - diag
    return {
        "eta_observed": float(np.max(np.abs(a - 1.0 / d))),
        "lower_margin": float(np.min(lower)),
        "upper_margin": float(np.min(upper)),
        "passed": bool(np.min(lower) >= -tol and np.min(upper) >= -tol),
    }


def perturbed_key_matrix(d: int, eps: float, rng) -> np.ndarray:
    """Mix of the all-1/d matrix with a random state, row 0 kept within eps of 1/d."""
    g = rng.normal(size=(d, d)) + 1j * rng.normal(size=(d, d))
    rho = g @ g.conj().T
    rho /= np.trace(rho).real
    ideal = np.full((d, d), 1.0 / d, dtype=complex)
    dev = np.max(np.abs(rho[0] - ideal[0]))
    lam = min(1.0, eps / dev) if dev > 0 else 1.0
    return (1 - lam) * ideal + lam * rho


def lemma_a2_suite(seed: int = 42, trials: int = 50, eps_values=(1e-2, 1e-3, 1e-4)) -> LemmaReport:
    rng = np.random.default_rng(seed)
    rep = LemmaReport("A2", {"d": [2, 3, 4], "eps": list(eps_values), "trials": trials}, tolerance=1e-12)
    for d in (2, 3, 4):
        for eps in eps_values:
            for trial in range(trials):
                res = lemma_a2_scan(perturbed_key_matrix(d, eps, rng), 0, eps)
                rep.add({"d": d, "eps": eps, "trial": trial},
                        min(res["lower_margin"], res["upper_margin"]), res["passed"],
                        eta_observed=res["eta_observed"])
    return rep


def _subsets(n: int, size: int):
    return [set(c) for c in itertools.combinations(range(1, n + 1), size)]


def lemma_v1(dim: int, n: int) -> LemmaReport:
    x = x_matrix(dim, n)
    rep = LemmaReport("V1", {"D": dim, "N": n})
    for k in range(1, n + 1):
        ak = op_abs(partial_transpose(x, [k]))
        for l in range(1, n + 1):
            m = min_eigenvalue(partial_transpose(ak, [l]))
            rep.add({"k": k, "l": l}, m, m >= -EIG_TOL)
    return rep


def lemma_v2(dim: int, n: int) -> LemmaReport:
    x = x_matrix(dim, n)
    rep = LemmaReport("V2", {"D": dim, "N": n})
    ax = op_abs(x)
    for i in range(1, n + 1):
        m = min_eigenvalue(partial_transpose(ax, [i]))
        rep.add({"form": "|X|^Ti", "i": i}, m, m >= -EIG_TOL)
        ai = op_abs(partial_transpose(x, [i]))
        for j in range(1, n + 1):
            for k in range(j, n + 1):
                m = min_eigenvalue(partial_transpose(ai, {j, k}))
                rep.add({"form": "|X^Ti|^Tjk", "i": i, "j": j, "k": k}, m, m >= -EIG_TOL)
    return rep


def lemma_v3_conditions(z: ComplexMatrix, tol: float = 1e-10) -> dict:
    """Usability conditions for a shield matrix and the non-positivity they imply."""
    n = len(z.shape)
    norm = trace_norm(z)
    cond1, cond2, cond3 = [], [], []
    for i in range(1, n + 1):
        bi = partial_transpose(op_abs(partial_transpose(z, [i])), [i])
        cond1.append(norm - trace_norm(bi))
        cond2.append(min_eigenvalue(bi))
        cond3.append(min_eigenvalue(partial_transpose(op_abs(z), [i])))
    conditions = (min(cond1) > tol and min(cond2) >= -tol and min(cond3) >= -tol)
    z_eig = min_eigenvalue(z)
    zt_eig = [min_eigenvalue(partial_transpose(z, [i])) for i in range(1, n + 1)]
    conclusion = z_eig < -tol and all(e < -tol for e in zt_eig)
    return {"conditions": bool(conditions), "conclusion": bool(conclusion),
            "norm_gap": float(min(cond1)), "min_eig_cond2": float(min(cond2)),
            "min_eig_cond3": float(min(cond3)), "min_eig_z": float(z_eig),
            "min_eig_zt": [float(e) for e in zt_eig]}


def lemma_v3(dim: int, n: int) -> LemmaReport:
    res = lemma_v3_conditions(x_matrix(dim, n))
    rep = LemmaReport("V3", {"D": dim, "N": n})
    # implication: whenever the conditions hold the conclusion must too
    ok = (not res["conditions"]) or res["conclusion"]
    rep.add({"D": dim, "N": n}, res["norm_gap"], ok, **res)
    return rep


def lemma_v4(u, n: int) -> LemmaReport:
    u = np.asarray(u, dtype=complex)
    xt = x_tilde(u, n)
    parts = [partial_transpose(xt, [i]) for i in range(1, n + 1)]
    rep = LemmaReport("V4", {"D": u.shape[0], "N": n})
    for j in range(0, n + 1):
        tj = [partial_transpose(p, [j]) if j else p for p in parts]
        lhs = op_abs(sum(p.data for p in tj))
        rhs = sum(op_abs(p.data) for p in tj)
        defect = spectral_norm(lhs - rhs)
        # the weaker operator inequality |sum| <= sum |.| is what positivity needs
        rep.add({"j": j}, -defect, defect <= EIG_TOL, defect=defect,
                inequality_margin=min_eigenvalue(rhs - lhs))
    return rep


def lemma_v_suite(which: str, dim: int, n: int, u=None) -> LemmaReport:
    if which == "V1":
        return lemma_v1(dim, n)
    if which == "V2":
        return lemma_v2(dim, n)
    if which == "V3":
        return lemma_v3(dim, n)
    if which == "V4":
        return lemma_v4(seed_unitary("vandermonde", dim) if u is None else u, n)
    raise ValueError(f"unknown suite {which!r}")


def ppt_suite(rho, tol: float = PPT_TOL) -> LemmaReport:
    """Joint key and shield transpose of every party; key-only transposes reported too."""
    if isinstance(rho, BlockOperator):
        m = rho.assemble()
        labels = list(range(1, rho.n + 1))
    else:
        m = rho
        labels = list(m.shape.labels()) or list(range(1, len(m.shape) + 1))
    rep = LemmaReport("PPT", {"dims": list(m.shape.dims)}, tolerance=tol)
    for lab in labels:
        if m.shape.owned_by(lab):
            joint = party_transpose(m, lab)
            key_only = partial_transpose(m, [m.shape.owned_by(lab)[0]])
        else:
            joint = key_only = partial_transpose(m, [lab])
        e = min_eigenvalue(joint)
        scale = max(1.0, trace_norm(m))
        rep.add({"party": lab}, e, e >= -tol * scale, key_only_min_eig=min_eigenvalue(key_only))
    return rep
