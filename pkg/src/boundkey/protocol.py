"""Recurrence distillation: closed-form k-copy outputs and a step simulator.

Each step takes the accumulated state and a fresh copy.  Every party applies a
SUM gate from its accumulated key register onto the fresh one, measures the
fresh register and the copy is kept only when all parties see the same value
(``all-equal``) or all see zero (``all-zeros``).  ``k`` counts copies consumed,
so k copies need k - 1 steps.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from .blocks import BlockOperator
from .linalg import ComplexMatrix, Shape
from .states import (block_traces_two, construction_one, construction_two, is_flat,
                     is_hermitian_seed, normalization_one, normalization_two,
                     off_tuple_count, shield_shape)

KEEP_RULES = ("all-equal", "all-zeros")


def c_one(dim: int, n: int) -> float:
    """Trace norm of a partially transposed X for the first family."""
    return dim ** n / (dim ** n + 2 * dim - 4)


def log2_norm_one(dim: int, n: int, k: int) -> float:
    return 1.0 + math.log2(1.0 + off_tuple_count(n) * c_one(dim, n) ** k)


def norm_one(dim: int, n: int, k: int) -> float:
    return 2.0 * (1.0 + off_tuple_count(n) * c_one(dim, n) ** k)


def traces_two(dim: int, n: int):
    """Block traces of the flat-seed second family at psi_0 and at psi_j."""
    return block_traces_two(np.full((dim, dim), 1 / math.sqrt(dim)), n)


def log2_norm_two(dim: int, n: int, k: int) -> float:
    a, b = traces_two(dim, n)
    m = off_tuple_count(n)
    return 1.0 + k * math.log2(a) + math.log2(1.0 + m * (b / a) ** k)


def norm_two(dim: int, n: int, k: int) -> float:
    return 2.0 ** log2_norm_two(dim, n, k)


def log2_probability(family: str, dim: int, n: int, k: int, hermitian: bool = True) -> float:
    if k < 1:
        raise ValueError("k must be at least 1")
    lognorm = log2_norm_one if family == "one" else log2_norm_two
    steps = (k - 1) if hermitian else 0
    return steps + lognorm(dim, n, k) - k * lognorm(dim, n, 1)


def success_probability(family: str, dim: int, n: int, k: int, hermitian: bool = True) -> float:
    return 2.0 ** log2_probability(family, dim, n, k, hermitian)


def weights(family: str, dim: int, n: int, k: int):
    """Normalized traces ``(a, b)`` of the psi_0 and psi_j blocks after k copies."""
    m = off_tuple_count(n)
    if family == "one":
        r = c_one(dim, n)
    else:
        a, b = traces_two(dim, n)
        r = b / a
    rk = r ** k
    denom = 2.0 + 2.0 * m * rk
    return 1.0 / denom, rk / denom


@dataclass
class ProtocolOutput:
    family: str
    dim: int
    n: int
    k: int
    success_probability: float
    log2_probability: float
    normalization: float
    keep_rule: str
    state: Optional[BlockOperator] = None
    notes: list = field(default_factory=list)


def _power(base: BlockOperator, k: int, copies_shield) -> BlockOperator:
    blocks = {}
    for key, b in base.blocks.items():
        p = b
        for _ in range(k - 1):
            p = np.kron(p, b)
        blocks[key] = p
    out = BlockOperator(base.d, base.n, copies_shield, blocks, check=False)
    return out.scaled(1.0 / out.trace())


def recurse_one(dim: int, n: int, k: int, build_state: bool = True) -> ProtocolOutput:
    """Outcome of k copies of the first family after the recurrence."""
    if k < 1:
        raise ValueError("k must be at least 1")
    state = None
    if build_state:
        base = construction_one(dim, n).scaled(normalization_one(dim, n))
        state = _power(base, k, shield_shape(dim, n, k))
    lp = log2_probability("one", dim, n, k)
    return ProtocolOutput("one", dim, n, k, 2.0 ** lp, lp, norm_one(dim, n, k),
                          "all-equal", state)


def recurse_two(u, n: int, k: int, build_state: bool = True,
                hermitian: Optional[bool] = None) -> ProtocolOutput:
    """Outcome of k copies of the second family.

    Hermitian seeds use the all-equal rule; other seeds keep only the
    all-zeros outcome and lose the factor 2^(k-1) in probability.
    """
    if k < 1:
        raise ValueError("k must be at least 1")
    u = np.asarray(u, dtype=complex)
    if not is_flat(u):
        raise ValueError("the second family closed form needs a flat seed")
    dim = u.shape[0]
    herm = is_hermitian_seed(u) if hermitian is None else bool(hermitian)
    state = None
    if build_state:
        base = construction_two(u, n).scaled(normalization_two(u, n))
        state = _power(base, k, shield_shape(dim, n, k))
    lp = log2_probability("two", dim, n, k, herm)
    notes = [] if herm else ["non-Hermitian seed: all-zeros rule, probability without 2^(k-1)"]
    return ProtocolOutput("two", dim, n, k, 2.0 ** lp, lp, norm_two(dim, n, k),
                          "all-equal" if herm else "all-zeros", state, notes)


def _kept_values(d: int, rule: str):
    if rule == "all-equal":
        return list(range(d))
    if rule == "all-zeros":
        return [0]
    raise ValueError(f"unknown keep rule {rule!r}; expected one of {KEEP_RULES}")


def protocol_step(acc: BlockOperator, fresh: BlockOperator, keep_rule: str = "all-equal"):
    """One recurrence step on block operators.

    Returns the renormalized kept state and the probability of keeping it.
    """
    if (acc.d, acc.n) != (fresh.d, fresh.n):
        raise ValueError("accumulator and fresh copy have different key structure")
    d, n = acc.d, acc.n
    kept = _kept_values(d, keep_rule)
    blocks = {}
    for (r, c), b in acc.blocks.items():
        for t in kept:
            fr = tuple((t - v) % d for v in r)
            fc = tuple((t - v) % d for v in c)
            f = fresh.blocks.get((fr, fc))
            if f is None:
                continue
            term = np.kron(b, f)
            if (r, c) in blocks:
                blocks[(r, c)] = blocks[(r, c)] + term
            else:
                blocks[(r, c)] = term
    out = BlockOperator(d, n, acc.shield + fresh.shield, blocks, check=False)
    prob = out.trace()
    if prob <= 0:
        return out, 0.0
    return out.scaled(1.0 / prob), prob


def iterate_protocol(base: BlockOperator, k: int, keep_rule: str = "all-equal"):
    """Run k - 1 steps feeding fresh copies of ``base``; returns state and total probability."""
    state, total = base, 1.0
    for _ in range(k - 1):
        state, p = protocol_step(state, base, keep_rule)
        total *= p
    return state, total


def dense_protocol_step(acc: ComplexMatrix, fresh: ComplexMatrix, d: int, n: int,
                        keep_rule: str = "all-equal"):
    """Reference step on dense matrices with key registers first in each input.

    The SUM gates are applied as a permutation of the joint basis, then the
    fresh keys are projected and traced out.
    """
    kept = _kept_values(d, keep_rule)
    kd = d ** n
    s1, s2 = acc.dim // kd, fresh.dim // kd
    if s1 * kd != acc.dim or s2 * kd != fresh.dim:
        raise ValueError("dense inputs are not key registers followed by a shield")
    total = acc.dim * fresh.dim
    if total > 4096:
        raise ValueError(f"joint dimension {total} exceeds the dense limit 4096")
    joint = np.kron(acc.data, fresh.data)
    dims = (d,) * n + (s1,) + (d,) * n + (s2,)
    digits = np.array(np.unravel_index(np.arange(total), dims))
    image = digits.copy()
    image[n + 1:2 * n + 1] = (digits[n + 1:2 * n + 1] + digits[:n]) % d
    perm = np.ravel_multi_index(tuple(image), dims)
    rotated = np.zeros_like(joint)
    rotated[np.ix_(perm, perm)] = joint
    out = np.zeros((kd * s1 * s2, kd * s1 * s2), dtype=complex)
    for t in kept:
        sel = np.all(digits[n + 1:2 * n + 1] == t, axis=0)
        idx = np.nonzero(sel)[0]
        # remaining order: acc keys, acc shield, fresh shield
        out += rotated[np.ix_(idx, idx)]
    prob = float(np.trace(out).real)
    rest = Shape(fresh.shape.parties[n:])
    if rest.dim != s2:
        rest = Shape.from_dims([s2])
    head = acc.shape if acc.shape.dim == acc.dim and len(acc.shape) > n else Shape.from_dims([acc.dim])
    shape = head + rest
    return ComplexMatrix(out / prob if prob > 0 else out, shape), prob
