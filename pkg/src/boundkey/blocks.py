"""Operators stored as blocks indexed by pairs of key tuples."""

from __future__ import annotations

import itertools
from typing import Dict, Tuple

import numpy as np

from .linalg import ComplexMatrix, Party, Shape
from .serialize import complex_pairs, from_pairs, shape_from_json, shape_to_json

KeyTuple = Tuple[int, ...]


def key_index(t, d: int) -> int:
    idx = 0
    for v in t:
        idx = idx * d + int(v)
    return idx


def key_tuples(d: int, n: int):
    return list(itertools.product(range(d), repeat=n))


class BlockOperator:
    """Operator on ``(C^d)^{ox N}`` key registers tensored with a shield.

    ``blocks`` maps ``(row, col)`` key tuples to shield-sized matrices; missing
    entries are zero.  The dense form orders the N key factors first and the
    shield factors after them.
    """

    def __init__(self, d: int, n: int, shield: Shape, blocks: Dict, check: bool = True):
        self.d = int(d)
        self.n = int(n)
        self.shield = shield if isinstance(shield, Shape) else Shape(shield)
        sd = self.shield.dim
        self.blocks: Dict[Tuple[KeyTuple, KeyTuple], np.ndarray] = {}
        for (r, c), b in blocks.items():
            r, c = tuple(int(v) for v in r), tuple(int(v) for v in c)
            b = np.asarray(b, dtype=complex)
            if check:
                if len(r) != self.n or len(c) != self.n:
                    raise ValueError(f"key tuple length must be {self.n}: {r}, {c}")
                if any(not 0 <= v < self.d for v in r + c):
                    raise ValueError(f"key values must lie in 0..{self.d - 1}: {r}, {c}")
                if b.shape != (sd, sd):
                    raise ValueError(f"block {r},{c} has shape {b.shape}, expected {(sd, sd)}")
            self.blocks[(r, c)] = b

    def __repr__(self) -> str:
        return f"BlockOperator(d={self.d}, N={self.n}, shield={self.shield.dims}, blocks={len(self.blocks)})"

    @property
    def key_shape(self) -> Shape:
        return Shape(Party(key=self.d, label=p) for p in range(1, self.n + 1))

    @property
    def full_shape(self) -> Shape:
        return self.key_shape + self.shield

    @property
    def shield_dim(self) -> int:
        return self.shield.dim

    @property
    def dim(self) -> int:
        return self.d ** self.n * self.shield_dim

    def block(self, row, col) -> np.ndarray:
        b = self.blocks.get((tuple(row), tuple(col)))
        if b is None:
            return np.zeros((self.shield_dim, self.shield_dim), dtype=complex)
        return b

    def trace(self) -> float:
        return float(sum(np.trace(b).real for (r, c), b in self.blocks.items() if r == c))

    def scaled(self, factor: float) -> "BlockOperator":
        return BlockOperator(self.d, self.n, self.shield,
                             {k: factor * b for k, b in self.blocks.items()}, check=False)

    def is_hermitian(self, tol: float = 1e-10) -> bool:
        for (r, c), b in self.blocks.items():
            other = self.block(c, r)
            scale = max(1.0, float(np.max(np.abs(b))))
            if np.max(np.abs(b - other.conj().T)) > tol * scale:
                return False
        return True

    def assemble(self) -> ComplexMatrix:
        sd = self.shield_dim
        kd = self.d ** self.n
        out = np.zeros((kd * sd, kd * sd), dtype=complex)
        for (r, c), b in self.blocks.items():
            i, j = key_index(r, self.d), key_index(c, self.d)
            out[i * sd:(i + 1) * sd, j * sd:(j + 1) * sd] += b
        return ComplexMatrix(out, self.full_shape)

    @classmethod
    def from_dense(cls, m, d: int, n: int, shield: Shape, tol: float = 0.0) -> "BlockOperator":
        arr = np.asarray(m.data if isinstance(m, ComplexMatrix) else m, dtype=complex)
        sd = shield.dim
        tuples = key_tuples(d, n)
        blocks = {}
        for r in tuples:
            i = key_index(r, d)
            for c in tuples:
                j = key_index(c, d)
                b = arr[i * sd:(i + 1) * sd, j * sd:(j + 1) * sd]
                if np.max(np.abs(b)) > tol:
                    blocks[(r, c)] = b.copy()
        return cls(d, n, shield, blocks)

    def to_json(self) -> dict:
        return {
            "d": self.d,
            "N": self.n,
            "shield_parties": shape_to_json(self.shield),
            "blocks": [
                {"row": list(r), "col": list(c), "data": complex_pairs(b)}
                for (r, c), b in sorted(self.blocks.items(), key=lambda kv: kv[0])
            ],
        }

    @classmethod
    def from_json(cls, obj: dict) -> "BlockOperator":
        shield = shape_from_json(obj["shield_parties"])
        sd = shield.dim
        blocks = {}
        for item in obj["blocks"]:
            blocks[(tuple(item["row"]), tuple(item["col"]))] = from_pairs(item["data"], sd, sd)
        return cls(int(obj["d"]), int(obj["N"]), shield, blocks)
