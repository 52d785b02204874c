"""F_2-linear maps on n-bit words, stored by the images of the unit vectors."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np


def rref(rows: Sequence[int]) -> tuple[list[int], list[int]]:
    """Reduced row echelon form of bit rows; returns (rows, pivot bit positions)."""
    out: list[int] = []
    pivots: list[int] = []
    for r in rows:
        for row, p in zip(out, pivots):
            if (r >> p) & 1:
                r ^= row
        if r:
            p = r.bit_length() - 1
            for i, row in enumerate(out):
                if (row >> p) & 1:
                    out[i] = row ^ r
            out.append(r)
            pivots.append(p)
    return out, pivots


def rank(rows: Sequence[int]) -> int:
    return len(rref(rows)[0])


def nullspace(rows: Sequence[int], n: int) -> list[int]:
    """Basis of {b : popcount(b & r) even for every r in rows}."""
    red, pivots = rref(rows)
    pivset = set(pivots)
    basis = []
    for f in range(n):
        if f in pivset:
            continue
        b = 1 << f
        for row, p in zip(red, pivots):
            if (row >> f) & 1:
                b |= 1 << p
        basis.append(b)
    return basis


@dataclass(frozen=True)
class BitMatrix:
    """Linear map on n-bit words; ``cols[i]`` is the image of bit i."""

    n: int
    cols: tuple[int, ...]

    def __post_init__(self):
        if len(self.cols) != self.n:
            raise ValueError(f"need {self.n} columns, got {len(self.cols)}")
        object.__setattr__(self, "cols", tuple(int(c) for c in self.cols))
        if any(not 0 <= c < (1 << self.n) for c in self.cols):
            raise ValueError("column out of range")

    @classmethod
    def identity(cls, n: int) -> "BitMatrix":
        return cls(n, tuple(1 << i for i in range(n)))

    @classmethod
    def zero(cls, n: int) -> "BitMatrix":
        return cls(n, (0,) * n)

    @classmethod
    def from_function(cls, n: int, fn: Callable[[int], int]) -> "BitMatrix":
        """Matrix of ``fn`` assuming it is linear (checked separately if needed)."""
        return cls(n, tuple(int(fn(1 << i)) for i in range(n)))

    def __call__(self, x: int) -> int:
        r = 0
        for i, c in enumerate(self.cols):
            if (x >> i) & 1:
                r ^= c
        return r

    def apply(self, x) -> np.ndarray:
        x = np.asarray(x, dtype=np.int64)
        out = np.zeros_like(x)
        for i, c in enumerate(self.cols):
            out ^= np.where((x >> i) & 1, c, 0)
        return out

    def table(self) -> np.ndarray:
        return self.apply(np.arange(1 << self.n, dtype=np.int64))

    def __matmul__(self, other: "BitMatrix") -> "BitMatrix":
        """Composition: (self @ other)(x) = self(other(x))."""
        if self.n != other.n:
            raise ValueError("dimension mismatch")
        return BitMatrix(self.n, tuple(self(c) for c in other.cols))

    def __add__(self, other: "BitMatrix") -> "BitMatrix":
        return BitMatrix(self.n, tuple(a ^ b for a, b in zip(self.cols, other.cols)))

    @property
    def rank(self) -> int:
        return rank(self.cols)

    def is_invertible(self) -> bool:
        return self.rank == self.n

    def inverse(self) -> "BitMatrix":
        # Gauss-Jordan on [cols | unit vectors] tracked as pairs
        n = self.n
        pairs = [(c, 1 << i) for i, c in enumerate(self.cols)]
        inv = [0] * n
        for bit in range(n):
            j = next((j for j in range(bit, n) if (pairs[j][0] >> bit) & 1), None)
            if j is None:
                raise ValueError("matrix is singular")
            pairs[bit], pairs[j] = pairs[j], pairs[bit]
            pv, pu = pairs[bit]
            for i in range(n):
                if i != bit and (pairs[i][0] >> bit) & 1:
                    pairs[i] = (pairs[i][0] ^ pv, pairs[i][1] ^ pu)
        for bit in range(n):
            inv[bit] = pairs[bit][1]
        return BitMatrix(n, tuple(inv))

    def rows(self) -> list[str]:
        """Row r, column c is bit r of the image of unit vector c."""
        return ["".join(str((self.cols[c] >> r) & 1) for c in range(self.n)) for r in range(self.n)]

    def to_text(self) -> str:
        return "\n".join(self.rows())

    @classmethod
    def from_text(cls, text: str) -> "BitMatrix":
        rows = [r.strip() for r in text.strip().splitlines() if r.strip()]
        n = len(rows)
        if any(len(r) != n or set(r) - {"0", "1"} for r in rows):
            raise ValueError("expected a square block of 0/1 characters")
        cols = tuple(sum(int(rows[r][c]) << r for r in range(n)) for c in range(n))
        return cls(n, cols)

    @classmethod
    def block_diag(cls, m: int, a: Callable[[int], int], b: Callable[[int], int]) -> "BitMatrix":
        """(x, y) -> (a(x), b(y)) on the x | y << m encoding, a and b linear on m bits."""
        cols = [a(1 << i) for i in range(m)] + [b(1 << i) << m for i in range(m)]
        return cls(2 * m, tuple(cols))
