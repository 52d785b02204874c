"""Biprojective polynomials, the APN family constructors and lookup tables.

A point (x, y) of K^2 is encoded as the integer ``x | (y << m)``; output
pairs use the same encoding.  Every module shares this convention.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable

import numpy as np

from apnlab.gf2m import GF2m, FieldMismatchError


class ParameterError(ValueError):
    """Family parameters violate a construction precondition."""


class TableFormatError(ValueError):
    def __init__(self, message: str, line: int | None = None):
        self.line = line
        super().__init__(f"line {line}: {message}" if line is not None else message)


@dataclass(frozen=True)
class BiprojectivePoly:
    """a1 x^(s+1) + a2 x^s y + a3 x y^s + a4 y^(s+1) with s = 2^k.

    The coefficient matrix is [[a1, a3], [a2, a4]].
    """

    field: GF2m
    k: int
    coeffs: tuple[int, int, int, int]

    def __post_init__(self):
        if len(self.coeffs) != 4:
            raise ValueError("a biprojective polynomial has exactly 4 coefficients")
        self.field.check(*self.coeffs)
        object.__setattr__(self, "coeffs", tuple(int(c) for c in self.coeffs))

    @classmethod
    def from_matrix(cls, field: GF2m, k: int, A) -> "BiprojectivePoly":
        (a1, a3), (a2, a4) = A
        return cls(field, k, (a1, a2, a3, a4))

    @property
    def matrix(self) -> tuple[tuple[int, int], tuple[int, int]]:
        a1, a2, a3, a4 = self.coeffs
        return ((a1, a3), (a2, a4))

    def __call__(self, x: int, y: int) -> int:
        return eval_biprojective(self, x, y)

    def evaluate(self, x, y) -> np.ndarray:
        """Vectorized evaluation over arrays of x and y."""
        K = self.field
        a1, a2, a3, a4 = self.coeffs
        xs = K.vfrob(x, self.k)
        ys = K.vfrob(y, self.k)
        return (
            K.vmul(a1, K.vmul(xs, x))
            ^ K.vmul(a2, K.vmul(xs, y))
            ^ K.vmul(a3, K.vmul(x, ys))
            ^ K.vmul(a4, K.vmul(ys, y))
        )


def eval_biprojective(p: BiprojectivePoly, x: int, y: int) -> int:
    K = p.field
    K.check(x, y)
    a1, a2, a3, a4 = p.coeffs
    xs, ys = K.frob(x, p.k), K.frob(y, p.k)
    return (
        K.mul(a1, K.mul(xs, x))
        ^ K.mul(a2, K.mul(xs, y))
        ^ K.mul(a3, K.mul(x, ys))
        ^ K.mul(a4, K.mul(ys, y))
    )


@dataclass(frozen=True)
class FamilyParams:
    field: GF2m
    k: int
    alpha: int

    @property
    def m(self) -> int:
        return self.field.m

    @property
    def k2(self) -> int:
        """Frobenius exponent of the second coordinate (sigma squared)."""
        return (2 * self.k) % self.field.m

    def validate(self) -> None:
        check_exponent(self.field, self.k)
        self.field.check(self.alpha)
        root = projective_root(self.field, self.k, self.alpha)
        if root is not None:
            raise ParameterError(
                f"alpha={self.alpha:#x} is not admissible for m={self.m}, k={self.k}: "
                f"X^(2^{self.k}+1)+X+alpha has the root X={root:#x} in GF(2^{self.m})"
            )


def check_exponent(field: GF2m, k: int) -> None:
    if not 1 <= k < field.m:
        raise ParameterError(f"k={k} must lie in [1, {field.m - 1}]")
    if math.gcd(k, field.m) != 1:
        raise ParameterError(f"gcd(k={k}, m={field.m}) != 1")


def f_poly(params: FamilyParams) -> BiprojectivePoly:
    """First coordinate x^(s+1) + x y^s + alpha y^(s+1)."""
    return BiprojectivePoly(params.field, params.k, (1, 0, 1, params.alpha))


def g_poly(params: FamilyParams) -> BiprojectivePoly:
    """Second coordinate, built with exponent 2k mod m."""
    K, a = params.field, params.alpha
    return BiprojectivePoly(K, params.k2, (1, a, 1 ^ K.frob(a, params.k), a))


@dataclass(frozen=True, eq=False)
class FunctionTable:
    """Exhaustive lookup table of a map K^2 -> K^2 (n = 2m input/output bits)."""

    m: int
    values: np.ndarray
    k: int | None = None
    alpha: int | None = None
    label: str = field(default="", compare=False)

    def __post_init__(self):
        vals = np.ascontiguousarray(self.values, dtype=np.int64)
        if vals.shape != (1 << (2 * self.m),):
            raise ValueError(f"table for m={self.m} needs {1 << (2 * self.m)} entries, got {vals.shape}")
        if vals.size and (vals.min() < 0 or vals.max() >= (1 << (2 * self.m))):
            raise ValueError("table output out of range")
        vals.setflags(write=False)
        object.__setattr__(self, "values", vals)

    @property
    def n(self) -> int:
        return 2 * self.m

    @property
    def size(self) -> int:
        return self.values.size

    @property
    def f1(self) -> np.ndarray:
        return self.values & ((1 << self.m) - 1)

    @property
    def f2(self) -> np.ndarray:
        return self.values >> self.m

    def __len__(self) -> int:
        return self.size

    def __getitem__(self, idx):
        return self.values[idx]

    def __eq__(self, other) -> bool:
        return isinstance(other, FunctionTable) and self.m == other.m and np.array_equal(self.values, other.values)

    def __hash__(self) -> int:
        return hash((self.m, self.values.tobytes()))

    def lookup(self, x: int, y: int) -> tuple[int, int]:
        v = int(self.values[encode(self.m, x, y)])
        return decode(self.m, v)


def encode(m: int, x, y):
    return x | (y << m)


def decode(m: int, v):
    return v & ((1 << m) - 1), v >> m


def grid(m: int) -> tuple[np.ndarray, np.ndarray]:
    """(x, y) arrays over all 2^(2m) indices in table order."""
    idx = np.arange(1 << (2 * m), dtype=np.int64)
    return idx & ((1 << m) - 1), idx >> m


def to_table(p1: BiprojectivePoly, p2: BiprojectivePoly, *, k: int | None = None,
             alpha: int | None = None, label: str = "") -> FunctionTable:
    if p1.field != p2.field:
        raise FieldMismatchError("both coordinates must live over the same field")
    m = p1.field.m
    x, y = grid(m)
    values = p1.evaluate(x, y) | (p2.evaluate(x, y) << m)
    return FunctionTable(m, values, k=k, alpha=alpha, label=label)


def table_from_callable(m: int, fn) -> FunctionTable:
    """Materialize ``fn(x_array, y_array) -> (f1_array, f2_array)``."""
    x, y = grid(m)
    f1, f2 = fn(x, y)
    return FunctionTable(m, np.asarray(f1) | (np.asarray(f2) << m))


def projective_image(field: GF2m, k: int) -> np.ndarray:
    """Boolean mask over K: True at alpha iff X^(2^k+1)+X = alpha has a solution."""
    x = np.arange(field.order, dtype=np.int64)
    vals = field.vmul(field.vfrob(x, k), x) ^ x
    hit = np.zeros(field.order, dtype=bool)
    hit[vals] = True
    return hit


def projective_root(field: GF2m, k: int, alpha: int) -> int | None:
    """Smallest root of X^(2^k+1)+X+alpha in K, or None."""
    x = np.arange(field.order, dtype=np.int64)
    vals = field.vmul(field.vfrob(x, k), x) ^ x ^ alpha
    roots = np.flatnonzero(vals == 0)
    return int(roots[0]) if roots.size else None


def admissible_alphas(field: GF2m, k: int) -> set[int]:
    """All alpha for which X^(2^k+1)+X+alpha has no root in K."""
    check_exponent(field, k)
    return {int(a) for a in np.flatnonzero(~projective_image(field, k))}


def smallest_admissible(field: GF2m, k: int) -> int:
    alphas = admissible_alphas(field, k)
    if not alphas:
        raise ParameterError(f"no admissible alpha for m={field.m}, k={k}")
    return min(alphas)


def coprime_exponents(m: int) -> list[int]:
    return [k for k in range(1, m) if math.gcd(k, m) == 1]


def build_family_new(params: FamilyParams) -> FunctionTable:
    params.validate()
    return to_table(f_poly(params), g_poly(params), k=params.k, alpha=params.alpha,
                    label=f"F[m={params.m},k={params.k},alpha={params.alpha:#x}]")


def build_family_orig(field: GF2m, k: int) -> FunctionTable:
    check_exponent(field, k)
    if math.gcd(3 * k, field.m) != 1:
        raise ParameterError(f"gcd(3k={3 * k}, m={field.m}) != 1")
    f = BiprojectivePoly(field, k, (1, 0, 1, 1))
    g = BiprojectivePoly(field, (2 * k) % field.m, (1, 1, 0, 1))
    return to_table(f, g, k=k, alpha=1, label=f"orig[m={field.m},k={k}]")


def family_instances(field: GF2m, ks: Iterable[int] | None = None):
    """Yield every admissible FamilyParams, ordered by k then alpha."""
    for k in ks if ks is not None else coprime_exponents(field.m):
        for a in sorted(admissible_alphas(field, k)):
            yield FamilyParams(field, k, a)


# APNTBL v1 file format


def format_table(t: FunctionTable) -> str:
    k = "-" if t.k is None else str(t.k)
    a = "-" if t.alpha is None else format(t.alpha, "x")
    lines = [f"APNTBL v1 m={t.m} k={k} alpha={a}"]
    f1, f2 = t.f1.tolist(), t.f2.tolist()
    lines.extend(f"{u:x} {v:x}" for u, v in zip(f1, f2))
    return "\n".join(lines) + "\n"


def write_table(t: FunctionTable, path: str | Path) -> None:
    Path(path).write_text(format_table(t))


def parse_table(text: str) -> FunctionTable:
    lines = text.splitlines()
    if not lines:
        raise TableFormatError("empty file", 1)
    head = lines[0].split()
    if head[:2] != ["APNTBL", "v1"] or len(head) != 5:
        raise TableFormatError("expected header 'APNTBL v1 m=<m> k=<k> alpha=<hex>|-'", 1)
    kv = {}
    for tok, key in zip(head[2:], ("m", "k", "alpha")):
        name, sep, val = tok.partition("=")
        if name != key or not sep:
            raise TableFormatError(f"expected '{key}=...' in header, got {tok!r}", 1)
        kv[key] = val
    try:
        m = int(kv["m"])
        k = None if kv["k"] == "-" else int(kv["k"])
        alpha = None if kv["alpha"] == "-" else int(kv["alpha"], 16)
    except ValueError as exc:
        raise TableFormatError(f"bad header value: {exc}", 1) from None
    if not 1 <= m <= 16:
        raise TableFormatError(f"m={m} out of range", 1)
    size = 1 << (2 * m)
    body = lines[1:]
    if len(body) != size:
        raise TableFormatError(f"expected {size} entries, found {len(body)}", len(lines))
    mask = (1 << m) - 1
    values = np.empty(size, dtype=np.int64)
    for i, line in enumerate(body):
        parts = line.split()
        if len(parts) != 2:
            raise TableFormatError(f"expected '<hex_f1> <hex_f2>', got {line!r}", i + 2)
        try:
            u, v = int(parts[0], 16), int(parts[1], 16)
        except ValueError:
            raise TableFormatError(f"non-hex field in {line!r}", i + 2) from None
        if u > mask or v > mask or u < 0 or v < 0:
            raise TableFormatError(f"value does not fit in {m} bits: {line!r}", i + 2)
        values[i] = u | (v << m)
    return FunctionTable(m, values, k=k, alpha=alpha)


def read_table(path: str | Path) -> FunctionTable:
    return parse_table(Path(path).read_text())
