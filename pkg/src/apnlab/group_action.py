"""The action of K* x GL(2, K) on biprojective polynomials.

(a, M) sends the coefficient matrix A to a * M A (M^s)^t, which is the
polynomial a * f(c1 x + c2 y, c3 x + c4 y) for M = [[c1, c3], [c2, c4]].
Composition is "apply h, then g": g * h = (a_g a_h, M_g M_h), so that
act(g, act(h, p)) == act(g * h, p).  For example, with h = (1, [[1, 0], [1, 1]])
(the shift x -> x + y) and g = (a, I), g * h rescales the shifted polynomial.

Exhaustive searches enumerate GL(2, K) as numpy arrays, so they are
limited to m <= MAX_SEARCH_M.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from apnlab.bitlinear import BitMatrix
from apnlab.functions import (
    BiprojectivePoly,
    FamilyParams,
    FunctionTable,
    f_poly,
    g_poly,
)
from apnlab.gf2m import FieldMismatchError, GF2m

MAX_SEARCH_M = 5
# find_move stops at the first hit, so one more degree stays affordable
MAX_MOVE_M = 6


class SearchTooLargeError(ValueError):
    pass


class PreconditionError(ValueError):
    pass


@dataclass(frozen=True)
class GL2:
    """Invertible 2x2 matrix [[c1, c3], [c2, c4]] over K."""

    field: GF2m
    c1: int
    c2: int
    c3: int
    c4: int

    def __post_init__(self):
        self.field.check(self.c1, self.c2, self.c3, self.c4)
        if self.det == 0:
            raise ValueError("matrix is singular")

    @classmethod
    def identity(cls, field: GF2m) -> "GL2":
        return cls(field, 1, 0, 0, 1)

    @classmethod
    def scalar(cls, field: GF2m, a: int) -> "GL2":
        return cls(field, a, 0, 0, a)

    @property
    def entries(self) -> tuple[int, int, int, int]:
        return (self.c1, self.c2, self.c3, self.c4)

    @property
    def rows(self) -> tuple[tuple[int, int], tuple[int, int]]:
        return ((self.c1, self.c3), (self.c2, self.c4))

    @property
    def det(self) -> int:
        K = self.field
        return K.mul(self.c1, self.c4) ^ K.mul(self.c2, self.c3)

    def __matmul__(self, other: "GL2") -> "GL2":
        K = self.field
        (p, q), (r, s) = self.rows
        (t, u), (v, w) = other.rows
        top = (K.mul(p, t) ^ K.mul(q, v), K.mul(p, u) ^ K.mul(q, w))
        bot = (K.mul(r, t) ^ K.mul(s, v), K.mul(r, u) ^ K.mul(s, w))
        return GL2(K, top[0], bot[0], top[1], bot[1])

    def __pow__(self, e: int) -> "GL2":
        r = GL2.identity(self.field)
        for _ in range(e):
            r = r @ self
        return r

    def inverse(self) -> "GL2":
        K = self.field
        d = K.inv(self.det)
        return GL2(K, K.mul(d, self.c4), K.mul(d, self.c2), K.mul(d, self.c3), K.mul(d, self.c1))

    def __call__(self, x: int, y: int) -> tuple[int, int]:
        """The substitution (x, y) -> (c1 x + c2 y, c3 x + c4 y)."""
        K = self.field
        return K.mul(self.c1, x) ^ K.mul(self.c2, y), K.mul(self.c3, x) ^ K.mul(self.c4, y)

    def apply(self, x, y) -> tuple[np.ndarray, np.ndarray]:
        K = self.field
        return K.vmul(self.c1, x) ^ K.vmul(self.c2, y), K.vmul(self.c3, x) ^ K.vmul(self.c4, y)

    def to_bitmatrix(self) -> BitMatrix:
        m = self.field.m
        mask = self.field.mask

        def fn(v: int) -> int:
            u, w = self(v & mask, v >> m)
            return u | (w << m)

        return BitMatrix.from_function(2 * m, fn)


@dataclass(frozen=True)
class GroupElement:
    a: int
    M: GL2

    def __post_init__(self):
        self.M.field.check(self.a)
        if self.a == 0:
            raise ValueError("scalar part must be nonzero")

    @classmethod
    def identity(cls, field: GF2m) -> "GroupElement":
        return cls(1, GL2.identity(field))

    def __mul__(self, other: "GroupElement") -> "GroupElement":
        return GroupElement(self.M.field.mul(self.a, other.a), self.M @ other.M)


def _mat_action(K: GF2m, k: int, a, c1, c2, c3, c4, A):
    """a * M A (M^s)^t entrywise; works on scalars or arrays."""
    (a11, a12), (a21, a22) = A
    mul = K.vmul
    # M A
    p11 = mul(c1, a11) ^ mul(c3, a21)
    p12 = mul(c1, a12) ^ mul(c3, a22)
    p21 = mul(c2, a11) ^ mul(c4, a21)
    p22 = mul(c2, a12) ^ mul(c4, a22)
    s1, s2, s3, s4 = (K.vfrob(c, k) for c in (c1, c2, c3, c4))
    # (M^s)^t = [[s1, s2], [s3, s4]]
    r11 = mul(p11, s1) ^ mul(p12, s3)
    r12 = mul(p11, s2) ^ mul(p12, s4)
    r21 = mul(p21, s1) ^ mul(p22, s3)
    r22 = mul(p21, s2) ^ mul(p22, s4)
    return tuple(mul(a, r) for r in (r11, r12, r21, r22))


def act(g: GroupElement, p: BiprojectivePoly) -> BiprojectivePoly:
    if g.M.field != p.field:
        raise FieldMismatchError("group element and polynomial live over different fields")
    K = p.field
    r11, r12, r21, r22 = (int(v) for v in _mat_action(K, p.k, g.a, *g.M.entries, p.matrix))
    return BiprojectivePoly.from_matrix(K, p.k, ((r11, r12), (r21, r22)))


def gl2_chunks(field: GF2m, max_m: int = MAX_SEARCH_M):
    """Yield every (c1, c2, c3, c4, det) of GL(2, K) as arrays, one chunk per c1 value."""
    if field.m > max_m:
        raise SearchTooLargeError(f"exhaustive GL(2, 2^{field.m}) search is limited to m <= {max_m}")
    q = field.order
    idx = np.arange(q**3, dtype=np.int64)
    c2, c3, c4 = idx // q**2, (idx // q) % q, idx % q
    c23 = field.vmul(c2, c3)
    for c1 in range(q):
        det = field.vmul(c1, c4) ^ c23
        keep = det != 0
        yield np.full(int(keep.sum()), c1, dtype=np.int64), c2[keep], c3[keep], c4[keep], det[keep]


def gl2_arrays(field: GF2m, max_m: int = MAX_SEARCH_M) -> tuple[np.ndarray, ...]:
    """All (c1, c2, c3, c4, det) with det = c1 c4 + c2 c3 != 0, lexicographic in the entries."""
    parts = list(zip(*gl2_chunks(field, max_m)))
    return tuple(np.concatenate(p) for p in parts)


def gl2_order(m: int) -> int:
    q = 1 << m
    return (q * q - 1) * (q * q - q)


def _moves(p1: BiprojectivePoly, p2: BiprojectivePoly, first_only: bool = False,
           max_m: int = MAX_SEARCH_M) -> list[GroupElement]:
    """Every (a, M) with act((a, M), p1) == p2, by exhaustive search over GL(2, K)."""
    if p1.field != p2.field or p1.k != p2.k:
        raise FieldMismatchError("polynomials differ in field or exponent")
    K, k = p1.field, p1.k
    A = p1.matrix
    B = (p2.matrix[0][0], p2.matrix[0][1], p2.matrix[1][0], p2.matrix[1][1])
    detA = K.mul(A[0][0], A[1][1]) ^ K.mul(A[0][1], A[1][0])
    detB = K.mul(B[0], B[3]) ^ K.mul(B[1], B[2])
    if not any(B):
        raise PreconditionError("target polynomial is zero")
    out = []
    for c1, c2, c3, c4, det in gl2_chunks(K, max_m):
        R = _mat_action(K, k, 1, c1, c2, c3, c4, A)
        if detA and detB:
            # a^2 det(M)^(s+1) det(A) = det(B)
            sq = K.vmul(detB, K.vinv(K.vmul(K.vpow(det, (1 << k) + 1), detA)))
            a = K.vfrob(sq, K.m - 1)
        else:
            j = next(i for i, b in enumerate(B) if b)
            a = np.where(R[j] != 0, K.vmul(B[j], K.vinv(np.where(R[j] == 0, 1, R[j]))), 0)
        ok = a != 0
        for r, b in zip(R, B):
            ok &= K.vmul(a, r) == b
        for i in np.flatnonzero(ok).tolist():
            out.append(GroupElement(int(a[i]), GL2(K, int(c1[i]), int(c2[i]), int(c3[i]), int(c4[i]))))
            if first_only:
                return out
    return out


def all_moves(p1: BiprojectivePoly, p2: BiprojectivePoly) -> list[GroupElement]:
    """Every group element moving p1 to p2 (a coset of the stabilizer, or empty)."""
    return _moves(p1, p2)


def stabilizer(p: BiprojectivePoly) -> list[GroupElement]:
    return _moves(p, p)


def stabilizer_f(p: BiprojectivePoly) -> list[GroupElement]:
    """Stabilizer of an f-type polynomial x^(s+1) + x y^s + alpha y^(s+1)."""
    a1, a2, a3, _ = p.coeffs
    if (a1, a2, a3) != (1, 0, 1):
        raise PreconditionError("expected an f-type polynomial (1, 0, 1, alpha)")
    return stabilizer(p)


def find_move(p1: BiprojectivePoly, p2: BiprojectivePoly) -> GroupElement | None:
    if p1 == p2:
        return GroupElement.identity(p1.field)
    moves = _moves(p1, p2, first_only=True, max_m=MAX_MOVE_M)
    return moves[0] if moves else None


def orbit(p: BiprojectivePoly) -> set[tuple[int, int, int, int]]:
    """Coefficient tuples of every polynomial in the G-orbit of p."""
    K = p.field
    c1, c2, c3, c4, _ = gl2_arrays(K)
    R = _mat_action(K, p.k, 1, c1, c2, c3, c4, p.matrix)
    m = K.m
    seen = np.zeros(1 << (4 * m), dtype=bool)
    for a in K.nonzero():
        r11, r12, r21, r22 = (K.vmul(a, r) for r in R)
        # pack (a1, a2, a3, a4) = (r11, r21, r12, r22)
        seen[r11 | (r21 << m) | (r12 << 2 * m) | (r22 << 3 * m)] = True
    out = set()
    for v in np.flatnonzero(seen).tolist():
        out.add((v & K.mask, (v >> m) & K.mask, (v >> 2 * m) & K.mask, v >> 3 * m))
    return out


def group_order(m: int) -> int:
    return ((1 << m) - 1) * gl2_order(m)


def lift_scalar(g: GroupElement, alpha1: int, alpha2: int, k: int) -> int:
    """The a' with a'^2 det(M)^(s^2+1) alpha1^(s+1) = alpha2^(s+1)."""
    K = g.M.field
    s1 = (1 << k) + 1
    s2 = (1 << ((2 * k) % K.m)) + 1
    lhs = K.mul(K.pow(g.M.det, s2), K.pow(alpha1, s1))
    return K.sqrt(K.div(K.pow(alpha2, s1), lhs))


def lift_to_g(g: GroupElement, alpha1: int, alpha2: int, k: int) -> GroupElement:
    """Given g moving f_alpha1 to f_alpha2, the (a', M) moving g_alpha1 to g_alpha2."""
    K = g.M.field
    p1 = FamilyParams(K, k, alpha1)
    p2 = FamilyParams(K, k, alpha2)
    if act(g, f_poly(p1)) != f_poly(p2):
        raise PreconditionError("group element does not move f_alpha1 to f_alpha2")
    return GroupElement(lift_scalar(g, alpha1, alpha2, k), g.M)


def lift_candidates(g: GroupElement, alpha1: int, alpha2: int, k: int) -> list[int]:
    """All a' in K* for which (a', M) moves g_alpha1 to g_alpha2 (uniqueness scan)."""
    K = g.M.field
    src = g_poly(FamilyParams(K, k, alpha1))
    dst = g_poly(FamilyParams(K, k, alpha2))
    return [a for a in K.nonzero() if act(GroupElement(a, g.M), src) == dst]


@dataclass(frozen=True)
class BlockAutomorphism:
    """L o F = F o M with L = diag(a, a') acting on the two output coordinates."""

    M: GL2
    a: int
    a2: int

    def output_bitmatrix(self) -> BitMatrix:
        K = self.M.field
        return BitMatrix.block_diag(K.m, lambda v: K.mul(self.a, v), lambda v: K.mul(self.a2, v))


def block_automorphisms(F: FunctionTable, params: FamilyParams) -> list[BlockAutomorphism]:
    """All (M, diag(a, a')) with a F1 = F1 o M and a' F2 = F2 o M, searched on the table.

    Candidates are filtered on a few sample points over all of GL(2, K) and every
    survivor is then checked on all 2^(2m) inputs.
    """
    K = params.field
    m = K.m
    if F.m != m:
        raise FieldMismatchError("table and parameters disagree on m")
    c1, c2, c3, c4, _ = gl2_arrays(K)
    f1, f2 = F.f1, F.f2
    base = np.flatnonzero((f1 != 0) & (f2 != 0))
    if base.size == 0:
        return []
    rng = np.random.default_rng(0)
    samples = np.concatenate([base[:1], rng.choice(F.size, size=min(F.size, 24), replace=False)])
    p0 = int(samples[0])
    x0, y0 = p0 & K.mask, p0 >> m
    u0 = K.vmul(c1, x0) ^ K.vmul(c2, y0)
    w0 = K.vmul(c3, x0) ^ K.vmul(c4, y0)
    img0 = u0 | (w0 << m)
    a = K.vmul(f1[img0], K.inv(int(f1[p0])))
    a2 = K.vmul(f2[img0], K.inv(int(f2[p0])))
    keep = (a != 0) & (a2 != 0)
    c1, c2, c3, c4, a, a2 = (v[keep] for v in (c1, c2, c3, c4, a, a2))
    for p in samples[1:].tolist():
        x, y = p & K.mask, p >> m
        img = (K.vmul(c1, x) ^ K.vmul(c2, y)) | ((K.vmul(c3, x) ^ K.vmul(c4, y)) << m)
        keep = (f1[img] == K.vmul(a, int(f1[p]))) & (f2[img] == K.vmul(a2, int(f2[p])))
        c1, c2, c3, c4, a, a2 = (v[keep] for v in (c1, c2, c3, c4, a, a2))
    out = []
    idx = np.arange(F.size, dtype=np.int64)
    xs, ys = idx & K.mask, idx >> m
    for i in range(c1.size):
        M = GL2(K, int(c1[i]), int(c2[i]), int(c3[i]), int(c4[i]))
        u, w = M.apply(xs, ys)
        moved = F.values[u | (w << m)]
        expect = K.vmul(int(a[i]), f1) | (K.vmul(int(a2[i]), f2) << m)
        if np.array_equal(moved, expect):
            out.append(BlockAutomorphism(M, int(a[i]), int(a2[i])))
    return out


def zsigma_element(params: FamilyParams, c: int) -> BlockAutomorphism:
    """(cI, diag(c^(s+1), c^(s^2+1))), the scaling automorphism of every family member."""
    K = params.field
    return BlockAutomorphism(GL2.scalar(K, c), K.pow(c, (1 << params.k) + 1), K.pow(c, (1 << params.k2) + 1))


def fixed_point_free(M: GL2) -> bool:
    """True iff M v != v for every nonzero v in K^2."""
    K = M.field
    m = K.m
    idx = np.arange(1, 1 << (2 * m), dtype=np.int64)
    u, w = M.apply(idx & K.mask, idx >> m)
    return not np.any((u | (w << m)) == idx)
