"""Explicit linear equivalences between family members and class certification.

A witness (M, L, N) certifies L(F(x)) + N(x) = G(M(x)) for every x in K^2,
with all maps stored as F_2 bit matrices on the table encoding.  Every
witness this module hands out has been checked on all 2^(2m) inputs.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from enum import Enum

import numpy as np

from apnlab import analysis
from apnlab.bitlinear import BitMatrix
from apnlab.functions import (
    FamilyParams,
    FunctionTable,
    build_family_new,
    coprime_exponents,
    f_poly,
    smallest_admissible,
)
from apnlab.gf2m import GF2m
from apnlab.group_action import GL2, find_move, lift_to_g


class EquivalenceError(RuntimeError):
    """A construction that should succeed did not (no move found, or witness failed)."""


@dataclass(frozen=True)
class LinearEquivalence:
    M: BitMatrix  # input map
    L: BitMatrix  # output map
    N: BitMatrix | None = None
    note: str = ""

    def compose(self, other: "LinearEquivalence") -> "LinearEquivalence":
        """self: F -> G, other: G -> H; result: F -> H (linear witnesses only)."""
        if self.N is not None or other.N is not None:
            raise ValueError("composition is only defined for N = 0 witnesses")
        return LinearEquivalence(other.M @ self.M, other.L @ self.L, note=f"{self.note}; {other.note}")

    def to_text(self) -> str:
        parts = [f"# witness: L(F(x)) + N(x) = G(M(x)); {self.note}", "[M]", self.M.to_text(), "[L]", self.L.to_text()]
        if self.N is not None:
            parts += ["[N]", self.N.to_text()]
        return "\n".join(parts) + "\n"

    @classmethod
    def from_text(cls, text: str) -> "LinearEquivalence":
        blocks: dict[str, list[str]] = {}
        cur = None
        note = ""
        for line in text.splitlines():
            line = line.strip()
            if line.startswith("#"):
                note = line.partition(";")[2].strip()
            elif line.startswith("[") and line.endswith("]"):
                cur = line[1:-1]
                blocks[cur] = []
            elif line and cur is not None:
                blocks[cur].append(line)
        if "M" not in blocks or "L" not in blocks:
            raise ValueError("witness text needs [M] and [L] blocks")
        N = BitMatrix.from_text("\n".join(blocks["N"])) if "N" in blocks else None
        return cls(BitMatrix.from_text("\n".join(blocks["M"])), BitMatrix.from_text("\n".join(blocks["L"])), N, note)


class Status(str, Enum):
    EQUIVALENT = "equivalent-with-witness"
    INEQUIVALENT = "inequivalent-by-invariant"
    UNDECIDED = "undecided"


@dataclass(frozen=True)
class EquivalenceVerdict:
    status: Status
    witness: LinearEquivalence | None = None
    invariant: str | None = None


def verify_el_equivalence_witness(F: FunctionTable, G: FunctionTable, w: LinearEquivalence) -> bool:
    if F.m != G.m or w.M.n != F.n or w.L.n != F.n or (w.N is not None and w.N.n != F.n):
        raise ValueError("witness and tables disagree on dimension")
    if not (w.M.is_invertible() and w.L.is_invertible()):
        return False
    x = np.arange(F.size, dtype=np.int64)
    lhs = w.L.apply(F.values)
    if w.N is not None:
        lhs ^= w.N.apply(x)
    return bool(np.array_equal(lhs, G.values[w.M.table()]))


def _checked(F: FunctionTable, G: FunctionTable, w: LinearEquivalence) -> LinearEquivalence:
    if not verify_el_equivalence_witness(F, G, w):
        raise EquivalenceError(f"witness failed pointwise verification ({w.note})")
    return w


def build_alpha_equivalence(p1: FamilyParams, p2: FamilyParams) -> LinearEquivalence:
    """Witness F_alpha1 ~ F_alpha2 at fixed (m, k) from an f-move and its lift."""
    if p1.field != p2.field or p1.k != p2.k:
        raise ValueError("alpha equivalence needs the same field and exponent")
    F, G = build_family_new(p1), build_family_new(p2)
    K = p1.field
    if p1.alpha == p2.alpha:
        ident = BitMatrix.identity(F.n)
        return _checked(F, G, LinearEquivalence(ident, ident, note="identity"))
    g = find_move(f_poly(p1), f_poly(p2))
    if g is None:
        raise EquivalenceError(f"no move between f_alpha for alpha={p1.alpha:#x}, {p2.alpha:#x}")
    lifted = lift_to_g(g, p1.alpha, p2.alpha, p1.k)
    # F_alpha2(z) = diag(a, a') F_alpha1(M z), i.e. L F(w) = G(M^-1 w)
    L = BitMatrix.block_diag(K.m, lambda v: K.mul(g.a, v), lambda v: K.mul(lifted.a, v))
    Minv = g.M.inverse().to_bitmatrix()
    note = f"M={g.M.entries} a={g.a:#x} a'={lifted.a:#x}"
    return _checked(F, G, LinearEquivalence(Minv, L, note=note))


def inverse_sigma_params(params: FamilyParams) -> FamilyParams:
    K = params.field
    kbar = K.m - params.k
    return FamilyParams(K, kbar, K.frob(params.alpha, kbar))


def inverse_sigma_equivalence(params: FamilyParams) -> LinearEquivalence:
    """Witness F_{alpha, s} ~ F_{alpha^sbar, sbar}.

    Output: sbar on the first coordinate, sbar^2 on the second; input: the
    shift (x, y) -> (x + y, y), which is its own inverse.
    """
    K = params.field
    k = params.k
    other = inverse_sigma_params(params)
    F, G = build_family_new(params), build_family_new(other)
    L = BitMatrix.block_diag(K.m, lambda v: K.frob(v, -k), lambda v: K.frob(v, -2 * k))
    M = GL2(K, 1, 1, 0, 1).to_bitmatrix()
    return _checked(F, G, LinearEquivalence(M, L, note=f"inverse sigma k={k} -> k={other.k}"))


@dataclass
class ClassCertificate:
    m: int
    representatives: dict[int, FamilyParams]
    verdicts: dict[tuple[int, int], EquivalenceVerdict]
    spectra: dict[int, tuple[tuple[int, int], ...]] = field(default_factory=dict)

    @property
    def classes(self) -> list[list[int]]:
        parent = {k: k for k in self.representatives}

        def find(k):
            while parent[k] != k:
                k = parent[k]
            return k

        for (k1, k2), v in self.verdicts.items():
            if v.status is Status.EQUIVALENT:
                parent[find(k2)] = find(k1)
        groups: dict[int, list[int]] = {}
        for k in sorted(parent):
            groups.setdefault(find(k), []).append(k)
        return sorted(groups.values())

    @property
    def num_classes(self) -> int:
        return len(self.classes)

    @property
    def undecided(self) -> list[tuple[int, int]]:
        return [p for p, v in self.verdicts.items() if v.status is Status.UNDECIDED]

    @property
    def expected(self) -> int:
        return euler_phi(self.m) // 2


def euler_phi(m: int) -> int:
    return sum(1 for k in range(1, m + 1) if math.gcd(k, m) == 1)


def family_scaling(params: FamilyParams) -> tuple[int, int]:
    return (1 << params.k) + 1, (1 << params.k2) + 1


def ortho_spectrum_of(params: FamilyParams) -> analysis.DifferentialSpectrum:
    """Ortho-derivative differential spectrum, using the inverse-bidegree homogeneity of pi."""
    K = params.field
    F = build_family_new(params)
    pi = analysis.ortho_derivative(F, K)
    q1 = K.order - 1
    e1, e2 = family_scaling(params)
    return analysis.differential_spectrum(pi, scaling=(-e1 % q1, -e2 % q1), field=K)


def class_representatives(field_: GF2m) -> dict[int, FamilyParams]:
    """Smallest admissible alpha for k <= m/2; alpha^sbar for the partner m - k."""
    reps: dict[int, FamilyParams] = {}
    for k in coprime_exponents(field_.m):
        if k in reps:
            continue
        p = FamilyParams(field_, k, smallest_admissible(field_, k))
        reps[k] = p
        partner = inverse_sigma_params(p)
        reps.setdefault(partner.k, partner)
    return dict(sorted(reps.items()))


def certify_classes(field_: GF2m) -> ClassCertificate:
    reps = class_representatives(field_)
    spectra = {k: ortho_spectrum_of(p).as_tuple() for k, p in reps.items()}
    verdicts: dict[tuple[int, int], EquivalenceVerdict] = {}
    ks = list(reps)
    for i, k1 in enumerate(ks):
        for k2 in ks[i:]:
            p1 = reps[k1]
            if k2 == k1:
                w = build_alpha_equivalence(p1, p1)
                verdicts[(k1, k2)] = EquivalenceVerdict(Status.EQUIVALENT, w)
            elif k2 == field_.m - k1:
                # reps[k2] is exactly the inverse-sigma partner of reps[k1]
                w = inverse_sigma_equivalence(p1)
                verdicts[(k1, k2)] = EquivalenceVerdict(Status.EQUIVALENT, w)
            elif spectra[k1] != spectra[k2]:
                verdicts[(k1, k2)] = EquivalenceVerdict(Status.INEQUIVALENT, invariant="ortho-derivative differential spectrum")
            else:
                verdicts[(k1, k2)] = EquivalenceVerdict(Status.UNDECIDED)
    return ClassCertificate(field_.m, reps, verdicts, spectra)
