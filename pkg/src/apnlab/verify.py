"""Verification checks over whole parameter ranges.

Each check name corresponds to one acceptance criterion.  A check runs
for a single m and returns a :class:`CheckResult`; :func:`run_plan` fans
the (check, m) jobs out over worker processes.
"""

from __future__ import annotations

import itertools
import logging
import os
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field
from typing import Callable

import numpy as np

from apnlab import analysis
from apnlab.equivalence import (
    LinearEquivalence,
    certify_classes,
    build_alpha_equivalence,
    family_scaling,
    inverse_sigma_equivalence,
    verify_el_equivalence_witness,
)
from apnlab.functions import (
    FamilyParams,
    FunctionTable,
    admissible_alphas,
    build_family_new,
    coprime_exponents,
    f_poly,
    g_poly,
    grid,
)
from apnlab.gf2m import get_field
from apnlab.group_action import (
    GL2,
    all_moves,
    block_automorphisms,
    fixed_point_free,
    lift_candidates,
    lift_to_g,
    stabilizer_f,
    zsigma_element,
)

log = logging.getLogger(__name__)

# check name -> (criterion number, smallest m, largest m)
CHECKS: dict[str, tuple[int, int, int]] = {
    "apn": (1, 2, 7),
    "alpha-count": (2, 2, 12),
    "image": (3, 2, 7),
    "walsh": (4, 2, 7),
    "stabilizer": (5, 2, 5),
    "lemma-lift": (6, 2, 4),
    "block-aut": (7, 2, 5),
    "alpha-equiv": (8, 2, 5),
    "inverse-sigma": (9, 2, 7),
    "class-count": (10, 3, 7),
    "degree": (11, 2, 7),
}


class PlanError(ValueError):
    pass


@dataclass
class CheckResult:
    check: str
    m: int
    passed: bool
    instances: int
    details: dict = field(default_factory=dict)

    @property
    def criterion(self) -> int:
        return CHECKS[self.check][0]

    def as_dict(self) -> dict:
        return {"check": self.check, "criterion": self.criterion, "m": self.m, "passed": self.passed,
                "instances": self.instances, "details": self.details}


@dataclass
class VerifyPlan:
    m_values: list[int]
    ks: list[int] | None = None  # None = every k coprime to m
    checks: list[str] = field(default_factory=lambda: list(CHECKS))
    strict: bool = True  # out-of-range (check, m) raises instead of being skipped

    def jobs(self) -> tuple[list[tuple[str, int]], list[tuple[str, int]]]:
        run, skipped = [], []
        for name in self.checks:
            if name not in CHECKS:
                raise PlanError(f"unknown check {name!r}; choose from {', '.join(CHECKS)}")
            _, lo, hi = CHECKS[name]
            for m in self.m_values:
                if lo <= m <= hi:
                    run.append((name, m))
                elif self.strict:
                    raise PlanError(f"check {name!r} is limited to {lo} <= m <= {hi} (got m={m})")
                else:
                    skipped.append((name, m))
        return run, skipped


Constructor = Callable[[FamilyParams], FunctionTable]


def _instances(m: int, ks: list[int] | None):
    K = get_field(m)
    for k in ks if ks is not None else coprime_exponents(m):
        if k not in coprime_exponents(m):
            continue
        for a in sorted(admissible_alphas(K, k)):
            yield FamilyParams(K, k, a)


def _label(p: FamilyParams) -> str:
    return f"m={p.m},k={p.k},alpha={p.alpha:#x}"


def check_apn(m, ks, build: Constructor) -> CheckResult:
    # m >= 7: directions reduced modulo the K* scaling symmetry, verified per table
    failures = []
    n = 0
    for p in _instances(m, ks):
        F = build(p)
        if m >= 7:
            try:
                ok = analysis.is_apn(F, scaling=family_scaling(p), field=p.field)
            except ValueError:
                ok = False
        else:
            ok = analysis.is_apn(F)
        n += 1
        if not ok:
            failures.append(_label(p))
    return CheckResult("apn", m, not failures and n > 0, n, {"failures": failures})


def expected_alpha_count(m: int) -> int:
    return ((1 << (m + 1)) + 2) // 6 if m % 2 else ((1 << (m + 1)) - 2) // 6


def check_alpha_count(m, ks, build=None) -> CheckResult:
    K = get_field(m)
    counts = {k: len(admissible_alphas(K, k)) for k in (ks or coprime_exponents(m)) if k in coprime_exponents(m)}
    expected = expected_alpha_count(m)
    ok = bool(counts) and all(c == expected for c in counts.values())
    return CheckResult("alpha-count", m, ok, len(counts),
                       {"counts": counts, "expected": expected, "parity": "odd" if m % 2 else "even"})


def check_image(m, ks, build: Constructor) -> CheckResult:
    size = ((1 << (2 * m)) - 1) // 3 + 1
    failures = []
    n = 0
    for p in _instances(m, ks):
        r = analysis.image_report(build(p))
        n += 1
        if not (r.three_to_one and r.image_size == size):
            failures.append(_label(p))
    return CheckResult("image", m, not failures and n > 0, n, {"image_size": size, "failures": failures})


def check_walsh(m, ks, build: Constructor) -> CheckResult:
    nbits = 2 * m
    want = analysis.classical_counts(nbits)
    zero, mid = want[0], want[1 << m]
    failures = []
    tops = set()
    n = 0
    for p in _instances(m, ks):
        r = analysis.walsh_spectrum(build(p), p.field)
        n += 1
        tops.add(r.abs_counts.get(1 << (m + 1)))
        ok = (set(r.abs_counts) == {0, 1 << m, 1 << (m + 1)} and r.abs_counts[0] == zero
              and r.abs_counts[1 << m] == mid and r.parseval_ok and r.total == ((1 << nbits) - 1) << nbits)
        if not ok:
            failures.append(_label(p))
    literature = analysis.literature_top_count(nbits)
    top = tops.pop() if len(tops) == 1 else sorted(t for t in tops if t is not None)
    return CheckResult("walsh", m, not failures and n > 0, n, {
        "zero_count": zero, "mid_count": mid, "top_count": top, "top_count_literature": literature,
        "top_count_agrees_with_literature": top == literature, "failures": failures})


def check_stabilizer(m, ks, build=None) -> CheckResult:
    expected = 3 * ((1 << m) - 1)
    failures = []
    n = 0
    for p in _instances(m, ks):
        stab = stabilizer_f(f_poly(p))
        per_det: dict[int, int] = {}
        for g in stab:
            per_det[g.M.det] = per_det.get(g.M.det, 0) + 1
        n += 1
        if not (len(stab) == expected and len(per_det) == (1 << m) - 1 and set(per_det.values()) == {3}):
            failures.append(_label(p))
    return CheckResult("stabilizer", m, not failures and n > 0, n, {"expected": expected, "failures": failures})


def check_lemma_lift(m, ks, build=None) -> CheckResult:
    K = get_field(m)
    x, y = grid(m)
    failures = []
    moves_checked = 0
    for k in ks or coprime_exponents(m):
        if k not in coprime_exponents(m):
            continue
        alphas = sorted(admissible_alphas(K, k))
        for a1, a2 in itertools.product(alphas, repeat=2):
            p1, p2 = FamilyParams(K, k, a1), FamilyParams(K, k, a2)
            src, dst = g_poly(p1), g_poly(p2)
            want = dst.evaluate(x, y)
            for g in all_moves(f_poly(p1), f_poly(p2)):
                moves_checked += 1
                lifted = lift_to_g(g, a1, a2, k)
                u, w = g.M.apply(x, y)
                pointwise = np.array_equal(K.vmul(lifted.a, src.evaluate(u, w)), want)
                unique = lift_candidates(g, a1, a2, k) == [lifted.a]
                if not (pointwise and unique):
                    failures.append(f"k={k},a1={a1:#x},a2={a2:#x},M={g.M.entries}")
    return CheckResult("lemma-lift", m, not failures and moves_checked > 0, moves_checked, {"failures": failures[:10]})


def check_block_aut(m, ks, build: Constructor) -> CheckResult:
    expected = 3 * ((1 << m) - 1)
    failures = []
    n = 0
    for p in _instances(m, ks):
        F = build(p)
        auts = block_automorphisms(F, p)
        n += 1
        got = {(b.M, b.a, b.a2) for b in auts}
        zs = all((z.M, z.a, z.a2) in got for z in (zsigma_element(p, c) for c in p.field.nonzero()))
        unit = [b for b in auts if b.M.det == 1]
        I = GL2.identity(p.field)
        cyclic = False
        if len(unit) == 3 and all(b.a == 1 and b.a2 == 1 for b in unit):
            others = [b.M for b in unit if b.M != I]
            if len(others) == 2:
                M = others[0]
                cyclic = (M @ M == others[1] and M ** 3 == I and fixed_point_free(M) and fixed_point_free(others[1]))
        if not (len(auts) == expected and zs and cyclic):
            failures.append(_label(p))
    return CheckResult("block-aut", m, not failures and n > 0, n, {"expected": expected, "failures": failures})


def inverse_witness(w: LinearEquivalence) -> LinearEquivalence:
    """F -> G witness turned into G -> F."""
    return LinearEquivalence(w.M.inverse(), w.L.inverse(), note=f"inverse({w.note})")


def check_alpha_equiv(m, ks, build=None) -> CheckResult:
    K = get_field(m)
    failures = []
    pairs = 0
    for k in ks or coprime_exponents(m):
        if k not in coprime_exponents(m):
            continue
        alphas = sorted(admissible_alphas(K, k))
        base = FamilyParams(K, k, alphas[0])
        tables = {a: build_family_new(FamilyParams(K, k, a)) for a in alphas}
        # star of witnesses from the base alpha; every pair is then a verified composition
        star = {a: build_alpha_equivalence(base, FamilyParams(K, k, a)) for a in alphas}
        for a1, a2 in itertools.combinations(alphas, 2):
            w = inverse_witness(star[a1]).compose(star[a2])
            pairs += 1
            if not verify_el_equivalence_witness(tables[a1], tables[a2], w):
                failures.append(f"k={k},a1={a1:#x},a2={a2:#x}")
    return CheckResult("alpha-equiv", m, not failures, pairs, {"failures": failures})


def check_inverse_sigma(m, ks, build=None) -> CheckResult:
    failures = []
    n = 0
    for p in _instances(m, ks):
        n += 1
        try:
            inverse_sigma_equivalence(p)
        except Exception as exc:  # witness failure or inadmissible partner
            failures.append(f"{_label(p)}: {exc}")
    return CheckResult("inverse-sigma", m, not failures and n > 0, n, {"failures": failures})


def check_class_count(m, ks=None, build=None) -> CheckResult:
    cert = certify_classes(get_field(m))
    ok = cert.num_classes == cert.expected and not cert.undecided
    details = {"classes": cert.classes, "expected": cert.expected, "undecided": cert.undecided}
    if not ok:
        details["spectra"] = {k: list(s) for k, s in cert.spectra.items()}
    return CheckResult("class-count", m, ok, len(cert.representatives), details)


def check_degree(m, ks, build: Constructor) -> CheckResult:
    failures = []
    n = 0
    for p in _instances(m, ks):
        n += 1
        if analysis.algebraic_degree(build(p)) != 2:
            failures.append(_label(p))
    return CheckResult("degree", m, not failures and n > 0, n, {"failures": failures})


RUNNERS = {
    "apn": check_apn,
    "alpha-count": check_alpha_count,
    "image": check_image,
    "walsh": check_walsh,
    "stabilizer": check_stabilizer,
    "lemma-lift": check_lemma_lift,
    "block-aut": check_block_aut,
    "alpha-equiv": check_alpha_equiv,
    "inverse-sigma": check_inverse_sigma,
    "class-count": check_class_count,
    "degree": check_degree,
}


def corrupted_constructor(params: FamilyParams) -> FunctionTable:
    """Test hook: the family table with one output value perturbed."""
    F = build_family_new(params)
    vals = F.values.copy()
    vals[1] ^= 1
    return FunctionTable(F.m, vals, k=F.k, alpha=F.alpha, label=F.label + "+fault")


def run_check(name: str, m: int, ks: list[int] | None = None, build: Constructor = build_family_new) -> CheckResult:
    log.info("running %s at m=%d", name, m)
    return RUNNERS[name](m, ks, build)


def _run_job(job):
    name, m, ks, corrupt = job
    return run_check(name, m, ks, corrupted_constructor if corrupt else build_family_new)


def run_plan(plan: VerifyPlan, jobs: int | None = None, corrupt: bool = False) -> tuple[list[CheckResult], list[tuple[str, int]]]:
    todo, skipped = plan.jobs()
    payload = [(name, m, plan.ks, corrupt) for name, m in todo]
    jobs = jobs or os.cpu_count() or 1
    if jobs <= 1 or len(payload) <= 1:
        results = [_run_job(j) for j in payload]
    else:
        with ProcessPoolExecutor(max_workers=jobs) as ex:
            results = list(ex.map(_run_job, payload))
    return results, skipped
