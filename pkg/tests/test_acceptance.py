"""Acceptance criteria 1-12.  Each test appends one PASS/FAIL line to RESULTS,
which conftest prints in the terminal summary."""

import functools
import itertools
import shutil
import subprocess
import sys
import time
from fractions import Fraction

import numpy as np
import pytest

from githeight.arch import KNStatus, kn_minimize
from githeight.configuration import Configuration
from githeight.decompose import decompose, stable_witness_split
from githeight.duality import dual_constant, dual_constant_closed_form, metric_shift_check
from githeight.heights import global_height, subadditivity_check
from githeight.linalg import rank
from githeight.nonarch import ARCHIMEDEAN
from githeight.stability import Status, StabilityVerdict, UnstableError, check_stability, verify_verdict
from githeight.suite import ACCEPTANCE_FAMILY, FamilySpec, fubini_study_check, stoll_check
from conftest import identity
from oracles import brute_force_status

RESULTS: list[str] = []
MC = 10**6


def record(k: int, ok: bool, detail: str) -> None:
    RESULTS.append(f"CRITERION {k}: {'PASS' if ok else 'FAIL'}  {detail}")
    assert ok, detail


@functools.lru_cache(maxsize=None)
def family() -> tuple[Configuration, ...]:
    return tuple(ACCEPTANCE_FAMILY.generate())


def exhaustive_family() -> list[Configuration]:
    out = []
    lines = [(1, 0), (0, 1), (1, 1), (1, -1)]
    mults = [Fraction(k, 2) for k in (1, 2, 3, 4)]
    for k in range(1, 5):
        for subset in itertools.combinations(lines, k):
            for ms in itertools.product(mults, repeat=k):
                out.append(Configuration.from_points(1, list(zip(subset, ms))))
    cube = [v for v in itertools.product((0, 1), repeat=3) if any(v)]
    for k in range(1, 5):
        for subset in itertools.combinations(cube, k):
            for ms in itertools.product((1, 2), repeat=k):
                out.append(Configuration.from_points(2, list(zip(subset, ms))))
    return out


@functools.lru_cache(maxsize=None)
def verdicts() -> tuple[StabilityVerdict, ...]:
    return tuple(check_stability(c) for c in family())


@functools.lru_cache(maxsize=None)
def heights() -> dict[int, object]:
    return {i: global_height(c) for i, (c, v) in enumerate(zip(family(), verdicts())) if v.semistable}


def test_criterion_1_base_case():
    cases = [identity(n) for n in (1, 2, 3)]
    # Vandermonde columns: general position with nontrivial bad primes
    cases += [Configuration.from_columns([tuple(t**i for i in range(n + 1)) for t in range(1, n + 2)]) for n in (1, 2, 3)]
    worst, slowest, finite_ok = 0.0, 0.0, True
    for c in cases:
        start = time.monotonic()
        h = global_height(c)
        slowest = max(slowest, time.monotonic() - start)
        worst = max(worst, abs(h.lower), abs(h.upper))
        finite_ok &= all(p.lower == 0 and p.upper == 0 for p in h.per_place if p.place != ARCHIMEDEAN)
    ok = worst <= 1e-6 and slowest < 10 and finite_ok
    record(1, ok, f"max |h| {worst:.2e}, slowest {slowest:.2f}s, finite places all zero: {finite_ok}")


def test_criterion_2_hadamard_minimizer():
    rng = np.random.default_rng(2)
    worst_res, worst_orth, count = 0.0, 0.0, 0
    while count < 50:
        n = int(rng.integers(1, 4))
        cols = [tuple(Fraction(int(rng.integers(-5, 6)), int(rng.integers(1, 4))) for _ in range(n + 1)) for _ in range(n + 1)]
        if rank(cols) < n + 1:
            continue
        count += 1
        kn = kn_minimize(Configuration.from_columns(cols))
        assert kn.status is KNStatus.CONVERGED
        g = kn.scaling.sqrt()
        u = np.array([g @ np.array([float(x) for x in v]) for v in cols])
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        gram = np.abs(u.conj() @ u.T) - np.eye(n + 1)
        worst_res = max(worst_res, kn.residual)
        worst_orth = max(worst_orth, float(gram.max()))
    record(2, worst_res < 1e-8 and worst_orth <= 1e-6, f"50 bases, max residual {worst_res:.1e}, max |<u_i,u_j>| {worst_orth:.1e}")


def test_criterion_3_stability_oracle():
    members = list(family()) + exhaustive_family()
    bad = 0
    for c in members:
        if check_stability(c).status.value != brute_force_status(c.vectors, c.multiplicities):
            bad += 1
    record(3, bad == 0, f"{len(members)} configurations ({len(family())} sampled, rest exhaustive), {bad} disagreements")


def test_criterion_4_decomposition():
    sound = fails = 0
    for c, v in zip(family(), verdicts()):
        if v.semistable:
            dec = decompose(c)
            dec.validate(c)
            ok = all(rank([c.vectors[i] for i in b]) == c.dim for _, b in dec.terms)
        else:
            try:
                decompose(c)
                ok = False
            except UnstableError as exc:
                ok = verify_verdict(c, StabilityVerdict(Status.UNSTABLE, exc.witness))
        sound += ok
        fails += not ok
    record(4, fails == 0, f"{sound} members handled soundly, {fails} failures")


def test_criterion_5_nonnegativity():
    lows = [h.lower for h in heights().values()]
    record(5, min(lows) >= -1e-6, f"{len(lows)} semistable members, min lower bound {min(lows):.3e}")


def test_criterion_6_witness_split():
    checked, fails, min_overlap = 0, 0, 1.0
    for c, v in zip(family(), verdicts()):
        if v.status is not Status.STABLE:
            continue
        checked += 1
        kn = kn_minimize(c)
        witness, remainder = stable_witness_split(c, kn.scaling)
        g = kn.scaling.sqrt()
        u = np.array([g @ np.array([float(x) for x in c.vectors[i]]) for i in witness])
        u /= np.linalg.norm(u, axis=1, keepdims=True)
        overlap = float((np.abs(u.conj() @ u.T) - np.eye(len(u))).max())
        independent = len(witness) == c.dim and rank([c.vectors[i] for i in witness]) == c.dim
        min_overlap = min(min_overlap, overlap)
        if not (check_stability(remainder).semistable and independent and overlap > 1e-9):
            fails += 1
    record(6, checked > 0 and fails == 0, f"{checked} stable members, {fails} failures, min max-overlap {min_overlap:.3e}")


def test_criterion_7_stoll():
    rows = [stoll_check(n, MC, n) for n in (1, 2, 3, 4)]
    detail = ", ".join(f"N={r['N']}: {(r['mean'] - r['expected']) / r['stderr']:+.2f} sd" for r in rows)
    record(7, all(r["pass"] for r in rows), detail)


def test_criterion_8_fubini_study():
    spec = FamilySpec("fs", (1, 2), 3, (-2, 2), (Fraction(1),), 40, 8, Fraction(3))
    members = [c for c in spec.generate() if c.degree <= 3][:20]
    assert len(members) == 20
    rows = [fubini_study_check(c, MC, 800 + k) for k, c in enumerate(members)]
    worst = max(abs(r["mc"] - r["closed_form"]) / r["stderr"] for r in rows)
    record(8, all(r["pass"] for r in rows), f"20 cycles, worst deviation {worst:.2f} sd")


def test_criterion_9_dual_constant():
    rows = [dual_constant(n, MC, 90 + n) for n in (2, 3, 4)]
    positive = all(dual_constant_closed_form(n) > 0 for n in range(2, 7))
    n2 = dual_constant_closed_form(2) == Fraction(1, 2)
    detail = ", ".join(f"N={r.n}: {r.closed_form} vs {r.mc_check.mean:.4f}+/-{r.mc_check.stderr:.4f}" for r in rows)
    record(9, all(r.agrees for r in rows) and positive and n2, detail + f"; positive N=2..6: {positive}; C'(2)=1/2: {n2}")


def test_criterion_10_metric_shift():
    two = metric_shift_check(identity(2), 3, MC, 0)
    one = metric_shift_check(identity(1), 2, MC, 0)
    one_ok = one["pass"] and all(abs(r["difference"]) <= 4 * r["stderr"] for r in one["rows"])
    diffs = ", ".join(f"{r['difference']:.4f}" for r in two["rows"])
    record(10, two["pass"] and one_ok, f"N=2 differences {diffs} (expected {two['expected']:.4f}); N=1 max |diff| {max(abs(r['difference']) for r in one['rows']):.1e}")


def test_criterion_11_subadditivity():
    by_n: dict[int, list[Configuration]] = {}
    for c, v in zip(family(), verdicts()):
        if v.semistable:
            by_n.setdefault(c.ambient, []).append(c)
    rng = np.random.default_rng(11)
    ambients = sorted(n for n in by_n if len(by_n[n]) > 1)
    fails = 0
    for _ in range(20):
        group = by_n[ambients[int(rng.integers(len(ambients)))]]
        i, j = rng.choice(len(group), size=2, replace=False)
        fails += not subadditivity_check(group[i], group[j])["pass"]
    record(11, fails == 0, f"20 pairs, {fails} failures")


def test_criterion_12_end_to_end():
    exe = shutil.which("githeight")
    cmd = [exe] if exe else [sys.executable, "-m", "githeight.cli"]
    start = time.monotonic()
    proc = subprocess.run(cmd + ["verify", "--suite", "default"], capture_output=True, text=True, timeout=900)
    elapsed = time.monotonic() - start
    last = proc.stdout.strip().splitlines()[-3:] if proc.stdout else [proc.stderr[-200:]]
    record(12, proc.returncode == 0 and elapsed < 900, f"exit {proc.returncode} in {elapsed:.1f}s; " + " | ".join(last))
