"""Theorem suite over deterministic families of zero-cycles.

Each check yields PASS/FAIL per configuration; failures keep a serialized copy
of the offending configuration.  Unstable members are tagged and skipped by
the height checks.
"""

from __future__ import annotations

import time
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .chow import chow_form_of_points, chow_log_norm, fubini_study_log_norm, harmonic, mc_sphere_mean
from .configuration import Configuration
from .decompose import decompose, stable_witness_split
from .duality import dual_constant, dual_constant_closed_form, hyperplane_height, metric_shift_check
from .heights import HeightOptions, global_height, hadamard_gap, subadditivity_check, witness_decomposition
from .linalg import rank
from .serialize import config_to_dict
from .stability import Status, UnstableError, check_stability, verify_verdict

HEIGHT_TOL = 1e-6


@dataclass(frozen=True)
class FamilySpec:
    name: str
    ambients: tuple[int, ...]
    max_points: int
    entries: tuple[int, int]
    multiplicities: tuple[Fraction, ...]
    count: int
    seed: int = 0
    max_degree: Fraction | None = None

    def generate(self) -> list[Configuration]:
        """Identity columns for each ambient, then ``count`` seeded random members."""
        out = [Configuration.from_columns([tuple(int(i == j) for i in range(n + 1)) for j in range(n + 1)]) for n in self.ambients]
        rng = np.random.default_rng(self.seed)
        lo, hi = self.entries
        while len(out) < self.count + len(self.ambients):
            n = int(rng.choice(self.ambients))
            # mostly enough points to span; fewer points are always unstable
            if rng.random() < 0.8 and n + 1 <= self.max_points:
                ell = int(rng.integers(n + 1, self.max_points + 1))
            else:
                ell = int(rng.integers(1, self.max_points + 1))
            pts = []
            for _ in range(ell):
                v = (0,) * (n + 1)
                while not any(v):
                    v = tuple(int(x) for x in rng.integers(lo, hi + 1, size=n + 1))
                pts.append((v, self.multiplicities[int(rng.integers(len(self.multiplicities)))]))
            config = Configuration.from_points(n, pts)
            if self.max_degree is not None and config.degree > self.max_degree:
                continue
            out.append(config)
        return out


DEFAULT_FAMILY = FamilySpec("default", (1, 2), 5, (-2, 2), (Fraction(1), Fraction(2)), 80, 0, Fraction(5))
ACCEPTANCE_FAMILY = FamilySpec("acceptance", (1, 2, 3), 6, (-2, 2), tuple(Fraction(k, 2) for k in (1, 2, 3, 4)), 300, 0)
FAMILIES = {"default": DEFAULT_FAMILY, "extended": ACCEPTANCE_FAMILY}


@dataclass
class TheoremResult:
    name: str
    checked: int = 0
    failures: list[dict] = field(default_factory=list)

    @property
    def passed(self) -> bool:
        return not self.failures

    def record(self, ok: bool, config: Configuration | None = None, detail: str = "") -> None:
        self.checked += 1
        if not ok:
            self.failures.append({"config": config_to_dict(config) if config is not None else None, "detail": detail})

    def to_dict(self) -> dict:
        return {"name": self.name, "result": "PASS" if self.passed else "FAIL", "checked": self.checked, "counterexamples": self.failures}


def _is_base_case(config: Configuration) -> bool:
    return len(config) == config.dim and len(set(config.multiplicities)) == 1 and rank(config.vectors) == config.dim


def _family_dict(family: FamilySpec) -> dict:
    out = asdict(family)
    out["multiplicities"] = [str(m) for m in family.multiplicities]
    out["max_degree"] = None if family.max_degree is None else str(family.max_degree)
    return out


def positivity_suite(family: FamilySpec, options: HeightOptions | None = None, pairs: int = 10) -> dict:
    options = options or HeightOptions()
    names = ["stability_witness", "decomposition", "base_case", "nonnegativity", "stable_positivity", "hyperplane_positivity", "subadditivity"]
    res = {n: TheoremResult(n) for n in names}
    members = []
    semistable_by_n: dict[int, list[Configuration]] = {}
    for config in family.generate():
        verdict = check_stability(config)
        res["stability_witness"].record(verify_verdict(config, verdict), config, "verdict witness does not verify")
        entry = {"config": config_to_dict(config), "status": verdict.status.value}
        if not verdict.semistable:
            try:
                decompose(config)
                res["decomposition"].record(False, config, "unstable input was decomposed")
            except UnstableError as exc:
                res["decomposition"].record(verify_verdict(config, type(verdict)(Status.UNSTABLE, exc.witness)), config, "bad witness")
            entry["tag"] = "Unstable"
            members.append(entry)
            continue
        semistable_by_n.setdefault(config.ambient, []).append(config)
        try:
            decompose(config).validate(config)
            res["decomposition"].record(True)
        except Exception as exc:  # failures are data
            res["decomposition"].record(False, config, repr(exc))
        h = global_height(config, options)
        entry["height"] = [h.lower, h.upper]
        res["nonnegativity"].record(h.lower >= -HEIGHT_TOL, config, f"lower bound {h.lower}")
        if _is_base_case(config):
            res["base_case"].record(-HEIGHT_TOL <= h.lower and h.upper <= HEIGHT_TOL, config, f"height [{h.lower}, {h.upper}]")
        if verdict.status is Status.STABLE:
            _, witness, remainder, kn, margin = witness_decomposition(config, options)
            gap = hadamard_gap([config.vectors[i] for i in witness], kn.scaling.H)
            ok = check_stability(remainder).semistable and gap > 0 and margin > 0 and h.upper >= margin - HEIGHT_TOL
            res["stable_positivity"].record(ok, config, f"margin {margin}, gap {gap}, height upper {h.upper}")
            entry["margin"] = margin
        if config.ambient > 1:
            hh = hyperplane_height(config, options)
            entry["hyperplane_height"] = [hh.lower, hh.upper]
            res["hyperplane_positivity"].record(hh.lower > 0, config, f"hyperplane lower bound {hh.lower}")
        members.append(entry)
    done = 0
    for n in sorted(semistable_by_n):
        group = semistable_by_n[n]
        for a, b in zip(group, group[1:]):
            if done >= pairs:
                break
            rep = subadditivity_check(a, b, options)
            res["subadditivity"].record(rep["pass"], a + b, f"report {rep}")
            done += 1
    return {
        "family": _family_dict(family),
        "options": asdict(options),
        "theorems": [r.to_dict() for r in res.values()],
        "members": members,
        "pass": all(r.passed for r in res.values()),
    }


# -- numerical checks bundled into ``verify`` ----------------------------------------


def stoll_check(n: int, samples: int, seed: int) -> dict:
    def integrand(x):
        a = np.abs(x[:, 0, -1]) ** 2
        bad = a < 1e-300
        return np.log(np.where(bad, 1.0, a)), bad

    est = mc_sphere_mean(integrand, 1, n + 1, samples, seed)
    expected = -float(harmonic(n))
    return {"N": n, "mean": est.mean, "stderr": est.stderr, "expected": expected, "pass": abs(est.mean - expected) <= 3 * est.stderr}


def fubini_study_check(config: Configuration, samples: int, seed: int) -> dict:
    """Chow metric vs the Fubini-Study closed form at a random section point."""
    form = chow_form_of_points(config)
    rng = np.random.default_rng(seed)
    x = rng.standard_normal(config.dim) + 1j * rng.standard_normal(config.dim)
    s = form.evaluate_at(x)
    mc = chow_log_norm(form, s, samples=samples, seed=seed + 1)
    exact = fubini_study_log_norm(config, s)
    return {"mc": mc.mean, "stderr": mc.stderr, "closed_form": exact, "pass": abs(mc.mean - exact) <= 4 * mc.stderr}


def run_verify(suite: str = "default", options: HeightOptions | None = None) -> dict:
    options = options or HeightOptions()
    start = time.monotonic()
    family = FAMILIES[suite]
    report = positivity_suite(family, options, pairs=10 if suite == "default" else 20)
    checks = []
    samples, seed = options.mc_samples, options.seed
    for n in (1, 2, 3, 4):
        checks.append({"check": "stoll", **stoll_check(n, samples, seed + n)})
    for n in (2, 3, 4):
        dc = dual_constant(n, samples, seed + 10 + n)
        checks.append({"check": "dual_constant", "N": n, "closed_form": str(dc.closed_form), "mc": dc.mc_check.mean, "stderr": dc.mc_check.stderr, "pass": dc.agrees})
    checks.append({"check": "dual_constant_positive", "values": {n: str(dual_constant_closed_form(n)) for n in range(2, 7)}, "pass": all(dual_constant_closed_form(n) > 0 for n in range(2, 7))})
    ident2 = Configuration.from_columns([(1, 0, 0), (0, 1, 0), (0, 0, 1)])
    ms = metric_shift_check(ident2, 3, samples, seed)
    checks.append({"check": "metric_shift", **ms})
    ms1 = metric_shift_check(Configuration.from_columns([(1, 0), (0, 1)]), 2, samples, seed)
    checks.append({"check": "metric_shift", **ms1, "pass": ms1["pass"] and all(abs(r["difference"]) <= 4 * r["stderr"] for r in ms1["rows"])})
    fs_family = [c for c in DEFAULT_FAMILY.generate() if c.degree <= 3 and all(m.denominator == 1 for m in c.multiplicities)][:5]
    for k, c in enumerate(fs_family):
        checks.append({"check": "fubini_study", "config": config_to_dict(c), **fubini_study_check(c, samples, seed + 100 + k)})
    for c in checks:
        c["pass"] = bool(c["pass"])
    report["checks"] = checks
    report["pass"] = bool(report["pass"] and all(c["pass"] for c in checks))
    report["suite"] = suite
    report["seconds"] = round(time.monotonic() - start, 2)
    return report


def summary_lines(report: dict) -> list[str]:
    lines = [f"{t['result']}  {t['name']}  ({t['checked']} checked)" for t in report["theorems"]]
    for c in report.get("checks", []):
        label = c["check"] + (f" N={c['N']}" if "N" in c else "")
        lines.append(f"{'PASS' if c['pass'] else 'FAIL'}  {label}")
    unstable = sum(1 for m in report["members"] if m.get("tag") == "Unstable")
    lines.append(f"members: {len(report['members'])}, skipped as Unstable: {unstable}")
    lines.append(f"overall: {'PASS' if report['pass'] else 'FAIL'}")
    return lines
