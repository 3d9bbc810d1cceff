"""Global GIT heights of zero-cycles over Q and the checks built on them.

The invariant section used at every place is the decomposition section
s = prod_t det(B_t)^(L c_t) of Chow degree L, where sum_t c_t B_t is a basis
decomposition of the cycle.  Local terms are -log||s|| / (d * L), which makes
each of them nonnegative by Hadamard's inequality (archimedean or ultrametric).
Their sum does not depend on the decomposition, by the product formula.

For stable cycles the decomposition is seeded with the witness split:
1/(L(N+1)^2) times a basis that is not orthogonal at the archimedean
minimizer, plus any decomposition of the remainder.  The archimedean term is
then bounded below by that basis's Hadamard gap, which is strictly positive.
"""

from __future__ import annotations

import hashlib
import json
import math
from dataclasses import asdict, dataclass, field
from fractions import Fraction

import numpy as np

from .arch import arch_local_height, kn_minimize, kn_value
from .configuration import Configuration
from .decompose import BasisDecomposition, decompose, stable_witness_split
from .nonarch import ARCHIMEDEAN, Certificate, LocalHeightInterval, bad_primes, nonarch_local_height
from .stability import Status, UnstableError, check_stability


@dataclass(frozen=True)
class HeightOptions:
    tol: float = 1e-10
    max_iter: int = 20000
    search_depth: int = 3
    mc_samples: int = 10**6
    seed: int = 0
    section: str = "auto"  # "auto": witness split for stable input; "decomposition": plain

    def __post_init__(self):
        if self.section not in ("auto", "decomposition"):
            raise ValueError(f"unknown section {self.section!r}")


@dataclass(frozen=True)
class HeightEstimate:
    lower: float
    upper: float
    per_place: tuple[LocalHeightInterval, ...]
    config_digest: str
    options: dict = field(default_factory=dict)
    status: str = ""
    margin: float | None = None

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError("empty height interval")

    @property
    def total(self) -> tuple[float, float]:
        return (self.lower, self.upper)

    def shifted(self, offset: float) -> HeightEstimate:
        """Same estimate with ``offset`` added to the archimedean term."""
        places = []
        for p in self.per_place:
            if p.place == ARCHIMEDEAN:
                p = LocalHeightInterval(p.place, p.lower + offset, p.upper + offset, p.certificate, p.depth, p.note)
            places.append(p)
        return _assemble(places, self.config_digest, self.options, self.status, self.margin)


def _assemble(places, digest, options, status, margin) -> HeightEstimate:
    lower = math.fsum(p.lower for p in places)
    upper = math.fsum(p.upper for p in places)
    return HeightEstimate(lower, upper, tuple(places), digest, dict(options), status, margin)


def config_digest(config: Configuration) -> str:
    from .serialize import config_to_dict

    text = json.dumps(config_to_dict(config.canonical()), sort_keys=True, separators=(",", ":"))
    return hashlib.sha256(text.encode()).hexdigest()


def hadamard_gap(vectors, h: np.ndarray) -> float:
    """sum_i log|g u_i| - log|det(g U)| for unit u_i and g = H^(1/2), det g = 1."""
    u = np.array([[float(x) for x in v] for v in vectors], dtype=complex)
    u = u / np.linalg.norm(u, axis=1, keepdims=True)
    q = np.einsum("ij,jk,ik->i", u.conj(), h, u).real
    return float(0.5 * np.sum(np.log(q)) - math.log(abs(np.linalg.det(u))))


def witness_decomposition(config: Configuration, options: HeightOptions | None = None):
    """Decomposition starting with the witness-split basis, plus diagnostics."""
    options = options or HeightOptions()
    kn = kn_minimize(config, options.tol, options.max_iter)
    witness, remainder = stable_witness_split(config, kn.scaling)
    eps = config.degree - remainder.degree
    eps = eps / config.dim
    rest = decompose(remainder)
    merged: dict[tuple[int, ...], Fraction] = {tuple(witness): eps}
    for c, b in rest.terms:
        merged[b] = merged.get(b, Fraction(0)) + c
    result = BasisDecomposition(config.vectors, tuple((c, b) for b, c in merged.items()))
    result.validate(config)
    gap = hadamard_gap([config.vectors[i] for i in witness], kn.scaling.H)
    margin = float(eps) * gap / float(config.degree)
    return result, witness, remainder, kn, margin


def global_height(config: Configuration, options: HeightOptions | None = None) -> HeightEstimate:
    """Height interval of a semistable cycle, computed on its canonical model.

    Using primitive integer representatives in sorted order makes the chosen
    section, and so every local term, independent of how the input was scaled
    or ordered.
    """
    options = options or HeightOptions()
    config = config.canonical()
    verdict = check_stability(config)
    if not verdict.semistable:
        raise UnstableError(verdict.witness)
    margin = None
    if verdict.status is Status.STABLE and options.section == "auto":
        decomposition, _, _, _, margin = witness_decomposition(config, options)
    else:
        decomposition = decompose(config)
    places = [arch_local_height(config, decomposition, options.tol, options.max_iter)]
    for p in sorted(bad_primes(config)):
        places.append(nonarch_local_height(config, p, options.search_depth, decomposition))
    return _assemble(places, config_digest(config), asdict(options), verdict.status.value, margin)


def subadditivity_check(c1: Configuration, c2: Configuration, options: HeightOptions | None = None, tol: float = 1e-6) -> dict:
    """Superadditivity of heights for a pair of semistable cycles.

    Local terms here are divided by the degree, so the inequality is checked
    on degree-weighted heights: d12 * h(c1 + c2) >= d1 * h(c1) + d2 * h(c2).
    The unweighted comparison is reported but not required.
    """
    options = options or HeightOptions()
    combined = c1 + c2
    h1 = global_height(c1, options)
    h2 = global_height(c2, options)
    h12 = global_height(combined, options)
    d1, d2 = float(c1.degree), float(c2.degree)
    weighted = (d1 + d2) * h12.upper >= d1 * h1.lower + d2 * h2.lower - tol
    unweighted = h12.upper >= h1.lower + h2.lower - tol
    kn = kn_minimize(combined, options.tol, options.max_iter)
    lhs = kn_value(combined, kn.scaling) * (d1 + d2)
    rhs = kn_value(c1, kn.scaling) * d1 + kn_value(c2, kn.scaling) * d2
    pointwise = abs(lhs - rhs) <= 1e-9 * max(1.0, abs(lhs))
    nonneg = h12.lower >= -tol
    return {
        "h1": [h1.lower, h1.upper],
        "h2": [h2.lower, h2.upper],
        "h12": [h12.lower, h12.upper],
        "degrees": [d1, d2],
        "weighted_inequality": bool(weighted),
        "unweighted_inequality": bool(unweighted),
        "pointwise_additivity": bool(pointwise),
        "decomposition_bound": bool(nonneg),
        "pass": bool(weighted and pointwise and nonneg),
    }


__all__ = [
    "Certificate",
    "HeightEstimate",
    "HeightOptions",
    "config_digest",
    "global_height",
    "hadamard_gap",
    "subadditivity_check",
    "witness_decomposition",
]
