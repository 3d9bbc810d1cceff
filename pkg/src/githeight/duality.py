"""Point/hyperplane duality and the constant it adds to the height.

A point v of P(V) goes to the hyperplane whose Chow form is
(x_1, ..., x_N) -> det[v; x_1; ...; x_N].  For a cycle this is the zero-cycle
Chow form composed with the wedge map, whose coordinates are the signed
maximal minors w_j = (-1)^j det(X with column j deleted) of the N x (N+1)
matrix X with rows x_1, ..., x_N.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from fractions import Fraction

import numpy as np

from .chow import (
    ChowForm,
    Exponent,
    MCEstimate,
    chow_form_of_points,
    chow_form_of_vectors,
    chow_log_norm,
    harmonic,
    mc_sphere_mean,
    poly_mul,
    sphere_sample,
)
from .configuration import Configuration
from .nonarch import vp


def _perm_sign(perm: tuple[int, ...]) -> int:
    sign = 1
    seen = list(perm)
    for i in range(len(seen)):
        while seen[i] != i:
            j = seen[i]
            seen[i], seen[j] = seen[j], seen[i]
            sign = -sign
    return sign


def wedge_coordinates(n: int) -> list[dict[Exponent, int]]:
    """The N+1 signed maximal minors as polynomials in N blocks of N+1 variables."""
    n1 = n + 1
    width = n * n1
    coords = []
    for j in range(n1):
        cols = [c for c in range(n1) if c != j]
        poly: dict[Exponent, int] = {}
        for perm in itertools.permutations(range(n)):
            e = [0] * width
            for row, k in enumerate(perm):
                e[row * n1 + cols[k]] = 1
            poly[tuple(e)] = poly.get(tuple(e), 0) + (-1) ** j * _perm_sign(perm)
        coords.append(poly)
    return coords


def wedge(vectors: np.ndarray) -> np.ndarray:
    """Numerical wedge coordinates of a batch (..., N, N+1) -> (..., N+1)."""
    vectors = np.asarray(vectors)
    n1 = vectors.shape[-1]
    out = []
    for j in range(n1):
        minor = np.delete(vectors, j, axis=-1)
        out.append((-1) ** j * np.linalg.det(minor))
    return np.stack(out, axis=-1)


def dual_chow_form(form: ChowForm) -> ChowForm:
    """Compose a zero-cycle Chow form with the wedge map."""
    if form.blocks != 1:
        raise ValueError("dual_chow_form expects the Chow form of a zero-cycle")
    n = form.ambient
    if n < 1:
        raise ValueError("duality needs N >= 1")
    w = wedge_coordinates(n)
    width = n * (n + 1)
    cache: dict[tuple[int, int], dict[Exponent, object]] = {}

    def power(j: int, k: int) -> dict[Exponent, object]:
        if k == 0:
            return {(0,) * width: 1}
        if (j, k) not in cache:
            cache[(j, k)] = poly_mul(power(j, k - 1), w[j])
        return cache[(j, k)]

    out: dict[Exponent, object] = {}
    for alpha, c in form.coefficients.items():
        term: dict[Exponent, object] = {(0,) * width: c}
        for j, k in enumerate(alpha):
            if k:
                term = poly_mul(term, power(j, k))
        for e, x in term.items():
            out[e] = out.get(e, 0) + x
    out = {e: x for e, x in out.items() if x != 0}
    return ChowForm(n, n + 1, form.degree, out)


def hyperplane_chow_form(config: Configuration) -> ChowForm:
    """Direct product of det[v_i; x_1; ...; x_N]^(m_i); equals the dual of the point form."""
    n = config.ambient
    w = wedge_coordinates(n)
    width = n * (n + 1)
    out: dict[Exponent, object] = {(0,) * width: 1}
    for v, m in config.points():
        lin: dict[Exponent, object] = {}
        for j, poly in enumerate(w):
            if v[j] != 0:
                for e, c in poly.items():
                    lin[e] = lin.get(e, 0) + v[j] * c
        for _ in range(int(m)):
            out = poly_mul(out, lin)
    return ChowForm(n, n + 1, int(config.degree), out)


# -- the constant ------------------------------------------------------------------


def dual_constant_closed_form(n: int) -> Fraction:
    """(1/2) sum_{m=1}^{N-1} H_m.

    Expanding log|v_1 ^ ... ^ v_N| as a sum of log-lengths of successive
    orthogonal projections, the i-th term has the law of (1/2) log of a
    Beta(N+2-i, i-1) variable, with mean (1/2)(H_{N+1-i} - H_N).  Adding
    (1/2)(N-1) H_N leaves (1/2) sum_{m=1}^{N-1} H_m.
    """
    if n < 1:
        raise ValueError("N must be >= 1")
    return sum((harmonic(m) for m in range(1, n)), Fraction(0)) / 2


@dataclass(frozen=True)
class DualConstant:
    n: int
    closed_form: Fraction
    mc_check: MCEstimate

    @property
    def agrees(self) -> bool:
        return abs(self.mc_check.mean - float(self.closed_form)) <= 3 * self.mc_check.stderr + 1e-15


def wedge_log_integral_mc(n: int, samples: int, seed: int) -> MCEstimate:
    """MC estimate of the integral of log|v_1 ^ ... ^ v_N| over S(C^(N+1))^N."""

    def integrand(x):
        gram = np.einsum("sik,sjk->sij", x, x.conj())
        g = np.linalg.det(gram).real
        bad = g <= 1e-300
        return 0.5 * np.log(np.where(bad, 1.0, g)), bad

    return mc_sphere_mean(integrand, n, n + 1, samples, seed)


def dual_constant(n: int, samples: int = 10**6, seed: int = 0) -> DualConstant:
    closed = dual_constant_closed_form(n)
    est = wedge_log_integral_mc(n, samples, seed)
    mc = est.shifted(0.5 * (n - 1) * float(harmonic(n)))
    result = DualConstant(n, closed, mc)
    if n > 1 and closed <= 0:
        raise AssertionError("duality constant must be positive for N > 1")
    return result


# -- the metric shift ------------------------------------------------------------------


def random_sl(n1: int, rng: np.random.Generator) -> np.ndarray:
    a = rng.standard_normal((n1, n1)) + 1j * rng.standard_normal((n1, n1))
    d = np.linalg.det(a)
    return a / d ** (1.0 / n1)


def metric_shift_check(config: Configuration, g_samples: int = 3, mc_samples: int = 10**6, seed: int = 0) -> dict:
    """Compare Chow log-norms of g*X and of its dual for random g in SL(N+1, C).

    Each difference log||s'||(phi(gX)) - log||s||(gX) should equal -d*C'.
    """
    if any(m.denominator != 1 for m in config.multiplicities):
        raise ValueError("metric_shift_check needs integer multiplicities")
    n = config.ambient
    d = int(config.degree)
    expected = -d * float(dual_constant_closed_form(n))
    rng = np.random.default_rng(seed)
    base = np.array([[float(x) for x in v] for v in config.vectors], dtype=complex)
    rows = []
    resampled = 0
    for k in range(g_samples):
        g = random_sl(n + 1, rng)
        vecs = base @ g.T
        form = chow_form_of_vectors([tuple(v) for v in vecs], [int(m) for m in config.multiplicities])
        dual = dual_chow_form(form)
        while True:
            fixed = sphere_sample(n + 1, n, rng)
            w = wedge(fixed)
            s = form.evaluate(w[np.newaxis, np.newaxis])[0]
            s_dual = dual.evaluate(fixed[np.newaxis])[0]
            if np.linalg.norm(w) >= 1e-6 and abs(s) > 1e-12:
                break
            resampled += 1
        primal = chow_log_norm(form, s, (d, 0), mc_samples, seed + 2 * k + 1)
        dualn = chow_log_norm(dual, s_dual, (d, n - 1), mc_samples, seed + 2 * k + 2)
        diff = dualn.mean - primal.mean
        stderr = math.hypot(primal.stderr, dualn.stderr)
        rows.append(
            {
                "difference": float(diff),
                "stderr": float(stderr),
                "section_mismatch": float(abs(s - s_dual) / abs(s)),
                "pass": bool(abs(diff - expected) <= 4 * stderr and abs(s - s_dual) <= 1e-9 * abs(s)),
            }
        )
    return {
        "N": n,
        "degree": d,
        "expected": expected,
        "rows": rows,
        "resampled_sections": resampled,
        "seed": seed,
        "mc_samples": mc_samples,
        "pass": all(r["pass"] for r in rows),
    }


def max_coefficient_valuation(form: ChowForm, p: int) -> float:
    return min(vp(Fraction(c), p) for c in form.coefficients.values())


def padic_norm_check(config: Configuration, p: int) -> bool:
    """Max-coefficient p-adic norms of the point form and its dual agree."""
    form = chow_form_of_points(config)
    return max_coefficient_valuation(form, p) == max_coefficient_valuation(dual_chow_form(form), p)


def hyperplane_height(config: Configuration, options=None):
    """Height of the dual hyperplane arrangement: the point height shifted by C'."""
    from .heights import global_height

    return global_height(config, options).shifted(float(dual_constant_closed_form(config.ambient)))
