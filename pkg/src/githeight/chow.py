"""Chow forms of zero-cycles and the archimedean Chow metric.

Conventions
-----------
* The Chow form of a point v in P^N is the linear form x -> sum_j v_j x_j on
  the dual space (the pairing <v, x>); for a cycle it is the product of these
  with multiplicities as exponents.  Identifying the dual with the top-minus-one
  wedge power via the lexicographic generator of the top wedge power turns this
  into x -> v ^ x; the two differ only by signs of coordinates, and every
  quantity computed from a form here is invariant under such signs.
* The sphere S(C^(N+1)) carries the rotation-invariant *probability* measure,
  so the integral of log|x_N|^2 equals -H_N with H_N the N-th harmonic number.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Mapping, Sequence

import numpy as np

from .configuration import Configuration

CHUNK = 1 << 16
ZERO_THRESHOLD = 1e-300

Exponent = tuple[int, ...]


def harmonic(n: int) -> Fraction:
    return sum((Fraction(1, j) for j in range(1, n + 1)), Fraction(0))


# -- sparse polynomials: dict exponent-tuple -> coefficient -------------------


def poly_mul(a: Mapping[Exponent, object], b: Mapping[Exponent, object]) -> dict[Exponent, object]:
    out: dict[Exponent, object] = {}
    for ea, ca in a.items():
        for eb, cb in b.items():
            e = tuple(x + y for x, y in zip(ea, eb))
            out[e] = out.get(e, 0) + ca * cb
    return {e: c for e, c in out.items() if c != 0}


def poly_pow(a: Mapping[Exponent, object], k: int, nvars: int) -> dict[Exponent, object]:
    result: dict[Exponent, object] = {(0,) * nvars: 1}
    base = dict(a)
    while k:
        if k & 1:
            result = poly_mul(result, base)
        k >>= 1
        if k:
            base = poly_mul(base, base)
    return result


def linear_form(coeffs: Sequence) -> dict[Exponent, object]:
    n = len(coeffs)
    return {tuple(int(i == j) for i in range(n)): c for j, c in enumerate(coeffs) if c != 0}


@dataclass(frozen=True)
class ChowForm:
    """A multihomogeneous form in ``blocks`` groups of ``block_size`` variables.

    Coefficients are keyed by flat exponent tuples of length blocks*block_size;
    each block's exponents sum to ``degree``.
    """

    blocks: int
    block_size: int
    degree: int
    coefficients: Mapping[Exponent, object] = field(hash=False)

    def __post_init__(self):
        if not self.coefficients:
            raise ValueError("Chow form must have a nonzero coefficient")
        width = self.blocks * self.block_size
        for e in self.coefficients:
            if len(e) != width:
                raise ValueError(f"exponent {e} has wrong length")
            for b in range(self.blocks):
                if sum(e[b * self.block_size : (b + 1) * self.block_size]) != self.degree:
                    raise ValueError(f"exponent {e} is not of multidegree {self.degree}")

    @property
    def ambient(self) -> int:
        return self.block_size - 1

    def evaluate(self, x: np.ndarray) -> np.ndarray:
        """Evaluate on a batch ``x`` of shape (S, blocks, block_size)."""
        x = np.asarray(x, dtype=complex)
        flat = x.reshape(x.shape[0], -1)
        powers: dict[tuple[int, int], np.ndarray] = {}
        out = np.zeros(x.shape[0], dtype=complex)
        for e, c in self.coefficients.items():
            term = np.full(x.shape[0], complex(c))
            for v, k in enumerate(e):
                if k:
                    key = (v, k)
                    if key not in powers:
                        powers[key] = flat[:, v] ** k
                    term = term * powers[key]
            out += term
        return out

    def evaluate_at(self, *points: Sequence) -> complex:
        x = np.array([np.asarray(p, dtype=complex) for p in points])[np.newaxis]
        return complex(self.evaluate(x)[0])

    def __mul__(self, other: ChowForm) -> ChowForm:
        if (self.blocks, self.block_size) != (other.blocks, other.block_size):
            raise ValueError("forms live on different spaces")
        return ChowForm(self.blocks, self.block_size, self.degree + other.degree, poly_mul(self.coefficients, other.coefficients))


def chow_form_of_vectors(vectors: Sequence[Sequence], multiplicities: Sequence[int]) -> ChowForm:
    """Product of the pairing forms <v_i, x>^(m_i); entries may be exact or complex."""
    n1 = len(vectors[0])
    coeffs: dict[Exponent, object] = {(0,) * n1: 1}
    degree = 0
    for v, m in zip(vectors, multiplicities):
        if int(m) != m or m < 0:
            raise ValueError(f"multiplicity {m} is not a nonnegative integer")
        coeffs = poly_mul(coeffs, poly_pow(linear_form(list(v)), int(m), n1))
        degree += int(m)
    return ChowForm(1, n1, degree, coeffs)


def chow_form_of_points(config: Configuration) -> ChowForm:
    for m in config.multiplicities:
        if m.denominator != 1:
            raise ValueError(f"multiplicity {m} is not an integer; clear denominators first")
    return chow_form_of_vectors(config.vectors, config.multiplicities)


# -- Monte Carlo over products of spheres ---------------------------------------


def sphere_sample(dim: int, size: int | tuple = (), rng: np.random.Generator | int | None = None) -> np.ndarray:
    """Uniform points on the unit sphere of C^dim (normalized complex Gaussians)."""
    if dim < 1:
        raise ValueError("dim must be >= 1")
    rng = np.random.default_rng(rng)
    shape = (size,) if isinstance(size, int) else tuple(size)
    z = rng.standard_normal(shape + (dim,)) + 1j * rng.standard_normal(shape + (dim,))
    return z / np.linalg.norm(z, axis=-1, keepdims=True)


@dataclass(frozen=True)
class MCEstimate:
    mean: float
    stderr: float
    samples: int
    seed: int
    resampled: int = 0

    def __post_init__(self):
        if self.samples <= 0 or self.stderr < 0:
            raise ValueError("invalid Monte Carlo estimate")

    def shifted(self, offset: float) -> MCEstimate:
        return MCEstimate(self.mean + offset, self.stderr, self.samples, self.seed, self.resampled)


def mc_sphere_mean(integrand, blocks: int, dim: int, samples: int, seed: int) -> MCEstimate:
    """Mean of ``integrand`` over the product of ``blocks`` unit spheres in C^dim.

    ``integrand`` maps an array (S, blocks, dim) to (values, bad) where ``bad``
    flags samples to redraw.  Samples are drawn in fixed chunks with
    per-chunk generators spawned from ``seed``, so the estimate is
    bit-reproducible and independent of how the chunks are scheduled.
    """
    if samples <= 0:
        raise ValueError("samples must be positive")
    nchunks = -(-samples // CHUNK)
    children = np.random.SeedSequence(seed).spawn(nchunks)
    total = 0.0
    total_sq = 0.0
    resampled = 0
    for c, child in enumerate(children):
        rng = np.random.default_rng(child)
        n = min(CHUNK, samples - c * CHUNK)
        x = sphere_sample(dim, (n, blocks), rng)
        vals, bad = integrand(x)
        while np.any(bad):
            idx = np.flatnonzero(bad)
            resampled += idx.size
            x[idx] = sphere_sample(dim, (idx.size, blocks), rng)
            vals[idx], bad_new = integrand(x[idx])
            bad = np.zeros_like(bad)
            bad[idx] = bad_new
        total += float(np.sum(vals))
        total_sq += float(np.sum(vals * vals))
    mean = total / samples
    var = max(total_sq / samples - mean * mean, 0.0) * samples / max(samples - 1, 1)
    return MCEstimate(mean, math.sqrt(var / samples), samples, seed, resampled)


def chow_integral_mc(form: ChowForm, samples: int = 10**6, seed: int = 0) -> MCEstimate:
    """Estimate the sphere integral of log|F| for the Chow form F."""
    if form.degree == 0:
        const = next(iter(form.coefficients.values()))
        return MCEstimate(math.log(abs(complex(const))), 0.0, samples, seed)

    def integrand(x):
        a = np.abs(form.evaluate(x))
        bad = a < ZERO_THRESHOLD
        return np.log(np.where(bad, 1.0, a)), bad

    return mc_sphere_mean(integrand, form.blocks, form.block_size, samples, seed)


def chow_log_norm(
    form: ChowForm,
    section_value: complex,
    degrees: tuple[int, int] | None = None,
    samples: int = 10**6,
    seed: int = 0,
    integral: MCEstimate | None = None,
) -> MCEstimate:
    """log ||s||_Ch = log|s| - (1/2) d (n+1) H_N - integral of log|F|.

    ``degrees`` is (d, n); by default d is the form's degree and n+1 its
    number of blocks.  The returned estimate carries the integral's stderr.
    """
    if section_value == 0:
        raise ValueError("section vanishes at this point")
    d, n = degrees if degrees is not None else (form.degree, form.blocks - 1)
    if integral is None:
        integral = chow_integral_mc(form, samples, seed)
    const = 0.5 * d * (n + 1) * float(harmonic(form.ambient))
    value = math.log(abs(complex(section_value))) - const - integral.mean
    return MCEstimate(value, integral.stderr, integral.samples, integral.seed, integral.resampled)


def fubini_study_log_norm(config: Configuration, section_value: complex) -> float:
    """Closed form log|s| - sum_i m_i log|v_i| of the Chow metric for zero-cycles."""
    if section_value == 0:
        raise ValueError("section vanishes at this point")
    total = math.log(abs(complex(section_value)))
    for v, m in config.points():
        total -= float(m) * 0.5 * math.log(sum(x * x for x in v))
    return total


def fubini_study_log_norm_vectors(vectors: Sequence[Sequence[complex]], multiplicities: Sequence, section_value: complex) -> float:
    """Same as :func:`fubini_study_log_norm` for complex representatives."""
    if section_value == 0:
        raise ValueError("section vanishes at this point")
    total = math.log(abs(complex(section_value)))
    for v, m in zip(vectors, multiplicities):
        total -= float(m) * math.log(float(np.linalg.norm(np.asarray(v, dtype=complex))))
    return total
