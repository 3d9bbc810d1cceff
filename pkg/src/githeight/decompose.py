"""Writing semistable cycles as nonnegative rational combinations of bases.

The recursion follows the constructive nonnegativity argument:

* if some proper subspace W is *tight* (mass exactly d*k/(N+1)), decompose
  the part inside W and the image of the rest in Q^(N+1)/W separately, then
  glue bases of W to lifts of bases of the quotient;
* otherwise pick a basis among the vectors and subtract the largest multiple
  of it that keeps the configuration semistable.  Either a multiplicity drops
  to zero or a subspace becomes tight, so the recursion terminates.
"""

from __future__ import annotations

from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np

from .configuration import Configuration
from .linalg import Vector, rank, reduce_mod_span, rref, solve_in_basis
from .stability import (
    Status,
    SubspaceWitness,
    UnstableError,
    candidate_subspaces,
    check_stability,
)

ORTHOGONALITY_TOL = 1e-9


class NotTightError(ValueError):
    pass


class DecompositionError(RuntimeError):
    """An internal invariant of the decomposition recursion failed."""


@dataclass(frozen=True)
class BasisDecomposition:
    dictionary: tuple[Vector, ...]
    terms: tuple[tuple[Fraction, tuple[int, ...]], ...]

    def weights(self) -> list[Fraction]:
        out = [Fraction(0)] * len(self.dictionary)
        for coef, basis in self.terms:
            for i in basis:
                out[i] += coef
        return out

    def total_coefficient(self) -> Fraction:
        return sum((c for c, _ in self.terms), Fraction(0))

    def validate(self, config: Configuration) -> None:
        """Raise unless this decomposition reproduces ``config`` exactly with full-rank terms."""
        if tuple(self.dictionary) != tuple(config.vectors):
            raise DecompositionError("dictionary does not match configuration")
        for coef, basis in self.terms:
            if coef <= 0:
                raise DecompositionError(f"nonpositive coefficient {coef}")
            if len(basis) != config.dim or len(set(basis)) != config.dim:
                raise DecompositionError(f"term {basis} is not an (N+1)-subset")
            if rank([self.dictionary[i] for i in basis]) != config.dim:
                raise DecompositionError(f"term {basis} is not a basis")
        if self.weights() != list(config.multiplicities):
            raise DecompositionError("weighted sum of terms differs from the configuration")


def find_tight_subspace(config: Configuration) -> SubspaceWitness | None:
    """Smallest-dimensional (then lexicographically first) subspace of mass d*k/(N+1)."""
    d, n1 = config.degree, config.dim
    for w in candidate_subspaces(config):
        if w.mass == d * w.dim / n1:
            return w
    return None


def _require_tight(config: Configuration, w: SubspaceWitness) -> SubspaceWitness:
    rows, _ = rref(w.basis)
    members = tuple(i for i, v in enumerate(config.vectors) if rank(list(rows) + [v]) == len(rows))
    mass = sum((config.multiplicities[i] for i in members), Fraction(0))
    k = len(rows)
    if not 0 < k < config.dim or mass != config.degree * k / config.dim:
        raise NotTightError(f"subspace of dim {k} has mass {mass}, not {config.degree * k / config.dim}")
    return SubspaceWitness(tuple(tuple(r) for r in rows), k, mass, members)


def _restrict(config: Configuration, w: SubspaceWitness) -> tuple[Configuration, list[int]]:
    inside = list(w.members)
    coords = [solve_in_basis(config.vectors[i], w.basis) for i in inside]
    sub = Configuration(w.dim - 1, tuple(coords), tuple(config.multiplicities[i] for i in inside))
    return sub, inside


def _quotient(config: Configuration, w: SubspaceWitness) -> tuple[Configuration, list[list[int]]]:
    rows, pivots = rref(w.basis)
    keep = [c for c in range(config.dim) if c not in pivots]
    classes: dict[Vector, int] = {}
    images: list[Vector] = []
    mults: list[Fraction] = []
    members: list[list[int]] = []
    for i, (v, m) in enumerate(config.points()):
        if i in w.members:
            continue
        r = reduce_mod_span(v, rows, pivots)
        img = tuple(r[c] for c in keep)
        lead = next(x for x in img if x != 0)
        key = tuple(x / lead for x in img)
        if key in classes:
            j = classes[key]
            mults[j] += m
            members[j].append(i)
        else:
            classes[key] = len(images)
            images.append(img)
            mults.append(m)
            members.append([i])
    sub = Configuration(config.dim - w.dim - 1, tuple(images), tuple(mults))
    return sub, members


def restrict_to(config: Configuration, w: SubspaceWitness) -> Configuration:
    """The part of ``config`` inside the tight subspace ``w``, in coordinates of its basis."""
    sub, _ = _restrict(config, _require_tight(config, w))
    assert check_stability(sub).semistable
    return sub


def quotient_by(config: Configuration, w: SubspaceWitness) -> Configuration:
    """Images of the vectors outside the tight subspace ``w`` in Q^(N+1)/W.

    Coordinates are the non-pivot positions after reducing against the RREF
    of ``w``; vectors with equal images are merged.
    """
    sub, _ = _quotient(config, _require_tight(config, w))
    assert check_stability(sub).semistable
    return sub


def max_basis_multiple(
    config: Configuration,
    basis_indices: Sequence[int],
    candidates: Sequence[SubspaceWitness] | None = None,
) -> Fraction:
    """Largest t >= 0 such that removing t copies of the basis keeps ``config`` semistable.

    After removal a k-dimensional W holding b of the basis vectors has mass
    mass(W) - t*b against the bound (d - (N+1)*t)*k/(N+1), so each W gives the
    affine constraint t*(k - b) <= d*k/(N+1) - mass(W).
    """
    basis = list(basis_indices)
    if len(basis) != config.dim or rank([config.vectors[i] for i in basis]) != config.dim:
        raise ValueError("indicated vectors do not form a basis")
    if candidates is None:
        candidates = candidate_subspaces(config)
    d, n1 = config.degree, config.dim
    t = min(config.multiplicities[i] for i in basis)
    chosen = set(basis)
    for w in candidates:
        b = sum(1 for i in w.members if i in chosen)
        if b < w.dim:
            slack = d * w.dim / n1 - w.mass
            t = min(t, slack / (w.dim - b))
    return max(t, Fraction(0))


def _greedy_basis(config: Configuration) -> list[int]:
    order = sorted(range(len(config)), key=lambda i: (-config.multiplicities[i], config.vectors[i]))
    chosen: list[int] = []
    for i in order:
        if rank([config.vectors[j] for j in chosen + [i]]) == len(chosen) + 1:
            chosen.append(i)
            if len(chosen) == config.dim:
                break
    if len(chosen) < config.dim:
        raise DecompositionError("vectors do not span; configuration cannot be semistable")
    return sorted(chosen)


def _decompose(config: Configuration, depth: int, limit: int) -> list[tuple[Fraction, tuple[int, ...]]]:
    if depth > limit:
        raise DecompositionError(f"recursion exceeded {limit} steps")
    if config.dim == 1:
        # a single line; semistability forces exactly one class
        assert len(config) == 1
        return [(config.multiplicities[0], (0,))]

    w = find_tight_subspace(config)
    if w is not None:
        inner, inside = _restrict(config, w)
        outer, classes = _quotient(config, w)
        inner_terms = [(c, tuple(inside[i] for i in b)) for c, b in _decompose(inner, depth + 1, limit)]
        outer_terms = _lift(_decompose(outer, depth + 1, limit), classes, config.multiplicities)
        return _glue(inner_terms, outer_terms)

    basis = _greedy_basis(config)
    t = max_basis_multiple(config, basis)
    if t <= 0:
        raise DecompositionError("no tight subspace yet the basis multiple is zero")
    mults = list(config.multiplicities)
    for i in basis:
        mults[i] -= t
    alive = [i for i, m in enumerate(mults) if m > 0]
    terms = [(t, tuple(basis))]
    if alive:
        rest = Configuration(config.ambient, tuple(config.vectors[i] for i in alive), tuple(mults[i] for i in alive))
        terms += [(c, tuple(alive[i] for i in b)) for c, b in _decompose(rest, depth + 1, limit)]
    return terms


def _lift(
    terms: list[tuple[Fraction, tuple[int, ...]]],
    classes: list[list[int]],
    mults: Sequence[Fraction],
) -> list[tuple[Fraction, tuple[int, ...]]]:
    """Replace quotient classes by actual vectors, splitting coefficients as needed."""
    remaining = {i: mults[i] for members in classes for i in members}
    out = []
    for coef, basis in terms:
        left = coef
        while left > 0:
            reps = [next(i for i in classes[c] if remaining[i] > 0) for c in basis]
            delta = min([left] + [remaining[i] for i in reps])
            for i in reps:
                remaining[i] -= delta
            out.append((delta, tuple(reps)))
            left -= delta
    if any(remaining.values()):
        raise DecompositionError("quotient decomposition does not exhaust the outside vectors")
    return out


def _glue(a, b):
    if sum(c for c, _ in a) != sum(c for c, _ in b):
        raise DecompositionError("inner and quotient decompositions have different totals")
    a = [list(t) for t in a]
    b = [list(t) for t in b]
    out = []
    i = j = 0
    while i < len(a) and j < len(b):
        delta = min(a[i][0], b[j][0])
        out.append((delta, tuple(sorted(a[i][1] + b[j][1]))))
        a[i][0] -= delta
        b[j][0] -= delta
        if a[i][0] == 0:
            i += 1
        if b[j][0] == 0:
            j += 1
    return out


def decompose(config: Configuration) -> BasisDecomposition:
    verdict = check_stability(config)
    if not verdict.semistable:
        raise UnstableError(verdict.witness, "cannot decompose an unstable configuration")
    terms = _decompose(config, 0, 10 * len(config))
    merged: dict[tuple[int, ...], Fraction] = {}
    for coef, basis in terms:
        key = tuple(sorted(basis))
        merged[key] = merged.get(key, Fraction(0)) + coef
    result = BasisDecomposition(tuple(config.vectors), tuple((c, b) for b, c in merged.items()))
    result.validate(config)
    return result


def stable_witness_split(config: Configuration, scaling) -> tuple[list[int], Configuration]:
    """Split off a small multiple of N+1 independent, non-orthogonal vectors.

    ``scaling`` is a Hermitian positive-definite matrix H (or an object with an
    ``H`` attribute); orthogonality is measured after applying H^(1/2).  The
    removed coefficient is 1/(L*(N+1)^2), where L clears the denominators of
    the multiplicities; for integer multiplicities this is 1/(N+1)^2.
    """
    verdict = check_stability(config)
    if verdict.status is not Status.STABLE:
        raise ValueError(f"stable_witness_split needs a stable configuration, got {verdict.status.value}")
    h = np.asarray(getattr(scaling, "H", scaling), dtype=complex)
    evals, evecs = np.linalg.eigh(h)
    root = (evecs * np.sqrt(evals)) @ evecs.conj().T
    pts = [root @ np.array([float(x) for x in v]) for v in config.vectors]
    pts = [p / np.linalg.norm(p) for p in pts]
    n = len(config)

    witness = None
    for a in range(n):
        for b in range(n):
            if b != a and abs(np.vdot(pts[a], pts[b])) > ORTHOGONALITY_TOL:
                witness = [a, b]
                break
        if witness:
            break
    if witness is None:
        raise AssertionError("every pair is orthogonal; the stability precondition must be violated")
    for i in range(n):
        if len(witness) == config.dim:
            break
        if i not in witness and rank([config.vectors[j] for j in witness + [i]]) == len(witness) + 1:
            witness.append(i)
    if len(witness) != config.dim:
        raise AssertionError("vectors do not span")

    eps = Fraction(1, config.multiplicity_denominator() * config.dim**2)
    mults = list(config.multiplicities)
    for i in witness:
        mults[i] -= eps
    remainder = Configuration(config.ambient, config.vectors, tuple(mults))
    if not check_stability(remainder).semistable:
        raise AssertionError("remainder after the witness split is unstable")
    return sorted(witness), remainder
