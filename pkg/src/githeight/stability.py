"""Chow (semi)stability of zero-cycles via subspace mass counts.

A cycle of degree d in P^N is semistable iff every k-dimensional subspace W of
Q^(N+1) carries mass at most d*k/(N+1), and stable iff all these inequalities
are strict.

Only spans of subsets of the configuration vectors are enumerated.  This is
enough: if W is any subspace, the span W' of the configuration vectors inside W
has the same mass and dim W' <= dim W, so mass/dim only grows when W is
replaced by W'.  The one exception is W' = 0 (no vectors in W), which never
violates anything.
"""

from __future__ import annotations

import enum
import itertools
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

from .configuration import Configuration
from .linalg import Vector, rank_mod_p, rref, span_key_mod_p, span_membership

MAX_DISTINCT_VECTORS = 20


class InstanceTooLarge(ValueError):
    pass


class Status(str, enum.Enum):
    STABLE = "Stable"
    STRICTLY_SEMISTABLE = "StrictlySemistable"
    UNSTABLE = "Unstable"

    @property
    def semistable(self) -> bool:
        return self is not Status.UNSTABLE


@dataclass(frozen=True)
class SubspaceWitness:
    basis: tuple[Vector, ...]
    dim: int
    mass: Fraction
    members: tuple[int, ...] = ()

    def bound(self, degree: Fraction, ambient: int) -> Fraction:
        return degree * self.dim / (ambient + 1)


@dataclass(frozen=True)
class StabilityVerdict:
    status: Status
    witness: SubspaceWitness | None = None

    @property
    def semistable(self) -> bool:
        return self.status.semistable


class UnstableError(ValueError):
    """Raised when an operation needs a semistable cycle and gets an unstable one."""

    def __init__(self, witness: SubspaceWitness, message: str = "configuration is unstable"):
        super().__init__(f"{message}: subspace of dim {witness.dim} carries mass {witness.mass}")
        self.witness = witness


def mass_in_subspace(config: Configuration, w: SubspaceWitness | Sequence[Sequence]) -> Fraction:
    basis = w.basis if isinstance(w, SubspaceWitness) else w
    return sum((m for v, m in config.points() if span_membership(v, basis)), Fraction(0))


def candidate_subspaces(config: Configuration) -> list[SubspaceWitness]:
    """All proper nonzero spans of subsets of the configuration vectors."""
    ell = len(config)
    if ell > MAX_DISTINCT_VECTORS:
        raise InstanceTooLarge(f"{ell} distinct vectors exceeds the exact enumeration limit {MAX_DISTINCT_VECTORS}")
    n1 = config.dim
    vecs = config.vectors
    out: list[SubspaceWitness] = []
    seen: set = set()
    # Every span has an independent spanning subset, so independent subsets of
    # size <= N reach every proper span; RREF rows dedupe them.
    for size in range(1, min(ell, config.ambient) + 1):
        for subset in itertools.combinations(range(ell), size):
            rows, _ = rref([vecs[i] for i in subset])
            if len(rows) != size:
                continue
            key = tuple(tuple(r) for r in rows)
            if key in seen:
                continue
            seen.add(key)
            members = tuple(i for i in range(ell) if span_membership(vecs[i], rows))
            mass = sum((config.multiplicities[i] for i in members), Fraction(0))
            out.append(SubspaceWitness(tuple(tuple(r) for r in rows), size, mass, members))
    assert all(w.dim < n1 for w in out)
    out.sort(key=lambda w: (w.dim, w.basis))
    return out


def check_stability(config: Configuration) -> StabilityVerdict:
    d = config.degree
    n1 = config.dim
    full_rank = len(rref(config.vectors)[0])
    if full_rank < n1:
        rows, _ = rref(config.vectors)
        w = SubspaceWitness(tuple(tuple(r) for r in rows), full_rank, d, tuple(range(len(config))))
        return StabilityVerdict(Status.UNSTABLE, w)
    worst = None
    tight = None
    for w in candidate_subspaces(config):
        bound = d * w.dim / n1
        if w.mass > bound:
            excess = w.mass - bound
            if worst is None or excess > worst[0]:
                worst = (excess, w)
        elif w.mass == bound and tight is None:
            tight = w
    if worst is not None:
        return StabilityVerdict(Status.UNSTABLE, worst[1])
    if tight is not None:
        return StabilityVerdict(Status.STRICTLY_SEMISTABLE, tight)
    return StabilityVerdict(Status.STABLE)


def verify_verdict(config: Configuration, verdict: StabilityVerdict) -> bool:
    """Re-check a verdict's witness independently of how it was found."""
    w = verdict.witness
    if verdict.status is Status.STABLE:
        return w is None
    if w is None or len(w.basis) != w.dim or len(rref(w.basis)[0]) != w.dim:
        return False
    mass = mass_in_subspace(config, w)
    if mass != w.mass:
        return False
    bound = config.degree * w.dim / config.dim
    if verdict.status is Status.UNSTABLE:
        return mass > bound
    return mass == bound


# -- the same criterion over F_p ------------------------------------------------


def check_stability_mod_p(vectors: Sequence[Sequence[int]], mults: Sequence[Fraction], p: int) -> Status:
    """Stability of a weighted configuration of nonzero vectors over F_p.

    Projectively equal vectors are merged before counting.
    """
    if not vectors:
        raise ValueError("empty configuration")
    n1 = len(vectors[0])
    merged: dict[tuple[int, ...], Fraction] = {}
    for v, m in zip(vectors, mults):
        v = [int(x) % p for x in v]
        lead = next((x for x in v if x), None)
        if lead is None:
            raise ValueError("vector reduces to zero mod p; take a primitive model first")
        inv = pow(lead, -1, p)
        key = tuple((x * inv) % p for x in v)
        merged[key] = merged.get(key, Fraction(0)) + Fraction(m)
    vecs = list(merged)
    ms = [merged[v] for v in vecs]
    d = sum(ms, Fraction(0))
    if rank_mod_p(vecs, p) < n1:
        return Status.UNSTABLE
    status = Status.STABLE
    seen = set()
    for size in range(1, min(len(vecs), n1 - 1) + 1):
        for subset in itertools.combinations(range(len(vecs)), size):
            key = span_key_mod_p([vecs[i] for i in subset], p)
            if len(key) != size or key in seen:
                continue
            seen.add(key)
            mass = sum(
                (ms[i] for i in range(len(vecs)) if rank_mod_p(list(key) + [vecs[i]], p) == size),
                Fraction(0),
            )
            bound = d * size / n1
            if mass > bound:
                return Status.UNSTABLE
            if mass == bound:
                status = Status.STRICTLY_SEMISTABLE
    return status


__all__ = [
    "InstanceTooLarge",
    "Status",
    "StabilityVerdict",
    "SubspaceWitness",
    "UnstableError",
    "candidate_subspaces",
    "check_stability",
    "check_stability_mod_p",
    "mass_in_subspace",
    "verify_verdict",
]
