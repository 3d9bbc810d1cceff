"""Zero-cycles as weighted sets of rational vectors."""

from __future__ import annotations

import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Iterable, Sequence

from .linalg import Vector, matvec, vector


def projective_key(v: Sequence[Fraction]) -> Vector:
    """Representative of the line through ``v`` with first nonzero entry 1."""
    lead = next(x for x in v if x != 0)
    return tuple(x / lead for x in v)


def primitive_integer(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Integer multiple of ``v`` with content 1 and first nonzero entry positive."""
    den = math.lcm(*(x.denominator for x in v))
    ints = [int(x * den) for x in v]
    g = math.gcd(*ints)
    ints = [x // g for x in ints]
    if next(x for x in ints if x != 0) < 0:
        ints = [-x for x in ints]
    return tuple(ints)


@dataclass(frozen=True)
class Configuration:
    """A zero-cycle in P^N: distinct lines in Q^(N+1) with positive rational weights.

    Use :meth:`from_points` to build one; it merges projectively equal vectors
    (adding their multiplicities) and keeps the first representative seen.
    """

    ambient: int
    vectors: tuple[Vector, ...]
    multiplicities: tuple[Fraction, ...]

    def __post_init__(self):
        if self.ambient < 0:
            raise ValueError("ambient dimension N must be nonnegative")
        if len(self.vectors) != len(self.multiplicities):
            raise ValueError("vectors and multiplicities differ in length")
        seen = set()
        for v, m in zip(self.vectors, self.multiplicities):
            if len(v) != self.ambient + 1:
                raise ValueError(f"vector {v} does not live in Q^{self.ambient + 1}")
            if all(x == 0 for x in v):
                raise ValueError("zero vector is not a projective point")
            if m <= 0:
                raise ValueError("multiplicities must be positive")
            key = projective_key(v)
            if key in seen:
                raise ValueError("projectively equal vectors must be merged")
            seen.add(key)

    @classmethod
    def from_points(cls, ambient: int, points: Iterable[tuple[Sequence, object]]) -> Configuration:
        vecs: list[Vector] = []
        mults: list[Fraction] = []
        index: dict[Vector, int] = {}
        for v, m in points:
            v = vector(v)
            m = Fraction(m)
            if len(v) != ambient + 1:
                raise ValueError(f"vector {v} does not live in Q^{ambient + 1}")
            if all(x == 0 for x in v):
                raise ValueError("zero vector is not a projective point")
            if m < 0:
                raise ValueError("multiplicities must be nonnegative")
            if m == 0:
                continue
            key = projective_key(v)
            if key in index:
                mults[index[key]] += m
            else:
                index[key] = len(vecs)
                vecs.append(v)
                mults.append(m)
        if not vecs:
            raise ValueError("configuration has degree 0")
        return cls(ambient, tuple(vecs), tuple(mults))

    @classmethod
    def from_columns(cls, columns: Sequence[Sequence], multiplicities: Sequence | None = None) -> Configuration:
        columns = [vector(c) for c in columns]
        if multiplicities is None:
            multiplicities = [1] * len(columns)
        return cls.from_points(len(columns[0]) - 1, zip(columns, multiplicities))

    @property
    def dim(self) -> int:
        return self.ambient + 1

    @property
    def degree(self) -> Fraction:
        return sum(self.multiplicities, Fraction(0))

    def __len__(self) -> int:
        return len(self.vectors)

    def points(self) -> list[tuple[Vector, Fraction]]:
        return list(zip(self.vectors, self.multiplicities))

    def __add__(self, other: Configuration) -> Configuration:
        if other.ambient != self.ambient:
            raise ValueError("cannot add cycles in different projective spaces")
        return Configuration.from_points(self.ambient, self.points() + other.points())

    def scaled(self, factor) -> Configuration:
        factor = Fraction(factor)
        return Configuration(self.ambient, self.vectors, tuple(m * factor for m in self.multiplicities))

    def transformed(self, g: Sequence[Sequence]) -> Configuration:
        """Image under the rational matrix ``g`` acting on column vectors."""
        return Configuration.from_points(self.ambient, [(matvec(g, v), m) for v, m in self.points()])

    def multiplicity_denominator(self) -> int:
        return math.lcm(*(m.denominator for m in self.multiplicities))

    def canonical(self) -> Configuration:
        """Same cycle with primitive integer representatives in sorted order."""
        pts = sorted((primitive_integer(v), m) for v, m in self.points())
        return Configuration(self.ambient, tuple(vector(v) for v, _ in pts), tuple(m for _, m in pts))
