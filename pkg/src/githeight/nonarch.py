"""Non-archimedean local heights over Q.

With the decomposition section s = prod_t det(B_t)^(c_t) (see
:mod:`githeight.heights`), the local term at p of a cycle is

    -(1/d) sum_t c_t log|det B_t|_p + (1/d) inf_g sum_i m_i log|g v_i|_p,

by Gauss's lemma (the max-coefficient norm of a product of linear forms is the
product of their max norms).  Ultrametric Hadamard bounds make every term
nonnegative.  The infimum over g in SL(N+1, Qbar_p) is searched over g = D*E,
D diagonal with rational p-power entries (found by linear programming for each
E) and E a product of elementary moves; a point whose reduction is semistable
over F_p certifies the infimum.
"""

from __future__ import annotations

import enum
import itertools
import math
from dataclasses import dataclass
from fractions import Fraction
from typing import Sequence

import numpy as np
import sympy
from scipy.optimize import linprog

from .configuration import Configuration, primitive_integer
from .linalg import Matrix, det, inverse, matmul, matvec
from .stability import Status, check_stability_mod_p

LP_TOL = 1e-9


class Certificate(str, enum.Enum):
    EXACT_RESIDUAL = "ExactResidual"
    EXACT_DETERMINANT = "ExactDeterminant"
    SEARCH_DEPTH = "SearchDepth"
    TRIVIAL = "Trivial"
    KEMPF_NESS = "KempfNess"


ARCHIMEDEAN = "inf"


@dataclass(frozen=True)
class LocalHeightInterval:
    place: int | str
    lower: float
    upper: float
    certificate: Certificate
    depth: int | None = None
    note: str = ""

    def __post_init__(self):
        if self.lower > self.upper:
            raise ValueError(f"empty interval [{self.lower}, {self.upper}]")
        if self.place != ARCHIMEDEAN and self.lower < 0:
            raise ValueError("finite local heights are nonnegative")


def vp(x: Fraction | int, p: int) -> float:
    """p-adic valuation; +inf for zero."""
    x = Fraction(x)
    if x == 0:
        return math.inf
    v = 0
    num, den = x.numerator, x.denominator
    while num % p == 0:
        num //= p
        v += 1
    while den % p == 0:
        den //= p
        v -= 1
    return v


def unit_part_mod_p(x: Fraction, p: int) -> int:
    x = Fraction(x)
    v = vp(x, p)
    y = x / Fraction(p) ** v
    return (y.numerator * pow(y.denominator, -1, p)) % p


def log_abs_p(x: Fraction | int, p: int) -> float:
    return -vp(x, p) * math.log(p)


def primitive_model(config: Configuration, p: int) -> Configuration:
    """Rescale each vector to be p-integral with some entry a p-adic unit."""
    pts = []
    for v, m in config.points():
        k = min(vp(x, p) for x in v if x != 0)
        s = Fraction(p) ** (-k)
        pts.append((tuple(x * s for x in v), m))
    return Configuration(config.ambient, tuple(v for v, _ in pts), tuple(m for _, m in pts))


def reduce_mod_p(v: Sequence[Fraction], p: int) -> tuple[int, ...]:
    return tuple(0 if x == 0 or vp(x, p) > 0 else unit_part_mod_p(x, p) for x in v)


def residually_semistable(config: Configuration, p: int) -> tuple[bool, list[tuple[tuple[int, ...], Fraction]]]:
    """Semistability over F_p of the reduction of the primitive model."""
    model = primitive_model(config, p)
    reduced = [(reduce_mod_p(v, p), m) for v, m in model.points()]
    status = check_stability_mod_p([r for r, _ in reduced], [m for _, m in reduced], p)
    return status.semistable, reduced


def bad_primes(config: Configuration) -> set[int]:
    """Primes outside of which every local term vanishes."""
    ints = [primitive_integer(v) for v in config.vectors]
    n1 = config.dim
    numbers: set[int] = set()
    for subset in itertools.combinations(ints, n1):
        dd = det([list(r) for r in zip(*subset)])
        if dd != 0:
            numbers.add(abs(int(dd)))
    for a, b in itertools.combinations(ints, 2):
        g = 0
        for i, j in itertools.combinations(range(n1), 2):
            g = math.gcd(g, a[i] * b[j] - a[j] * b[i])
        if g > 1:
            numbers.add(g)
    primes: set[int] = set()
    for n in numbers:
        if n > 1:
            primes.update(sympy.factorint(n))
    return primes


# -- search over g = D * E ---------------------------------------------------------


@dataclass
class _Candidate:
    value: float  # sum_i m_i log|g v_i|_p, minimized over D
    exponents: np.ndarray
    transform: Matrix
    residual_ok: bool


def _apartment_minimum(config: Configuration, e: Matrix, p: int) -> _Candidate | None:
    """Minimize over diagonal D = diag(p^a), sum a = 0, the objective at g = c*D*E.

    c = det(E)^(-1/(N+1)) makes g unimodular.  Returns None if the LP is
    unbounded, which only happens for unstable input.
    """
    n1 = config.dim
    images = [matvec(e, v) for v in config.vectors]
    w = [[vp(x, p) for x in img] for img in images]
    mults = [float(m) for m in config.multiplicities]
    ell = len(images)
    # variables: a_0..a_N, y_1..y_ell ; maximize sum m_i y_i
    c = np.concatenate([np.zeros(n1), -np.array(mults)])
    rows, rhs = [], []
    for i in range(ell):
        for j in range(n1):
            if w[i][j] != math.inf:
                row = np.zeros(n1 + ell)
                row[n1 + i] = 1.0
                row[j] = -1.0
                rows.append(row)
                rhs.append(w[i][j])
    a_eq = np.concatenate([np.ones(n1), np.zeros(ell)])[np.newaxis]
    res = linprog(c, A_ub=np.array(rows), b_ub=np.array(rhs), A_eq=a_eq, b_eq=[0.0], bounds=[(None, None)] * (n1 + ell), method="highs")
    if res.status != 0:
        return None
    a = res.x[:n1]
    y = res.x[n1:]
    shift = vp(det(e), p) / n1
    value = -math.log(p) * (float(np.dot(mults, y)) - float(sum(mults)) * shift)
    reduced = []
    for i, img in enumerate(images):
        r = tuple(
            unit_part_mod_p(img[j], p) if w[i][j] != math.inf and abs(a[j] + w[i][j] - y[i]) < LP_TOL else 0
            for j in range(n1)
        )
        reduced.append(r)
    ok = check_stability_mod_p(reduced, list(config.multiplicities), p).semistable
    return _Candidate(value, a, e, ok)


def _elementary_moves(n1: int, p: int, depth: int) -> list[Matrix]:
    moves = []
    for i, j in itertools.permutations(range(n1), 2):
        for k in range(depth + 1):
            for c in range(1, p):
                for sign in (1, -1):
                    m = [[Fraction(int(r == s)) for s in range(n1)] for r in range(n1)]
                    m[i][j] = Fraction(sign * c, p**k)
                    moves.append(m)
    return moves


def search_minimum(config: Configuration, p: int, depth: int) -> _Candidate:
    """Best g found: seeds from identity and inverse bases, then greedy elementary moves.

    The candidate pool for depth B contains the pool for depth B-1, so the
    returned value is non-increasing in ``depth``.
    """
    n1 = config.dim
    seeds: list[Matrix] = [[[Fraction(int(r == s)) for s in range(n1)] for r in range(n1)]]
    for subset in itertools.combinations(range(len(config)), n1):
        cols = [config.vectors[i] for i in subset]
        m = [list(r) for r in zip(*cols)]
        if det(m) != 0:
            seeds.append(inverse(m))
    best: _Candidate | None = None
    for e in seeds:
        cand = _apartment_minimum(config, e, p)
        if cand is not None and (best is None or cand.value < best.value - 1e-12):
            best = cand
        if best is not None and best.residual_ok:
            return best
    if best is None:
        raise ValueError("no bounded apartment; configuration is unstable")
    moves = _elementary_moves(n1, p, depth)
    for _ in range(depth):
        improved = False
        for mv in moves:
            cand = _apartment_minimum(config, matmul(mv, best.transform), p)
            if cand is None:
                continue
            if cand.residual_ok and cand.value <= best.value + 1e-12:
                return cand
            if cand.value < best.value - 1e-12:
                best, improved = cand, True
        if not improved:
            break
    return best


def section_log_abs_p(decomposition, p: int) -> float:
    """sum_t c_t log|det B_t|_p for the decomposition section."""
    total = 0.0
    for coef, basis in decomposition.terms:
        m = [list(r) for r in zip(*[decomposition.dictionary[i] for i in basis])]
        total += float(coef) * log_abs_p(det(m), p)
    return total


def _is_determinant_case(config: Configuration) -> bool:
    if len(config) != config.dim or len(set(config.multiplicities)) != 1:
        return False
    return det([list(r) for r in zip(*config.vectors)]) != 0


def nonarch_local_height(config: Configuration, p: int, search_depth: int = 3, decomposition=None) -> LocalHeightInterval:
    if _is_determinant_case(config):
        return LocalHeightInterval(p, 0.0, 0.0, Certificate.EXACT_DETERMINANT)
    if decomposition is None:
        from .decompose import decompose

        decomposition = decompose(config)
    d = float(config.degree)
    base = -section_log_abs_p(decomposition, p) / d
    best = search_minimum(config, p, search_depth)
    value = max(base + best.value / d, 0.0)
    if value < 1e-12:
        value = 0.0
    if best.residual_ok:
        return LocalHeightInterval(p, value, value, Certificate.EXACT_RESIDUAL)
    return LocalHeightInterval(p, 0.0, value, Certificate.SEARCH_DEPTH, depth=search_depth)


__all__ = [
    "ARCHIMEDEAN",
    "Certificate",
    "LocalHeightInterval",
    "bad_primes",
    "nonarch_local_height",
    "primitive_model",
    "residually_semistable",
    "search_minimum",
    "section_log_abs_p",
    "vp",
]
