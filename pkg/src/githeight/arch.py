"""Archimedean local heights: Kempf-Ness minimization over SL(N+1, C).

By the Fubini-Study factorization, the SL-dependent part of the archimedean
term of a zero-cycle is

    kn_value(H) = (1/d) sum_i m_i * (1/2) log(v_i^* H v_i / v_i^* v_i),

with H = g^* g of determinant 1.  Its critical points are the balanced
scalings, where sum_i m_i (H^(1/2) v_i)(H^(1/2) v_i)^* / (v_i^* H v_i) equals
(d/(N+1)) I.  We reach them with the fixed-point map

    H <- normalize( inverse( (N+1)/d * sum_i m_i v_i v_i^* / (v_i^* H v_i) ) ),

which decreases kn_value monotonically (it is a majorize-minimize step).
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

import numpy as np

from .configuration import Configuration, projective_key
from .decompose import BasisDecomposition, decompose, find_tight_subspace
from .linalg import Matrix, det, inverse, matvec, nullspace, solve_in_basis
from .nonarch import ARCHIMEDEAN, Certificate, LocalHeightInterval
from .stability import UnstableError, check_stability

DIVERGENCE_VALUE = -50.0
EIGEN_FLOOR = 1e-250


class KNStatus(str, enum.Enum):
    CONVERGED = "Converged"
    DIVERGENT_UNSTABLE = "DivergentUnstable"
    MAX_ITER = "MaxIter"


@dataclass(frozen=True)
class HermitianScaling:
    H: np.ndarray = field(repr=False)

    def __post_init__(self):
        h = np.asarray(self.H, dtype=complex)
        if not np.allclose(h, h.conj().T, atol=1e-12 * max(1.0, np.abs(h).max())):
            raise ValueError("scaling is not Hermitian")
        evals = np.linalg.eigvalsh(h)
        if evals.min() <= 0:
            raise ValueError("scaling is not positive definite")
        if abs(float(np.sum(np.log(evals)))) > 1e-10:
            raise ValueError("scaling does not have determinant 1")
        object.__setattr__(self, "H", h)

    @classmethod
    def identity(cls, n: int) -> HermitianScaling:
        return cls(np.eye(n, dtype=complex))

    @classmethod
    def normalized(cls, h: np.ndarray) -> HermitianScaling:
        h = np.asarray(h, dtype=complex)
        h = (h + h.conj().T) / 2
        evals = np.linalg.eigvalsh(h)
        return cls(h * math.exp(-float(np.mean(np.log(evals)))))

    def sqrt(self) -> np.ndarray:
        evals, evecs = np.linalg.eigh(self.H)
        return (evecs * np.sqrt(evals)) @ evecs.conj().T


@dataclass(frozen=True)
class KNResult:
    scaling: HermitianScaling
    value: float
    residual: float
    status: KNStatus
    iterations: int = 0
    history: tuple[float, ...] = field(default=(), repr=False)


def _float_vectors(vectors: Sequence[Sequence]) -> np.ndarray:
    return np.array([[complex(x) if isinstance(x, complex) else float(x) for x in v] for v in vectors], dtype=complex)


def _weights(config: Configuration) -> tuple[np.ndarray, np.ndarray]:
    u = _float_vectors(config.vectors)
    u = u / np.linalg.norm(u, axis=1, keepdims=True)
    w = np.array([float(m / config.degree) for m in config.multiplicities])
    return u, w


def _value(u: np.ndarray, w: np.ndarray, h: np.ndarray) -> float:
    q = np.einsum("ij,jk,ik->i", u.conj(), h, u).real
    return float(0.5 * np.dot(w, np.log(q)))


def kn_value(config: Configuration, scaling: HermitianScaling | np.ndarray) -> float:
    h = scaling.H if isinstance(scaling, HermitianScaling) else np.asarray(scaling, dtype=complex)
    u, w = _weights(config)
    return _value(u, w, h)


def _residual(u: np.ndarray, w: np.ndarray, h: np.ndarray) -> float:
    evals, evecs = np.linalg.eigh(h)
    root = (evecs * np.sqrt(evals)) @ evecs.conj().T
    gu = u @ root.T
    q = np.sum(np.abs(gu) ** 2, axis=1)
    n1 = u.shape[1]
    m = n1 * np.einsum("i,ij,ik->jk", w / q, gu, gu.conj()) - np.eye(n1)
    return float(np.linalg.norm(m))


def _tyler_step(u: np.ndarray, w: np.ndarray, h: np.ndarray) -> np.ndarray:
    q = np.einsum("ij,jk,ik->i", u.conj(), h, u).real
    scatter = np.einsum("i,ij,ik->jk", w / q, u, u.conj())
    new = np.linalg.inv(scatter)
    new = (new + new.conj().T) / 2
    evals = np.linalg.eigvalsh(new)
    return new * math.exp(-float(np.mean(np.log(evals))))


def _geodesic_midpoint(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    evals, evecs = np.linalg.eigh(a)
    ra = (evecs * np.sqrt(evals)) @ evecs.conj().T
    ira = (evecs / np.sqrt(evals)) @ evecs.conj().T
    inner = ira @ b @ ira
    ev, vec = np.linalg.eigh((inner + inner.conj().T) / 2)
    mid = ra @ ((vec * np.sqrt(ev)) @ vec.conj().T) @ ra
    return (mid + mid.conj().T) / 2


def minimize_vectors(u: np.ndarray, w: np.ndarray, tol: float = 1e-10, max_iter: int = 20000) -> KNResult:
    """Kempf-Ness minimization for unit vectors ``u`` (rows) with weights ``w`` summing to 1."""
    n1 = u.shape[1]
    h = np.eye(n1, dtype=complex)
    if np.linalg.matrix_rank(u, tol=1e-12) < n1:
        return KNResult(HermitianScaling(h), -math.inf, math.inf, KNStatus.DIVERGENT_UNSTABLE)
    value = _value(u, w, h)
    history = [value]
    for it in range(max_iter):
        res = _residual(u, w, h)
        if res < tol:
            return KNResult(HermitianScaling.normalized(h), value, res, KNStatus.CONVERGED, it, tuple(history))
        new = _tyler_step(u, w, h)
        new_value = _value(u, w, new)
        halvings = 0
        while new_value > value + 1e-12 and halvings < 30:
            new = _geodesic_midpoint(h, new)
            new_value = _value(u, w, new)
            halvings += 1
        h, value = new, new_value
        history.append(value)
        if value < DIVERGENCE_VALUE or np.linalg.eigvalsh(h).min() < EIGEN_FLOOR or not np.isfinite(value):
            return KNResult(HermitianScaling.normalized(h), value, math.inf, KNStatus.DIVERGENT_UNSTABLE, it + 1, tuple(history))
    res = _residual(u, w, h)
    status = KNStatus.CONVERGED if res < tol else KNStatus.MAX_ITER
    return KNResult(HermitianScaling.normalized(h), value, res, status, max_iter, tuple(history))


def kn_minimize(config: Configuration, tol: float = 1e-10, max_iter: int = 20000) -> KNResult:
    u, w = _weights(config)
    return minimize_vectors(u, w, tol, max_iter)


def gap_slack(result: KNResult) -> float:
    """Heuristic bound on value - infimum from the moment-map residual.

    Geodesic convexity gives value - inf <= |grad| * distance to the minimizer;
    the distance is guessed as 1 + |log H|.
    """
    if not math.isfinite(result.residual):
        return math.inf
    evals = np.linalg.eigvalsh(result.scaling.H)
    diameter = 1.0 + float(np.linalg.norm(np.log(evals)))
    return 0.5 * result.residual * diameter


# -- exact reduction along tight subspaces ---------------------------------------


@dataclass
class ArchMinimum:
    """Infimum of sum_i m_i log|g v_i| over g in SL, with diagnostics."""

    log_sum: float
    slack: float
    leaves: list[KNResult]

    @property
    def converged(self) -> bool:
        return all(r.status is KNStatus.CONVERGED for r in self.leaves)


def _gram_sqrt(gram: Matrix) -> np.ndarray:
    g = np.array([[float(x) for x in row] for row in gram])
    evals, evecs = np.linalg.eigh(g)
    return (evecs * np.sqrt(evals)) @ evecs.T


def _arch_infimum(config: Configuration, gram: Matrix, tol: float, max_iter: int) -> ArchMinimum:
    # log-norms are measured with the positive-definite rational Gram matrix
    if config.dim == 1:
        total = sum(float(m) * 0.5 * math.log(v[0] * v[0] * gram[0][0]) for v, m in config.points())
        return ArchMinimum(total, 0.0, [])
    w = find_tight_subspace(config)
    if w is None:
        root = _gram_sqrt(gram)
        u = _float_vectors(config.vectors) @ root.T
        norms = np.linalg.norm(u, axis=1)
        weights = np.array([float(m / config.degree) for m in config.multiplicities])
        res = minimize_vectors(u / norms[:, None], weights, tol, max_iter)
        total = float(np.dot([float(m) for m in config.multiplicities], np.log(norms))) + float(config.degree) * res.value
        return ArchMinimum(total, float(config.degree) * gap_slack(res), [res])

    basis = [list(r) for r in w.basis]
    k = len(basis)
    gram_w = [[sum(basis[a][i] * gram[i][j] * basis[b][j] for i in range(config.dim) for j in range(config.dim)) for b in range(k)] for a in range(k)]
    inner = Configuration(
        k - 1,
        tuple(solve_in_basis(config.vectors[i], basis) for i in w.members),
        tuple(config.multiplicities[i] for i in w.members),
    )
    # G-orthogonal complement of W and the projection onto it
    bg = [matvec([list(r) for r in zip(*gram)], b) for b in basis]  # rows b^T G
    comp = nullspace(bg)
    inv_gw = inverse(gram_w)
    pts = []
    for i, (v, m) in enumerate(config.points()):
        if i in w.members:
            continue
        coeff = matvec(inv_gw, matvec(bg, v))
        proj = tuple(v[j] - sum(coeff[a] * basis[a][j] for a in range(k)) for j in range(config.dim))
        pts.append((solve_in_basis(proj, comp), m))
    # projections may coincide projectively; merge on keys and keep the scale factors
    scale = 0.0
    merged: dict = {}
    for v, m in pts:
        lead = next(x for x in v if x != 0)
        scale += float(m) * math.log(abs(lead))
        key = projective_key(v)
        merged[key] = merged.get(key, Fraction(0)) + m
    outer = Configuration(config.dim - k - 1, tuple(merged), tuple(merged.values()))
    gram_c = [[sum(comp[a][i] * gram[i][j] * comp[b][j] for i in range(config.dim) for j in range(config.dim)) for b in range(len(comp))] for a in range(len(comp))]
    a = _arch_infimum(inner, gram_w, tol, max_iter)
    b = _arch_infimum(outer, gram_c, tol, max_iter)
    return ArchMinimum(a.log_sum + b.log_sum + scale, a.slack + b.slack, a.leaves + b.leaves)


def arch_infimum(config: Configuration, tol: float = 1e-10, max_iter: int = 20000) -> tuple[float, float, ArchMinimum]:
    """(inf of kn_value, slack, details) for a semistable configuration.

    Strictly semistable cycles have no minimizer in their orbit; the infimum
    is that of the polystable degeneration obtained by repeatedly splitting
    off a tight subspace W and projecting the remaining vectors onto W's
    orthogonal complement, where it is the sum of the pieces' infima.
    """
    n1 = config.dim
    identity = [[Fraction(int(i == j)) for j in range(n1)] for i in range(n1)]
    result = _arch_infimum(config, identity, tol, max_iter)
    d = float(config.degree)
    offset = sum(float(m) * 0.5 * math.log(sum(x * x for x in v)) for v, m in config.points())
    return (result.log_sum - offset) / d, result.slack / d, result


def section_constant(config: Configuration, decomposition: BasisDecomposition) -> float:
    """-(1/d) sum_t c_t log|det B_t| with unit-normalized columns."""
    total = 0.0
    for coef, basis in decomposition.terms:
        cols = [decomposition.dictionary[i] for i in basis]
        m = [list(r) for r in zip(*cols)]
        log_det = math.log(abs(det(m)))
        log_norms = sum(0.5 * math.log(sum(x * x for x in c)) for c in cols)
        total += float(coef) * (log_det - log_norms)
    return -total / float(config.degree)


def arch_local_height(
    config: Configuration,
    decomposition: BasisDecomposition | None = None,
    tol: float = 1e-10,
    max_iter: int = 20000,
) -> LocalHeightInterval:
    """Archimedean term as an interval [value - slack, value].

    The lower end is clipped at 0: with the decomposition section, Hadamard's
    inequality applied to each basis of the decomposition proves the term is
    nonnegative.
    """
    verdict = check_stability(config)
    if not verdict.semistable:
        raise UnstableError(verdict.witness)
    if decomposition is None:
        decomposition = decompose(config)
    inf_value, slack, details = arch_infimum(config, tol, max_iter)
    value = section_constant(config, decomposition) + inf_value
    if abs(value) < 1e-12:
        value = 0.0
    upper = value
    lower = max(value - slack, 0.0) if value >= 0 else value - slack
    note = "converged" if details.converged else "max-iter"
    return LocalHeightInterval(ARCHIMEDEAN, lower, upper, Certificate.KEMPF_NESS, note=note)
