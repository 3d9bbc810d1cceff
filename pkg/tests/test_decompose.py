import itertools
from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st
from scipy.optimize import linprog

from githeight.arch import HermitianScaling, kn_minimize
from githeight.configuration import Configuration
from githeight.decompose import (
    NotTightError,
    decompose,
    find_tight_subspace,
    max_basis_multiple,
    quotient_by,
    restrict_to,
    stable_witness_split,
)
from githeight.linalg import rank
from githeight.stability import Status, SubspaceWitness, UnstableError, candidate_subspaces, check_stability, verify_verdict
from conftest import identity
from test_stability import configs


def lp_decomposable(c: Configuration) -> bool:
    """Feasibility of sum_B c_B 1_B = m over all bases, c >= 0."""
    bases = [b for b in itertools.combinations(range(len(c)), c.dim) if rank([c.vectors[i] for i in b]) == c.dim]
    if not bases:
        return False
    a = np.zeros((len(c), len(bases)))
    for j, b in enumerate(bases):
        a[list(b), j] = 1
    res = linprog(np.zeros(len(bases)), A_eq=a, b_eq=[float(m) for m in c.multiplicities], bounds=(0, None), method="highs")
    return res.status == 0


def test_tight_subspace_examples(triple, four_p1):
    w = find_tight_subspace(identity(2))
    assert w.dim == 1 and w.mass == 1
    assert find_tight_subspace(triple) is None
    assert find_tight_subspace(four_p1) is None


def test_restrict_and_quotient():
    c = identity(2)
    w = SubspaceWitness(((1, 0, 0),), 1, Fraction(1))
    inner = restrict_to(c, w)
    assert inner.ambient == 0 and inner.multiplicities == (1,)
    outer = quotient_by(c, w)
    assert outer.ambient == 1 and check_stability(outer).status is Status.STRICTLY_SEMISTABLE
    assert sorted(outer.vectors) == [(0, 1), (1, 0)]
    t = Configuration.from_columns([(1, 0), (0, 1), (1, 1)])
    with pytest.raises(NotTightError):
        restrict_to(t, SubspaceWitness(((1, 1),), 1, Fraction(1)))


def test_max_basis_multiple_examples(triple, four_p1):
    assert max_basis_multiple(triple, [0, 1]) == Fraction(1, 2)
    assert max_basis_multiple(four_p1, [0, 1]) == 1


def test_decompose_examples(triple, four_p1):
    for n in (1, 2, 3):
        dec = decompose(identity(n))
        assert dec.terms == ((1, tuple(range(n + 1))),)
    dec = decompose(triple)
    assert sorted(dec.terms) == [(Fraction(1, 2), (0, 1)), (Fraction(1, 2), (0, 2)), (Fraction(1, 2), (1, 2))]
    dec = decompose(four_p1)
    dec.validate(four_p1)
    assert dec.total_coefficient() == 2


def test_decompose_unstable_raises():
    c = Configuration.from_columns([(1, 0), (0, 1)], [2, 1])
    with pytest.raises(UnstableError) as info:
        decompose(c)
    assert info.value.witness.mass == 2


@given(configs())
def test_decomposition_properties(c):
    verdict = check_stability(c)
    assert lp_decomposable(c) == verdict.semistable
    if not verdict.semistable:
        with pytest.raises(UnstableError) as info:
            decompose(c)
        assert verify_verdict(c, type(verdict)(Status.UNSTABLE, info.value.witness))
        return
    dec = decompose(c)
    dec.validate(c)
    assert dec.total_coefficient() * c.dim == c.degree


@given(configs(max_n=2, max_points=5))
def test_max_basis_multiple_is_optimal(c):
    if check_stability(c).status is not Status.STABLE:
        return
    basis = next(b for b in itertools.combinations(range(len(c)), c.dim) if rank([c.vectors[i] for i in b]) == c.dim)
    t = max_basis_multiple(c, basis)
    assert t > 0
    d, n1 = c.degree, c.dim
    active = t == min(c.multiplicities[i] for i in basis)
    for w in candidate_subspaces(c):
        b = sum(1 for i in w.members if i in basis)
        assert t * (w.dim - b) <= d * w.dim / n1 - w.mass
        active |= b < w.dim and t * (w.dim - b) == d * w.dim / n1 - w.mass
    assert active


def test_witness_split_examples(triple, four_p1):
    witness, rest = stable_witness_split(triple, HermitianScaling.identity(2))
    assert len(witness) == 2 and check_stability(rest).semistable
    assert rest.degree == 3 - Fraction(2, 4)
    kn = kn_minimize(four_p1)
    witness, rest = stable_witness_split(four_p1, kn.scaling)
    assert rest.degree == 4 - Fraction(2, 4) and check_stability(rest).semistable
    with pytest.raises(ValueError):
        stable_witness_split(identity(2), HermitianScaling.identity(3))


def test_witness_split_rational_multiplicities():
    c = Configuration.from_columns([(1, 0), (0, 1), (1, 1)], [Fraction(1, 2)] * 3)
    witness, rest = stable_witness_split(c, kn_minimize(c).scaling)
    removed = [c.multiplicities[i] - rest.multiplicities[i] for i in witness]
    assert removed == [Fraction(1, 2 * 4)] * 2
