import itertools
from fractions import Fraction

import pytest
from hypothesis import given
from hypothesis import strategies as st

from githeight.configuration import Configuration
from githeight.linalg import det
from githeight.stability import (
    InstanceTooLarge,
    MAX_DISTINCT_VECTORS,
    Status,
    SubspaceWitness,
    candidate_subspaces,
    check_stability,
    check_stability_mod_p,
    mass_in_subspace,
    verify_verdict,
)
from conftest import identity
from oracles import brute_force_status

MULTS = [Fraction(1, 2), Fraction(1), Fraction(3, 2), Fraction(2)]


@st.composite
def configs(draw, max_n=3, max_points=6):
    n = draw(st.integers(1, max_n))
    ell = draw(st.integers(1, max_points))
    pts = []
    for _ in range(ell):
        v = draw(st.lists(st.integers(-2, 2), min_size=n + 1, max_size=n + 1).filter(any))
        pts.append((tuple(v), draw(st.sampled_from(MULTS))))
    return Configuration.from_points(n, pts)


def test_mass_examples(triple):
    assert mass_in_subspace(identity(2), [(1, 0, 0), (0, 1, 0)]) == 2
    assert mass_in_subspace(triple, [(1, 0)]) == 1
    c = Configuration.from_columns([(1, 0), (0, 1)], [Fraction(3, 2), Fraction(1, 2)])
    assert mass_in_subspace(c, SubspaceWitness(((1, 0),), 1, Fraction(0))) == Fraction(3, 2)


def test_candidate_subspaces_examples():
    assert len(candidate_subspaces(identity(1))) == 2
    generic = Configuration.from_columns([(1, 0, 0), (0, 1, 0), (1, 1, 1)])
    subs = candidate_subspaces(generic)
    assert len(subs) == 6
    assert sorted(w.dim for w in subs) == [1, 1, 1, 2, 2, 2]
    single = Configuration.from_columns([(1, 2, 3)])
    assert [w.dim for w in candidate_subspaces(single)] == [1]


def test_verdict_examples(triple):
    for n in (1, 2, 3):
        v = check_stability(identity(n))
        assert v.status is Status.STRICTLY_SEMISTABLE and verify_verdict(identity(n), v)
    assert check_stability(triple).status is Status.STABLE
    doubled = Configuration.from_columns([(1, 0), (0, 1)], [2, 1])
    v = check_stability(doubled)
    assert v.status is Status.UNSTABLE
    assert v.witness.basis == ((1, 0),) and v.witness.mass == 2
    assert verify_verdict(doubled, v)


def test_rank_deficient_is_unstable():
    c = Configuration.from_columns([(1, 0, 0), (0, 1, 0)])
    v = check_stability(c)
    assert v.status is Status.UNSTABLE and v.witness.dim == 2 and verify_verdict(c, v)


def test_instance_limit():
    pts = [((1, k), 1) for k in range(MAX_DISTINCT_VECTORS + 1)]
    with pytest.raises(InstanceTooLarge):
        candidate_subspaces(Configuration.from_points(1, pts))


def test_exhaustive_p1_against_oracle():
    lines = [(1, 0), (0, 1), (1, 1), (1, -1)]
    for k in range(1, 5):
        for subset in itertools.combinations(lines, k):
            for ms in itertools.product(MULTS, repeat=k):
                c = Configuration.from_columns(list(subset), list(ms))
                assert check_stability(c).status.value == brute_force_status(c.vectors, c.multiplicities)


@given(configs())
def test_matches_oracle(c):
    v = check_stability(c)
    assert v.status.value == brute_force_status(c.vectors, c.multiplicities)
    assert verify_verdict(c, v)


@given(configs(), st.randoms(use_true_random=False), st.data())
def test_invariances(c, rnd, data):
    status = check_stability(c).status
    pts = c.points()
    rnd.shuffle(pts)
    scales = data.draw(st.lists(st.fractions(min_value=-5, max_value=5, max_denominator=5).filter(bool), min_size=len(pts), max_size=len(pts)))
    rescaled = Configuration.from_points(c.ambient, [(tuple(x * s for x in v), m) for (v, m), s in zip(pts, scales)])
    assert check_stability(rescaled).status is status
    # elementary SL moves
    n1 = c.dim
    g = [[Fraction(int(i == j)) for j in range(n1)] for i in range(n1)]
    i, j = data.draw(st.sampled_from([(a, b) for a in range(n1) for b in range(n1) if a != b]))
    g[i][j] = Fraction(data.draw(st.integers(-3, 3)), data.draw(st.integers(1, 3)))
    assert det(g) == 1
    assert check_stability(c.transformed(g)).status is status
    assert check_stability(c.scaled(Fraction(3, 7))).status is status


@given(configs(max_n=2, max_points=4))
def test_merging_equal_points_keeps_verdict(c):
    v, m = c.points()[0]
    split = Configuration.from_points(c.ambient, [(v, m / 2), (tuple(2 * x for x in v), m / 2)] + c.points()[1:])
    assert split == c
    assert check_stability(split).status is check_stability(c).status


def test_mod_p_examples():
    assert check_stability_mod_p([(1, 0), (0, 1)], [1, 1], 5) is Status.STRICTLY_SEMISTABLE
    assert check_stability_mod_p([(1, 0), (1, 2)], [1, 1], 2) is Status.UNSTABLE
    assert check_stability_mod_p([(1, 0), (0, 1), (1, 1)], [1, 1, 1], 7) is Status.STABLE
