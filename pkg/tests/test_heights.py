import math
from fractions import Fraction

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from githeight.configuration import Configuration
from githeight.heights import HeightOptions, global_height, subadditivity_check
from githeight.nonarch import ARCHIMEDEAN
from githeight.serialize import dumps, estimate_to_dict
from githeight.stability import Status, UnstableError, check_stability
from conftest import identity
from oracles import arch_infimum_scipy
from test_stability import configs

TRIPLE_HEIGHT = 0.5 * math.log(2) - 0.25 * math.log(3)


def test_base_case():
    for n in (1, 2, 3):
        h = global_height(identity(n))
        assert -1e-6 <= h.lower <= h.upper <= 1e-6


def test_unstable_carries_witness():
    with pytest.raises(UnstableError) as info:
        global_height(Configuration.from_columns([(1, 0), (0, 1)], [2, 1]))
    assert info.value.witness.dim == 1 and info.value.witness.mass == 2


def test_stable_triple(triple):
    h = global_height(triple)
    # no bad primes: all 2 x 2 minors are +-1
    assert [p.place for p in h.per_place] == [ARCHIMEDEAN]
    assert h.upper == pytest.approx(TRIPLE_HEIGHT, abs=1e-9)
    assert h.upper == pytest.approx(math.log(2) / 6 + arch_infimum_scipy(triple.vectors, triple.multiplicities), abs=1e-9)
    assert h.margin > 0 and h.lower >= h.margin


def test_four_points_in_p1(four_p1):
    h = global_height(four_p1)
    assert h.lower == pytest.approx(math.log(2) / 4, abs=1e-9)


def test_subadditivity_examples(triple):
    rep = subadditivity_check(identity(1), identity(1))
    assert rep["pass"] and rep["h12"] == [0.0, 0.0]
    rep = subadditivity_check(identity(1), triple)
    assert rep["pass"] and rep["pointwise_additivity"]


def test_determinism_and_sum(triple):
    a = dumps(estimate_to_dict(global_height(triple)))
    b = dumps(estimate_to_dict(global_height(triple)))
    assert a == b
    h = global_height(Configuration.from_columns([(1, 0, 0), (0, 1, 0), (0, 0, 1), (1, 1, 1), (1, 2, -1)]))
    assert h.lower == math.fsum(p.lower for p in h.per_place)
    assert h.upper == math.fsum(p.upper for p in h.per_place)


@settings(max_examples=15, deadline=None)
@given(configs(max_n=2, max_points=5), st.data())
def test_scale_invariance_and_section_independence(c, data):
    if not check_stability(c).semistable:
        return
    h = global_height(c)
    scales = data.draw(st.lists(st.sampled_from([Fraction(2), Fraction(-1, 3), Fraction(5, 4)]), min_size=len(c), max_size=len(c)))
    scaled = Configuration(c.ambient, tuple(tuple(x * s for x in v) for v, s in zip(c.vectors, scales)), c.multiplicities)
    assert global_height(scaled) == h
    plain = global_height(c, HeightOptions(section="decomposition"))
    assert plain.upper == pytest.approx(h.upper, abs=1e-8)
    assert h.lower >= -1e-6
