from fractions import Fraction

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from githeight.linalg import (
    DegenerateError,
    as_fraction,
    complex_qr_orthogonalize,
    det,
    from_columns,
    inverse,
    matmul,
    nullspace,
    rank,
    rank_mod_p,
    rref,
    solve_in_basis,
    span_membership,
)
from oracles import minor_rank

small = st.integers(-2, 2)


def matrices(max_rows=4, max_cols=4):
    return st.integers(1, max_rows).flatmap(
        lambda r: st.integers(1, max_cols).flatmap(lambda c: st.lists(st.lists(small, min_size=c, max_size=c), min_size=r, max_size=r))
    )


square3 = st.lists(st.lists(st.fractions(min_value=-3, max_value=3, max_denominator=4), min_size=3, max_size=3), min_size=3, max_size=3)


def test_rank_examples():
    assert rank([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 3
    assert rank([[0, 0], [0, 0]]) == 0
    assert rank(from_columns([(1, 0), (2, 0), (0, 1)])) == 2


def test_det_examples():
    assert det([[1, 0, 0], [0, 1, 0], [0, 0, 1]]) == 1
    assert det([[1, 1], [0, 2]]) == 2
    assert det([[1, 1], [1, 1]]) == 0
    with pytest.raises(ValueError):
        det([[1, 2, 3], [4, 5, 6]])


def test_span_membership_examples():
    assert span_membership((1, 1), [(1, 0), (0, 1)])
    assert not span_membership((0, 0, 1), [(1, 0, 0), (0, 1, 0)])
    assert span_membership((2, 4), [(1, 2)])


def test_floats_are_rejected():
    with pytest.raises(TypeError):
        as_fraction(0.5)


@given(matrices())
def test_rank_matches_minor_enumeration(m):
    assert rank(m) == minor_rank(m)


@given(square3, square3)
def test_det_multiplicative(a, b):
    assert det(matmul(a, b)) == det(a) * det(b)


@given(square3)
def test_inverse_and_rref(a):
    if det(a) == 0:
        with pytest.raises(ValueError):
            inverse(a)
        return
    prod = matmul(a, inverse(a))
    assert prod == [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    rows, pivots = rref(a)
    assert pivots == [0, 1, 2]


@given(matrices(3, 4))
def test_nullspace_dimension(m):
    ns = nullspace(m)
    assert len(ns) == len(m[0]) - rank(m)
    for v in ns:
        assert all(sum(Fraction(r[j]) * v[j] for j in range(len(v))) == 0 for r in m)


def test_solve_in_basis():
    assert solve_in_basis((3, 5), [(1, 1), (0, 1)]) == (3, 2)


def test_rank_mod_p():
    assert rank_mod_p([[1, 0], [1, 2]], 2) == 1
    assert rank_mod_p([[1, 0], [1, 2]], 3) == 2


def test_qr_examples():
    q = complex_qr_orthogonalize(np.eye(3))
    assert np.allclose(q, np.eye(3))
    q = complex_qr_orthogonalize(np.array([[1, 1], [0, 1]], dtype=complex))
    assert np.allclose(np.abs(q), np.eye(2))
    rng = np.random.default_rng(1)
    u, _ = np.linalg.qr(rng.standard_normal((3, 3)) + 1j * rng.standard_normal((3, 3)))
    q = complex_qr_orthogonalize(u)
    phases = np.diag(u.conj().T @ q)
    assert np.allclose(np.abs(phases), 1) and np.allclose(q, u * phases)
    with pytest.raises(DegenerateError):
        complex_qr_orthogonalize(np.array([[1, 2], [2, 4]], dtype=complex))


@given(st.lists(st.complex_numbers(max_magnitude=5, allow_nan=False, allow_infinity=False), min_size=9, max_size=9))
def test_qr_orthonormal(entries):
    m = np.array(entries).reshape(3, 3)
    try:
        q = complex_qr_orthogonalize(m)
    except DegenerateError:
        return
    assert np.max(np.abs(q.conj().T @ q - np.eye(3))) < 1e-10
