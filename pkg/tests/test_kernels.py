"""The numba kernels and their numpy twins must agree exactly."""

import numpy as np
import pytest
from hypothesis import assume, example, given
from hypothesis import strategies as st

from mulab import _accel
from mulab.kernels import p1_images, quad_values, rank_mod_p, short_vectors, theta_counts
from mulab.modsym import merel_matrices, p1_list


@pytest.fixture
def both_backends():
    saved = _accel.USE_NUMBA

    def run(fn):
        _accel.USE_NUMBA = True
        a = fn()
        _accel.USE_NUMBA = False
        b = fn()
        _accel.USE_NUMBA = saved
        return a, b

    yield run
    _accel.USE_NUMBA = saved


@st.composite
def pos_def_grams(draw):
    n = draw(st.integers(1, 4))
    B = np.array([[draw(st.integers(-3, 3)) for _ in range(n)] for _ in range(n)], dtype=np.int64)
    B += 4 * np.eye(n, dtype=np.int64)
    if round(abs(np.linalg.det(B))) == 0:
        B = 4 * np.eye(n, dtype=np.int64)
    return 2 * (B.T @ B)


@given(pos_def_grams(), st.integers(0, 60))
def test_short_vectors_backends_agree(G, bound):
    saved = _accel.USE_NUMBA
    try:
        _accel.USE_NUMBA = True
        a = short_vectors(G, bound)
        _accel.USE_NUMBA = False
        b = short_vectors(G, bound)
    finally:
        _accel.USE_NUMBA = saved
    assert np.array_equal(a, b)
    assert np.all(quad_values(G, a) <= bound)


@given(pos_def_grams(), st.integers(0, 30))
@example(np.array([[36, -34, -14, -10], [-34, 50, 22, 30], [-14, 22, 50, 22], [-10, 30, 22, 28]]), 20)
def test_short_vectors_complete(G, bound):
    # brute force over a box that certainly contains every solution
    n = G.shape[0]
    X = short_vectors(G, bound)
    # |x_i| <= sqrt(bound * (Q^-1)_ii) for Q = G/2
    r = np.floor(np.sqrt(bound * np.diag(np.linalg.inv(G / 2)))).astype(int) + 1
    assume(np.prod(2 * r + 1) <= 2_000_000)
    grid = np.array(np.meshgrid(*[np.arange(-k, k + 1) for k in r], indexing="ij")).reshape(n, -1).T
    want = grid[quad_values(G, grid) <= bound]
    assert len(want) == len(X)


def test_theta_series_of_a2():
    # hexagonal lattice: 6 vectors of each norm 1, 3, 4
    G = np.array([[2, 1], [1, 2]])
    assert list(theta_counts(G, 4)) == [1, 6, 0, 6, 6]


@given(st.integers(1, 8), st.integers(1, 8), st.sampled_from([2, 3, 5, 101, 10007]),
       st.integers(0, 1000))
def test_rank_mod_p_backends_agree(m, n, p, seed):
    A = np.random.default_rng(seed).integers(-5, 5, size=(m, n))
    saved = _accel.USE_NUMBA
    try:
        _accel.USE_NUMBA = True
        a = rank_mod_p(A, p)
        _accel.USE_NUMBA = False
        b = rank_mod_p(A, p)
    finally:
        _accel.USE_NUMBA = saved
    assert a == b <= min(m, n)


@pytest.mark.parametrize("N", [11, 35, 210])
def test_p1_images_backends_agree(both_backends, N):
    P = p1_list(N)
    mats = merel_matrices(5)
    a, b = both_backends(lambda: p1_images(P.cs, P.ds, mats, N, P.table))
    assert np.array_equal(a, b)
    assert a.min() >= -1 and a.max() < len(P)
