import itertools

import numpy as np
import pytest

from conftest import crandn
from sdgf.errors import BudgetExceeded
from sdgf.frames import (
    FrameMatrix,
    build_frame_matrix,
    find_dependent_subset,
    is_dependent,
    numerical_rank,
    spark_exhaustive,
    witness_csv,
)
from sdgf.gabor import Window, gabor_atom, make_lattice
from sdgf.zauner import star_window, symmetry_orbits


def brute_spark(F, tol=1e-10):
    """Independent oracle: smallest k with a rank-deficient k-subset (via matrix_rank)."""
    P, L = F.shape
    for k in range(1, min(P, L + 1) + 1):
        for S in itertools.combinations(range(P), k):
            if np.linalg.matrix_rank(F[list(S)], tol=tol * np.linalg.norm(F[list(S)], 2)) < k:
                return k
    return L + 1


def test_build_frame_matrix_shape_and_rows(rng):
    lat = make_lattice(3, 1, 1)
    g = Window.from_values(crandn(rng, 3))
    f = build_frame_matrix(g, lat)
    assert f.vectors.shape == (9, 3)
    np.testing.assert_allclose(np.linalg.norm(f.vectors, axis=1), 1, atol=1e-12)
    lat = make_lattice(15, 3, 1)
    f = build_frame_matrix(g := Window.from_values(crandn(rng, 15)), lat)
    np.testing.assert_array_equal(f.vectors[2 * lat.N + 4], gabor_atom(g, lat, 4, 2))


def test_star_frame_spans_L3():
    f = build_frame_matrix(star_window(3).as_window(), make_lattice(3, 1, 1))
    assert np.linalg.matrix_rank(f.vectors) == 3


@pytest.mark.parametrize(
    "rows,rank",
    [(np.eye(3), 3), (np.array([[1.0, 0], [2.0, 0]]), 1), (np.zeros((3, 3)), 0)],
)
def test_numerical_rank(rows, rank):
    assert numerical_rank(rows) == rank


def test_spark_examples():
    r = spark_exhaustive(FrameMatrix(np.array([[1.0, 0], [0, 1], [1, 1]])))
    assert r.spark == 3 and r.exact
    r = spark_exhaustive(FrameMatrix(np.array([[1.0, 0], [2, 0], [0, 1]])))
    assert r.spark == 2 and r.witness == (0, 1)


def test_spark_matches_oracle(rng):
    for trial in range(5):
        F = crandn(rng, 7, 3)
        F[4] = 2 * F[1] - F[6] if trial % 2 else F[4]
        r = spark_exhaustive(FrameMatrix(F))
        assert r.spark == brute_spark(F)
        assert r.spark <= 4


def test_spark_star_L3_deficient():
    for k in (0, 1):
        f = build_frame_matrix(star_window(3, eigenvalue_index=k).as_window(), make_lattice(3, 1, 1))
        r = spark_exhaustive(f)
        assert r.spark <= 3
        assert r.spark == brute_spark(f.vectors)
        assert is_dependent(f.vectors[list(r.witness)])


def test_spark_random_window_L3_full(rng):
    f = build_frame_matrix(Window.from_values(crandn(rng, 3)), make_lattice(3, 1, 1))
    assert spark_exhaustive(f).spark == 4


def test_spark_monotone_scan():
    # a dependent pair and a dependent triple: the pair must be reported
    F = np.array([[1.0, 0, 0], [0, 1, 0], [1, 1, 0], [0, 0, 1], [0, 0, 2]])
    r = spark_exhaustive(FrameMatrix(F))
    assert r.spark == 2 and r.witness == (3, 4)


def test_spark_budget():
    with pytest.raises(BudgetExceeded):
        spark_exhaustive(FrameMatrix(np.ones((60, 15))), max_subsets=1000)


def test_randomized_finds_duplicate(rng):
    F = crandn(rng, 6, 4)
    F[5] = F[2]
    r = find_dependent_subset(FrameMatrix(F), 2, trials=500, seed=1)
    assert r.witness == (2, 5)
    assert numerical_rank(F[list(r.witness)]) < 2


def test_randomized_generic_frame_none(rng):
    F = crandn(rng, 30, 6)
    r = find_dependent_subset(FrameMatrix(F), 6, trials=1000, seed=2)
    assert r.witness is None and r.spark is None


def test_uniform_sampling_misses_star_L15():
    """Uniform subsets essentially never hit the structured dependencies."""
    lat = make_lattice(15, 1, 1)
    f = build_frame_matrix(star_window(15).as_window(), lat)
    assert find_dependent_subset(f, 15, trials=200, seed=0).witness is None


@pytest.mark.parametrize("L,k", [(15, 0), (15, 1), (15, 2), (21, 0), (33, 1)])
def test_orbit_certificate(L, k):
    lat = make_lattice(L, 1, 1)
    f = build_frame_matrix(star_window(L, eigenvalue_index=k).as_window(), lat)
    r = find_dependent_subset(f, L, trials=50, seed=0, groups=symmetry_orbits(lat))
    assert r.witness is not None and len(r.witness) <= L
    assert numerical_rank(f.vectors[list(r.witness)]) < len(r.witness)
    lo, hi = r.singular_gap
    assert lo / hi < 1e-12


def test_orbit_search_random_window_none(rng):
    lat = make_lattice(15, 1, 1)
    f = build_frame_matrix(Window.from_values(crandn(rng, 15)), lat)
    assert find_dependent_subset(f, 15, trials=200, groups=symmetry_orbits(lat)).witness is None


def test_witness_csv():
    lat = make_lattice(15, 1, 1)
    text = witness_csv((0, 16, 31), lat)
    assert text.splitlines() == ["index,m,n", "0,0,0", "16,1,1", "31,2,1"]
