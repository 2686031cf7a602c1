import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from pseudolie import matcore as mc
from pseudolie.matcore import RankOneNilpotent

from .conftest import dims, seeds


def test_as_cmatrix_rejects_non_square():
    with pytest.raises(mc.DimensionError):
        mc.as_cmatrix(np.zeros((2, 3)))
    with pytest.raises(mc.DimensionError):
        mc.as_cmatrix(np.zeros(3))


def test_as_cmatrix_rejects_nonfinite():
    with pytest.raises(ValueError):
        mc.as_cmatrix([[np.nan, 0], [0, 1]])


def test_unit_matrix_is_one_based():
    E = mc.unit_matrix(3, 1, 2)
    assert E[0, 1] == 1 and np.count_nonzero(E) == 1


def test_commutator_of_units():
    E12, E21 = mc.unit_matrix(2, 1, 2), mc.unit_matrix(2, 2, 1)
    np.testing.assert_array_equal(mc.commutator(E12, E21), np.diag([1, -1]))


@given(seeds, dims)
def test_commutator_is_traceless_and_antisymmetric(seed, n):
    rng = np.random.default_rng(seed)
    A, B = mc.random_matrix(n, rng), mc.random_matrix(n, rng)
    C = mc.commutator(A, B)
    assert abs(np.trace(C)) < 1e-12 * (1 + np.linalg.norm(A) * np.linalg.norm(B))
    np.testing.assert_allclose(C, -mc.commutator(B, A))


@given(seeds, dims, st.complex_numbers(max_magnitude=3, allow_nan=False))
def test_smin_matches_svd(seed, n, z):
    A = mc.random_matrix(n, seed)
    ref = np.linalg.svd(A - z * np.eye(n), compute_uv=False)[-1]
    assert mc.smin_shift(A, z) == pytest.approx(ref, abs=1e-12)


@given(seeds, dims)
def test_smin_batch_matches_pointwise(seed, n):
    rng = np.random.default_rng(seed)
    A = mc.random_matrix(n, rng)
    zs = rng.standard_normal(7) + 1j * rng.standard_normal(7)
    batch = mc.smin_batch(A, zs, chunk=3)
    np.testing.assert_allclose(batch, [mc.smin_shift(A, z) for z in zs], atol=1e-12)


@given(seeds, dims, st.complex_numbers(max_magnitude=3, allow_nan=False),
       st.complex_numbers(max_magnitude=3, allow_nan=False))
def test_smin_is_one_lipschitz(seed, n, z, w):
    A = mc.random_matrix(n, seed)
    assert abs(mc.smin_shift(A, z) - mc.smin_shift(A, w)) <= abs(z - w) + 1e-12


@given(seeds, dims)
def test_random_unitary_is_unitary(seed, n):
    U = mc.random_unitary(n, seed)
    np.testing.assert_allclose(U.conj().T @ U, np.eye(n), atol=1e-12)


@pytest.mark.parametrize("family", mc.FAMILIES)
def test_families_have_expected_structure(family):
    for seed in range(10):
        A = mc.random_matrix(5, seed, family)
        if family in ("normal", "two-eig-normal"):
            assert mc.is_normal(A)
        if family == "two-eig-normal":
            assert mc.distinct_eigenvalue_count(mc.eigenvalues(A)) == 2
        if family == "nilpotent":
            np.testing.assert_allclose(np.linalg.matrix_power(A, 5), 0, atol=1e-9)
        if family == "triangular":
            np.testing.assert_array_equal(np.tril(A, -1), 0)


def test_unknown_family():
    with pytest.raises(ValueError):
        mc.random_matrix(3, 0, "hermitian-ish")


def test_generators_are_reproducible():
    np.testing.assert_array_equal(mc.random_matrix(4, 9, "normal"), mc.random_matrix(4, 9, "normal"))


@given(seeds, dims)
def test_rank_one_nilpotent_properties(seed, n):
    X = mc.random_rank_one_nilpotent(n, seed)
    M = X.matrix
    np.testing.assert_allclose(M @ M, 0, atol=1e-12 * (1 + X.weight))
    s = np.linalg.svd(M, compute_uv=False)
    assert s[0] == pytest.approx(X.weight, rel=1e-12)
    assert np.all(s[1:] < 1e-12 * (1 + X.weight))


def test_rank_one_nilpotent_requires_orthogonality():
    with pytest.raises(ValueError):
        RankOneNilpotent([1, 0], [1, 1])
    with pytest.raises(ValueError):
        RankOneNilpotent([0, 0], [1, 0])


def test_rank_one_round_trip_and_padding():
    X = mc.random_rank_one_nilpotent(3, 1)
    Y = RankOneNilpotent.from_matrix(X.matrix)
    np.testing.assert_allclose(Y.matrix, X.matrix, atol=1e-12)
    P = X.padded(5).matrix
    np.testing.assert_allclose(P[:3, :3], X.matrix)
    assert np.count_nonzero(P[3:]) == 0 and np.count_nonzero(P[:, 3:]) == 0


def test_conjugated_factors():
    X = mc.random_rank_one_nilpotent(4, 2)
    W = mc.random_unitary(4, 3)
    np.testing.assert_allclose(X.conjugated(W).matrix, W @ X.matrix @ W.conj().T, atol=1e-12)


def test_normality():
    assert mc.is_normal(np.diag([1, 2j, 3]))
    assert not mc.is_normal(mc.unit_matrix(3, 1, 2))
    assert mc.normality_residual(np.eye(3)) == 0


def test_cluster_and_count():
    s = mc.SpectralData.from_values([1, 1 + 1e-13, 2, -1, 2])
    assert mc.distinct_eigenvalue_count(s) == 3
    np.testing.assert_allclose(np.sort(mc.distinct_eigenvalues(s).real), [-1, 1, 2], atol=1e-12)


def test_repeated_eigenvalue_gap():
    assert mc.eigenvalues(np.eye(3)).min_gap == 0


def test_collinear():
    assert mc.eigenvalues_collinear(mc.SpectralData.from_values([0, 1 + 1j, 2 + 2j]))
    assert not mc.eigenvalues_collinear(mc.SpectralData.from_values([0, 1, 1j]))


def test_apply_affine():
    A = np.diag([1.0, 2.0])
    np.testing.assert_allclose(mc.apply_affine(A, 1j, 3), np.diag([3 + 1j, 3 + 2j]))


def test_seed_sequence_normalisation():
    ss = np.random.SeedSequence(5)
    assert mc.seed_sequence(ss) is ss
    assert isinstance(mc.seed_sequence(np.random.default_rng(1)), np.random.SeedSequence)
