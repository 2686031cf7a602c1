import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from pseudolie import matcore as mc
from pseudolie import pseudo
from pseudolie.pseudo import GridSpec, SymmetryKind

from .conftest import eps_values, seeds


def normal_smin(lams, z):
    # s_min(A - z) for normal A is the distance from z to the spectrum
    return float(np.min(np.abs(np.asarray(lams) - z)))


def test_member_is_strict():
    A = np.zeros((2, 2))
    assert pseudo.member(A, 0.5, 1.0)
    assert not pseudo.member(A, 1.0, 1.0)


def test_member_requires_positive_eps():
    with pytest.raises(ValueError):
        pseudo.member(np.eye(2), 0, 0.0)


def test_grid_layout_and_values():
    A = np.diag([1.0, -1.0])
    spec = GridSpec(0j, 2.0, 5)
    sample = pseudo.grid(A, 0.5, spec)
    pts = spec.points()
    assert pts.size == 25
    assert pts[1] - pts[0] == pytest.approx(1.0)  # real part varies fastest
    np.testing.assert_allclose(sample.smin_values, [normal_smin([1, -1], z) for z in pts], atol=1e-12)
    assert list(sample.rows())[12] == (0.0, 0.0, 1.0, False)


def test_grid_independent_of_threads():
    A = mc.random_matrix(4, 3)
    spec = GridSpec(0.5j, 3.0, 41)
    one = pseudo.grid(A, 0.7, spec, threads=1, chunk=100)
    many = pseudo.grid(A, 0.7, spec, threads=4, chunk=100)
    np.testing.assert_array_equal(one.smin_values, many.smin_values)


def test_gridspec_validation():
    with pytest.raises(ValueError):
        GridSpec(0, 1.0, 1)
    with pytest.raises(ValueError):
        GridSpec(0, -1.0, 10)


def test_boundary_ray_on_normal_matrix():
    A = np.diag([2.0, -1.0, 0.5j])
    t = pseudo.boundary_ray(A, 0.5, 0.0).t
    assert t == pytest.approx(2.5, abs=1e-9)
    t = pseudo.boundary_ray(A, 0.5, np.pi).t
    assert t == pytest.approx(1.5, abs=1e-9)


def test_ray_boundaries_report_empty_rays():
    A = np.diag([5.0, 5.0])
    t, empty = pseudo.ray_boundaries(A, 0.5, [0.0, np.pi])
    assert not empty[0] and t[0] == pytest.approx(5.5, abs=1e-9)
    assert empty[1]


def test_tol_below_resolution_is_rejected():
    with pytest.raises(ValueError):
        pseudo.radius(np.eye(2) * 1e3, 0.1, tol=1e-16)


@pytest.mark.parametrize("eps", [0.01, 0.1, 1.0])
def test_radius_of_zero_matrix(eps):
    assert pseudo.radius(np.zeros((3, 3)), eps).value == pytest.approx(eps, abs=1e-9)


@settings(max_examples=10)
@given(seeds, st.integers(3, 5), eps_values)
def test_radius_normal_oracle(seed, n, eps):
    A = mc.random_matrix(n, seed, "normal")
    lams = np.linalg.eigvals(A)
    res = pseudo.radius(A, eps)
    assert res.value == pytest.approx(np.abs(lams).max() + eps, abs=1e-7)
    assert res.certificate_residual < 1e-8
    assert abs(res.argmax) == pytest.approx(res.value, abs=1e-12)


@settings(max_examples=10)
@given(seeds, st.integers(2, 6), eps_values)
def test_radius_rank_one_closed_form(seed, n, eps):
    X = mc.random_rank_one_nilpotent(n, seed)
    res = pseudo.radius(X.matrix, eps)
    assert res.value == pytest.approx(np.sqrt(eps**2 + X.weight * eps), abs=1e-6)


@settings(max_examples=8)
@given(seeds, eps_values, st.floats(0.05, 1.0))
def test_radius_monotone_in_eps(seed, eps, bump):
    A = mc.random_matrix(3, seed)
    assert pseudo.radius(A, eps + bump).value > pseudo.radius(A, eps).value


@settings(max_examples=8)
@given(seeds, eps_values, st.floats(0, 2 * np.pi), st.complex_numbers(max_magnitude=3))
def test_radius_unitary_invariant_and_translation_bound(seed, eps, phi, shift):
    rng = np.random.default_rng(seed)
    A = mc.random_matrix(3, rng)
    U = mc.random_unitary(3, rng)
    r = pseudo.radius(A, eps).value
    assert pseudo.radius(U @ A @ U.conj().T, eps).value == pytest.approx(r, abs=1e-7)
    assert pseudo.radius(np.exp(1j * phi) * A, eps).value == pytest.approx(r, abs=1e-7)
    assert pseudo.radius(A + shift * np.eye(3), eps).value <= r + abs(shift) + 1e-7


@settings(max_examples=8)
@given(seeds, eps_values)
def test_radius_bounds(seed, eps):
    A = mc.random_matrix(4, seed)
    lo, hi = pseudo.spectral_abs_bounds(A, eps)
    r = pseudo.radius(A, eps).value
    assert lo - 1e-9 <= r <= hi + 1e-9


def test_symmetric_on_symmetric_sets():
    assert pseudo.symmetric(np.diag([1.0, -1.0, 0.0]), 0.5, seed=0).symmetric
    assert pseudo.symmetric(mc.unit_matrix(3, 1, 2), 0.3, seed=0).symmetric


def test_symmetric_finds_shifted_disk():
    v = pseudo.symmetric(np.diag([1.0, 0.0]), 0.3, seed=1)
    assert v.kind is SymmetryKind.ASYMMETRIC
    z = v.witness
    assert normal_smin([1, 0], z) < 0.3 - v.margin + 1e-12
    assert normal_smin([1, 0], -z) > 0.3 + v.margin - 1e-12


@settings(max_examples=10)
@given(seeds, st.integers(2, 5), eps_values)
def test_symmetric_never_wrong_on_negation_invariant_spectra(seed, n, eps):
    # U diag(l, -l) U* has a pseudospectrum symmetric about 0
    rng = np.random.default_rng(seed)
    lams = rng.standard_normal(n) + 1j * rng.standard_normal(n)
    U = mc.random_unitary(2 * n, rng)
    A = (U * np.concatenate([lams, -lams])) @ U.conj().T
    assert pseudo.symmetric(A, eps, n_probes=128, seed=rng).symmetric


def test_sampled_set_comparison():
    A = np.diag([1.0, -1.0])
    assert pseudo.sampled_set_equal(A, -A, 0.5, seed=0)
    cmp = pseudo.compare_sampled_sets(A, A + 0.5 * np.eye(2), 0.5, seed=0)
    assert not cmp.equal and cmp.disagreements
    assert cmp.compared + cmp.skipped == 512


def test_dimension_mismatch():
    with pytest.raises(mc.DimensionError):
        pseudo.compare_sampled_sets(np.eye(2), np.eye(3), 1.0)
