import math

import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from conftest import random_rotation, random_subspace, random_symmetric
from spectral_perturb.matcore import (
    InputError,
    SignUndefinedError,
    Subspace,
    align,
    as_symmetric,
    eig_by_magnitude,
    magnitude_order,
    matrix_sign,
    norms,
    principal_angles,
    spectral_norm,
    svd_by_dilation,
    symmetric_dilation,
    two_inf_norm,
)
from spectral_perturb.oracles import jacobi_eigh, jacobi_svd, naive_sum_squares, power_spectral_norm

seeds = st.integers(0, 2**32 - 1)


# -- oracles -----------------------------------------------------------------


def test_jacobi_eigh_reconstructs():
    rng = np.random.default_rng(0)
    a = random_symmetric(rng, 8)
    w, v = jacobi_eigh(a)
    assert np.allclose(v @ np.diag(w) @ v.T, a, atol=1e-12)
    assert np.allclose(v.T @ v, np.eye(8), atol=1e-12)
    assert np.all(np.diff(w) >= 0)


def test_jacobi_svd_reconstructs_tall_and_wide():
    rng = np.random.default_rng(1)
    for shape in [(6, 3), (3, 6), (4, 4)]:
        a = rng.standard_normal(shape)
        u, s, vt = jacobi_svd(a)
        assert np.allclose((u * s) @ vt, a, atol=1e-12)
        assert np.all(np.diff(s) <= 0)


def test_power_and_naive_oracles():
    a = np.array([[3.0, 4.0]])
    assert power_spectral_norm(a) == pytest.approx(5.0, abs=1e-12)
    assert naive_sum_squares(a) == 25.0


# -- eig_by_magnitude --------------------------------------------------------


def test_eig_2x2_analytic():
    dec = eig_by_magnitude([[2.0, 1.0], [1.0, 2.0]])
    assert np.allclose(dec.eigenvalues, [3.0, 1.0])
    s = 1 / math.sqrt(2)
    assert np.allclose(dec.eigenvectors[:, 0], [s, s])
    # largest-magnitude coordinate positive, ties to the lowest index
    assert np.allclose(dec.eigenvectors[:, 1], [s, -s])


def test_eig_diagonal_magnitude_order():
    dec = eig_by_magnitude(np.diag([1.0, -3.0, 2.0]))
    assert np.allclose(dec.eigenvalues, [-3.0, 2.0, 1.0])


def test_eig_matches_jacobi_oracle_seed7():
    a = random_symmetric(np.random.default_rng(7), 5)
    dec = eig_by_magnitude(a)
    w, _ = jacobi_eigh(a)
    oracle = w[magnitude_order(w)]
    assert np.max(np.abs(dec.eigenvalues - oracle)) <= 1e-9


def test_magnitude_ties_broken_by_signed_value():
    assert list(magnitude_order(np.array([-2.0, 2.0, 1.0]))) == [1, 0, 2]


def test_reconstruction_and_residual():
    a = random_symmetric(np.random.default_rng(3), 12)
    dec = eig_by_magnitude(a)
    assert dec.residual(a) <= 1e-10
    assert dec.source_dim == 12


def test_sign_convention_deterministic():
    a = random_symmetric(np.random.default_rng(4), 9)
    v = eig_by_magnitude(a).eigenvectors
    idx = np.argmax(np.abs(v), axis=0)
    assert np.all(v[idx, np.arange(9)] > 0)
    assert np.array_equal(v, eig_by_magnitude(a).eigenvectors)


def test_as_symmetric_rejects_bad_input():
    with pytest.raises(InputError):
        as_symmetric(np.ones((2, 3)))
    with pytest.raises(InputError):
        as_symmetric(np.array([[np.nan]]))


@given(seeds, st.integers(2, 10))
def test_weyl(seed, n):
    rng = np.random.default_rng(seed)
    s = random_symmetric(rng, n)
    e = random_symmetric(rng, n, 0.3)
    e_norm = spectral_norm(e)
    # value ordering, not magnitude ordering
    lam_s = np.linalg.eigvalsh(s)
    lam_se = np.linalg.eigvalsh(s + e)
    assert np.all(np.abs(lam_se - lam_s) <= e_norm + 1e-12)


# -- subspaces and dilation ---------------------------------------------------


def test_subspace_validation():
    with pytest.raises(InputError):
        Subspace(np.ones((3, 2)))
    with pytest.raises(InputError):
        Subspace(np.zeros((3, 0)))
    full = Subspace(np.eye(4))  # r = n allowed
    assert full.rank == 4
    assert Subspace(np.array([1.0, 0.0])).rank == 1


def test_svd_by_dilation_diagonal():
    u, s, v = svd_by_dilation(np.diag([2.0, 1.0]), 2)
    assert np.allclose(s, [2.0, 1.0])
    d = np.linalg.eigvalsh(symmetric_dilation(np.diag([2.0, 1.0])))
    assert np.allclose(np.sort(d), [-2, -1, 1, 2])


def test_svd_by_dilation_scalar():
    d = np.linalg.eigvalsh(symmetric_dilation(np.array([[3.0]])))
    assert np.allclose(np.sort(d), [-3.0, 3.0])
    _, s, _ = svd_by_dilation(np.array([[3.0]]), 1)
    assert s[0] == pytest.approx(3.0)


def test_svd_by_dilation_matches_aat_oracle_seed11():
    a = np.random.default_rng(11).standard_normal((2, 3))
    _, s, _ = svd_by_dilation(a, 2)
    w, _ = jacobi_eigh(a @ a.T)
    assert np.max(np.abs(np.sort(s**2) - np.sort(w))) <= 1e-9


def test_svd_by_dilation_reconstructs():
    rng = np.random.default_rng(12)
    a = rng.standard_normal((7, 4))
    u, s, v = svd_by_dilation(a, 4)
    assert np.allclose((u.basis * s) @ v.basis.T, a, atol=1e-10)
    with pytest.raises(InputError):
        svd_by_dilation(a, 5)


@given(seeds, st.integers(1, 6), st.integers(1, 6))
def test_dilation_spectrum_symmetric(seed, n1, n2):
    a = np.random.default_rng(seed).standard_normal((n1, n2))
    r = min(n1, n2)
    w = np.linalg.eigvalsh(symmetric_dilation(a))
    top = w[np.argsort(-np.abs(w))][: 2 * r]
    for x in top:
        if abs(x) > 1e-12:
            assert np.min(np.abs(w + x)) <= 1e-9


# -- principal angles, alignment ----------------------------------------------


def test_angles_identity_and_planar():
    u = Subspace(np.eye(3)[:, :2])
    assert np.allclose(principal_angles(u, u), 0.0)
    e1 = Subspace(np.array([1.0, 0.0]))
    t = math.radians(30)
    w = Subspace(np.array([math.cos(t), math.sin(t)]))
    assert principal_angles(e1, w)[0] == pytest.approx(t, abs=1e-14)


def test_angles_match_projector_oracle():
    rng = np.random.default_rng(6)
    u, v = random_subspace(rng, 6, 2), random_subspace(rng, 6, 2)
    sin2 = np.sort(np.sin(principal_angles(u, v)) ** 2)
    w, _ = jacobi_eigh(u.basis.T @ (np.eye(6) - v.projector()) @ u.basis)
    assert np.max(np.abs(sin2 - np.sort(w))) <= 1e-9


def test_small_angles_keep_full_precision():
    t = 1e-12
    u = Subspace(np.array([1.0, 0.0]))
    v = Subspace(np.array([math.cos(t), math.sin(t)]))
    assert principal_angles(u, v)[0] == pytest.approx(t, rel=1e-6)


def test_warm_up_pair():
    u = Subspace(np.array([1.0, 0.0]))
    ustar = Subspace(np.array([1.0, 1.0]) / math.sqrt(2))
    rep = align(u, ustar)
    assert rep.proj_spectral == pytest.approx(1 / math.sqrt(2), abs=1e-12)
    assert rep.proj_fro == pytest.approx(1.0, abs=1e-12)
    # brute force over the two orthogonal 1x1 matrices
    brute = min(np.linalg.norm(u.basis * s - ustar.basis, 2) for s in (1.0, -1.0))
    assert rep.dist_spectral == pytest.approx(brute, abs=1e-12)
    assert rep.dist_spectral == pytest.approx(math.sqrt(2 - math.sqrt(2)), abs=1e-12)


def test_align_identical():
    u = random_subspace(np.random.default_rng(2), 5, 2)
    rep = align(u, u)
    assert rep.dist_spectral == pytest.approx(0, abs=1e-12)
    assert rep.proj_fro == pytest.approx(0, abs=1e-12)
    assert np.allclose(rep.h, np.eye(2))
    assert np.allclose(rep.sgn_h, np.eye(2))


def test_align_orthogonal_subspaces_flagged():
    rep = align(Subspace(np.array([1.0, 0.0])), Subspace(np.array([0.0, 1.0])))
    assert rep.singular and rep.h_inv_norm is None
    assert rep.proj_spectral == pytest.approx(1.0)


@given(seeds, st.integers(1, 3), st.integers(4, 10))
def test_sin_theta_equivalences(seed, r, n):
    rng = np.random.default_rng(seed)
    u, v = random_subspace(rng, n, r), random_subspace(rng, n, r)
    rep = align(u, v)
    tol = 1e-10
    assert rep.proj_spectral == pytest.approx(rep.sin_spectral, abs=tol)
    assert rep.proj_fro == pytest.approx(math.sqrt(2) * rep.sin_fro, abs=tol)
    if not rep.singular:
        assert rep.sin_spectral <= rep.dist_spectral + tol
        assert rep.dist_spectral <= math.sqrt(2) * rep.sin_spectral + tol
        assert rep.sin_fro <= rep.dist_fro + tol
        assert rep.dist_fro <= math.sqrt(2) * rep.sin_fro + tol
        assert rep.h_minus_sgn <= rep.sin_spectral**2 + tol


@given(seeds, st.integers(1, 3), st.integers(4, 10))
def test_dist_invariant_under_rotation(seed, r, n):
    rng = np.random.default_rng(seed)
    u, v = random_subspace(rng, n, r), random_subspace(rng, n, r)
    base = align(u, v).dist_spectral
    ur = Subspace(u.basis @ random_rotation(rng, r))
    vr = Subspace(v.basis @ random_rotation(rng, r))
    assert abs(align(ur, v).dist_spectral - base) <= 1e-10
    assert abs(align(u, vr).dist_spectral - base) <= 1e-10


# -- matrix sign ----------------------------------------------------------------


def test_matrix_sign_examples():
    assert np.allclose(matrix_sign(np.diag([0.3, -0.2])), np.diag([1.0, -1.0]))
    rot = random_rotation(np.random.default_rng(0), 3)
    assert np.allclose(matrix_sign(rot), rot, atol=1e-12)
    with pytest.raises(SignUndefinedError):
        matrix_sign(np.diag([1.0, 0.0]))


def test_matrix_sign_matches_oracle_seed5():
    z = np.random.default_rng(5).standard_normal((3, 3))
    u, _, vt = jacobi_svd(z)
    assert np.max(np.abs(matrix_sign(z) - u @ vt)) <= 1e-10


@given(seeds, st.integers(1, 4))
def test_matrix_sign_rotation_equivariant(seed, r):
    rng = np.random.default_rng(seed)
    z = rng.standard_normal((r, r))
    if np.linalg.svd(z, compute_uv=False)[-1] < 1e-6:
        return
    rot = random_rotation(rng, r)
    assert np.max(np.abs(matrix_sign(rot @ z) - rot @ matrix_sign(z))) <= 1e-10


# -- norms -----------------------------------------------------------------------


def test_norms_identity_and_row():
    out = norms(np.eye(3))
    assert out["spectral"] == pytest.approx(1.0)
    assert out["fro"] == pytest.approx(math.sqrt(3))
    assert out["two_inf"] == pytest.approx(1.0)
    assert out["entry_inf"] == 1.0
    row = norms(np.array([[3.0, 4.0]]))
    assert row["spectral"] == pytest.approx(5.0)
    assert row["two_inf"] == pytest.approx(5.0)
    assert row["entry_inf"] == 4.0


def test_norms_spectral_matches_power_oracle_seed3():
    a = np.random.default_rng(3).standard_normal((4, 4))
    assert abs(norms(a)["spectral"] - power_spectral_norm(a)) <= 1e-8


def test_two_inf_norm():
    assert two_inf_norm(np.array([[1.0, 0.0], [3.0, 4.0]])) == 5.0
