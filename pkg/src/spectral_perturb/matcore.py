"""Dense symmetric spectral primitives and subspace geometry.

Everything here is a pure function of its inputs. Symmetric matrices are plain
``numpy`` arrays; :func:`as_symmetric` is the single entry point that validates
and symmetrizes them.
"""
from __future__ import annotations

import functools
from dataclasses import dataclass

import numpy as np

DEFAULT_TOL = 1e-10


class InputError(ValueError):
    """Raised when an operation receives arguments outside its domain."""


class SignUndefinedError(InputError):
    """The matrix sign function needs a full-rank argument."""


def as_symmetric(a) -> np.ndarray:
    """Return ``(a + a.T) / 2`` as a float array, rejecting non-finite input."""
    a = np.asarray(a, dtype=float)
    if a.ndim != 2 or a.shape[0] != a.shape[1] or a.shape[0] < 1:
        raise InputError(f"expected a non-empty square matrix, got shape {a.shape}")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    return (a + a.T) / 2


def _sign_fix(vecs: np.ndarray) -> np.ndarray:
    # largest-magnitude coordinate made positive; argmax picks the lowest index on ties
    idx = np.argmax(np.abs(vecs), axis=0)
    signs = np.sign(vecs[idx, np.arange(vecs.shape[1])])
    signs[signs == 0] = 1.0
    return vecs * signs


def magnitude_order(values: np.ndarray, rtol: float = 1e-12) -> np.ndarray:
    """Indices sorting ``values`` by |value| descending.

    Magnitudes closer than ``rtol * max|value|`` count as ties and are broken
    by signed value, descending.
    """
    values = np.asarray(values, dtype=float)
    scale = rtol * max(1.0, float(np.max(np.abs(values)))) if values.size else 0.0

    def cmp(i, j):
        di = abs(values[i]) - abs(values[j])
        if abs(di) > scale:
            return -1 if di > 0 else 1
        if values[i] != values[j]:
            return -1 if values[i] > values[j] else 1
        return i - j

    return np.array(sorted(range(values.size), key=functools.cmp_to_key(cmp)), dtype=int)


@dataclass(frozen=True)
class SpectralDecomposition:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray

    @property
    def source_dim(self) -> int:
        return self.eigenvectors.shape[0]

    def top(self, r: int) -> tuple[np.ndarray, np.ndarray]:
        """Leading ``r`` eigenvalues and eigenvectors by magnitude."""
        return self.eigenvalues[:r], self.eigenvectors[:, :r]

    def reconstruct(self) -> np.ndarray:
        v = self.eigenvectors
        return (v * self.eigenvalues) @ v.T

    def residual(self, s: np.ndarray) -> float:
        return float(np.linalg.norm(self.reconstruct() - s))


def eig_by_magnitude(s) -> SpectralDecomposition:
    """Full eigendecomposition with eigenvalues ordered by decreasing magnitude."""
    s = as_symmetric(s)
    vals, vecs = np.linalg.eigh(s)
    order = magnitude_order(vals)
    return SpectralDecomposition(vals[order], _sign_fix(vecs[:, order]))


@dataclass(frozen=True)
class Subspace:
    basis: np.ndarray

    def __post_init__(self):
        b = np.asarray(self.basis, dtype=float)
        if b.ndim == 1:
            b = b[:, None]
        object.__setattr__(self, "basis", b)
        n, r = b.shape
        if not 1 <= r <= n:
            raise InputError(f"rank must satisfy 1 <= r <= n, got r={r}, n={n}")
        err = np.linalg.norm(b.T @ b - np.eye(r), 2)
        if err > DEFAULT_TOL:
            raise InputError(f"basis is not orthonormal (||B^T B - I|| = {err:.3g})")

    @property
    def ambient_dim(self) -> int:
        return self.basis.shape[0]

    @property
    def rank(self) -> int:
        return self.basis.shape[1]

    def projector(self) -> np.ndarray:
        return self.basis @ self.basis.T

    def incoherence(self) -> float:
        """``n * ||B||_{2,inf}^2 / r``."""
        return self.ambient_dim * two_inf_norm(self.basis) ** 2 / self.rank


def symmetric_dilation(a) -> np.ndarray:
    a = np.asarray(a, dtype=float)
    n1, n2 = a.shape
    out = np.zeros((n1 + n2, n1 + n2))
    out[:n1, n1:] = a
    out[n1:, :n1] = a.T
    return out


def svd_by_dilation(a, r: int) -> tuple[Subspace, np.ndarray, Subspace]:
    """Rank-``r`` SVD read off the positive half of the symmetric dilation spectrum.

    For ``S = [[0, A], [A^T, 0]]`` each singular triple ``(s, u, v)`` of ``A``
    yields eigenpairs ``(+-s, (u, +-v)/sqrt(2))``.
    """
    a = np.asarray(a, dtype=float)
    if a.ndim != 2:
        raise InputError("expected a 2-D matrix")
    n1, n2 = a.shape
    if not 1 <= r <= min(n1, n2):
        raise InputError(f"rank r={r} out of range for a {n1}x{n2} matrix")
    if not np.all(np.isfinite(a)):
        raise InputError("matrix has non-finite entries")
    vals, vecs = np.linalg.eigh(symmetric_dilation(a))
    # eigh returns ascending order, so the top r are the r largest (positive) eigenvalues
    sigma = vals[::-1][:r].copy()
    w = vecs[:, ::-1][:, :r] * np.sqrt(2.0)
    u, v = w[:n1], w[n1:]
    # near-zero singular values leave (u, v) unnormalized; re-orthonormalize blockwise
    u, v = _orthonormalize_pair(a, u, v, sigma)
    sigma = np.maximum(sigma, 0.0)
    return Subspace(u), sigma, Subspace(v)


def _orthonormalize_pair(a, u, v, sigma):
    ok = sigma > 1e-12 * max(1.0, sigma[0])
    if np.all(ok):
        # cheap polish: exact eigenvectors of S already give orthonormal blocks
        u = u / np.linalg.norm(u, axis=0)
        v = v / np.linalg.norm(v, axis=0)
        return u, v
    qu, _ = np.linalg.qr(u)
    qv, _ = np.linalg.qr(v)
    qu = qu * np.sign(np.sum(qu * u, axis=0) + (np.sum(qu * u, axis=0) == 0))
    qv = qv * np.sign(np.sum(qv * v, axis=0) + (np.sum(qv * v, axis=0) == 0))
    return qu, qv


def principal_angles(u: Subspace, v: Subspace) -> np.ndarray:
    """Principal angles in ``[0, pi/2]``, nondecreasing."""
    if u.ambient_dim != v.ambient_dim or u.rank != v.rank:
        raise InputError(
            f"subspaces must share ambient dim and rank: {u.basis.shape} vs {v.basis.shape}"
        )
    # arccos alone loses half the digits near zero, so small angles come from
    # the sines, i.e. the singular values of (I - U U^T) V
    h = u.basis.T @ v.basis
    cos = np.sort(np.clip(np.linalg.svd(h, compute_uv=False), 0.0, 1.0))[::-1]
    sin = np.sort(np.clip(np.linalg.svd(v.basis - u.basis @ h, compute_uv=False), 0.0, 1.0))
    small = cos * cos >= 0.5
    return np.sort(np.where(small, np.arcsin(sin), np.arccos(cos)))


def matrix_sign(z, rtol: float = 1e-12) -> np.ndarray:
    """Orthonormal polar factor ``U_Z V_Z^T`` of a full-rank square matrix."""
    z = np.atleast_2d(np.asarray(z, dtype=float))
    uz, s, vzt = np.linalg.svd(z)
    if s[-1] <= rtol * max(s[0], np.finfo(float).tiny):
        raise SignUndefinedError(
            f"sign undefined: sigma_min={s[-1]:.3g} vs sigma_max={s[0]:.3g}"
        )
    return uz @ vzt


@dataclass(frozen=True)
class AlignmentReport:
    h: np.ndarray
    sgn_h: np.ndarray | None
    angles: np.ndarray
    dist_spectral: float
    dist_fro: float
    proj_spectral: float
    proj_fro: float
    h_minus_sgn: float
    h_inv_norm: float | None

    @property
    def singular(self) -> bool:
        return self.h_inv_norm is None

    @property
    def sin_spectral(self) -> float:
        return float(np.max(np.sin(self.angles)))

    @property
    def sin_fro(self) -> float:
        return float(np.linalg.norm(np.sin(self.angles)))


def align(u: Subspace, ustar: Subspace) -> AlignmentReport:
    """Compare ``u`` against ``ustar`` through ``H = U^T U*`` and its sign."""
    angles = principal_angles(u, ustar)
    h = u.basis.T @ ustar.basis
    # UU^T - U*U*^T lives in span[U, U*]; compress onto an orthonormal basis of it
    q, _ = np.linalg.qr(np.hstack([u.basis, ustar.basis]))
    a, b = q.T @ u.basis, q.T @ ustar.basis
    dproj = a @ a.T - b @ b.T
    proj_spectral = float(np.linalg.norm(dproj, 2))
    proj_fro = float(np.linalg.norm(dproj))
    try:
        sgn = matrix_sign(h)
    except SignUndefinedError:
        # H singular: some angle is pi/2. Fall back to the Procrustes SVD factor,
        # which still attains the rotation-optimal Frobenius distance.
        a, _, bt = np.linalg.svd(h)
        sgn, h_inv = a @ bt, None
    else:
        h_inv = float(1.0 / np.linalg.svd(h, compute_uv=False)[-1])
    diff = u.basis @ sgn - ustar.basis
    return AlignmentReport(
        h=h,
        sgn_h=sgn,
        angles=angles,
        dist_spectral=float(np.linalg.norm(diff, 2)),
        dist_fro=float(np.linalg.norm(diff)),
        proj_spectral=proj_spectral,
        proj_fro=proj_fro,
        h_minus_sgn=float(np.linalg.norm(h - sgn, 2)),
        h_inv_norm=h_inv,
    )


def two_inf_norm(a) -> float:
    """Largest Euclidean row norm."""
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0.0
    return float(np.max(np.sqrt(np.sum(a * a, axis=1))))


def spectral_norm(a) -> float:
    """Largest eigenvalue of the symmetric dilation of ``a``.

    The dilation of a symmetric matrix has spectrum ``{+-|lambda_i|}``, so for
    symmetric input the dilation is skipped and ``max |lambda_i|`` returned.
    """
    a = np.atleast_2d(np.asarray(a, dtype=float))
    if a.size == 0:
        return 0.0
    if a.shape[0] == a.shape[1] and np.array_equal(a, a.T):
        return float(np.max(np.abs(np.linalg.eigvalsh(a))))
    return float(max(np.linalg.eigvalsh(symmetric_dilation(a))[-1], 0.0))


def norms(a) -> dict[str, float]:
    a = np.atleast_2d(np.asarray(a, dtype=float))
    return {
        "spectral": spectral_norm(a),
        "fro": float(np.linalg.norm(a)),
        "two_inf": two_inf_norm(a),
        "inf_two": two_inf_norm(a.T),
        "entry_inf": float(np.max(np.abs(a))) if a.size else 0.0,
    }
