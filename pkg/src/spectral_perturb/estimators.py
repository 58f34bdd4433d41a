"""Spectral estimators: symmetric denoising, matrix completion and two-community clustering."""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .matcore import InputError, Subspace, align, as_symmetric, eig_by_magnitude, norms, svd_by_dilation


@dataclass(frozen=True)
class DenoiseResult:
    u: Subspace
    lam: np.ndarray
    reconstruction: np.ndarray


def denoise_symmetric(m, r: int) -> DenoiseResult:
    """Keep the ``r`` eigenpairs of largest magnitude."""
    m = as_symmetric(m)
    n = m.shape[0]
    if not 1 <= r <= n:
        raise InputError(f"rank r={r} out of range for n={n}")
    lam, u = eig_by_magnitude(m).top(r)
    return DenoiseResult(Subspace(u), lam, (u * lam) @ u.T)


def first_order_target(m, ustar: Subspace, lambdastar) -> np.ndarray:
    """``M U* Lam*^{-1}``, the linearization of ``U sgn(H)`` around ``U*``."""
    lam = np.atleast_1d(np.asarray(lambdastar, dtype=float))
    if lam.shape != (ustar.rank,):
        raise InputError(f"expected {ustar.rank} eigenvalues, got shape {lam.shape}")
    if np.any(lam == 0):
        raise InputError("Lambda* is singular")
    return (np.asarray(m, dtype=float) @ ustar.basis) / lam


@dataclass(frozen=True)
class CompletionResult:
    u: Subspace
    v: Subspace
    sigma: np.ndarray
    estimate: np.ndarray
    errors: dict | None = None


def complete_matrix(mobs, r: int, truth=None) -> CompletionResult:
    """Rank-``r`` truncated SVD of an inverse-probability-weighted observation matrix."""
    mobs = np.asarray(mobs, dtype=float)
    u, s, v = svd_by_dilation(mobs, r)
    est = (u.basis * s) @ v.basis.T
    errors = error_report(est, truth) if truth is not None else None
    return CompletionResult(u, v, s, est, errors)


def sbm_classify(m) -> np.ndarray:
    """Signs of the leading eigenvector; nonpositive entries map to -1."""
    m = as_symmetric(m)
    if m.shape[0] % 2:
        raise InputError("two balanced communities need an even n")
    _, u = eig_by_magnitude(m).top(1)
    return np.where(u[:, 0] > 0, 1, -1)


def agreement(labels, truth) -> float:
    """Fraction of matching labels, maximized over a global flip."""
    labels = np.asarray(labels)
    truth = np.asarray(truth)
    same = float(np.mean(labels == truth))
    return max(same, 1.0 - same)


def error_report(estimate, truth) -> dict:
    """Norms of ``estimate - truth``; subspaces also get the alignment metrics."""
    if isinstance(estimate, Subspace) and isinstance(truth, Subspace):
        rep = align(estimate, truth)
        out = norms(estimate.basis @ rep.sgn_h - truth.basis)
        out.update(dist_spectral=rep.dist_spectral, dist_fro=rep.dist_fro,
                   proj_spectral=rep.proj_spectral, proj_fro=rep.proj_fro)
        return out
    a = np.asarray(estimate, dtype=float)
    b = np.asarray(truth, dtype=float)
    if a.shape != b.shape:
        raise InputError(f"shape mismatch: {a.shape} vs {b.shape}")
    out = norms(a - b)
    del out["inf_two"]
    return out
