"""Slow reference implementations used only to cross-check the fast paths.

Nothing here calls LAPACK: the eigen and singular solvers are plain cyclic
Jacobi sweeps, so an agreement with :mod:`numpy.linalg` is a genuinely
independent confirmation.
"""
from __future__ import annotations

import math

import numpy as np


class ConvergenceError(RuntimeError):
    pass


def jacobi_eigh(a, tol: float = 1e-14, max_sweeps: int = 100):
    """Eigenpairs of a symmetric matrix by cyclic Jacobi rotations.

    Returns
    -------
    values : ndarray
        Eigenvalues, ascending.
    vectors : ndarray
        Orthonormal eigenvectors as columns, matching ``values``.
    """
    a = np.array(a, dtype=float)
    n = a.shape[0]
    v = np.eye(n)
    scale = max(np.sqrt(np.sum(a * a)), np.finfo(float).tiny)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(a * a) - np.sum(np.diag(a) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if apq == 0.0:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                t = math.copysign(1.0, theta) / (abs(theta) + math.sqrt(theta * theta + 1.0))
                c = 1.0 / math.sqrt(t * t + 1.0)
                s = t * c
                # rotate rows and columns p, q
                ap = a[:, p].copy()
                aq = a[:, q].copy()
                a[:, p] = c * ap - s * aq
                a[:, q] = s * ap + c * aq
                ap = a[p, :].copy()
                aq = a[q, :].copy()
                a[p, :] = c * ap - s * aq
                a[q, :] = s * ap + c * aq
                vp = v[:, p].copy()
                vq = v[:, q].copy()
                v[:, p] = c * vp - s * vq
                v[:, q] = s * vp + c * vq
    else:
        raise ConvergenceError("Jacobi sweeps did not converge")
    w = np.diag(a).copy()
    order = np.argsort(w)
    return w[order], v[:, order]


def jacobi_svd(a, tol: float = 1e-15, max_sweeps: int = 100):
    """One-sided (Hestenes) Jacobi SVD of a tall or square matrix.

    Returns ``u, s, vt`` with singular values descending; wide input is
    handled by transposing.
    """
    a = np.array(a, dtype=float)
    if a.shape[0] < a.shape[1]:
        u, s, vt = jacobi_svd(a.T, tol, max_sweeps)
        return vt.T, s, u.T
    m, n = a.shape
    g = a.copy()
    v = np.eye(n)
    for _ in range(max_sweeps):
        rotated = False
        for p in range(n - 1):
            for q in range(p + 1, n):
                alpha = g[:, p] @ g[:, p]
                beta = g[:, q] @ g[:, q]
                gamma = g[:, p] @ g[:, q]
                if abs(gamma) <= tol * math.sqrt(alpha * beta) or gamma == 0.0:
                    continue
                rotated = True
                zeta = (beta - alpha) / (2.0 * gamma)
                t = math.copysign(1.0, zeta) / (abs(zeta) + math.sqrt(1.0 + zeta * zeta))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = c * t
                gp = g[:, p].copy()
                g[:, p] = c * gp - s * g[:, q]
                g[:, q] = s * gp + c * g[:, q]
                vp = v[:, p].copy()
                v[:, p] = c * vp - s * v[:, q]
                v[:, q] = s * vp + c * v[:, q]
        if not rotated:
            break
    else:
        raise ConvergenceError("one-sided Jacobi did not converge")
    sing = np.sqrt(np.sum(g * g, axis=0))
    order = np.argsort(-sing)
    sing, g, v = sing[order], g[:, order], v[:, order]
    u = np.zeros((m, n))
    for j in range(n):
        if sing[j] > 0:
            u[:, j] = g[:, j] / sing[j]
    return u, sing, v.T


def power_spectral_norm(a, iters: int = 5000, tol: float = 1e-15, seed: int = 0) -> float:
    """Spectral norm by power iteration on ``A^T A``."""
    a = np.asarray(a, dtype=float)
    x = np.random.default_rng(seed).standard_normal(a.shape[1])
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(iters):
        y = a.T @ (a @ x)
        ny = np.linalg.norm(y)
        if ny == 0.0:
            return 0.0
        x = y / ny
        new = math.sqrt(ny)
        if abs(new - est) <= tol * new:
            est = new
            break
        est = new
    return float(np.linalg.norm(a @ x))


def naive_sum_squares(a) -> float:
    total = 0.0
    for row in np.asarray(a, dtype=float).tolist():
        for x in row:
            total += x * x
    return total
