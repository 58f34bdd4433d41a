"""Leave-one-out ensembles and the measured quantities of the row-wise analysis.

For a symmetric ``M = M* + E`` the l-th leave-one-out matrix replaces row and
column ``l`` of the noise by zeros, ``M^(l) = M* + E^(l)``. Its leading
eigenspace is then independent of ``E_{l,.}``, which is what makes row-wise
error control possible.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .matcore import (
    InputError,
    SpectralDecomposition,
    Subspace,
    align,
    as_symmetric,
    eig_by_magnitude,
    magnitude_order,
    _sign_fix,
    two_inf_norm,
)
from .noise import InstanceSpec, make_ground_truth, sample_symmetric_noise


@dataclass(frozen=True)
class Instance:
    """A ground truth, one noise draw and the noise parameters used to bound it.

    ``sigma`` and ``b`` are the *model* values (standard-deviation and magnitude
    bounds), not measurements; certificates compare measurements against them.
    """

    mstar: np.ndarray
    e: np.ndarray
    r: int
    sigma: float
    b: float
    ustar: Subspace = None
    lamstar: np.ndarray = None
    flipped: bool = False

    def __post_init__(self):
        mstar = as_symmetric(self.mstar)
        e = as_symmetric(self.e)
        if mstar.shape != e.shape:
            raise InputError(f"dimension mismatch: M* {mstar.shape} vs E {e.shape}")
        if not 1 <= self.r <= mstar.shape[0]:
            raise InputError(f"need 1 <= r <= n, got r={self.r}")
        object.__setattr__(self, "mstar", mstar)
        object.__setattr__(self, "e", e)
        if self.ustar is None or self.lamstar is None:
            vals, vecs = eig_by_magnitude(mstar).top(self.r)
            object.__setattr__(self, "ustar", Subspace(vecs))
            object.__setattr__(self, "lamstar", np.asarray(vals, dtype=float))

    @property
    def n(self) -> int:
        return self.mstar.shape[0]

    @property
    def m(self) -> np.ndarray:
        return self.mstar + self.e

    @property
    def lam_r(self) -> float:
        return float(abs(self.lamstar[-1]))

    @property
    def lam_1(self) -> float:
        return float(abs(self.lamstar[0]))

    @property
    def kappa(self) -> float:
        return self.lam_1 / self.lam_r

    @property
    def mu(self) -> float:
        return self.ustar.incoherence()

    @property
    def gap_star(self) -> float:
        """``|lambda_r*| - |lambda_{r+1}*|`` of the ground truth."""
        if self.r == self.n:
            return self.lam_r
        vals = np.linalg.eigvalsh(self.mstar)
        mags = np.sort(np.abs(vals))[::-1]
        return float(mags[self.r - 1] - mags[self.r])

    def normalized(self) -> "Instance":
        """Negate ``M*`` and ``E`` jointly when ``lambda_r* < 0``.

        The leading eigenspaces are unchanged; only the sign bookkeeping of the
        eigenvalues moves, so every bound can be written for ``lambda_r* > 0``.
        """
        if self.lamstar[-1] >= 0:
            return self
        return Instance(-self.mstar, -self.e, self.r, self.sigma, self.b,
                        self.ustar, -self.lamstar, not self.flipped)


def make_instance(spec: InstanceSpec) -> Instance:
    mstar, ustar, lam = make_ground_truth(spec)
    e = sample_symmetric_noise(spec.noise, spec.n)
    return Instance(mstar, e, spec.r, spec.noise.sigma, spec.noise.bound(spec.n), ustar, lam)


def leave_one_out_noise(e: np.ndarray, l: int) -> np.ndarray:
    n = e.shape[0]
    if not 0 <= l < n:
        raise InputError(f"index l={l} out of range for n={n}")
    el = e.copy()
    el[l, :] = 0.0
    el[:, l] = 0.0
    return el


def top_r(m: np.ndarray, r: int) -> tuple[np.ndarray, np.ndarray, np.ndarray]:
    """Top-r eigenpairs of a symmetric matrix plus its full magnitude-ordered spectrum."""
    vals, vecs = np.linalg.eigh(m)
    order = magnitude_order(vals)
    return vals[order][:r], _sign_fix(vecs[:, order[:r]]), vals[order]


@dataclass(frozen=True)
class LooEnsemble:
    """Leave-one-out eigenspaces for every index.

    Only what the analysis reads is stored: the magnitude-ordered spectrum of
    each ``M^(l)`` and its top-r eigenvectors. :meth:`m_l` and :meth:`spec_l`
    rebuild the full objects on demand so memory stays ``O(n^2 r)``.
    """

    mstar: np.ndarray
    e: np.ndarray
    r: int
    eigenvalues: np.ndarray  # (n, n): row l is the spectrum of M^(l)
    bases: np.ndarray  # (n, n, r): bases[l] spans the top-r eigenspace of M^(l)
    h: np.ndarray  # (n, r, r): H^(l) = U^(l)^T U*

    @property
    def n(self) -> int:
        return self.mstar.shape[0]

    def e_l(self, l: int) -> np.ndarray:
        return leave_one_out_noise(self.e, l)

    def m_l(self, l: int) -> np.ndarray:
        return self.mstar + self.e_l(l)

    def u_l(self, l: int) -> Subspace:
        return Subspace(self.bases[l])

    def spec_l(self, l: int) -> SpectralDecomposition:
        return eig_by_magnitude(self.m_l(l))

    def lam_l(self, l: int) -> np.ndarray:
        return self.eigenvalues[l, : self.r]


def build_ensemble(mstar, e, r: int, ustar: Subspace | None = None) -> LooEnsemble:
    mstar = as_symmetric(mstar)
    e = as_symmetric(e)
    n = mstar.shape[0]
    if e.shape != mstar.shape:
        raise InputError(f"dimension mismatch: M* {mstar.shape} vs E {e.shape}")
    if not 1 <= r <= n:
        raise InputError(f"need 1 <= r <= n, got r={r}")
    if ustar is None:
        ustar = Subspace(eig_by_magnitude(mstar).top(r)[1])
    eigenvalues = np.empty((n, n))
    bases = np.empty((n, n, r))
    for l in range(n):
        _, vecs, spectrum = top_r(mstar + leave_one_out_noise(e, l), r)
        eigenvalues[l] = spectrum
        bases[l] = vecs
    h = np.einsum("lnr,ns->lrs", bases, ustar.basis)
    return LooEnsemble(mstar, e, r, eigenvalues, bases, h)


def loo_perturbation_norms(e: np.ndarray) -> np.ndarray:
    """``||M - M^(l)|| = ||E - E^(l)||`` for every l, in closed form.

    ``E - E^(l)`` is supported on row and column ``l``; restricted to
    ``span{e_l, a}`` with ``a = E_{.,l} - E_ll e_l`` it is the 2x2 matrix
    ``[[E_ll, |a|], [|a|, 0]]``.
    """
    d = np.diag(e)
    a2 = np.sum(e * e, axis=0) - d * d
    return 0.5 * (np.abs(d) + np.sqrt(d * d + 4.0 * np.maximum(a2, 0.0)))


def loo_noise_norms(e: np.ndarray) -> np.ndarray:
    n = e.shape[0]
    out = np.empty(n)
    for l in range(n):
        out[l] = np.max(np.abs(np.linalg.eigvalsh(leave_one_out_noise(e, l)))) if n > 1 else 0.0
    return out


@dataclass(frozen=True)
class ProofQuantities:
    e1: float
    e2: float
    e3: float
    e11: float
    rho1: float
    alpha0: float
    alpha1: float
    alpha2: float
    per_l_surrogate: np.ndarray
    per_l_row: np.ndarray
    uh_minus_ustar_2inf: float
    uh_minus_firstorder_2inf: float
    usgnh_minus_ustar_2inf: float
    usgnh_minus_firstorder_2inf: float
    alignment_degenerate: bool = False
    extras: dict = field(default_factory=dict, compare=False, repr=False)


def proof_quantities(instance: Instance, ensemble: LooEnsemble | None, constants=None) -> ProofQuantities:
    """Evaluate every scalar of the row-wise argument on one instance.

    ``constants`` supplies ``c2`` and ``c4`` (see
    :class:`spectral_perturb.certificates.Constants`). When ``ensemble`` is
    ``None`` the per-index arrays are empty.
    """
    from .certificates import Constants

    c = constants if constants is not None else Constants()
    inst = instance.normalized()
    if inst.lam_r <= 0:
        raise InputError("lambda_r* must be nonzero")
    n, r = inst.n, inst.r
    m, e = inst.m, inst.e
    ustar = inst.ustar.basis
    lam = inst.lam_r
    sigma, b = inst.sigma, inst.b
    logn = math.log(n) if n > 1 else 0.0

    vals, u, _ = top_r(m, r)
    rep = align(Subspace(u), inst.ustar)
    h, sgn = rep.h, rep.sgn_h
    uh = u @ h
    diff = uh - ustar
    e_norm = float(np.max(np.abs(np.linalg.eigvalsh(e))))
    ustar_2inf = two_inf_norm(ustar)
    eu = e @ ustar
    mu_star = m @ ustar
    first = mu_star / inst.lamstar

    e1 = 2 * two_inf_norm(m @ diff) / lam
    e2 = 4 * two_inf_norm(mu_star) * e_norm / lam**2
    e3 = two_inf_norm(eu) / lam
    alpha0 = (32 * c.c2 * sigma * math.sqrt(n) + 320 * b * logn) / lam * (
        two_inf_norm(eu) + e_norm * ustar_2inf
    )
    alpha1 = 6 * sigma * math.sqrt(logn) * float(np.linalg.norm(diff))
    alpha2 = 4 * c.c2**2 * inst.kappa * sigma**2 * math.sqrt(inst.mu * r * n) / lam
    e11 = 2 * (alpha0 + alpha1 + alpha2) / lam
    rho1 = 2 * c.c4 * (sigma * math.sqrt(n) + b * logn) / lam

    if ensemble is not None:
        ulhl = np.einsum("lnr,lrs->lns", ensemble.bases, ensemble.h)
        per_l_surrogate = np.sqrt(np.sum((uh[None] - ulhl) ** 2, axis=(1, 2)))
        # row l of E against U^(l)H^(l) - U*
        rows = np.einsum("ln,lns->ls", e, ulhl - ustar[None])
        per_l_row = np.sqrt(np.sum(rows**2, axis=1))
    else:
        per_l_surrogate = np.zeros(0)
        per_l_row = np.zeros(0)

    usgn = u @ sgn
    return ProofQuantities(
        e1=e1, e2=e2, e3=e3, e11=e11, rho1=rho1,
        alpha0=alpha0, alpha1=alpha1, alpha2=alpha2,
        per_l_surrogate=per_l_surrogate, per_l_row=per_l_row,
        uh_minus_ustar_2inf=two_inf_norm(diff),
        uh_minus_firstorder_2inf=two_inf_norm(uh - first),
        usgnh_minus_ustar_2inf=two_inf_norm(usgn - ustar),
        usgnh_minus_firstorder_2inf=two_inf_norm(usgn - first),
        alignment_degenerate=rep.singular,
        extras={"u": u, "lam": vals, "alignment": rep, "e_norm": e_norm},
    )


@dataclass(frozen=True)
class IdentityResidual:
    name: str
    residual: float
    skipped: bool = False
    reason: str = ""
    per_l: np.ndarray | None = field(default=None, compare=False, repr=False)


def _rel(a, b, *scales) -> float:
    scale = max([np.linalg.norm(a), np.linalg.norm(b), *map(np.linalg.norm, scales)])
    if scale == 0:
        return 0.0
    return float(np.linalg.norm(a - b) / scale)


def decomposition_identities(instance: Instance, ensemble: LooEnsemble | None = None) -> list[IdentityResidual]:
    """Relative residuals of the exact algebraic identities behind the first-order expansion.

    (a) ``U H Lam* = M U Lam^{-1} U^T U* Lam*``
    (b) ``U H Lam* = M U* + M (U H - U*) - M U Lam^{-1} U^T E U*``
    (c) ``U^T U* Lam* = Lam U^T U* - U^T E U*``
    (d) rank one only: ``u_l^(l) = (lam*/lam^(l)) u*_l (u*^T u^(l))`` for every l.
    """
    m, e, r = instance.m, instance.e, instance.r
    ustar, lamstar = instance.ustar.basis, instance.lamstar
    vals, u, _ = top_r(m, r)
    out = []
    if abs(vals[-1]) <= 1e-12 * max(abs(vals[0]), np.finfo(float).tiny):
        reason = "Lambda singular"
        for name in ("a", "b", "c"):
            out.append(IdentityResidual(name, float("nan"), True, reason))
    else:
        lam_s = np.diag(lamstar)
        lam_inv = np.diag(1.0 / vals)
        h = u.T @ ustar
        lhs = u @ h @ lam_s
        mu_lam_inv = m @ u @ lam_inv
        out.append(IdentityResidual("a", _rel(lhs, mu_lam_inv @ h @ lam_s)))
        t1, t2 = m @ ustar, m @ (u @ h - ustar)
        t3 = mu_lam_inv @ (u.T @ e @ ustar)
        out.append(IdentityResidual("b", _rel(lhs, t1 + t2 - t3, t1, t2, t3)))
        p1, p2 = np.diag(vals) @ h, u.T @ e @ ustar
        out.append(IdentityResidual("c", _rel(h @ lam_s, p1 - p2, p1, p2)))
    if r != 1:
        out.append(IdentityResidual("d", float("nan"), True, "rank > 1"))
        return out
    ens = ensemble if ensemble is not None else build_ensemble(instance.mstar, e, 1, instance.ustar)
    us = ustar[:, 0]
    lam_l = ens.eigenvalues[:, 0]
    if np.any(np.abs(lam_l) <= 1e-12 * abs(lamstar[0])):
        out.append(IdentityResidual("d", float("nan"), True, "some lambda^(l) vanishes"))
        return out
    ul = ens.bases[:, :, 0]  # (l, n)
    idx = np.arange(instance.n)
    lhs = ul[idx, idx]
    rhs = lamstar[0] / lam_l * us * (ul @ us)
    scale = np.maximum(np.max(np.abs(ul), axis=1), np.abs(rhs))
    per_l = np.where(scale > 0, np.abs(lhs - rhs) / np.where(scale > 0, scale, 1.0), 0.0)
    out.append(IdentityResidual("d", float(np.max(per_l)), per_l=per_l))
    return out


# --------------------------------------------------------------------------
# rank one at scale: all n leave-one-out leading eigenvectors at once


def apply_loo(m: np.ndarray, e: np.ndarray, x: np.ndarray) -> np.ndarray:
    """Column l of the result is ``M^(l) x_l``.

    Uses ``(M - M^(l)) x = e_l (E_{l,.} x) + (E_{.,l} - E_ll e_l) x_l``.
    """
    idx = np.arange(m.shape[0])
    d = x[idx, idx].copy()
    y = m @ x
    y[idx, idx] -= np.einsum("lj,jl->l", e, x)
    y -= e * d[None, :]
    y[idx, idx] += np.diag(e) * d
    return y


def rank1_loo_leading(m, e, u0, rtol: float = 1e-12, max_iter: int = 500):
    """Leading eigenpairs of every ``M^(l)`` by a warm-started batched power iteration.

    Each column starts from ``u0`` (the leading eigenvector of ``M``), which is
    already within ``O(||u - u^(l)||)`` of the target. Iterates until every
    residual ``||M^(l) x - lam x||`` drops below ``rtol * |lam|``.

    Returns ``(lams, vecs)`` with ``vecs[:, l]`` the unit eigenvector of ``M^(l)``.
    """
    n = m.shape[0]
    x = np.repeat(np.asarray(u0, dtype=float).reshape(n, 1), n, axis=1)
    for _ in range(max_iter):
        y = apply_loo(m, e, x)
        lams = np.einsum("ij,ij->j", x, y)
        res = np.linalg.norm(y - x * lams, axis=0)
        if np.all(res <= rtol * np.abs(lams)):
            return lams, x
        x = y / np.linalg.norm(y, axis=0)
    raise RuntimeError("batched power iteration did not converge; eigengap too small")
