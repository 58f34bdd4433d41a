"""Per-instance bound certificates.

Each high-probability inequality of the row-wise analysis is turned into a
conditional, deterministic claim: every event or numeric condition the argument
relies on is measured on the instance and recorded as a precondition, and the
conclusion is only asserted when all of them hold.

The absolute constants of the analysis are never fixed numerically in the
theory. :class:`Constants` holds the values used here; see ``README.md`` for how
the defaults were calibrated.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .loo import (
    Instance,
    LooEnsemble,
    build_ensemble,
    loo_noise_norms,
    loo_perturbation_norms,
    proof_quantities,
    rank1_loo_leading,
    top_r,
)
from .matcore import InputError, Subspace, align, two_inf_norm
from .serialization import dumps

HOLDS = "holds"
VIOLATED = "violated"
PRECONDITION_NOT_MET = "precondition-not-met"

# Certificates whose preconditions include every random event they rely on,
# so a violation can only come from a wrong inequality (or a bug), never from
# an unlucky draw. Sweeps allow these zero violations.
DETERMINISTIC_IDS = frozenset({
    "DK-dist", "L1-loo-norm", "MU-2inf",
    "L2-dist", "L2-sin", "L2-eig-large", "L2-eig-small", "L2-UH-fro",
    "gap-size", "gap-perturbation",
    "L3-H-inv", "L3-H-sgn", "L3-sgn-proximity", "H-sandwich",
    "L4-first", "L4-first-truth", "S2-surrogate", "S3-Mstar", "S3-alpha2",
    "L5-seq-UH", "L5-seq-UH-first", "L5-seq-sgn", "L5-seq-sgn-first",
    "R1-loo-proximity", "R1-loo-entry", "R1-linf",
})

SQRT2 = math.sqrt(2.0)
DK_FACTOR = 1.0 - 1.0 / SQRT2


@dataclass(frozen=True)
class Constants:
    """Numeric stand-ins for the unspecified absolute constants.

    c2 : spectral norm constant, ``||E|| <= c2 sigma sqrt(n)``.
    c3 : smallness constant in ``max(sigma sqrt(n), B log n) <= c3 lambda``.
    c4 : contraction constant in ``rho1 = 2 c4 (sigma sqrt(n) + B log n) / lambda``.
    c_sigma : theorem noise condition ``sigma sqrt(n log n) <= c_sigma lambda``.
    c1 : entrywise corollary condition ``sigma kappa sqrt(n log n) <= c1 lambda``.
    c_thm : constant standing in for ``lesssim`` in the final displays.
    cap_cb : largest acceptable ``c_b``.
    rtol : relative tolerance, ``tol = rtol * max(1, rhs)``.
    """

    c2: float = 3.0
    c3: float = 0.02
    c4: float = 8.0
    c_sigma: float = 0.1
    c1: float = 0.1
    c_thm: float = 4.0
    cap_cb: float = 2.0
    rtol: float = 1e-9

    def tol(self, rhs: float) -> float:
        return self.rtol * max(1.0, abs(rhs))

    def as_dict(self) -> dict:
        return {k: getattr(self, k) for k in self.__dataclass_fields__}


@dataclass(frozen=True)
class Precondition:
    name: str
    lhs: float
    rhs: float
    satisfied: bool


@dataclass(frozen=True)
class BoundCertificate:
    id: str
    label: str
    paper_anchor: str
    preconditions: tuple
    lhs: float
    rhs: float
    slack: float
    status: str
    worst_index: int | None = field(default=None, compare=False)

    @property
    def ok(self) -> bool:
        return self.status != VIOLATED


def _le(lhs: float, rhs: float, c: Constants) -> bool:
    return bool(np.isfinite(lhs) and np.isfinite(rhs) and lhs <= rhs + c.tol(rhs))


def _pre(name: str, lhs: float, rhs: float, c: Constants) -> Precondition:
    lhs, rhs = float(lhs), float(rhs)
    return Precondition(name, lhs, rhs, _le(lhs, rhs, c))


def certificate(id, label, anchor, pres, lhs, rhs, c: Constants, worst_index=None) -> BoundCertificate:
    lhs, rhs = float(lhs), float(rhs)
    pres = tuple(pres)
    if not all(p.satisfied for p in pres):
        status = PRECONDITION_NOT_MET
    elif _le(lhs, rhs, c):
        status = HOLDS
    else:
        status = VIOLATED
    return BoundCertificate(id, label, anchor, pres, lhs, rhs, rhs - lhs, status, worst_index)


def _worst(lhs: np.ndarray, rhs, c: Constants):
    """Index and values of the tightest member of a per-index family."""
    rhs = np.broadcast_to(np.asarray(rhs, dtype=float), lhs.shape)
    margin = rhs + np.array([c.tol(x) for x in rhs]) - lhs
    k = int(np.argmin(margin))
    return k, float(lhs[k]), float(rhs[k])


def _ratio_pre(name: str, lhs: np.ndarray, rhs: np.ndarray, c: Constants) -> Precondition:
    """Fold 'lhs_l <= rhs_l for all l' into one precondition ``max_l lhs_l / rhs_l <= 1``."""
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.where(rhs > 0, lhs / rhs, np.where(lhs <= 0, 0.0, np.inf))
    return _pre(name, float(np.max(ratio)) if ratio.size else 0.0, 1.0, c)


# ---------------------------------------------------------------------------


def lemma_certificates(instance: Instance, ensemble: LooEnsemble | None = None,
                       constants: Constants | None = None) -> list[BoundCertificate]:
    """Evaluate every named inequality of the general row-wise analysis."""
    c = constants if constants is not None else Constants()
    inst = instance.normalized()
    if ensemble is None:
        ensemble = build_ensemble(inst.mstar, inst.e, inst.r, inst.ustar)
    elif instance.flipped != inst.flipped:
        ensemble = build_ensemble(inst.mstar, inst.e, inst.r, inst.ustar)
    q = proof_quantities(inst, ensemble, c)

    n, r = inst.n, inst.r
    e, m = inst.e, inst.m
    ustar = inst.ustar.basis
    lam, lam1 = inst.lam_r, inst.lam_1
    sigma, b = inst.sigma, inst.b
    mu, kappa = inst.mu, inst.kappa
    logn = math.log(n) if n > 1 else 0.0
    s = sigma * math.sqrt(n)
    ustar_2inf = two_inf_norm(ustar)

    u = q.extras["u"]
    lam_hat = q.extras["lam"]
    rep = q.extras["alignment"]
    e_norm = q.extras["e_norm"]
    h, sgn = rep.h, rep.sgn_h
    uh = u @ h
    diff = uh - ustar
    spectrum = np.linalg.eigvalsh(m)
    mags = np.sort(np.abs(spectrum))[::-1]

    # leave-one-out side
    reps_l = [align(Subspace(ensemble.bases[l]), inst.ustar) for l in range(n)]
    dist_l = np.array([x.dist_spectral for x in reps_l])
    sin_l = np.array([x.sin_spectral for x in reps_l])
    hinv_l = np.array([x.h_inv_norm if x.h_inv_norm is not None else np.inf for x in reps_l])
    hsgn_l = np.array([x.h_minus_sgn for x in reps_l])
    lmags = np.abs(ensemble.eigenvalues)  # already magnitude-ordered per row
    lam_r_l = lmags[:, r - 1]
    lam_r1_l = lmags[:, r] if r < n else np.zeros(n)
    gap_l = lam_r_l - lam_r1_l
    dm_l = loo_perturbation_norms(e)
    eloo = loo_noise_norms(e)
    hinv = rep.h_inv_norm if rep.h_inv_norm is not None else math.inf

    certs = []
    add = certs.append

    event_e = _pre("||E|| <= c2 sigma sqrt(n)", e_norm, c.c2 * s, c)
    l2_cond = _pre("c2 sigma sqrt(n) <= (1 - 1/sqrt2) lambda_r*", c.c2 * s, DK_FACTOR * lam, c)
    dk_cond = _pre("||E|| <= (1 - 1/sqrt2)(|lambda_r*| - |lambda_{r+1}*|)", e_norm,
                   DK_FACTOR * inst.gap_star, c)
    l2_pres = [l2_cond, event_e, dk_cond]
    h_inv_pre = _pre("||H^-1|| <= 2", hinv, 2.0, c)
    hl_inv_pre = _pre("max_l ||H^(l)^-1|| <= 2", float(np.max(hinv_l)), 2.0, c)

    # -- Davis-Kahan on the instance itself
    add(certificate(
        "DK-dist", "Davis-Kahan: dist(U,U*) <= 2||E|| / eigengap",
        "eigenspace-perturbation", [dk_cond],
        rep.dist_spectral, 2 * e_norm / inst.gap_star if inst.gap_star > 0 else math.inf, c))

    # -- noise bounds
    add(certificate(
        "L1-spec-norm", "||E|| <= c2 sigma sqrt(n)", "noise-spectral-norm", [],
        e_norm, c.c2 * s, c))
    k = int(np.argmax(eloo))
    add(certificate(
        "L1-loo-norm", "max_l ||E^(l)|| <= ||E||", "noise-spectral-norm", [],
        float(eloo[k]), e_norm, c, worst_index=k))
    rowproj_rhs = 4 * sigma * math.sqrt(logn) * math.sqrt(r) + 6 * b * logn * ustar_2inf
    eu_2inf = two_inf_norm(e @ ustar)
    add(certificate(
        "L1-rowproj", "||E U*||_{2,inf} <= 4 sigma sqrt(log n) ||U*||_F + 6 B log n ||U*||_{2,inf}",
        "noise-row-projection", [], eu_2inf, rowproj_rhs, c))
    c_b = b / (sigma * math.sqrt(n / (mu * logn))) if sigma > 0 and logn > 0 else 0.0
    add(certificate(
        "MU-2inf", "||M U*||_{2,inf} <= sqrt(mu r/n)|lambda_1*| + (4 + 6 c_b) sigma sqrt(r log n)",
        "noise-row-projection",
        [_pre("||E U*||_{2,inf} within the row-projection bound", eu_2inf, rowproj_rhs, c)],
        two_inf_norm(m @ ustar),
        math.sqrt(mu * r / n) * lam1 + (4 + 6 * c_b) * sigma * math.sqrt(r * logn), c))

    # -- leave-one-out perturbation
    lhs = max(rep.dist_spectral, float(np.max(dist_l)))
    add(certificate(
        "L2-dist", "dist(U,U*) and max_l dist(U^(l),U*) <= 2 c2 sigma sqrt(n) / lambda_r*",
        "uniform-loo-perturbation", l2_pres, lhs, 2 * c.c2 * s / lam, c))
    lhs = max(rep.sin_spectral, float(np.max(sin_l)))
    add(certificate(
        "L2-sin", "||sin Theta|| and max_l ||sin Theta^(l)|| <= c2 sigma sqrt(2n) / lambda_r*",
        "uniform-loo-perturbation", l2_pres, lhs, c.c2 * sigma * math.sqrt(2 * n) / lam, c))
    lhs = lam - c.c2 * s
    rhs = min(abs(lam_hat[-1]), float(np.min(lam_r_l)))
    add(certificate(
        "L2-eig-large", "lambda_r* - c2 sigma sqrt(n) <= min_{j<=r} |lambda_j| (also for every M^(l))",
        "uniform-loo-perturbation", l2_pres, lhs, rhs, c))
    tail = mags[r] if r < n else 0.0
    tail_l = float(np.max(lam_r1_l))
    add(certificate(
        "L2-eig-small", "max_{j>r} |lambda_j| <= c2 sigma sqrt(n) (also for every M^(l))",
        "uniform-loo-perturbation", l2_pres, max(tail, tail_l), c.c2 * s, c))
    add(certificate(
        "L2-UH-fro", "||U H - U*||_F <= 2 c2 sigma sqrt(rn) / lambda_r*",
        "uniform-loo-perturbation", l2_pres,
        float(np.linalg.norm(diff)), 2 * c.c2 * sigma * math.sqrt(r * n) / lam, c))

    # -- eigengap and perturbation size for the leave-one-out Davis-Kahan step
    gap_pres = [_pre("20 c2 sigma sqrt(n) <= lambda_r*", 20 * c.c2 * s, lam, c), event_e]
    kgap = int(np.argmin(gap_l))
    add(certificate(
        "gap-size", "lambda_r*/2 <= min_l (|lambda_r^(l)| - |lambda_{r+1}^(l)|)",
        "loo-eigengap", gap_pres, lam / 2, float(gap_l[kgap]), c, worst_index=kgap))
    kdm = int(np.argmax(dm_l))
    add(certificate(
        "gap-perturbation", "max_l ||M - M^(l)|| <= 2 c2 sigma sqrt(n)",
        "loo-eigengap", gap_pres, float(dm_l[kdm]), 2 * c.c2 * s, c, worst_index=kdm))

    # -- alignment matrix
    add(certificate(
        "L3-H-inv", "||H^-1|| and max_l ||H^(l)^-1|| <= 2", "alignment-matrix", l2_pres,
        max(hinv, float(np.max(hinv_l))), 2.0, c))
    add(certificate(
        "L3-H-sgn", "||H - sgn(H)|| and max_l ||H^(l) - sgn(H^(l))|| <= 2 c2^2 n sigma^2 / lambda_r*^2",
        "alignment-matrix", l2_pres,
        max(rep.h_minus_sgn, float(np.max(hsgn_l))), 2 * c.c2**2 * n * sigma**2 / lam**2, c))
    hsgn_all = np.concatenate([[rep.h_minus_sgn], hsgn_l])
    sin2_all = np.concatenate([[rep.sin_spectral], sin_l]) ** 2
    k, lv, rv = _worst(hsgn_all, sin2_all, c)
    add(certificate(
        "L3-sgn-proximity", "||H - sgn(H)|| <= ||sin Theta||^2 (H and every H^(l))",
        "alignment-matrix", [], lv, rv, c, worst_index=k - 1 if k else None))

    # -- H sandwich: |||A||| <= ||H^-1|| |||A H||| <= 2 |||A H|||
    tests = {"U": u, "MU": m @ u, "UH-U*": diff}
    ratios = []
    for a in tests.values():
        for norm in (np.linalg.norm, two_inf_norm):
            den = norm(a @ h)
            if den > 0:
                ratios.append(norm(a) / den)
    for l in range(n):
        a = ensemble.bases[l]
        den = two_inf_norm(a @ ensemble.h[l])
        if den > 0:
            ratios.append(two_inf_norm(a) / den)
    add(certificate(
        "H-sandwich", "|||A||| <= 2 |||A H||| (Frobenius and 2,inf; A in {U, MU, UH-U*, U^(l)})",
        "alignment-matrix", [h_inv_pre, hl_inv_pre], max(ratios, default=0.0), 2.0, c))

    # -- first-order decomposition
    l4_pres = [
        _pre("2 c2 sigma sqrt(n) <= lambda_r*", 2 * c.c2 * s, lam, c),
        _pre("4 ||E|| <= lambda_r*", 4 * e_norm, lam, c),
        _pre("lambda_r*/2 <= |lambda_r|", lam / 2, abs(lam_hat[-1]), c),
        h_inv_pre,
    ]
    add(certificate(
        "L4-first", "||U H - M U* Lambda*^-1||_{2,inf} <= E1 + E2", "first-order-decomposition",
        l4_pres, q.uh_minus_firstorder_2inf, q.e1 + q.e2, c))
    add(certificate(
        "L4-first-truth", "||U H - U*||_{2,inf} <= E1 + E2 + E3", "first-order-decomposition",
        l4_pres, q.uh_minus_ustar_2inf, q.e1 + q.e2 + q.e3, c))

    # -- surrogate proximity of U H and U^(l) H^(l)
    ulhl = np.einsum("lnr,lrs->lns", ensemble.bases, ensemble.h)
    el_ul = np.sqrt(np.sum(np.einsum("ln,lnr->lr", e, ensemble.bases) ** 2, axis=1))
    el_ustar = np.linalg.norm(e @ ustar, axis=1)
    dk_l = _ratio_pre("max_l ||M - M^(l)|| / ((1 - 1/sqrt2) gap_l) <= 1", dm_l, DK_FACTOR * gap_l, c)
    gap_half = _ratio_pre("max_l (lambda_r*/2) / gap_l <= 1", np.full(n, lam / 2), gap_l, c)
    s2_pres = [_pre("||E|| / lambda_r* <= 1/16", e_norm / lam, 1 / 16, c), dk_l, gap_half, hl_inv_pre]
    rhs_l = (8 * el_ul + 16 * e_norm * two_inf_norm(uh)) / lam
    k, lv, rv = _worst(q.per_l_surrogate, rhs_l, c)
    add(certificate(
        "S2-surrogate", "||U H - U^(l) H^(l)||_F <= (8||E_l U^(l)|| + 16||E|| ||U H||_{2,inf}) / lambda_r*",
        "loo-surrogate", s2_pres, lv, rv, c, worst_index=k))

    uh_fro = float(np.linalg.norm(diff))
    uh_2inf = q.uh_minus_ustar_2inf
    s2c_pres = s2_pres + [
        event_e,
        _pre("320 B log n <= lambda_r*", 320 * b * logn, lam, c),
        _pre("max(sigma sqrt(n), B log n) <= c3 lambda_r*", max(s, b * logn), c.c3 * lam, c),
    ]
    rhs_long = (32 * el_ustar + 32 * e_norm * ustar_2inf + 128 * sigma * math.sqrt(logn) * uh_fro
                + (32 * c.c2 * s + 192 * b * logn) * uh_2inf) / lam
    k, lv, rv = _worst(q.per_l_surrogate, rhs_long, c)
    add(certificate(
        "S2-combined", "||U H - U^(l) H^(l)||_F against the combined surrogate display",
        "loo-surrogate", s2c_pres, lv, rv, c, worst_index=k))
    rhs_row = (320 * b * logn / lam * (el_ustar + e_norm * ustar_2inf)
               + 5 * sigma * math.sqrt(logn) * uh_fro + 7 * b * logn * uh_2inf)
    k, lv, rv = _worst(q.per_l_row, rhs_row, c)
    add(certificate(
        "S2-row", "||E_l (U^(l) H^(l) - U*)|| against the three-term row display",
        "loo-row-term", s2c_pres, lv, rv, c, worst_index=k))
    add(certificate(
        "S2-alpha1", "alpha1 <= 12 c2 sigma^2 sqrt(rn log n) / lambda_r*", "loo-row-term",
        [_pre("||sin Theta|| <= c2 sigma sqrt(2n) / lambda_r*", rep.sin_spectral,
              c.c2 * sigma * math.sqrt(2 * n) / lam, c)],
        q.alpha1, 12 * c.c2 * sigma**2 * math.sqrt(r * n * logn) / lam, c))

    # -- signal term M*(U H - U*)
    mid = math.sqrt(mu * r / n) * lam1 * rep.sin_spectral**2
    add(certificate(
        "S3-Mstar", "||M*(U H - U*)||_{2,inf} <= sqrt(mu r/n) |lambda_1*| ||sin Theta||^2",
        "incoherent-signal-term", [], two_inf_norm(inst.mstar @ diff), mid, c))
    add(certificate(
        "S3-alpha2", "sqrt(mu r/n) |lambda_1*| ||sin Theta||^2 <= alpha2", "incoherent-signal-term",
        [_pre("||sin Theta|| <= c2 sigma sqrt(2n) / lambda_r*", rep.sin_spectral,
              c.c2 * sigma * math.sqrt(2 * n) / lam, c)],
        mid, q.alpha2, c))

    # -- contraction
    rho_pre = _pre("4 c4 (sigma sqrt(n) + B log n) <= lambda_r*", 4 * c.c4 * (s + b * logn), lam, c)
    add(certificate(
        "E1-contraction", "E1 <= E11 + rho1 ||U H - U*||_{2,inf}, with rho1 <= 1/2",
        "contraction-recursion", [rho_pre, l2_cond, event_e], q.e1, q.e11 + q.rho1 * uh_2inf, c))

    # -- recursion and final bounds
    kk = 4 * c.c2**2 * sigma**2 * math.sqrt(mu * r * n) / lam**2
    l5_pres = [
        rho_pre,
        _pre("E1 <= E11 + rho1 ||U H - U*||_{2,inf}", q.e1, q.e11 + q.rho1 * uh_2inf, c),
        *l4_pres,
        _pre("||H - sgn(H)|| <= 2 c2^2 n sigma^2 / lambda_r*^2", rep.h_minus_sgn,
             2 * c.c2**2 * n * sigma**2 / lam**2, c),
        _pre("8 c2^2 sigma^2 n <= lambda_r*^2", 8 * c.c2**2 * sigma**2 * n, lam**2, c),
    ]
    seq = q.e11 + q.e2 + q.e3
    add(certificate("L5-seq-UH", "||U H - U*||_{2,inf} <= 2(E11 + E2 + E3)",
                    "contraction-recursion", l5_pres, uh_2inf, 2 * seq, c))
    add(certificate("L5-seq-UH-first", "||U H - M U* Lambda*^-1||_{2,inf} <= 2(E11 + E2 + rho1 E3)",
                    "contraction-recursion", l5_pres, q.uh_minus_firstorder_2inf,
                    2 * (q.e11 + q.e2 + q.rho1 * q.e3), c))
    add(certificate("L5-seq-sgn", "||U sgn(H) - U*||_{2,inf} <= 4(E11 + E2 + E3) + 4 c2^2 sigma^2 sqrt(mu r n)/lambda^2",
                    "contraction-recursion", l5_pres, q.usgnh_minus_ustar_2inf, 4 * seq + kk, c))
    add(certificate(
        "L5-seq-sgn-first",
        "||U sgn(H) - M U* Lambda*^-1||_{2,inf} <= 3 E11 + 3 E2 + (2 rho1 + 8 c2^2 sigma^2 n/lambda^2) E3 + 4 c2^2 sigma^2 sqrt(mu r n)/lambda^2",
        "contraction-recursion", l5_pres, q.usgnh_minus_firstorder_2inf,
        3 * q.e11 + 3 * q.e2 + (2 * q.rho1 + 8 * c.c2**2 * sigma**2 * n / lam**2) * q.e3 + kk, c))

    # -- theorem and corollary with c_thm in place of "lesssim"
    thm_pre = [_pre("sigma sqrt(n log n) <= c_sigma lambda_r*", sigma * math.sqrt(n * logn), c.c_sigma * lam, c)]
    add(certificate(
        "THM-final", "||U sgn(H) - U*||_{2,inf} <= c (sigma kappa sqrt(mu r) + sigma sqrt(r log n)) / lambda_r*",
        "two-to-infinity-bound", thm_pre, q.usgnh_minus_ustar_2inf,
        c.c_thm * (sigma * kappa * math.sqrt(mu * r) + sigma * math.sqrt(r * logn)) / lam, c))
    add(certificate(
        "THM-final-first-order",
        "||U sgn(H) - M U* Lambda*^-1||_{2,inf} <= c (sigma kappa sqrt(mu r)/lambda + (sigma^2 sqrt(rn log n) + sigma B sqrt(mu r log^3 n))/lambda^2)",
        "two-to-infinity-bound", thm_pre, q.usgnh_minus_firstorder_2inf,
        c.c_thm * (sigma * kappa * math.sqrt(mu * r) / lam
                   + (sigma**2 * math.sqrt(r * n * logn) + sigma * b * math.sqrt(mu * r * logn**3)) / lam**2), c))
    est = (u * lam_hat) @ u.T
    add(certificate(
        "COR-entrywise", "||U Lambda U^T - M*||_inf <= c sigma kappa^2 mu r sqrt(log n / n)",
        "entrywise-reconstruction",
        [_pre("sigma kappa sqrt(n log n) <= c1 lambda_r*", sigma * kappa * math.sqrt(n * logn), c.c1 * lam, c)],
        float(np.max(np.abs(est - inst.mstar))),
        c.c_thm * sigma * kappa**2 * mu * r * math.sqrt(logn / n), c))
    return certs


# ---------------------------------------------------------------------------


def rank1_chain(instance: Instance, constants: Constants | None = None,
                ensemble: LooEnsemble | None = None) -> list[BoundCertificate]:
    """Certificates for the rank-one leave-one-out chain with its explicit constants.

    Leave-one-out eigenvectors come from ``ensemble`` when supplied, otherwise
    from :func:`rank1_loo_leading`. All vectors are sign-aligned with ``u*``.
    """
    c = constants if constants is not None else Constants()
    if instance.r != 1:
        raise InputError(f"rank1_chain needs r = 1, got r = {instance.r}")
    inst = instance.normalized()
    n = inst.n
    m, e = inst.m, inst.e
    us = inst.ustar.basis[:, 0]
    lam = inst.lam_r
    sigma = inst.sigma
    logn = math.log(n) if n > 1 else 0.0
    s = sigma * math.sqrt(n)
    mu = inst.mu

    lam_hat, u, _ = top_r(m, 1)
    u = u[:, 0]
    u = u if u @ us >= 0 else -u
    if ensemble is not None:
        lam_l = ensemble.eigenvalues[:, 0]
        ul = ensemble.bases[:, :, 0].T.copy()
    elif sigma == 0 and not np.any(e):
        lam_l = np.full(n, lam_hat[0])
        ul = np.repeat(u[:, None], n, axis=1)
    else:
        try:
            lam_l, ul = rank1_loo_leading(m, e, u)
        except RuntimeError:
            # no usable eigengap for the power iteration: fall back to exact eigensolves
            ens = build_ensemble(inst.mstar, inst.e, 1, inst.ustar)
            lam_l, ul = ens.eigenvalues[:, 0], ens.bases[:, :, 0].T.copy()
    ul = ul * np.where(us @ ul >= 0, 1.0, -1.0)[None, :]  # column l is u^(l)

    e_norm = float(np.max(np.abs(np.linalg.eigvalsh(e))))
    idx = np.arange(n)
    row_dots = np.abs(np.einsum("lj,jl->l", e, ul))

    base = [
        _pre("sigma sqrt(n) <= (1 - 1/sqrt2)/5 lambda*", s, DK_FACTOR / 5 * lam, c),
        _pre("||E|| <= 5 sigma sqrt(n)", e_norm, 5 * s, c),
    ]
    row_event = _pre("max_l |E_l u^(l)| <= 5 sigma sqrt(log n)", float(np.max(row_dots)),
                     5 * sigma * math.sqrt(logn), c)
    step1 = base + [
        row_event,
        _pre("100 sigma sqrt(n) <= lambda*", 100 * s, lam, c),
        _pre("40 sigma sqrt(n) <= lambda*", 40 * s, lam, c),
    ]
    step2 = base + [_pre("20 sigma sqrt(n) <= lambda*", 20 * s, lam, c)]
    final = step1 + [_pre("80 sigma sqrt(n) <= lambda*", 80 * s, lam, c)]

    prox = np.linalg.norm(u[:, None] - ul, axis=0)
    k = int(np.argmax(prox))
    certs = [certificate(
        "R1-loo-proximity", "max_l ||u - u^(l)||_2 <= (40 sigma sqrt(log n) + 40 sigma sqrt(n) ||u||_inf) / lambda*",
        "rank-one-loo-proximity", step1, float(prox[k]),
        (40 * sigma * math.sqrt(logn) + 40 * s * float(np.max(np.abs(u)))) / lam, c, worst_index=k)]
    entry = np.abs(ul[idx, idx] - us)
    k = int(np.argmax(entry))
    certs.append(certificate(
        "R1-loo-entry", "max_l |u_l^(l) - u_l*| <= 20 sigma sqrt(n) ||u*||_inf / lambda*",
        "rank-one-loo-entry", step2, float(entry[k]),
        20 * s * float(np.max(np.abs(us))) / lam, c, worst_index=k))
    certs.append(certificate(
        "R1-linf", "||u - u*||_inf <= (80 sigma sqrt(log n) + 120 sigma sqrt(mu)) / lambda*",
        "rank-one-sup-norm", final, float(np.max(np.abs(u - us))),
        (80 * sigma * math.sqrt(logn) + 120 * sigma * math.sqrt(mu)) / lam, c))
    return certs


# ---------------------------------------------------------------------------


def certificate_dict(cert: BoundCertificate) -> dict:
    return {
        "id": cert.id,
        "label": cert.label,
        "paper_anchor": cert.paper_anchor,
        "preconditions": [
            {"name": p.name, "lhs": p.lhs, "rhs": p.rhs, "satisfied": p.satisfied}
            for p in cert.preconditions
        ],
        "lhs": cert.lhs,
        "rhs": cert.rhs,
        "slack": cert.slack,
        "status": cert.status,
    }


def certificates_to_json(certs) -> str:
    """Serialize with fixed field order and 17 significant digits per number."""
    return dumps([certificate_dict(cc) for cc in certs])
