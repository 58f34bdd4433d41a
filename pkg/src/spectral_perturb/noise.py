"""Noise models, ground-truth generators and problem instances."""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import NamedTuple

import numpy as np

from .matcore import InputError, Subspace, _sign_fix, as_symmetric, two_inf_norm
from .rng import generator

FAMILIES = ("bounded-uniform", "truncated-gaussian", "rademacher-scaled", "bernoulli-centered")


class ConfigError(ValueError):
    pass


@dataclass(frozen=True)
class NoiseModel:
    """Homogeneous symmetric noise.

    ``sigma`` bounds the per-entry standard deviation. ``b`` is the entrywise
    magnitude bound; left as ``None`` it is derived from the family (it depends
    on ``n`` for the truncated Gaussian, so use :meth:`bound`).

    For ``bernoulli-centered`` the entries are ``Bern(p) - p`` with
    ``p = sigma**2``, and the bound is ``B = 1``.
    """

    family: str
    sigma: float
    b: float | None = None
    seed: int = 0

    def __post_init__(self):
        if self.family not in FAMILIES:
            raise ConfigError(f"unknown noise family {self.family!r}; expected one of {FAMILIES}")
        if not (self.sigma >= 0 and math.isfinite(self.sigma)):
            raise ConfigError(f"sigma must be finite and nonnegative, got {self.sigma}")
        if self.family == "bernoulli-centered" and self.sigma > 1:
            raise ConfigError("bernoulli-centered needs sigma**2 = p <= 1")
        if self.b is not None and self.b < self.sigma:
            raise ConfigError(f"magnitude bound b={self.b} is below sigma={self.sigma}")

    def natural_bound(self, n: int) -> float:
        s = self.sigma
        if self.family == "bounded-uniform":
            return s * math.sqrt(3.0)
        if self.family == "truncated-gaussian":
            return 5.0 * s * math.sqrt(math.log(n)) if n > 1 else 0.0
        if self.family == "rademacher-scaled":
            return s
        return 1.0 if s > 0 else 0.0

    def bound(self, n: int) -> float:
        nat = self.natural_bound(n)
        if self.b is None:
            return nat
        if self.b < nat:
            raise ConfigError(f"b={self.b} is smaller than the family bound {nat:.6g} at n={n}")
        return float(self.b)

    def with_seed(self, seed: int) -> "NoiseModel":
        return NoiseModel(self.family, self.sigma, self.b, seed)


def _draw(model: NoiseModel, rng: np.random.Generator, size: int, n: int) -> np.ndarray:
    s = model.sigma
    if model.family == "bounded-uniform":
        a = s * math.sqrt(3.0)
        return rng.uniform(-a, a, size)
    if model.family == "truncated-gaussian":
        x = rng.standard_normal(size) * s
        x[np.abs(x) > model.natural_bound(n)] = 0.0
        return x
    if model.family == "rademacher-scaled":
        return s * (2.0 * rng.integers(0, 2, size) - 1.0)
    p = s * s
    return (rng.random(size) < p).astype(float) - p


def sample_symmetric_noise(model: NoiseModel, n: int) -> np.ndarray:
    """Draw the lower triangle (diagonal included) i.i.d. and mirror it."""
    if n < 1:
        raise InputError(f"n must be >= 1, got {n}")
    e = np.zeros((n, n))
    if model.sigma == 0:
        return e
    rows, cols = np.tril_indices(n)
    vals = _draw(model, generator(model.seed, n), rows.size, n)
    e[rows, cols] = vals
    e[cols, rows] = vals
    return e


@dataclass(frozen=True)
class InstanceSpec:
    n: int
    r: int
    lambdas: tuple
    mu_target: float = 1.0
    noise: NoiseModel = field(default_factory=lambda: NoiseModel("rademacher-scaled", 0.0))
    seed: int = 0

    def __post_init__(self):
        lam = tuple(float(x) for x in np.atleast_1d(self.lambdas))
        object.__setattr__(self, "lambdas", lam)
        if not 1 <= self.r <= self.n:
            raise InputError(f"need 1 <= r <= n, got r={self.r}, n={self.n}")
        if len(lam) != self.r:
            raise InputError(f"expected {self.r} eigenvalues, got {len(lam)}")
        mags = np.abs(lam)
        if mags[-1] <= 0 or np.any(np.diff(mags) > 0):
            raise InputError("eigenvalues must be nonzero and nonincreasing in magnitude")
        if not 1.0 <= self.mu_target <= self.n / self.r * (1 + 1e-12):
            raise InputError(
                f"mu_target={self.mu_target} infeasible: must lie in [1, n/r={self.n / self.r:g}]"
            )

    @property
    def kappa(self) -> float:
        return abs(self.lambdas[0]) / abs(self.lambdas[-1])

    @property
    def lambda_r(self) -> float:
        return abs(self.lambdas[-1])

    @classmethod
    def from_condition(cls, n, r, lambda_r=1.0, kappa=1.0, mu_target=1.0, noise=None, seed=0):
        """Positive eigenvalues evenly spaced from ``kappa * lambda_r`` down to ``lambda_r``."""
        if kappa < 1:
            raise InputError(f"kappa must be >= 1, got {kappa}")
        if r == 1 and kappa != 1:
            raise InputError("rank one forces kappa = 1")
        lam = tuple(np.linspace(kappa * lambda_r, lambda_r, r))
        noise = noise if noise is not None else NoiseModel("rademacher-scaled", 0.0)
        return cls(n, r, lam, mu_target, noise, seed)


def _flat_frame(n: int, r: int, rng: np.random.Generator) -> np.ndarray | None:
    """Orthonormal n x r frame with every row norm equal to sqrt(r/n), or None."""
    npairs = r // 2
    freqs_available = (n - 1) // 2
    if npairs > freqs_available:
        return None
    j = np.arange(n)
    cols = []
    if r % 2:
        cols.append(np.full(n, 1.0 / math.sqrt(n)))
    freqs = np.sort(rng.choice(np.arange(1, freqs_available + 1), npairs, replace=False))
    for k in freqs:
        cols.append(math.sqrt(2.0 / n) * np.cos(2 * math.pi * k * j / n))
        cols.append(math.sqrt(2.0 / n) * np.sin(2 * math.pi * k * j / n))
    return np.column_stack(cols)


def _random_rotation(r: int, rng: np.random.Generator) -> np.ndarray:
    q, rr = np.linalg.qr(rng.standard_normal((r, r)))
    return q * np.sign(np.diag(rr))


def _polar(b: np.ndarray) -> np.ndarray:
    u, _, vt = np.linalg.svd(b, full_matrices=False)
    return u @ vt


def _mu(b: np.ndarray) -> float:
    n, r = b.shape
    return n * two_inf_norm(b) ** 2 / r


def incoherent_basis(n: int, r: int, mu_target: float, rng: np.random.Generator) -> np.ndarray:
    """Orthonormal basis whose incoherence is close to ``mu_target``.

    Starts from a flat harmonic frame (incoherence exactly one), scrambles it
    with a row permutation and an r x r rotation, then moves along the polar
    path toward a coordinate spike until the target is met.
    """
    spike = np.zeros((n, r))
    spike[np.arange(r), np.arange(r)] = 1.0
    if mu_target >= n / r * (1 - 1e-12):
        return spike
    flat = _flat_frame(n, r, rng)
    if flat is None:
        flat = _polar(rng.standard_normal((n, r)))
    if r == 1 and mu_target == 1.0:
        return flat
    flat = flat[rng.permutation(n)] @ _random_rotation(r, rng)
    if abs(_mu(flat) - mu_target) <= 1e-9 * mu_target:
        return flat
    spike = spike[rng.permutation(n)]
    # push toward the spike's own orientation so the path does not pass through rank loss
    spike = spike @ _polar(spike.T @ flat)

    def basis(t):
        return _polar((1 - t) * flat + t * spike)

    lo, hi = 0.0, 1.0
    if _mu(flat) > mu_target:
        return flat
    for _ in range(80):
        mid = 0.5 * (lo + hi)
        if _mu(basis(mid)) < mu_target:
            lo = mid
        else:
            hi = mid
    return basis(hi)


def make_ground_truth(spec: InstanceSpec):
    """Return ``(Mstar, Ustar, LambdaStar)`` with ``Mstar = U* diag(lambdas) U*^T``."""
    rng = generator(spec.seed, 0xB0A5)
    u = _sign_fix(incoherent_basis(spec.n, spec.r, spec.mu_target, rng))
    lam = np.asarray(spec.lambdas)
    mstar = as_symmetric((u * lam) @ u.T)
    return mstar, Subspace(u), lam


@dataclass(frozen=True)
class AssumptionReport:
    sigma_hat: float
    b_hat: float
    c_b: float
    c2_empirical: float
    holds_cb: bool


def assumption_report(e, model: NoiseModel, mu: float, cap_cb: float = 2.0) -> AssumptionReport:
    e = np.asarray(e, dtype=float)
    n = e.shape[0]
    if n < 2:
        raise InputError("assumption_report needs n >= 2")
    lower = e[np.tril_indices(n)]
    sigma_hat = float(np.sqrt(np.mean(lower**2)))
    b_hat = float(np.max(np.abs(e)))
    b = model.bound(n)
    sigma = model.sigma
    if sigma > 0:
        c_b = b / (sigma * math.sqrt(n / (mu * math.log(n))))
        c2 = float(np.max(np.abs(np.linalg.eigvalsh(e)))) / (sigma * math.sqrt(n))
    else:
        c_b, c2 = 0.0, 0.0
    return AssumptionReport(sigma_hat, b_hat, float(c_b), float(c2), bool(c_b <= cap_cb))


class SbmInstance(NamedTuple):
    a: np.ndarray
    m: np.ndarray
    mstar: np.ndarray
    xstar: np.ndarray


def _sbm_sample(n: int, p: float, q: float, seed: int) -> SbmInstance:
    rng = generator(seed, n, 0x5B)
    xstar = np.concatenate([np.ones(n // 2), -np.ones(n // 2)])
    probs = np.where(np.equal.outer(xstar, xstar), p, q)
    rows, cols = np.tril_indices(n, -1)
    edges = (rng.random(rows.size) < probs[rows, cols]).astype(float)
    a = np.zeros((n, n))
    a[rows, cols] = edges
    a[cols, rows] = edges
    m = a - 0.5 * (p + q) * np.ones((n, n)) + p * np.eye(n)
    mstar = 0.5 * (p - q) * np.outer(xstar, xstar)
    return SbmInstance(a, m, mstar, xstar)


def sbm_instance(n: int, p: float, q: float, seed: int) -> SbmInstance:
    """Two balanced communities; the first ``n/2`` nodes carry label +1."""
    if n < 2 or n % 2:
        raise InputError(f"n must be a positive even number, got {n}")
    if not 0 <= q < p <= 1:
        raise InputError(f"need 0 <= q < p <= 1, got p={p}, q={q}")
    return _sbm_sample(n, p, q, seed)


class CompletionInstance(NamedTuple):
    omega: np.ndarray
    m: np.ndarray


def completion_instance(mstar, p: float, seed: int) -> CompletionInstance:
    """Observe each entry with probability ``p`` and rescale the observed ones by ``1/p``."""
    if not 0 < p <= 1:
        raise InputError(f"sampling rate must lie in (0, 1], got {p}")
    mstar = np.asarray(mstar, dtype=float)
    omega = generator(seed, *mstar.shape, 0xC0).random(mstar.shape) < p
    return CompletionInstance(omega, np.where(omega, mstar / p, 0.0))


def hellinger_threshold(p: float, q: float, n: int) -> dict:
    if not 0 <= q <= p <= 1:
        raise InputError(f"need 0 <= q <= p <= 1, got p={p}, q={q}")
    if n < 2:
        raise InputError("n must be >= 2")
    h2 = (math.sqrt(p) - math.sqrt(q)) ** 2
    threshold = 2 * math.log(n) / n
    return {"h2": h2, "threshold": threshold, "ratio": h2 / threshold}
