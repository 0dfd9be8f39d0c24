"""Monte Carlo oracles: quaternion Gaussian and Wishart samplers, Haar
unitary sampling, empirical-distribution statistics, and stochastic checks
of the group-integral identities.

Randomness comes from numpy's counter-based Philox generator keyed by
(seed, stream_id), so distinct stream ids give independent streams and a
fixed pair reproduces draws bit-exactly.  Gaussian variates use numpy's
ziggurat implementation.

High-volume paths (extreme-eigenvalue sampling, the group-integral checks)
work on batched complex representations with numpy throughout; the
per-sample constructors return QMatrix values built on the same primitives.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .errors import DomainError
from .hypergeom import TruncationPolicy, pfq
from .qalg import QMatrix, hermitian_eigenvalues, qr_unitary
from .wishart import WishartParams
from .zonal import distinct_permutations, eval_zonal, get_table, zonal_at_identity

__all__ = [
    "RngStream",
    "EmpiricalCdf",
    "SplittingCheck",
    "GroupIntegralCheck",
    "sample_qnormal",
    "sample_wishart",
    "sample_haar_unitary",
    "wishart_extreme_eigenvalues",
    "wishart_trace_samples",
    "mc_splitting_check",
    "mc_0f1_check",
    "empirical_cdf",
    "ks_distance",
]

_MASK64 = (1 << 64) - 1


@dataclass(frozen=True)
class RngStream:
    """Deterministic stream identity for the Philox counter-based generator."""

    seed: int
    stream_id: int = 0

    def generator(self) -> np.random.Generator:
        key = np.array([self.seed & _MASK64, self.stream_id & _MASK64],
                       dtype=np.uint64)
        return np.random.Generator(np.random.Philox(key=key))

    def substream(self, offset: int) -> "RngStream":
        return RngStream(self.seed, (self.stream_id + offset) & _MASK64)


# -- batched quaternion component arithmetic ---------------------------------

def _qmul_arr(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    """Hamilton product on (..., 4) component arrays."""
    aw, ax, ay, az = (a[..., s] for s in range(4))
    bw, bx, by, bz = (b[..., s] for s in range(4))
    return np.stack([
        aw * bw - ax * bx - ay * by - az * bz,
        aw * bx + ax * bw + ay * bz - az * by,
        aw * by - ax * bz + ay * bw + az * bx,
        aw * bz + ax * by - ay * bx + az * bw,
    ], axis=-1)


def _qconj_arr(a: np.ndarray) -> np.ndarray:
    out = a.copy()
    out[..., 1:] *= -1.0
    return out


def _complex_rep_batch(arr: np.ndarray) -> np.ndarray:
    """(..., r, c, 4) components -> (..., 2r, 2c) complex representations."""
    b1 = arr[..., 0] + 1j * arr[..., 1]
    b2 = arr[..., 2] + 1j * arr[..., 3]
    top = np.concatenate([b1, -b2], axis=-1)
    bot = np.concatenate([np.conj(b2), np.conj(b1)], axis=-1)
    return np.concatenate([top, bot], axis=-2)


def _paired_eigs(herm: np.ndarray) -> np.ndarray:
    """Ascending m eigenvalues from batched 2m x 2m complex representations."""
    vals = np.linalg.eigvalsh(herm)
    return 0.5 * (vals[..., 0::2] + vals[..., 1::2])


def _qnormal_components(gen: np.random.Generator, shape: tuple[int, ...]) -> np.ndarray:
    # four iid N(0, 1/4) real components per quaternion entry
    return gen.normal(0.0, 0.5, size=shape + (4,))


def _haar_components(gen: np.random.Generator, count: int, m: int) -> np.ndarray:
    """Batched Haar unitaries via Gram-Schmidt of Gaussian columns, with the
    triangular factor's diagonal positive real by construction."""
    g = _qnormal_components(gen, (count, m, m))
    q = np.empty_like(g)
    for j in range(m):
        v = g[:, :, j, :].copy()
        for i in range(j):
            qi = q[:, :, i, :]
            r = _qmul_arr(_qconj_arr(qi), v).sum(axis=1)
            v -= _qmul_arr(qi, r[:, None, :])
        norm = np.sqrt((v ** 2).sum(axis=(1, 2)))
        if np.any(norm == 0.0):
            raise DomainError("degenerate Gaussian draw in Haar sampler")
        q[:, :, j, :] = v / norm[:, None, None]
    return q


def _zonal_batch(kappa, eig_rows: np.ndarray) -> np.ndarray:
    """C_kappa evaluated on each row of an (N, m) eigenvalue array."""
    m = eig_rows.shape[1]
    k = sum(kappa)
    table = get_table(k, min(m, max(k, 1)))
    ki = table.row_index(kappa)
    out = np.zeros(eig_rows.shape[0])
    row = table._rows[ki]
    for li, c in row.items():
        lam = table.partitions[li].parts
        if len(lam) > m:
            continue
        pad = lam + (0,) * (m - len(lam))
        mono = np.zeros(eig_rows.shape[0])
        for perm in distinct_permutations(pad):
            mono += np.prod(eig_rows ** np.asarray(perm), axis=1)
        out += float(c) * mono
    return out


# -- samplers ----------------------------------------------------------------

def sample_qnormal(rows: int, cols: int, rng: RngStream) -> QMatrix:
    """Quaternion Gaussian matrix: each entry has four iid N(0, 1/4) components."""
    if rows < 1 or cols < 1:
        raise DomainError("matrix dimensions must be positive")
    return QMatrix(_qnormal_components(rng.generator(), (rows, cols)))


def sample_wishart(p: WishartParams, rng: RngStream) -> QMatrix:
    """One draw of W = Y^H Y with Y = X T, Sigma = T^H T, X standard Gaussian."""
    x = sample_qnormal(p.n, p.m, rng)
    y = x @ p.sigma_cholesky
    return y.H @ y


def sample_haar_unitary(m: int, rng: RngStream) -> QMatrix:
    """Haar-distributed quaternionic unitary via QR of a Gaussian matrix."""
    return qr_unitary(sample_qnormal(m, m, rng))


def wishart_extreme_eigenvalues(
    p: WishartParams, count: int, rng: RngStream
) -> tuple[np.ndarray, np.ndarray]:
    """(lambda_max, lambda_min) samples, vectorized over a batch of draws."""
    if count < 1:
        raise DomainError("sample count must be positive")
    gen = rng.generator()
    t_rep = p.sigma_cholesky.complex_rep()
    lmax = np.empty(count)
    lmin = np.empty(count)
    chunk = 50_000
    done = 0
    while done < count:
        take = min(chunk, count - done)
        x = _qnormal_components(gen, (take, p.n, p.m))
        y_rep = _complex_rep_batch(x) @ t_rep
        w_rep = np.conj(np.transpose(y_rep, (0, 2, 1))) @ y_rep
        eigs = _paired_eigs(w_rep)
        lmax[done:done + take] = eigs[:, -1]
        lmin[done:done + take] = eigs[:, 0]
        done += take
    return lmax, lmin


def wishart_trace_samples(p: WishartParams, count: int, rng: RngStream) -> np.ndarray:
    """tr W samples; tr(Y^H Y) is the squared Frobenius norm of Y."""
    if count < 1:
        raise DomainError("sample count must be positive")
    gen = rng.generator()
    t_rep = p.sigma_cholesky.complex_rep()
    out = np.empty(count)
    chunk = 50_000
    done = 0
    while done < count:
        take = min(chunk, count - done)
        x = _qnormal_components(gen, (take, p.n, p.m))
        y_rep = _complex_rep_batch(x) @ t_rep
        # |Y|_F^2 = (1/2) |Y^sigma|_F^2
        out[done:done + take] = 0.5 * (np.abs(y_rep) ** 2).sum(axis=(1, 2))
        done += take
    return out


# -- stochastic identity checks ----------------------------------------------

@dataclass(frozen=True)
class SplittingCheck:
    mc_mean: float
    analytic: float
    stderr: float


@dataclass(frozen=True)
class GroupIntegralCheck:
    mc_mean: float
    analytic: float
    stderr: float


def mc_splitting_check(
    eigs_x: Sequence[float],
    eigs_y: Sequence[float],
    kappa,
    n_samples: int,
    rng: RngStream,
) -> SplittingCheck:
    """Monte Carlo test of the Haar average of C_kappa(X1 H X2 H^H).

    The average over Haar unitaries equals C_kappa(X1) C_kappa(X2) / C_kappa(I_m).
    X1 must be positive definite so the symmetrized product is Hermitian.
    """
    m = len(eigs_x)
    if len(eigs_y) != m:
        raise DomainError("eigenvalue tuples must have equal length")
    if any(v <= 0 for v in eigs_x):
        raise DomainError("eigs_x must be positive (X1 positive definite)")
    if n_samples < 2:
        raise DomainError("need at least two samples")
    kappa = tuple(kappa)
    gen = rng.generator()
    h = _haar_components(gen, n_samples, m)
    h_rep = _complex_rep_batch(h)
    sx = np.sqrt(np.concatenate([eigs_x, eigs_x]))
    dy = np.concatenate([eigs_y, eigs_y])
    inner = h_rep * dy[None, None, :]  # H diag(Y)
    inner = inner @ np.conj(np.transpose(h_rep, (0, 2, 1)))
    z_rep = sx[None, :, None] * inner * sx[None, None, :]
    eig_rows = _paired_eigs(z_rep)
    values = _zonal_batch(kappa, eig_rows)
    mc_mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n_samples))

    k = sum(kappa)
    table = get_table(k, min(m, max(k, 1)))
    analytic = (eval_zonal(table, kappa, list(eigs_x))
                * eval_zonal(table, kappa, list(eigs_y))
                / float(zonal_at_identity(table, kappa, m)))
    return SplittingCheck(mc_mean, analytic, stderr)


def mc_0f1_check(
    x: QMatrix,
    n_samples: int,
    rng: RngStream,
    policy: TruncationPolicy | None = None,
) -> GroupIntegralCheck:
    """Monte Carlo test of the Haar average of exp(4 Retr(X H1)).

    For X of shape m x n (m <= n) and H1 the first m columns of a Haar
    unitary on n, the average equals 0F1(2n; 4 X X^H).
    """
    m, n = x.shape
    if m > n:
        raise DomainError(f"need m <= n, got shape {x.shape}")
    if n_samples < 2:
        raise DomainError("need at least two samples")
    gen = rng.generator()
    h = _haar_components(gen, n_samples, n)
    h1_rep = _complex_rep_batch(h[:, :, :m, :])
    x_rep = x.complex_rep()
    prod = x_rep[None, :, :] @ h1_rep
    retr = 0.5 * np.real(np.trace(prod, axis1=1, axis2=2))
    values = np.exp(4.0 * retr)
    mc_mean = float(values.mean())
    stderr = float(values.std(ddof=1) / math.sqrt(n_samples))

    gram = x @ x.H
    spec = hermitian_eigenvalues(gram)
    analytic = pfq([], [2 * n], [4.0 * v for v in spec.values], policy).value
    return GroupIntegralCheck(mc_mean, analytic, stderr)


# -- empirical distribution utilities ----------------------------------------

@dataclass(frozen=True)
class EmpiricalCdf:
    sorted_samples: np.ndarray
    n: int

    def __call__(self, x: float) -> float:
        return float(np.searchsorted(self.sorted_samples, x, side="right")) / self.n


def empirical_cdf(samples: Sequence[float]) -> EmpiricalCdf:
    arr = np.sort(np.asarray(samples, dtype=float))
    if arr.size == 0:
        raise DomainError("empirical_cdf requires at least one sample")
    return EmpiricalCdf(arr, int(arr.size))


def ks_distance(e: EmpiricalCdf, cdf: Callable[[float], float]) -> float:
    """Kolmogorov-Smirnov sup distance between an empirical and an analytic CDF.

    Tie-aware: at each distinct sample value the empirical CDF is compared
    from the right, and its left limit against the analytic CDF evaluated
    just below the value (so step-function references are handled exactly).
    """
    values, counts = np.unique(e.sorted_samples, return_counts=True)
    hi = np.cumsum(counts) / e.n
    lo = hi - counts / e.n
    d = 0.0
    for v, l, h in zip(values, lo, hi):
        f_at = cdf(float(v))
        f_below = cdf(float(np.nextafter(v, -np.inf)))
        d = max(d, abs(h - f_at), abs(l - f_below))
    return float(d)
