"""Quaternion central Wishart densities and the analytic distributions of
their extreme eigenvalues.

Conventions: W = Y^H Y for Y an n x m quaternion Gaussian matrix whose
entries have four real components of variance 1/4 each, with column
covariance Sigma.  Determinants of Hermitian matrices are Moore
determinants (products of eigenvalues).

P(W < Delta) is a 1F1 of matrix argument; P(W > Delta) is a finite sum over
partitions whose first part is bounded by 2n - 2m + 1.  Matrix arguments
enter through the eigenvalues of the symmetrized product T^{-H} Delta T^{-1}
with Sigma = T^H T, which has the spectrum of Sigma^{-1} Delta but is
Hermitian.  When both Sigma and Delta are exact multiples of the identity,
series are accumulated in exact rational arithmetic, which keeps the deeply
alternating 1F1 argument well conditioned at any grid point.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .errors import DomainError, TruncationError
from .hypergeom import (
    DEFAULT_POLICY,
    HypergeomResult,
    TruncationPolicy,
    _sum_layers,
    pfq_layers,
)
from .partitions import BigRational, EXACT_TYPES, qgamma_log
from .qalg import QMatrix, cholesky, hermitian_eigenvalues, qinverse
from .zonal import eval_zonal, eval_zonal_rational, get_table

__all__ = [
    "WishartParams",
    "EigDensityParams",
    "isotropic_params",
    "wishart_logpdf",
    "joint_eig_logpdf",
    "prob_less",
    "prob_greater",
    "lambda_max_cdf",
    "lambda_min_sf",
    "lambda_max_pdf",
    "lambda_min_pdf",
    "lambda_max_cdf_grid",
    "lambda_max_pdf_grid",
]


@dataclass(frozen=True)
class WishartParams:
    """Dimension m, degrees of freedom n >= m, and Hermitian pd scale Sigma."""

    m: int
    n: int
    sigma: QMatrix
    _chol: QMatrix = field(init=False, repr=False, compare=False)

    def __post_init__(self):
        if self.m < 1:
            raise DomainError(f"dimension must be positive, got {self.m}")
        if self.n < self.m:
            raise DomainError(f"need n >= m, got n = {self.n}, m = {self.m}")
        if self.sigma.shape != (self.m, self.m):
            raise DomainError(
                f"sigma must be {self.m}x{self.m}, got {self.sigma.shape}")
        object.__setattr__(self, "_chol", cholesky(self.sigma))

    @property
    def sigma_cholesky(self) -> QMatrix:
        """Upper-triangular T with Sigma = T^H T."""
        return self._chol


@dataclass(frozen=True)
class EigDensityParams:
    """Isotropic-case (Sigma = sigma2 * I) joint eigenvalue density parameters."""

    m: int
    n: int
    sigma2: float

    def __post_init__(self):
        if self.m < 1 or self.n < self.m:
            raise DomainError(f"need n >= m >= 1, got n = {self.n}, m = {self.m}")
        if not self.sigma2 > 0:
            raise DomainError(f"sigma2 must be positive, got {self.sigma2}")


def isotropic_params(m: int, n: int, sigma2: float = 1.0) -> WishartParams:
    """WishartParams with Sigma = sigma2 * I_m."""
    if not sigma2 > 0:
        raise DomainError(f"sigma2 must be positive, got {sigma2}")
    return WishartParams(m, n, QMatrix.diag([sigma2] * m))


def _scalar_multiple_of_identity(a: QMatrix):
    """The scalar c when a == c*I exactly (componentwise), else None."""
    m = a.rows
    if m == 0 or a.cols != m:
        return None
    comp = a.components
    c = comp[0, 0, 0]
    expected = np.zeros((m, m, 4))
    for i in range(m):
        expected[i, i, 0] = c
    return float(c) if np.array_equal(comp, expected) else None


def _log_moore_det_pd(a: QMatrix) -> float:
    spec = hermitian_eigenvalues(a)
    if any(v <= 0 for v in spec.values):
        raise DomainError("matrix is not positive definite")
    return sum(math.log(v) for v in spec.values)


def _whitened_eigs(delta: QMatrix, p: WishartParams, scale):
    """Eigenvalues of scale * Sigma^{-1} Delta.

    Exact rationals on the isotropic fast path, floats otherwise.
    """
    if delta.shape != (p.m, p.m):
        raise DomainError(f"delta must be {p.m}x{p.m}, got {delta.shape}")
    s = _scalar_multiple_of_identity(p.sigma)
    d = _scalar_multiple_of_identity(delta)
    if s is not None and d is not None:
        if d <= 0:
            raise DomainError("delta must be positive definite")
        ratio = scale * BigRational(d) / BigRational(s)
        return [ratio] * p.m
    t_inv = qinverse(p.sigma_cholesky)
    sym = t_inv.H @ delta @ t_inv
    spec = hermitian_eigenvalues(sym)
    if any(v <= 0 for v in spec.values):
        raise DomainError("delta must be positive definite")
    return [float(scale) * v for v in spec.values]


def wishart_logpdf(w: QMatrix, p: WishartParams) -> float:
    """Log density of the quaternion central Wishart matrix at w."""
    if w.shape != (p.m, p.m):
        raise DomainError(f"w must be {p.m}x{p.m}, got {w.shape}")
    spec = hermitian_eigenvalues(w)
    if any(v <= 0 for v in spec.values):
        raise DomainError("w must be positive definite")
    m, n = p.m, p.n
    log_det_w = sum(math.log(v) for v in spec.values)
    log_det_sigma = _log_moore_det_pd(p.sigma)
    sigma_inv = qinverse(p.sigma)
    quad = (sigma_inv @ w).retr()
    return (2 * m * n * math.log(2.0)
            - qgamma_log(m, 2 * n)
            - 2 * n * log_det_sigma
            - 2.0 * quad
            + (2 * n - 2 * m + 1) * log_det_w)


def joint_eig_logpdf(lams: Sequence[float], p: EigDensityParams,
                     printed_rate: bool = False) -> float:
    """Log joint density of the ordered eigenvalues in the isotropic case.

    The exponential rate is 2/sigma2, as implied by the matrix density; the
    alternative rate 1/(2 sigma2) that appears in the printed form of the
    joint density fails both the m = 1 reduction and the normalization
    check, and is kept only behind the printed_rate debug flag.
    """
    m, n = p.m, p.n
    lams = [float(v) for v in lams]
    if len(lams) != m:
        raise DomainError(f"expected {m} eigenvalues, got {len(lams)}")
    for a, b in zip(lams, lams[1:]):
        if not a > b:
            raise DomainError("eigenvalues must be strictly descending")
    if lams[-1] <= 0:
        raise DomainError("eigenvalues must be positive")
    rate = 1.0 / (2.0 * p.sigma2) if printed_rate else 2.0 / p.sigma2
    logv = (2 * m * n * math.log(2.0)
            + (2 * m * m - 2 * m) * math.log(math.pi)
            - qgamma_log(m, 2 * m)
            - qgamma_log(m, 2 * n)
            - 2 * n * m * math.log(p.sigma2))
    logv += (2 * n - 2 * m + 1) * sum(math.log(v) for v in lams)
    for i in range(m):
        for j in range(i + 1, m):
            logv += 4.0 * math.log(lams[i] - lams[j])
    logv -= rate * sum(lams)
    return logv


def _prob_less_prefactor_log(delta: QMatrix, p: WishartParams) -> float:
    m, n = p.m, p.n
    return (2 * m * n * math.log(2.0)
            + qgamma_log(m, 2 * m - 1)
            - qgamma_log(m, 2 * n + 2 * m - 1)
            + 2 * n * (_log_moore_det_pd(delta) - _log_moore_det_pd(p.sigma)))


def prob_less(delta: QMatrix, p: WishartParams,
              policy: TruncationPolicy | None = None) -> HypergeomResult:
    """P(W < Delta), i.e. probability that Delta - W is positive definite."""
    policy = policy or DEFAULT_POLICY
    eigs = _whitened_eigs(delta, p, -2)
    m, n = p.m, p.n
    layers, degree_used, converged, last = pfq_layers(
        [2 * n], [2 * n + 2 * m - 1], eigs, policy)
    series = _sum_layers(layers)
    value = math.exp(_prob_less_prefactor_log(delta, p)) * series
    return HypergeomResult(value, degree_used, converged, last)


def prob_greater(delta: QMatrix, p: WishartParams) -> float:
    """P(W > Delta): the finite sum over partitions with k_1 <= 2n - 2m + 1."""
    eigs = _whitened_eigs(delta, p, 2)
    m, n = p.m, p.n
    cap = 2 * n - 2 * m + 1
    exact = isinstance(eigs[0], EXACT_TYPES)
    total = BigRational(1) if exact else 1.0
    for k in range(1, m * cap + 1):
        table = get_table(k, min(m, k))
        kfact = math.factorial(k)
        for kappa in table.partitions:
            if kappa[0] > cap:
                continue
            if exact:
                total += eval_zonal_rational(table, kappa, eigs) / kfact
            else:
                total += eval_zonal(table, kappa, eigs) / kfact
    trace = sum(eigs)
    return float(total) * math.exp(-float(trace))


def lambda_max_cdf(x: float, p: WishartParams,
                   policy: TruncationPolicy | None = None) -> HypergeomResult:
    """P(lambda_max < x), via P(W < x I_m)."""
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    return prob_less(QMatrix.diag([x] * p.m), p, policy)


def lambda_min_sf(x: float, p: WishartParams) -> float:
    """P(lambda_min > x), via P(W > x I_m); exactly 1 at x = 0."""
    if x < 0:
        raise DomainError(f"x must be nonnegative, got {x}")
    if x == 0:
        return 1.0
    return prob_greater(QMatrix.diag([x] * p.m), p)


def lambda_max_pdf(x: float, p: WishartParams,
                   policy: TruncationPolicy | None = None) -> float:
    """Density of lambda_max: term-wise derivative of the CDF series.

    The degree-k layer of the 1F1 argument -2x Sigma^{-1} is homogeneous of
    degree k in x, so the CDF is x^{2mn} times a power series in x and each
    retained term differentiates in closed form.
    """
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    policy = policy or DEFAULT_POLICY
    m, n = p.m, p.n
    delta = QMatrix.diag([x] * m)
    eigs = _whitened_eigs(delta, p, -2)
    layers, _, _, _ = pfq_layers([2 * n], [2 * n + 2 * m - 1], eigs, policy)
    if layers and isinstance(layers[0], EXACT_TYPES):
        series = float(sum((2 * m * n + k) * layer for k, layer in enumerate(layers)))
    else:
        series = _sum_layers([(2 * m * n + k) * layer for k, layer in enumerate(layers)])
    return math.exp(_prob_less_prefactor_log(delta, p)) * series / x


def _unit_layer_coefficients(p: WishartParams, max_degree: int):
    """Layer sums of the CDF series at the unit argument (eigenvalues of
    -2 Sigma^{-1}); the degree-k layer at x is x^k times these."""
    from .hypergeom import _layer_sum
    from .partitions import EXACT_TYPES

    m, n = p.m, p.n
    unit = _whitened_eigs(QMatrix.identity(m), p, -2)
    exact = isinstance(unit[0], EXACT_TYPES)
    coeffs = []
    for k in range(max_degree + 1):
        table = get_table(k, min(m, max(k, 1)))
        coeffs.append(_layer_sum(k, table, [2 * n], [2 * n + 2 * m - 1],
                                 unit, None, exact))
    return coeffs, exact


def _grid_series(coeffs, exact, x, policy: TruncationPolicy, weights=None):
    """Apply the truncation policy to sum_k w_k c_k x^k at one grid point."""
    xr = BigRational(x) if exact else float(x)
    running = BigRational(0) if exact else 0.0
    below = 0
    converged = False
    degree_used = 0
    last = 0.0
    power = BigRational(1) if exact else 1.0
    for k, c in enumerate(coeffs):
        term = c * power if weights is None else weights[k] * c * power
        running = running + term
        power = power * xr
        degree_used = k
        last = abs(float(term))
        if k >= 1:
            if last <= policy.layer_tol * abs(float(running)):
                below += 1
                if below >= 2:
                    converged = True
                    break
            else:
                below = 0
    if not converged and policy.hard_fail_on_cap:
        raise TruncationError(
            f"grid series did not converge within degree cap {policy.max_degree} at x = {x}"
        )
    return float(running), degree_used, converged, last


def lambda_max_cdf_grid(xs: Sequence[float], p: WishartParams,
                        policy: TruncationPolicy | None = None) -> list[HypergeomResult]:
    """P(lambda_max < x) over a grid, reusing one set of layer coefficients."""
    policy = policy or DEFAULT_POLICY
    coeffs, exact = _unit_layer_coefficients(p, policy.max_degree)
    m, n = p.m, p.n
    log_sigma = _log_moore_det_pd(p.sigma)
    base = (2 * m * n * math.log(2.0) + qgamma_log(m, 2 * m - 1)
            - qgamma_log(m, 2 * n + 2 * m - 1) - 2 * n * log_sigma)
    out = []
    for x in xs:
        if not x > 0:
            raise DomainError(f"grid values must be positive, got {x}")
        series, degree_used, converged, last = _grid_series(coeffs, exact, x, policy)
        value = math.exp(base + 2 * m * n * math.log(x)) * series
        out.append(HypergeomResult(value, degree_used, converged, last))
    return out


def lambda_max_pdf_grid(xs: Sequence[float], p: WishartParams,
                        policy: TruncationPolicy | None = None) -> list[HypergeomResult]:
    """Density of lambda_max over a grid, from the same layer coefficients."""
    policy = policy or DEFAULT_POLICY
    coeffs, exact = _unit_layer_coefficients(p, policy.max_degree)
    m, n = p.m, p.n
    weights = [2 * m * n + k for k in range(len(coeffs))]
    log_sigma = _log_moore_det_pd(p.sigma)
    base = (2 * m * n * math.log(2.0) + qgamma_log(m, 2 * m - 1)
            - qgamma_log(m, 2 * n + 2 * m - 1) - 2 * n * log_sigma)
    out = []
    for x in xs:
        if not x > 0:
            raise DomainError(f"grid values must be positive, got {x}")
        series, degree_used, converged, last = _grid_series(
            coeffs, exact, x, policy, weights=weights)
        value = math.exp(base + (2 * m * n - 1) * math.log(x)) * series
        out.append(HypergeomResult(value, degree_used, converged, last))
    return out


def lambda_min_pdf(x: float, p: WishartParams) -> float:
    """Density of lambda_min: minus the closed-form derivative of the survival sum."""
    if not x > 0:
        raise DomainError(f"x must be positive, got {x}")
    m, n = p.m, p.n
    unit = _whitened_eigs(QMatrix.identity(m), p, 2)
    exact = isinstance(unit[0], EXACT_TYPES)
    xr = BigRational(x) if exact else float(x)
    cap = 2 * n - 2 * m + 1
    poly = BigRational(1) if exact else 1.0   # sum_k A_k x^k
    dpoly = BigRational(0) if exact else 0.0  # sum_k k A_k x^{k-1}
    for k in range(1, m * cap + 1):
        table = get_table(k, min(m, k))
        kfact = math.factorial(k)
        a_k = BigRational(0) if exact else 0.0
        for kappa in table.partitions:
            if kappa[0] > cap:
                continue
            if exact:
                a_k += eval_zonal_rational(table, kappa, unit) / kfact
            else:
                a_k += eval_zonal(table, kappa, unit) / kfact
        poly += a_k * xr ** k
        dpoly += k * a_k * xr ** (k - 1)
    s = sum(unit)
    return math.exp(-float(s) * float(x)) * float(s * poly - dpoly)
