"""Truncated hypergeometric functions of (quaternion) matrix argument.

The one-matrix series sums, over all partitions kappa of each degree k,
the Pochhammer ratio prod (a_i)_kappa / prod (b_j)_kappa times
C_kappa(eigs) / k!; the two-matrix variant carries C_kappa(X) C_kappa(Y) /
C_kappa(I_m) instead.  Layers (fixed total degree k) are summed in table
order with compensated summation, so identical inputs give bit-identical
results.

Convergence domains follow the classical trichotomy: p <= q converges for
every argument, p = q + 1 requires spectral radius below one, and p > q + 1
is accepted only when some numerator parameter is a nonpositive integer,
which terminates the series.

When every parameter and eigenvalue is an int or rational, the accumulation
is carried out in exact rational arithmetic and only the final value is
rounded; this is what keeps deep alternating series (large negative
arguments) to full precision.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .errors import DivergenceError, DomainError, TruncationError
from .partitions import BigRational, EXACT_TYPES, gen_pochhammer
from .zonal import ZonalTable, get_table, monomial_value

__all__ = [
    "TruncationPolicy",
    "HypergeomResult",
    "DEFAULT_POLICY",
    "pfq",
    "pfq_layers",
    "pfq_two",
    "one_f_zero_closed",
    "etr",
]


@dataclass(frozen=True)
class TruncationPolicy:
    """Degree cap and layer-sum stopping rule for the infinite series."""

    max_degree: int = 60
    layer_tol: float = 1e-12
    hard_fail_on_cap: bool = True

    def __post_init__(self):
        if self.max_degree < 0:
            raise DomainError("max_degree must be nonnegative")
        if not self.layer_tol > 0:
            raise DomainError("layer_tol must be positive")


DEFAULT_POLICY = TruncationPolicy()


@dataclass(frozen=True)
class HypergeomResult:
    value: float
    degree_used: int
    converged: bool
    last_layer_magnitude: float


class _NeumaierSum:
    """Compensated accumulator for mixed-sign float series."""

    __slots__ = ("_s", "_c")

    def __init__(self):
        self._s = 0.0
        self._c = 0.0

    def add(self, x: float) -> None:
        t = self._s + x
        if abs(self._s) >= abs(x):
            self._c += (self._s - t) + x
        else:
            self._c += (x - t) + self._s
        self._s = t

    @property
    def value(self) -> float:
        return self._s + self._c


def _is_exact(values) -> bool:
    return all(isinstance(v, EXACT_TYPES) for v in values)


def _nonpositive_integer(a) -> bool:
    if isinstance(a, int):
        return a <= 0
    if isinstance(a, EXACT_TYPES):
        return a <= 0 and a.denominator == 1
    return a <= 0 and float(a).is_integer()


def _check_domain(a_params, b_params, eigs) -> int | None:
    """Validate the convergence trichotomy; returns the terminating degree
    bound (exclusive of higher layers) or None when the series is infinite."""
    p, q = len(a_params), len(b_params)
    m = len(eigs)
    radius = max((abs(float(e)) for e in eigs), default=0.0)
    terminating = [int(-a) for a in a_params if _nonpositive_integer(a)]
    if terminating:
        # survivors need k_1 <= -a_i, so total degree is capped at m * (-a_i)
        return m * min(terminating)
    if p > q + 1:
        raise DivergenceError(
            f"series with p = {p} > q + 1 = {q + 1} diverges unless it terminates"
        )
    if p == q + 1 and radius >= 1.0:
        raise DivergenceError(
            f"series with p = q + 1 requires spectral radius < 1, got {radius}"
        )
    return None


def _layer_sum(k: int, table: ZonalTable, a_params, b_params, eigs, eigs_y, exact):
    """Sum over all partitions of k; exact rational or compensated float."""
    kfact = math.factorial(k)
    m = len(eigs)
    if exact:
        eigs = [e if isinstance(e, EXACT_TYPES) else BigRational(e) for e in eigs]
        mono = [monomial_value(lam, eigs) for lam in table.partitions]
        if eigs_y is not None:
            eigs_y = [e if isinstance(e, EXACT_TYPES) else BigRational(e) for e in eigs_y]
            mono_y = [monomial_value(lam, eigs_y) for lam in table.partitions]
            ident = table.identity_vector(m)
        total = BigRational(0)
        for ki, kappa in enumerate(table.partitions):
            cx = sum((c * mono[li] for li, c in table._rows[ki].items()
                      if mono[li] != 0), BigRational(0))
            if cx == 0:
                continue
            if eigs_y is not None:
                cy = sum((c * mono_y[li] for li, c in table._rows[ki].items()
                          if mono_y[li] != 0), BigRational(0))
                if cy == 0:
                    continue
                cx = cx * cy / ident[ki]
            num = BigRational(1)
            for a in a_params:
                num *= gen_pochhammer(a, kappa)
            if num == 0:
                continue
            den = BigRational(kfact)
            for b in b_params:
                pb = gen_pochhammer(b, kappa)
                if pb == 0:
                    raise DomainError(
                        f"denominator parameter {b} has a Pochhammer zero at kappa = {kappa.parts}"
                    )
                den *= pb
            total += num * cx / den
        return total
    # float path
    feigs = [float(e) for e in eigs]
    mono = np.array([float(monomial_value(lam, feigs)) for lam in table.partitions])
    cvec = table.float_matrix() @ mono
    if eigs_y is not None:
        feigs_y = [float(e) for e in eigs_y]
        mono_y = np.array([float(monomial_value(lam, feigs_y)) for lam in table.partitions])
        cvec_y = table.float_matrix() @ mono_y
        ident = table.identity_vector(m)
    fa = [float(a) for a in a_params]
    fb = [float(b) for b in b_params]
    acc = _NeumaierSum()
    for ki, kappa in enumerate(table.partitions):
        cx = cvec[ki]
        if cx == 0.0:
            continue
        if eigs_y is not None:
            cx = cx * cvec_y[ki] / float(ident[ki])
        num = 1.0
        for a in fa:
            num *= gen_pochhammer(a, kappa)
        if num == 0.0:
            continue
        den = float(kfact)
        for b in fb:
            pb = gen_pochhammer(b, kappa)
            if pb == 0.0:
                raise DomainError(
                    f"denominator parameter {b} has a Pochhammer zero at kappa = {kappa.parts}"
                )
            den *= pb
        acc.add(num * cx / den)
    return acc.value


def pfq_layers(
    a_params: Sequence,
    b_params: Sequence,
    eigs: Sequence,
    policy: TruncationPolicy | None = None,
    eigs_y: Sequence | None = None,
):
    """Degree-layer sums of the series, with the convergence verdict.

    Returns (layers, degree_used, converged, last_layer_magnitude); the
    series value is the sum of layers.  Layers are exact rationals when all
    inputs are exact.
    """
    policy = policy or DEFAULT_POLICY
    if len(eigs) < 1:
        raise DomainError("at least one eigenvalue is required")
    if eigs_y is not None and len(eigs_y) != len(eigs):
        raise DomainError(
            f"two-matrix series needs equal lengths, got {len(eigs)} and {len(eigs_y)}"
        )
    term_bound = _check_domain(a_params, b_params, eigs)
    m = len(eigs)
    exact = (_is_exact(a_params) and _is_exact(b_params) and _is_exact(eigs)
             and (eigs_y is None or _is_exact(eigs_y)))

    if max((abs(float(e)) for e in eigs), default=0.0) == 0.0:
        one = BigRational(1) if exact else 1.0
        return [one], 0, True, 0.0

    layers = []
    running = BigRational(0) if exact else 0.0
    below = 0
    converged = False
    degree_used = 0
    for k in range(policy.max_degree + 1):
        if term_bound is not None and k > term_bound:
            converged = True
            break
        table = get_table(k, min(m, max(k, 1)))
        layer = _layer_sum(k, table, a_params, b_params, eigs, eigs_y, exact)
        if not exact and not math.isfinite(layer):
            raise TruncationError(
                f"float overflow in degree-{k} layer; use exact rational inputs"
            )
        layers.append(layer)
        running = running + layer
        degree_used = k
        if k >= 1:
            if abs(float(layer)) <= policy.layer_tol * abs(float(running)):
                below += 1
                if below >= 2:
                    converged = True
                    break
            else:
                below = 0
    last_mag = abs(float(layers[-1])) if layers else 0.0
    if not converged and policy.hard_fail_on_cap:
        raise TruncationError(
            f"series did not converge within degree cap {policy.max_degree} "
            f"(last layer magnitude {last_mag:.3e})"
        )
    return layers, degree_used, converged, last_mag


def _sum_layers(layers) -> float:
    if layers and isinstance(layers[0], EXACT_TYPES):
        return float(sum(layers))
    acc = _NeumaierSum()
    for x in layers:
        acc.add(x)
    return acc.value


def pfq(
    a_params: Sequence,
    b_params: Sequence,
    eigs: Sequence,
    policy: TruncationPolicy | None = None,
) -> HypergeomResult:
    """pFq of one matrix argument, given by its eigenvalues."""
    layers, degree_used, converged, last = pfq_layers(a_params, b_params, eigs, policy)
    return HypergeomResult(_sum_layers(layers), degree_used, converged, last)


def pfq_two(
    a_params: Sequence,
    b_params: Sequence,
    eigs_x: Sequence,
    eigs_y: Sequence,
    policy: TruncationPolicy | None = None,
) -> HypergeomResult:
    """Two-matrix pFq, with layers weighted by C_kappa(X) C_kappa(Y) / C_kappa(I_m)."""
    layers, degree_used, converged, last = pfq_layers(
        a_params, b_params, eigs_x, policy, eigs_y=eigs_y)
    return HypergeomResult(_sum_layers(layers), degree_used, converged, last)


def one_f_zero_closed(a: float, eigs: Sequence[float]) -> float:
    """Closed form of the p=1, q=0 series: prod_i (1 - z_i)^{-a}."""
    m = len(eigs)
    radius = max((abs(float(e)) for e in eigs), default=0.0)
    if radius >= 1.0:
        raise DomainError(f"closed form requires spectral radius < 1, got {radius}")
    if float(a) <= 2 * (m - 1):
        raise DomainError(f"closed form requires a > 2(m-1) = {2 * (m - 1)}")
    out = 1.0
    for z in eigs:
        out *= (1.0 - float(z)) ** (-float(a))
    return out


def etr(eigs: Sequence[float]) -> float:
    """exp of the trace, the p = q = 0 series in closed form."""
    return math.exp(math.fsum(float(e) for e in eigs))
