"""Integer partitions, their lexicographic order, and partition-indexed
special values: the eigenvalue shift rho, generalized Pochhammer symbols,
and quaternion multivariate gamma functions.

A partition of k is a weakly decreasing tuple of positive integers summing
to k; trailing zeros are trimmed on construction.  Partitions of equal
weight are ordered lexicographically: kappa > lambda when the first unequal
part of kappa is the larger one.
"""

from __future__ import annotations

import math
from collections import Counter
from fractions import Fraction
from typing import Iterable, Sequence

from .errors import DomainError

try:  # exact-arithmetic backend: gmpy2 is much faster on large rationals
    from gmpy2 import mpq as BigRational
except ImportError:  # pragma: no cover
    BigRational = Fraction

#: Types whose arithmetic is exact; anything else falls back to float.
EXACT_TYPES = (int, Fraction, type(BigRational(1)))


class Partition:
    """Immutable weakly decreasing tuple of nonnegative integers.

    Indexing is padded: ``p[i]`` returns 0 beyond the last nonzero part,
    which keeps formulas that sum over a fixed number of positions simple.
    """

    __slots__ = ("_parts",)

    def __init__(self, parts: Iterable[int] = ()):
        parts = tuple(int(x) for x in parts)
        n = len(parts)
        while n and parts[n - 1] == 0:
            n -= 1
        parts = parts[:n]
        for a, b in zip(parts, parts[1:]):
            if a < b:
                raise DomainError(f"parts must be weakly decreasing, got {parts}")
        if parts and parts[-1] < 0:
            raise DomainError(f"parts must be nonnegative, got {parts}")
        self._parts = parts

    @property
    def parts(self) -> tuple[int, ...]:
        return self._parts

    @property
    def weight(self) -> int:
        return sum(self._parts)

    def __len__(self) -> int:
        return len(self._parts)

    def __getitem__(self, i: int) -> int:
        return self._parts[i] if 0 <= i < len(self._parts) else 0

    def __iter__(self):
        return iter(self._parts)

    def __eq__(self, other) -> bool:
        if isinstance(other, Partition):
            return self._parts == other._parts
        if isinstance(other, tuple):
            return self._parts == other
        return NotImplemented

    def __hash__(self) -> int:
        return hash(self._parts)

    def __repr__(self) -> str:
        return f"Partition({self._parts!r})"

    def padded(self, length: int) -> tuple[int, ...]:
        if length < len(self._parts):
            raise DomainError(f"cannot pad {self._parts} to length {length}")
        return self._parts + (0,) * (length - len(self._parts))


def partitions_of(k: int, max_parts: int) -> list[Partition]:
    """All partitions of k into at most max_parts parts, in decreasing
    lexicographic order (the order used throughout the coefficient tables)."""
    if k < 0:
        raise DomainError(f"k must be nonnegative, got {k}")
    if max_parts < 1:
        raise DomainError(f"max_parts must be positive, got {max_parts}")
    if k == 0:
        return [Partition(())]
    acc: list[tuple[int, ...]] = []

    def extend(remaining: int, cap: int, prefix: tuple[int, ...]) -> None:
        if remaining == 0:
            acc.append(prefix)
            return
        if len(prefix) == max_parts:
            return
        for part in range(min(cap, remaining), 0, -1):
            extend(remaining - part, part, prefix + (part,))

    extend(k, k, ())
    acc.sort(reverse=True)
    return [Partition(p) for p in acc]


def lex_compare(a: Partition | Sequence[int], b: Partition | Sequence[int]) -> int:
    """Three-way comparison in the lexicographic order; requires equal weight.

    Returns -1, 0, or 1 as a < b, a == b, or a > b.
    """
    pa = a.parts if isinstance(a, Partition) else Partition(a).parts
    pb = b.parts if isinstance(b, Partition) else Partition(b).parts
    if sum(pa) != sum(pb):
        raise DomainError(f"cannot compare partitions of different weight: {pa} vs {pb}")
    if pa == pb:
        return 0
    return 1 if pa > pb else -1


def rho(kappa: Partition | Sequence[int]) -> int:
    """The eigenvalue shift sum_i k_i * (k_i - 4*i), i counted from 1."""
    parts = kappa.parts if isinstance(kappa, Partition) else tuple(kappa)
    return sum(ki * (ki - 4 * (i + 1)) for i, ki in enumerate(parts))


def gen_pochhammer(a, kappa: Partition | Sequence[int]):
    """Generalized rising factorial (a)_kappa = prod_j (a - 2(j-1))_{k_j}.

    Exact when ``a`` is an int or rational; float otherwise.
    """
    parts = kappa.parts if isinstance(kappa, Partition) else tuple(kappa)
    result = a - a + 1  # multiplicative unit of a's type
    for j, kj in enumerate(parts):
        base = a - 2 * j
        for t in range(kj):
            result = result * (base + t)
    return result


def qgamma(m: int, a: float) -> float:
    """Quaternion multivariate gamma pi^{m(m-1)} * prod_j Gamma(a - 2(j-1))."""
    return math.exp(qgamma_log(m, a))


def qgamma_log(m: int, a: float) -> float:
    """log of qgamma; preferred in density prefactors to avoid overflow."""
    if m < 0:
        raise DomainError(f"dimension must be nonnegative, got {m}")
    if a <= 2 * (m - 1):
        raise DomainError(f"qgamma pole: need a > 2(m-1) = {2 * (m - 1)}, got a = {a}")
    return m * (m - 1) * math.log(math.pi) + sum(
        math.lgamma(a - 2 * j) for j in range(m)
    )


def qgamma_kappa(m: int, a: float, kappa: Partition | Sequence[int]) -> float:
    """Partition-shifted multivariate gamma pi^{m(m-1)} prod_j Gamma(a + k_j - 2(j-1)).

    Satisfies gen_pochhammer(a, kappa) == qgamma_kappa(m, a, kappa) / qgamma(m, a)
    wherever both sides are defined.
    """
    parts = kappa.parts if isinstance(kappa, Partition) else tuple(kappa)
    if len(parts) > m:
        raise DomainError(f"partition {parts} has more than m = {m} parts")
    pad = parts + (0,) * (m - len(parts))
    logv = m * (m - 1) * math.log(math.pi)
    for j in range(m):
        arg = a + pad[j] - 2 * j
        if arg <= 0:
            raise DomainError(f"qgamma_kappa pole: need a > 2(m-1) - k_m, got a = {a}")
        logv += math.lgamma(arg)
    return math.exp(logv)


def monomial_orbit_size(lam: Partition | Sequence[int], m: int) -> int:
    """Number of distinct permutations of lam padded with zeros to length m.

    This is the value of the monomial symmetric function M_lam at the
    all-ones point (1, ..., 1) of m variables.
    """
    parts = lam.parts if isinstance(lam, Partition) else Partition(lam).parts
    if len(parts) > m:
        raise DomainError(f"partition {parts} has more than m = {m} parts")
    pad = parts + (0,) * (m - len(parts))
    size = math.factorial(m)
    for mult in Counter(pad).values():
        size //= math.factorial(mult)
    return size
