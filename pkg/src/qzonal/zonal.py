"""Exact-rational coefficient tables for zonal polynomials of quaternion
matrix argument, and their evaluation.

For a degree k, the polynomial attached to a partition kappa expands over
monomial symmetric functions as C_kappa = sum_{lambda <= kappa} c_{kappa,lambda}
M_lambda.  Each row is computed in two stages:

1. The normalized row (leading coefficient 1) follows from the eigenfunction
   property of the degree-k polynomials: moving t units of a part from a later
   position j to an earlier position i turns lambda into a lex-larger tuple mu,
   and the normalized coefficients satisfy

       c~(lambda) = sum over admitted moves of
                    4[(l_i + t) - (l_j - t)] / (rho_kappa - rho_lambda) * c~(mu),

   where a move is admitted when the descending rearrangement of mu lies
   strictly above lambda and at or below kappa in lex order.  Distinct moves
   that produce the same mu accumulate.
2. The leading scalars d_kappa are pinned by the expansion of (tr Y)^k, whose
   coefficient on M_lambda is the multinomial k!/prod(lambda_i!): a triangular
   system solved in decreasing lex order.

All arithmetic is exact rational.  Restricted tables (part_cap = m < k) are
closed under the recursion because moves never increase the number of parts,
and agree entrywise with full tables on their common support.
"""

from __future__ import annotations

import json
import math
import os
import threading
from pathlib import Path
from typing import Sequence

import numpy as np

from .errors import DomainError
from .partitions import (
    BigRational,
    EXACT_TYPES,
    Partition,
    monomial_orbit_size,
    partitions_of,
    rho,
)

__all__ = [
    "ZonalTable",
    "build_table",
    "get_table",
    "save_table",
    "load_table",
    "clear_cache",
    "eval_zonal",
    "eval_zonal_rational",
    "zonal_at_identity",
    "apply_operator_check",
    "distinct_permutations",
]

CACHE_DIR_ENV = "QZONAL_TABLE_CACHE_DIR"

_memo: dict[tuple[int, int], "ZonalTable"] = {}
_memo_lock = threading.Lock()


class ZonalTable:
    """Coefficient table c_{kappa,lambda} for all partitions of one degree.

    partitions are stored in decreasing lexicographic order; rows are sparse
    dicts from column index to exact rational coefficient.  Completed tables
    are immutable and safe for concurrent reads.
    """

    def __init__(self, k: int, part_cap: int, partitions: list[Partition],
                 rows: list[dict[int, object]]):
        self.k = k
        self.part_cap = part_cap
        self.partitions = tuple(partitions)
        self._index = {p.parts: i for i, p in enumerate(self.partitions)}
        self._rows = rows
        self._float_rows: np.ndarray | None = None
        self._identity_vectors: dict[int, list[object]] = {}
        self._lock = threading.Lock()

    def row_index(self, kappa: Partition | Sequence[int]) -> int:
        parts = kappa.parts if isinstance(kappa, Partition) else Partition(kappa).parts
        try:
            return self._index[parts]
        except KeyError:
            raise DomainError(
                f"partition {parts} not indexed in table (k={self.k}, part_cap={self.part_cap})"
            ) from None

    def coefficient(self, kappa, lam):
        """c_{kappa,lambda} as an exact rational (0 when absent)."""
        ki = self.row_index(kappa)
        li = self.row_index(lam)
        return self._rows[ki].get(li, BigRational(0))

    def items(self):
        """Yield (kappa, lambda, coefficient) in table order."""
        for ki, kappa in enumerate(self.partitions):
            row = self._rows[ki]
            for li in sorted(row):
                yield kappa, self.partitions[li], row[li]

    def float_matrix(self) -> np.ndarray:
        """Dense float image of the table, rows indexed by kappa."""
        if self._float_rows is None:
            with self._lock:
                if self._float_rows is None:
                    n = len(self.partitions)
                    mat = np.zeros((n, n))
                    for ki, row in enumerate(self._rows):
                        for li, c in row.items():
                            mat[ki, li] = float(c)
                    self._float_rows = mat
        return self._float_rows

    def identity_vector(self, m: int) -> list[object]:
        """C_kappa(I_m) for every kappa, exact, cached per m."""
        if m not in self._identity_vectors:
            with self._lock:
                if m not in self._identity_vectors:
                    orbit = [
                        monomial_orbit_size(lam, m) if len(lam) <= m else 0
                        for lam in self.partitions
                    ]
                    vec = []
                    for row in self._rows:
                        acc = BigRational(0)
                        for li, c in row.items():
                            if orbit[li]:
                                acc += c * orbit[li]
                        vec.append(acc)
                    self._identity_vectors[m] = vec
        return self._identity_vectors[m]


def _dominates(kappa: tuple[int, ...], lam: tuple[int, ...]) -> bool:
    s_k = s_l = 0
    for i in range(max(len(kappa), len(lam))):
        s_k += kappa[i] if i < len(kappa) else 0
        s_l += lam[i] if i < len(lam) else 0
        if s_k < s_l:
            return False
    return True


def _move_graph(plist: list[tuple[int, ...]], index: dict[tuple[int, ...], int]):
    """For each lambda, the lex-larger tuples reachable by one move, with the
    move factors 4[(l_i+t)-(l_j-t)] accumulated over coinciding moves."""
    graph: list[list[tuple[int, int]]] = []
    for lam in plist:
        weights: dict[int, int] = {}
        length = len(lam)
        for j in range(1, length):
            lj = lam[j]
            for i in range(j):
                li = lam[i]
                for t in range(1, lj + 1):
                    mu = list(lam)
                    mu[i] = li + t
                    mu[j] = lj - t
                    key = tuple(sorted((x for x in mu if x > 0), reverse=True))
                    if key > lam:
                        mi = index.get(key)
                        if mi is not None:
                            weights[mi] = weights.get(mi, 0) + 4 * ((li + t) - (lj - t))
        graph.append(sorted(weights.items()))
    return graph


def build_table(k: int, part_cap: int) -> ZonalTable:
    """Build the exact coefficient table for degree k with at most part_cap parts."""
    if k < 0:
        raise DomainError(f"degree must be nonnegative, got {k}")
    if part_cap < 1:
        raise DomainError(f"part_cap must be positive, got {part_cap}")
    partitions = partitions_of(k, part_cap)
    plist = [p.parts for p in partitions]
    count = len(plist)
    index = {p: i for i, p in enumerate(plist)}
    rhos = [rho(p) for p in plist]
    graph = _move_graph(plist, index)

    normalized: list[dict[int, object]] = [dict() for _ in range(count)]
    for ki, kappa in enumerate(plist):
        row = normalized[ki]
        row[ki] = BigRational(1)
        for li in range(ki + 1, count):
            lam = plist[li]
            if not _dominates(kappa, lam):
                continue  # unreachable by moves; coefficient is structurally zero
            acc = 0
            for mi, w in graph[li]:
                if mi >= ki:
                    c = row.get(mi)
                    if c is not None:
                        acc += w * c
            if acc:
                gap = rhos[ki] - rhos[li]
                if gap == 0:
                    raise DomainError(
                        f"rho gap vanished between {kappa} and {lam} with a nonzero "
                        f"move sum; the recursion cannot divide"
                    )
                row[li] = acc / BigRational(gap)

    # leading scalars from the multinomial expansion of (tr Y)^k
    k_factorial = math.factorial(k)
    leading: list[object] = [None] * count
    for li, lam in enumerate(plist):
        target = BigRational(k_factorial)
        for part in lam:
            target /= math.factorial(part)
        acc = 0
        for ki in range(li):
            c = normalized[ki].get(li)
            if c is not None:
                acc += leading[ki] * c
        leading[li] = target - acc

    rows: list[dict[int, object]] = []
    for ki in range(count):
        d = leading[ki]
        rows.append({li: d * c for li, c in normalized[ki].items() if d * c != 0})
    return ZonalTable(k, part_cap, partitions, rows)


def get_table(k: int, part_cap: int) -> ZonalTable:
    """Memoized table access; consults the on-disk cache directory when set."""
    part_cap = min(part_cap, max(k, 1))
    key = (k, part_cap)
    with _memo_lock:
        table = _memo.get(key)
    if table is not None:
        return table
    cache_dir = os.environ.get(CACHE_DIR_ENV)
    if cache_dir:
        path = Path(cache_dir) / f"zonal_k{k}_cap{part_cap}.json"
        if path.is_file():
            table = load_table(path)
        else:
            table = build_table(k, part_cap)
            try:
                Path(cache_dir).mkdir(parents=True, exist_ok=True)
                save_table(table, path)
            except OSError:
                pass  # cache is best-effort
    else:
        table = build_table(k, part_cap)
    with _memo_lock:
        _memo[key] = table
    return table


def clear_cache() -> None:
    with _memo_lock:
        _memo.clear()


def save_table(table: ZonalTable, path: str | Path) -> None:
    """Write a table as JSON; integers serialized as decimal strings."""
    doc = {
        "k": table.k,
        "part_cap": table.part_cap,
        "rows": [
            {
                "kappa": list(kappa.parts),
                "entries": [
                    {
                        "lambda": list(table.partitions[li].parts),
                        "num": str(row[li].numerator),
                        "den": str(row[li].denominator),
                    }
                    for li in sorted(row)
                ],
            }
            for kappa, row in zip(table.partitions, table._rows)
        ],
    }
    Path(path).write_text(json.dumps(doc), encoding="utf-8")


def load_table(path: str | Path) -> ZonalTable:
    doc = json.loads(Path(path).read_text(encoding="utf-8"))
    k = int(doc["k"])
    part_cap = int(doc["part_cap"])
    partitions = partitions_of(k, part_cap)
    index = {p.parts: i for i, p in enumerate(partitions)}
    rows: list[dict[int, object]] = [dict() for _ in partitions]
    if len(doc["rows"]) != len(partitions):
        raise DomainError(f"corrupt table file {path}: row count mismatch")
    for entry in doc["rows"]:
        ki = index[tuple(entry["kappa"])]
        for cell in entry["entries"]:
            li = index[tuple(cell["lambda"])]
            rows[ki][li] = BigRational(int(cell["num"])) / BigRational(int(cell["den"]))
    return ZonalTable(k, part_cap, partitions, rows)


def distinct_permutations(items: tuple):
    """All distinct permutations of a tuple (multiset permutations)."""
    if len(items) <= 1:
        yield items
        return
    seen = set()
    for i, head in enumerate(items):
        if head in seen:
            continue
        seen.add(head)
        for rest in distinct_permutations(items[:i] + items[i + 1:]):
            yield (head,) + rest


def monomial_value(lam: Partition | Sequence[int], eigs: Sequence):
    """Monomial symmetric function M_lambda evaluated at the given variables."""
    parts = lam.parts if isinstance(lam, Partition) else Partition(lam).parts
    m = len(eigs)
    if len(parts) > m:
        return 0
    pad = parts + (0,) * (m - len(parts))
    total = 0
    for perm in distinct_permutations(pad):
        term = 1
        for y, e in zip(eigs, perm):
            if e:
                term = term * y ** e
        total = total + term
    return total


def _check_eval_args(table: ZonalTable, kappa, eigs) -> int:
    ki = table.row_index(kappa)
    m = len(eigs)
    parts = table.partitions[ki].parts
    if len(parts) > m:
        raise DomainError(
            f"partition {parts} has more parts than the {m} supplied eigenvalues"
        )
    if table.part_cap < min(m, table.k):
        raise DomainError(
            f"table restricted to {table.part_cap} parts cannot evaluate at {m} variables"
        )
    return ki


def eval_zonal(table: ZonalTable, kappa, eigs: Sequence[float]) -> float:
    """C_kappa at a tuple of real eigenvalues (float path)."""
    ki = _check_eval_args(table, kappa, eigs)
    eigs = [float(y) for y in eigs]
    mat = table.float_matrix()
    mono = np.array([monomial_value(lam, eigs) for lam in table.partitions])
    return float(mat[ki] @ mono)


def eval_zonal_rational(table: ZonalTable, kappa, eigs: Sequence):
    """C_kappa at exact rational eigenvalues; returns an exact rational."""
    ki = _check_eval_args(table, kappa, eigs)
    eigs = [y if isinstance(y, EXACT_TYPES) else BigRational(y) for y in eigs]
    row = table._rows[ki]
    total = BigRational(0)
    for li, c in row.items():
        mv = monomial_value(table.partitions[li], eigs)
        if mv:
            total += c * mv
    return total


def zonal_at_identity(table: ZonalTable, kappa, m: int):
    """C_kappa(I_m), exact; zero when kappa has more than m parts."""
    ki = table.row_index(kappa)
    if len(table.partitions[ki]) > m:
        return BigRational(0)
    return table.identity_vector(m)[ki]


def apply_operator_check(table: ZonalTable, kappa, ys: Sequence):
    """Exact evaluation of both sides of the defining differential equation.

    Returns (lhs, rhs) where lhs applies the operator
    sum_i y_i^2 d^2/dy_i^2 + sum_{i != j} 4 y_i^2/(y_i - y_j) d/dy_i
    to C_kappa at the point ys, and rhs = (rho_kappa + k(4m-1)) C_kappa(ys).
    The two agree exactly for every valid partition.
    """
    ki = _check_eval_args(table, kappa, ys)
    ys = [y if isinstance(y, EXACT_TYPES) else BigRational(y) for y in ys]
    m = len(ys)
    if len(set(ys)) != m:
        raise DomainError("operator check requires pairwise distinct eigenvalues")
    value = BigRational(0)
    grad = [BigRational(0) for _ in range(m)]
    hess = [BigRational(0) for _ in range(m)]
    row = table._rows[ki]
    for li, c in row.items():
        parts = table.partitions[li].parts
        if len(parts) > m:
            continue
        pad = parts + (0,) * (m - len(parts))
        for perm in distinct_permutations(pad):
            term = BigRational(1)
            for y, e in zip(ys, perm):
                if e:
                    term = term * y ** e
            value += c * term
            for i in range(m):
                e = perm[i]
                if e == 0:
                    continue
                partial = c * e
                for t, (y, ee) in enumerate(zip(ys, perm)):
                    exp = ee - 1 if t == i else ee
                    if exp:
                        partial = partial * y ** exp
                grad[i] += partial
                if e >= 2:
                    second = c * e * (e - 1)
                    for t, (y, ee) in enumerate(zip(ys, perm)):
                        exp = ee - 2 if t == i else ee
                        if exp:
                            second = second * y ** exp
                    hess[i] += second
    lhs = BigRational(0)
    for i in range(m):
        lhs += ys[i] ** 2 * hess[i]
        for j in range(m):
            if j != i:
                lhs += 4 * ys[i] ** 2 * grad[i] / (ys[i] - ys[j])
    k = table.k
    rhs = (rho(kappa if isinstance(kappa, Partition) else Partition(kappa))
           + k * (4 * m - 1)) * value
    return lhs, rhs
