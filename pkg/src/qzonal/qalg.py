"""Quaternion scalars and dense quaternion matrices.

Storage is four contiguous real coefficients per entry (1, i, j, k), with
matrices kept row-major as a read-only numpy array of shape (rows, cols, 4).
The complex representation maps an m x n quaternion matrix A = B1 + B2*j to
the 2m x 2n complex block matrix [[B1, -B2], [conj(B2), conj(B1)]]; it is an
algebra homomorphism, which is what makes determinants, inverses, and
Hermitian eigenvalues of quaternion matrices computable with complex
arithmetic.

The Hermitian eigensolver is a self-contained cyclic Jacobi iteration on the
complex representation; each eigenvalue of a Hermitian quaternion matrix
appears there as an adjacent pair, which is deduplicated and reported with
its pairing residual.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

import numpy as np

from .errors import DomainError

# Relative tolerance scales (multiplied by an appropriate norm at use sites).
TOL_HERM = 1e-10
TOL_PAIR = 1e-8
TOL_DET = 1e-9
TOL_RANK = 1e-12

_JACOBI_OFFDIAG = 1e-13
_JACOBI_MAX_SWEEPS = 60


@dataclass(frozen=True)
class Quaternion:
    """A quaternion w + x*i + y*j + z*k over the reals."""

    w: float = 0.0
    x: float = 0.0
    y: float = 0.0
    z: float = 0.0

    def __add__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w + other.w, self.x + other.x,
                          self.y + other.y, self.z + other.z)

    def __sub__(self, other: "Quaternion") -> "Quaternion":
        return Quaternion(self.w - other.w, self.x - other.x,
                          self.y - other.y, self.z - other.z)

    def __neg__(self) -> "Quaternion":
        return Quaternion(-self.w, -self.x, -self.y, -self.z)

    def __mul__(self, other):
        if isinstance(other, Quaternion):
            return qmul(self, other)
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other,
                              self.y * other, self.z * other)
        return NotImplemented

    def __rmul__(self, other):
        if isinstance(other, (int, float)):
            return Quaternion(self.w * other, self.x * other,
                              self.y * other, self.z * other)
        return NotImplemented

    def conj(self) -> "Quaternion":
        return Quaternion(self.w, -self.x, -self.y, -self.z)

    def norm(self) -> float:
        return math.sqrt(self.w ** 2 + self.x ** 2 + self.y ** 2 + self.z ** 2)

    __abs__ = norm

    def is_close(self, other: "Quaternion", tol: float = 1e-12) -> bool:
        return (self - other).norm() <= tol


def qmul(a: Quaternion, b: Quaternion) -> Quaternion:
    """Hamilton product under ij = -ji = k, jk = -kj = i, ki = -ik = j."""
    return Quaternion(
        a.w * b.w - a.x * b.x - a.y * b.y - a.z * b.z,
        a.w * b.x + a.x * b.w + a.y * b.z - a.z * b.y,
        a.w * b.y - a.x * b.z + a.y * b.w + a.z * b.x,
        a.w * b.z + a.x * b.y - a.y * b.x + a.z * b.w,
    )


class QMatrix:
    """Immutable dense quaternion matrix."""

    __slots__ = ("_data",)

    def __init__(self, data: np.ndarray):
        arr = np.asarray(data, dtype=float)
        if arr.ndim != 3 or arr.shape[2] != 4:
            raise DomainError(f"expected component array of shape (rows, cols, 4), got {arr.shape}")
        arr = arr.copy()
        arr.setflags(write=False)
        self._data = arr

    # -- construction -----------------------------------------------------

    @classmethod
    def zeros(cls, rows: int, cols: int) -> "QMatrix":
        return cls(np.zeros((rows, cols, 4)))

    @classmethod
    def identity(cls, m: int) -> "QMatrix":
        data = np.zeros((m, m, 4))
        for i in range(m):
            data[i, i, 0] = 1.0
        return cls(data)

    @classmethod
    def diag(cls, values: Sequence[float]) -> "QMatrix":
        m = len(values)
        data = np.zeros((m, m, 4))
        for i, v in enumerate(values):
            data[i, i, 0] = float(v)
        return cls(data)

    @classmethod
    def from_rows(cls, rows: Sequence[Sequence[Quaternion]]) -> "QMatrix":
        r = len(rows)
        c = len(rows[0]) if r else 0
        data = np.zeros((r, c, 4))
        for i, row in enumerate(rows):
            if len(row) != c:
                raise DomainError("ragged rows")
            for j, q in enumerate(row):
                data[i, j] = (q.w, q.x, q.y, q.z)
        return cls(data)

    @classmethod
    def from_components(cls, a1, a2, a3, a4) -> "QMatrix":
        """Build A = A1 + A2*i + A3*j + A4*k from four real matrices."""
        return cls(np.stack([np.asarray(a1, dtype=float),
                             np.asarray(a2, dtype=float),
                             np.asarray(a3, dtype=float),
                             np.asarray(a4, dtype=float)], axis=-1))

    @classmethod
    def from_complex_rep(cls, z: np.ndarray, tol: float = 1e-9) -> "QMatrix":
        """Invert the complex representation; rejects non-representation input."""
        z = np.asarray(z, dtype=complex)
        if z.ndim != 2 or z.shape[0] % 2 or z.shape[1] % 2:
            raise DomainError(f"complex representation must have even shape, got {z.shape}")
        r, c = z.shape[0] // 2, z.shape[1] // 2
        b1, b2 = z[:r, :c], -z[:r, c:]
        scale = max(1.0, float(np.max(np.abs(z))))
        if (np.max(np.abs(z[r:, :c] - np.conj(b2))) > tol * scale
                or np.max(np.abs(z[r:, c:] - np.conj(b1))) > tol * scale):
            raise DomainError("matrix does not have quaternion block structure")
        return cls.from_components(b1.real, b1.imag, b2.real, b2.imag)

    # -- basic structure ---------------------------------------------------

    @property
    def rows(self) -> int:
        return self._data.shape[0]

    @property
    def cols(self) -> int:
        return self._data.shape[1]

    @property
    def shape(self) -> tuple[int, int]:
        return (self.rows, self.cols)

    @property
    def components(self) -> np.ndarray:
        """Read-only (rows, cols, 4) component array."""
        return self._data

    def entry(self, i: int, j: int) -> Quaternion:
        return Quaternion(*self._data[i, j])

    def entries(self) -> Iterable[Quaternion]:
        for i in range(self.rows):
            for j in range(self.cols):
                yield self.entry(i, j)

    def __eq__(self, other) -> bool:
        if not isinstance(other, QMatrix):
            return NotImplemented
        return self.shape == other.shape and np.array_equal(self._data, other._data)

    def __repr__(self) -> str:
        return f"QMatrix({self.rows}x{self.cols})"

    def frobenius_norm(self) -> float:
        return float(np.sqrt(np.sum(self._data ** 2)))

    def is_hermitian(self, tol: float | None = None) -> bool:
        if self.rows != self.cols:
            return False
        if tol is None:
            tol = TOL_HERM * max(1.0, self.frobenius_norm())
        return (self - self.conj_transpose()).frobenius_norm() <= tol

    # -- algebra -----------------------------------------------------------

    def __add__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self._data + other._data)

    def __sub__(self, other: "QMatrix") -> "QMatrix":
        return QMatrix(self._data - other._data)

    def __neg__(self) -> "QMatrix":
        return QMatrix(-self._data)

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float)):
            return QMatrix(self._data * scalar)
        return NotImplemented

    __rmul__ = __mul__

    def __matmul__(self, other: "QMatrix") -> "QMatrix":
        if self.cols != other.rows:
            raise DomainError(f"shape mismatch: {self.shape} @ {other.shape}")
        prod = self.complex_rep() @ other.complex_rep()
        r, c = self.rows, other.cols
        b1, b2 = prod[:r, :c], -prod[:r, c:]
        return QMatrix.from_components(b1.real, b1.imag, b2.real, b2.imag)

    def scale_left(self, q: Quaternion) -> "QMatrix":
        """Entrywise left multiplication q * a_ij (order matters)."""
        return _scalar_apply(q, self, left=True)

    def scale_right(self, q: Quaternion) -> "QMatrix":
        """Entrywise right multiplication a_ij * q."""
        return _scalar_apply(q, self, left=False)

    def conj_transpose(self) -> "QMatrix":
        out = np.transpose(self._data, (1, 0, 2)).copy()
        out[..., 1:] *= -1.0
        return QMatrix(out)

    @property
    def H(self) -> "QMatrix":
        return self.conj_transpose()

    def retr(self) -> float:
        """Trace of the real part; equals (1/2) tr(A + A^H) for square A."""
        if self.rows != self.cols:
            raise DomainError("retr requires a square matrix")
        return float(np.trace(self._data[..., 0]))

    def complex_rep(self) -> np.ndarray:
        """2m x 2n complex matrix [[B1, -B2], [conj B2, conj B1]] for A = B1 + B2 j."""
        b1 = self._data[..., 0] + 1j * self._data[..., 1]
        b2 = self._data[..., 2] + 1j * self._data[..., 3]
        top = np.concatenate([b1, -b2], axis=1)
        bot = np.concatenate([np.conj(b2), np.conj(b1)], axis=1)
        return np.concatenate([top, bot], axis=0)

    def real_reps(self) -> tuple[np.ndarray, np.ndarray]:
        """The two 4m x 4n real representations (first and second kind)."""
        a1, a2, a3, a4 = (self._data[..., s] for s in range(4))
        rep1 = np.block([
            [a1, a2, a3, a4],
            [-a2, a1, -a4, a3],
            [-a3, a4, a1, -a2],
            [-a4, -a3, a2, a1],
        ])
        rep2 = np.block([
            [a1, -a2, -a3, -a4],
            [a2, a1, -a4, a3],
            [a3, a4, a1, -a2],
            [a4, -a3, a2, a1],
        ])
        return rep1, rep2


def _scalar_apply(q: Quaternion, a: QMatrix, left: bool) -> QMatrix:
    out = np.empty(a.components.shape)
    for i in range(a.rows):
        for j in range(a.cols):
            e = a.entry(i, j)
            p = qmul(q, e) if left else qmul(e, q)
            out[i, j] = (p.w, p.x, p.y, p.z)
    return QMatrix(out)


@dataclass(frozen=True)
class Spectrum:
    """Eigenvalues of a Hermitian quaternion matrix, sorted descending.

    pairing_residual is the largest gap between the adjacent duplicated
    eigenvalues of the complex representation; large values indicate a
    non-Hermitian or ill-conditioned input.
    """

    values: tuple[float, ...]
    pairing_residual: float


# -- free functions mirroring the matrix operations -------------------------

def conj_transpose(a: QMatrix) -> QMatrix:
    return a.conj_transpose()


def retr(a: QMatrix) -> float:
    return a.retr()


def complex_rep(a: QMatrix) -> np.ndarray:
    return a.complex_rep()


def real_reps(a: QMatrix) -> tuple[np.ndarray, np.ndarray]:
    return a.real_reps()


def qdet(a: QMatrix) -> float:
    """q-determinant det(A^sigma) of a square quaternion matrix.

    The value is real for any quaternion matrix; a residual imaginary part
    above tolerance signals numerical breakdown.  For Hermitian positive
    definite A this equals the squared product of the eigenvalues.
    """
    if a.rows != a.cols:
        raise DomainError("qdet requires a square matrix")
    if a.rows == 0:
        return 1.0
    d = complex(np.linalg.det(a.complex_rep()))
    if abs(d.imag) > TOL_DET * max(1.0, abs(d)):
        raise DomainError(f"qdet imaginary residual {d.imag:.3e} exceeds tolerance")
    return d.real


def moore_det(a: QMatrix, spectrum: Spectrum | None = None) -> float:
    """Moore determinant of a Hermitian matrix: the product of its eigenvalues.

    For positive definite A this equals prod t_ii^2 of the Cholesky factor,
    and its square equals qdet(A).
    """
    if a.rows != a.cols:
        raise DomainError("moore_det requires a square matrix")
    if spectrum is None:
        spectrum = hermitian_eigenvalues(a)
    return float(np.prod(spectrum.values)) if spectrum.values else 1.0


def jacobi_eigvalsh(h: np.ndarray) -> np.ndarray:
    """Eigenvalues of a complex Hermitian matrix by cyclic Jacobi rotations.

    Self-contained solver; converges when the off-diagonal Frobenius mass
    drops below 1e-13 times the matrix norm.  Returns values ascending.
    """
    a = np.array(h, dtype=complex)
    n = a.shape[0]
    if n == 0:
        return np.zeros(0)
    scale = max(1.0, float(np.linalg.norm(a)))
    offdiag = ~np.eye(n, dtype=bool)
    for _ in range(_JACOBI_MAX_SWEEPS):
        off = math.sqrt(float(np.sum(np.abs(a[offdiag]) ** 2)))
        if off <= _JACOBI_OFFDIAG * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) <= 1e-18 * scale:
                    a[p, q] = 0.0
                    a[q, p] = 0.0
                    continue
                app = a[p, p].real
                aqq = a[q, q].real
                phase = apq / abs(apq)
                tau = (aqq - app) / (2.0 * abs(apq))
                # hypot avoids overflow when the diagonal gap dwarfs apq
                t = math.copysign(1.0, tau) / (abs(tau) + math.hypot(1.0, tau))
                c = 1.0 / math.sqrt(1.0 + t * t)
                s = t * c
                # plane rotation J with J[p,p]=J[q,q]=c, J[p,q]=s*phase
                col_p = a[:, p].copy()
                col_q = a[:, q].copy()
                a[:, p] = c * col_p - s * np.conj(phase) * col_q
                a[:, q] = s * phase * col_p + c * col_q
                row_p = a[p, :].copy()
                row_q = a[q, :].copy()
                a[p, :] = c * row_p - s * phase * row_q
                a[q, :] = s * np.conj(phase) * row_p + c * row_q
                a[p, q] = 0.0
                a[q, p] = 0.0
    else:
        raise DomainError("Jacobi eigensolver failed to converge")
    return np.sort(np.real(np.diag(a)))


def hermitian_eigenvalues(a: QMatrix) -> Spectrum:
    """Eigenvalues of a Hermitian quaternion matrix.

    Solves the doubled complex representation, pairs adjacent duplicates,
    and returns the m deduplicated values in descending order.
    """
    if a.rows != a.cols:
        raise DomainError("hermitian_eigenvalues requires a square matrix")
    m = a.rows
    if m == 0:
        return Spectrum((), 0.0)
    norm = a.frobenius_norm()
    if not a.is_hermitian():
        raise DomainError("matrix is not Hermitian within tolerance")
    doubled = jacobi_eigvalsh(a.complex_rep())
    pairs = doubled.reshape(m, 2)
    residual = float(np.max(np.abs(pairs[:, 0] - pairs[:, 1])))
    if residual > TOL_PAIR * max(1.0, norm):
        raise DomainError(f"eigenvalue pairing residual {residual:.3e} exceeds tolerance")
    values = tuple(float(v) for v in np.sort(pairs.mean(axis=1))[::-1])
    return Spectrum(values, residual)


def cholesky(a: QMatrix) -> QMatrix:
    """Upper-triangular T with positive real diagonal and A = T^H T."""
    if a.rows != a.cols:
        raise DomainError("cholesky requires a square matrix")
    m = a.rows
    norm = a.frobenius_norm()
    if not a.is_hermitian():
        raise DomainError("cholesky requires a Hermitian matrix")
    t = [[Quaternion() for _ in range(m)] for _ in range(m)]
    for j in range(m):
        # pivot: a_jj minus accumulated column norms, real by Hermiticity
        pivot = a.entry(j, j).w - sum(t[k][j].norm() ** 2 for k in range(j))
        if pivot <= TOL_RANK * max(1.0, norm):
            raise DomainError(f"matrix not positive definite (pivot {pivot:.3e} at column {j})")
        tjj = math.sqrt(pivot)
        t[j][j] = Quaternion(tjj)
        for c in range(j + 1, m):
            acc = a.entry(j, c)
            for k in range(j):
                acc = acc - qmul(t[k][j].conj(), t[k][c])
            t[j][c] = acc * (1.0 / tjj)
    return QMatrix.from_rows(t)


def qr_unitary(a: QMatrix) -> QMatrix:
    """Unitary factor Q of A = QR by modified Gram-Schmidt.

    R's diagonal is forced positive real, which pins the column phases; a
    second orthogonalization pass keeps Q^H Q = I near machine precision.
    """
    if a.rows != a.cols:
        raise DomainError("qr_unitary requires a square matrix")
    m = a.rows
    norm = max(1.0, a.frobenius_norm())
    cols = [[a.entry(i, j) for i in range(m)] for j in range(m)]
    qcols: list[list[Quaternion]] = []
    for j in range(m):
        v = cols[j]
        for _ in range(2):  # reorthogonalization pass
            for qc in qcols:
                # r = q^H v, then v <- v - q * r (right-multiplied scalar)
                r = Quaternion()
                for i in range(m):
                    r = r + qmul(qc[i].conj(), v[i])
                v = [v[i] - qmul(qc[i], r) for i in range(m)]
        vnorm = math.sqrt(sum(x.norm() ** 2 for x in v))
        if vnorm <= TOL_RANK * norm:
            raise DomainError(f"rank deficiency detected at column {j}")
        inv = 1.0 / vnorm
        qcols.append([x * inv for x in v])
    data = np.zeros((m, m, 4))
    for j, qc in enumerate(qcols):
        for i, q in enumerate(qc):
            data[i, j] = (q.w, q.x, q.y, q.z)
    return QMatrix(data)


def qinverse(a: QMatrix) -> QMatrix:
    """Inverse of a square quaternion matrix via the complex representation."""
    if a.rows != a.cols:
        raise DomainError("qinverse requires a square matrix")
    if a.rows == 0:
        return a
    return QMatrix.from_complex_rep(np.linalg.inv(a.complex_rep()))
