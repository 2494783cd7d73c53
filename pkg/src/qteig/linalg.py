"""Dense complex linear algebra kernels.

Matrices are plain 2-D numpy arrays of complex numbers.  The module
provides a partially pivoted LU solve, a column-pivoted (rank
revealing) QR, and an eigenvalue solver built from balancing, a
Householder Hessenberg reduction, and an explicitly shifted QR
iteration with a Wilkinson-type complex shift.

The hand-written QR iteration is the default path up to
``EIG_DELEGATE_DIM``; above that size its Python-level inner loop is
too slow for the intended workloads and the LAPACK solver bundled with
numpy takes over behind the same contract.  Dimensions above
``EIG_MAX_DIM`` are rejected.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import TYPE_CHECKING

import numpy as np

from .errors import ConvergenceError, InvalidInputError, SingularMatrixError

if TYPE_CHECKING:
    from .poly import Poly

# Largest dimension handled by the in-repo QR iteration.
EIG_DELEGATE_DIM = 380

# Hard cap on eigenproblem size.
EIG_MAX_DIM = 4000

_EPS = float(np.finfo(float).eps)


def _as_matrix(a) -> np.ndarray:
    m = np.array(a, dtype=complex)
    if m.ndim != 2:
        raise InvalidInputError(f"expected a 2-D array, got ndim={m.ndim}")
    return m


def _phase(z: complex) -> complex:
    az = abs(z)
    return z / az if az > 0 else 1.0 + 0j


def lu_solve(a, b) -> np.ndarray:
    """Solve A X = B via LU with partial pivoting.

    B may be a vector or a matrix; the result has the same shape.
    Raises SingularMatrixError when a pivot falls below
    1e-14 * max|A|.
    """
    A = _as_matrix(a)
    n, nc = A.shape
    if n != nc:
        raise InvalidInputError("coefficient matrix must be square")
    B = np.array(b, dtype=complex)
    vector_rhs = B.ndim == 1
    if vector_rhs:
        B = B[:, None]
    if B.shape[0] != n:
        raise InvalidInputError("right-hand side has incompatible row count")

    scale = float(np.abs(A).max()) if A.size else 0.0
    tol = 1e-14 * scale
    for k in range(n):
        piv = k + int(np.argmax(np.abs(A[k:, k])))
        if abs(A[piv, k]) <= tol:
            raise SingularMatrixError(f"pivot {k} below threshold {tol:g}")
        if piv != k:
            A[[k, piv]] = A[[piv, k]]
            B[[k, piv]] = B[[piv, k]]
        fac = A[k + 1 :, k] / A[k, k]
        A[k + 1 :, k + 1 :] -= np.outer(fac, A[k, k + 1 :])
        B[k + 1 :] -= np.outer(fac, B[k])

    X = np.zeros_like(B)
    for k in range(n - 1, -1, -1):
        X[k] = (B[k] - A[k, k + 1 :] @ X[k + 1 :]) / A[k, k]
    return X[:, 0] if vector_rhs else X


@dataclass(frozen=True, eq=False)
class RankRevealingQR:
    """Column-pivoted QR factorization A[:, permutation] = Q R."""

    q: np.ndarray
    r: np.ndarray
    permutation: tuple
    rank: int


def qr_rank_revealing(a, tol: float | None = None) -> RankRevealingQR:
    """Householder QR with column pivoting and a rank decision.

    The numerical rank is the number of diagonal entries of R whose
    modulus exceeds ``tol * |R[0, 0]|``; by default
    ``tol = 1e-12 * max(rows, cols)``.  A zero matrix has rank 0.
    """
    A = _as_matrix(a)
    rows, cols = A.shape
    if tol is None:
        tol = 1e-12 * max(rows, cols, 1)
    if tol <= 0:
        raise InvalidInputError("tol must be positive")

    R = A.copy()
    Q = np.eye(rows, dtype=complex)
    perm = np.arange(cols)
    steps = min(rows, cols)
    for k in range(steps):
        norms = np.sqrt(np.sum(np.abs(R[k:, k:]) ** 2, axis=0))
        j = k + int(np.argmax(norms))
        if j != k:
            R[:, [k, j]] = R[:, [j, k]]
            perm[[k, j]] = perm[[j, k]]
        x = R[k:, k]
        nx = float(np.linalg.norm(x))
        if nx == 0.0:
            continue
        v = x.copy()
        v[0] += _phase(x[0]) * nx
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            continue
        v /= nv
        R[k:, k:] -= 2.0 * np.outer(v, v.conj() @ R[k:, k:])
        Q[:, k:] -= 2.0 * np.outer(Q[:, k:] @ v, v.conj())
        R[k + 1 :, k] = 0.0

    diag = np.abs(np.diagonal(R)[:steps])
    if steps == 0 or diag[0] == 0.0:
        rank = 0
    else:
        rank = int(np.sum(diag > tol * diag[0]))
    return RankRevealingQR(q=Q, r=R, permutation=tuple(int(p) for p in perm), rank=rank)


def _balance(a: np.ndarray) -> np.ndarray:
    """Diagonal similarity scaling (powers of 2) equalizing row/column norms."""
    n = a.shape[0]
    radix = 2.0
    sqrdx = radix * radix
    done = False
    while not done:
        done = True
        for i in range(n):
            r = float(np.abs(a[i, :]).sum() - abs(a[i, i]))
            c = float(np.abs(a[:, i]).sum() - abs(a[i, i]))
            if c == 0.0 or r == 0.0:
                continue
            f = 1.0
            s = c + r
            g = r / radix
            while c < g:
                f *= radix
                c *= sqrdx
            g = r * radix
            while c > g:
                f /= radix
                c /= sqrdx
            if (c + r) / f < 0.95 * s:
                done = False
                a[i, :] *= 1.0 / f
                a[:, i] *= f
    return a


def _hessenberg(h: np.ndarray) -> np.ndarray:
    """Householder reduction to upper Hessenberg form, in place."""
    n = h.shape[0]
    for k in range(n - 2):
        x = h[k + 1 :, k]
        if not np.any(np.abs(x[1:])):
            continue
        nx = float(np.linalg.norm(x))
        alpha = -_phase(x[0]) * nx
        v = x.copy()
        v[0] -= alpha
        nv = float(np.linalg.norm(v))
        if nv == 0.0:
            continue
        v /= nv
        h[k + 1 :, k:] -= 2.0 * np.outer(v, v.conj() @ h[k + 1 :, k:])
        h[:, k + 1 :] -= 2.0 * np.outer(h[:, k + 1 :] @ v, v.conj())
        h[k + 1, k] = alpha
        h[k + 2 :, k] = 0.0
    return h


def _givens(f: complex, g: complex) -> tuple:
    if g == 0:
        return 1.0, 0j
    if f == 0:
        return 0.0, np.conj(g) / abs(g)
    d = float(np.hypot(abs(f), abs(g)))
    c = abs(f) / d
    s = (f / abs(f)) * np.conj(g) / d
    return c, s


def _eig2(block: np.ndarray) -> list:
    """Eigenvalues of a 2x2 block, small one via the determinant."""
    a, b = block[0, 0], block[0, 1]
    c, d = block[1, 0], block[1, 1]
    mid = 0.5 * (a + d)
    disc = np.sqrt(complex(0.25 * (a - d) ** 2 + b * c))
    big = mid + disc if abs(mid + disc) >= abs(mid - disc) else mid - disc
    if big == 0:
        return [mid + disc, mid - disc]
    return [big, (a * d - b * c) / big]


def _wilkinson_shift(block: np.ndarray) -> complex:
    e1, e2 = _eig2(block)
    h = block[1, 1]
    return e1 if abs(e1 - h) <= abs(e2 - h) else e2


def _qr_sweep(h: np.ndarray, lo: int, hi: int, sigma: complex) -> None:
    """One explicitly shifted QR similarity step on the window [lo, hi]."""
    w = h[lo : hi + 1, lo : hi + 1]
    mm = hi - lo + 1
    idx = np.arange(mm)
    w[idx, idx] -= sigma
    rots = []
    for k in range(mm - 1):
        c, s = _givens(w[k, k], w[k + 1, k])
        rots.append((c, s))
        r0 = w[k, k:].copy()
        r1 = w[k + 1, k:]
        w[k, k:] = c * r0 + s * r1
        w[k + 1, k:] = -np.conj(s) * r0 + c * r1
    for k in range(mm - 1):
        c, s = rots[k]
        top = min(k + 2, mm)
        c0 = w[:top, k].copy()
        c1 = w[:top, k + 1]
        w[:top, k] = c * c0 + np.conj(s) * c1
        w[:top, k + 1] = -s * c0 + c * c1
    w[idx, idx] += sigma


def _hessenberg_eigvals(h: np.ndarray) -> list:
    """Shifted QR iteration with deflation on an upper Hessenberg matrix."""
    n = h.shape[0]
    eigs: list = []
    hi = n - 1
    sweeps = 0
    max_sweeps = 30 * n
    stall = 0
    while hi >= 0:
        lo = hi
        while lo > 0:
            sub = abs(h[lo, lo - 1])
            if sub == 0.0 or sub <= _EPS * (abs(h[lo - 1, lo - 1]) + abs(h[lo, lo])):
                h[lo, lo - 1] = 0.0
                break
            lo -= 1
        if lo == hi:
            eigs.append(complex(h[hi, hi]))
            hi -= 1
            stall = 0
            continue
        if lo == hi - 1:
            eigs.extend(complex(e) for e in _eig2(h[lo : hi + 1, lo : hi + 1]))
            hi -= 2
            stall = 0
            continue
        if sweeps >= max_sweeps:
            raise ConvergenceError(
                f"QR iteration did not converge within {max_sweeps} sweeps"
            )
        stall += 1
        if stall % 12 == 0:
            # exceptional shift to break a stalled, too symmetric window
            sigma = h[hi, hi] + 0.75 * abs(h[hi, hi - 1])
        else:
            sigma = _wilkinson_shift(h[hi - 1 : hi + 1, hi - 1 : hi + 1])
        _qr_sweep(h, lo, hi, sigma)
        sweeps += 1
    return eigs


def eig_dense(a) -> list:
    """All eigenvalues of a square matrix, with multiplicity.

    Returns a list of complex values sorted by (real, imaginary) part.
    """
    A = _as_matrix(a)
    n, nc = A.shape
    if n != nc:
        raise InvalidInputError("eigenvalue problem requires a square matrix")
    if n < 1:
        raise InvalidInputError("matrix dimension must be at least 1")
    if n > EIG_MAX_DIM:
        raise InvalidInputError(f"dimension {n} exceeds the cap {EIG_MAX_DIM}")
    if n == 1:
        return [complex(A[0, 0])]
    if n > EIG_DELEGATE_DIM:
        work = A.real if not np.any(A.imag) else A
        try:
            vals = np.linalg.eigvals(work)
        except np.linalg.LinAlgError as exc:
            raise ConvergenceError(str(exc)) from exc
        return sorted((complex(v) for v in vals), key=lambda z: (z.real, z.imag))
    H = _hessenberg(_balance(A.copy()))
    vals = _hessenberg_eigvals(H)
    return sorted(vals, key=lambda z: (z.real, z.imag))


def roots_companion(b: "Poly") -> list:
    """All roots of a polynomial via the eigenvalues of its companion matrix."""
    if b.degree < 1:
        raise InvalidInputError("rootfinding requires degree >= 1")
    coeffs = np.asarray(b.coeffs)
    monic = coeffs / coeffs[-1]
    d = b.degree
    comp = np.zeros((d, d), dtype=complex)
    if d > 1:
        comp[np.arange(d - 1), np.arange(1, d)] = 1.0
    comp[d - 1, :] = -monic[:d]
    return eig_dense(comp)
