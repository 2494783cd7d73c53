"""Splitting z**m (a(z) - lam) into a monic factor with roots inside the
unit disk times a factor with roots outside, with shift derivatives.

The inside factor s drives everything downstream: its companion matrix
F gives G = F**p through the triangular Toeplitz identity
G = -L^{-1} U (first column of L is (s_p, ..., s_1), first row of U is
(s_0, ..., s_{p-1})), and the derivatives of the factor coefficients
with respect to the shift come from one resultant-style linear system.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ConvergenceError,
    FactorizationUnstableError,
    InvalidInputError,
    OnCurveError,
)
from .linalg import lu_solve, roots_companion
from .poly import LaurentSymbol, Poly, char_poly, winding

# Roots this close to the unit circle make the inside/outside split
# meaningless; the shift is flagged as on the curve instead.
SPLIT_BAND = 1e-10

# Relative 1-norm bound on the deconvolution residual.
DECONV_TOL = 1e-6


@dataclass(frozen=True)
class WienerHopfFactors:
    """Factors s (monic, roots inside the disk) and u (roots outside),
    with the derivatives of their lower coefficients with respect to
    the shift.  s has degree p, u has degree m + n - p, and the product
    s * u reconstructs z**m (a(z) - lam)."""

    s: Poly
    u: Poly
    s_prime: tuple
    u_prime: tuple

    @property
    def p(self) -> int:
        return self.s.degree


@dataclass(frozen=True, eq=False)
class GPair:
    """G = F**p together with its shift derivative."""

    g: np.ndarray
    g_prime: np.ndarray


def _monic_from_roots(roots) -> Poly:
    # multiply linear factors in order of increasing modulus to limit
    # cancellation in the small coefficients
    acc = np.array([1.0 + 0j])
    for r in sorted(roots, key=lambda z: (abs(z), np.angle(z))):
        acc = np.convolve(acc, np.array([-r, 1.0 + 0j]))
    return Poly(tuple(acc))


def _deconv_descending(b: Poly, s: Poly) -> tuple:
    """Quotient u = b / s by descending-coefficient long division, plus the
    1-norm of the reconstruction residual b - s u.

    Division starts from the leading coefficient: with every root of s
    inside the unit disk, rounding errors injected at step k are damped
    by root powers on the way down, whereas the ascending direction
    amplifies them like the reciprocal roots.
    """
    bb = np.asarray(b.coeffs)
    ss = np.asarray(s.coeffs)
    p = s.degree
    phat = b.degree - p
    u = np.zeros(phat + 1, dtype=complex)
    for k in range(phat, -1, -1):
        acc = bb[p + k]
        for i in range(1, min(p, phat - k) + 1):
            acc -= ss[p - i] * u[k + i]
        u[k] = acc / ss[p]
    resid = float(np.abs(bb - np.convolve(ss, u)).sum())
    return Poly(tuple(u)), resid


def _conv_matrix(w: np.ndarray, rows: int, cols: int) -> np.ndarray:
    """Banded matrix whose column j is w shifted down by j."""
    out = np.zeros((rows, cols), dtype=complex)
    for j in range(cols):
        top = min(rows - j, w.size)
        if top > 0:
            out[j : j + top, j] = w[:top]
    return out


def _factor_derivatives(sym: LaurentSymbol, s: Poly, u: Poly) -> tuple:
    """Solve the resultant-style system for d s_i / d lam and d u_i / d lam.

    Differentiating s(z) u(z) = z**m (a(z) - lam) and using that the
    leading coefficients s_p = 1 and u_{m+n-p} = a_n do not move gives
    a square (m+n) x (m+n) system with right-hand side -e_{m+1}.
    """
    m, n = sym.m, sym.n
    p = s.degree
    phat = u.degree
    rows = m + n
    cu = _conv_matrix(np.asarray(u.coeffs), rows, p)
    cs = _conv_matrix(np.asarray(s.coeffs), rows, phat)
    system = np.hstack([cu, cs])
    rhs = np.zeros(rows, dtype=complex)
    rhs[m] = -1.0
    x = lu_solve(system, rhs)
    return tuple(x[:p]), tuple(x[p:])


def wiener_hopf(sym: LaurentSymbol, lam: complex, method: str = "roots") -> WienerHopfFactors:
    """Factor z**m (a(z) - lam) = s(z) u(z) and attach shift derivatives.

    method "roots": companion rootfinding, split by modulus, monic
    product for s, descending long division for u.  method "cr": G from
    cyclic reduction on the associated unilateral matrix equation, s
    from the first row of -G (independent of any rootfinder).  Roots
    with modulus within SPLIT_BAND of 1 raise OnCurveError; a division
    residual above DECONV_TOL times the 1-norm raises
    FactorizationUnstableError.  An empty inside factor (p = 0) returns
    s = 1, u = z**m (a(z) - lam), and no derivatives.
    """
    b = char_poly(sym, lam)
    if method == "roots":
        roots = roots_companion(b)
        mags = [abs(r) for r in roots]
        if any(abs(mu - 1.0) <= SPLIT_BAND for mu in mags):
            raise OnCurveError(
                f"root of modulus within {SPLIT_BAND:g} of the unit circle at shift {lam}"
            )
        inside = [r for r in roots if abs(r) < 1.0]
        p = len(inside)
        if p == 0:
            return WienerHopfFactors(s=Poly((1.0,)), u=b, s_prime=(), u_prime=())
        s = _monic_from_roots(inside)
    elif method == "cr":
        p = sym.m + winding(sym, lam)
        if p == 0:
            return WienerHopfFactors(s=Poly((1.0,)), u=b, s_prime=(), u_prime=())
        g = _cr_minimal_solution(sym, lam, p)
        s = Poly(tuple(-g[0, :]) + (1.0,))
    else:
        raise InvalidInputError(f"unknown factorization method {method!r}")

    u, resid = _deconv_descending(b, s)
    if resid > DECONV_TOL * b.norm1():
        raise FactorizationUnstableError(
            f"division residual {resid:.3e} exceeds {DECONV_TOL:g} * |b|_1"
        )
    s_prime, u_prime = _factor_derivatives(sym, s, u)
    return WienerHopfFactors(s=s, u=u, s_prime=s_prime, u_prime=u_prime)


def _lower_toeplitz(first_col: np.ndarray) -> np.ndarray:
    p = first_col.size
    out = np.zeros((p, p), dtype=complex)
    for i in range(p):
        out[i:, i] = first_col[: p - i]
    return out


def _upper_toeplitz(first_row: np.ndarray) -> np.ndarray:
    return _lower_toeplitz(first_row).T.copy()


def _solve_unit_lower(lower: np.ndarray, rhs: np.ndarray) -> np.ndarray:
    """Forward substitution with a unit-diagonal lower triangular matrix."""
    x = rhs.astype(complex).copy()
    for i in range(1, x.shape[0]):
        x[i] -= lower[i, :i] @ x[:i]
    return x


def _check_monic(s: Poly) -> np.ndarray:
    coeffs = np.asarray(s.coeffs)
    if s.degree < 1 or abs(coeffs[-1] - 1.0) > 1e-12:
        raise InvalidInputError("expected a monic factor of degree >= 1")
    return coeffs


def barnett_g(s: Poly) -> np.ndarray:
    """G = F**p for the companion matrix F of the monic factor s, computed
    as -L^{-1} U with triangular Toeplitz L (unit diagonal) and U; only
    triangular solves, no inverse is formed.  The first row of -G
    reproduces (s_0, ..., s_{p-1})."""
    coeffs = _check_monic(s)
    p = s.degree
    lower = _lower_toeplitz(coeffs[1:][::-1])  # first column (s_p, ..., s_1)
    upper = _upper_toeplitz(coeffs[:p])  # first row (s_0, ..., s_{p-1})
    return -_solve_unit_lower(lower, upper)


def barnett_g_prime(s: Poly, s_prime) -> np.ndarray:
    """Shift derivative of G = F**p:  -L^{-1} U' + L^{-1} L' L^{-1} U,
    where the primed triangular Toeplitz factors are built from the
    derivatives of (s_0, ..., s_{p-1}) and s_p' = 0."""
    coeffs = _check_monic(s)
    p = s.degree
    ds = np.asarray(tuple(s_prime), dtype=complex)
    if ds.size != p:
        raise InvalidInputError(f"expected {p} coefficient derivatives, got {ds.size}")
    lower = _lower_toeplitz(coeffs[1:][::-1])
    upper = _upper_toeplitz(coeffs[:p])
    dl_col = np.concatenate([[0.0 + 0j], ds[1:][::-1]])  # (s_p', s_{p-1}', ..., s_1')
    d_lower = _lower_toeplitz(dl_col)
    d_upper = _upper_toeplitz(ds)
    linv_u = _solve_unit_lower(lower, upper)
    return _solve_unit_lower(lower, d_lower @ linv_u - d_upper)


def _blocks(sym: LaurentSymbol, lam: complex, p: int) -> list:
    """The p x p coefficient blocks of the band matrix with symbol
    z**(m-p) (a(z) - lam), partitioned from block row -1 upward."""
    m, n = sym.m, sym.n

    def shifted(off: int) -> complex:
        return sym.coeff(off) - (lam if off == 0 else 0)

    blocks = []
    k = -1
    while k * p - m + 1 <= n:
        blk = np.zeros((p, p), dtype=complex)
        base = k * p - m + p
        for i in range(p):
            for j in range(p):
                off = j - i + base
                if -m <= off <= n:
                    blk[i, j] = shifted(off)
        blocks.append(blk)
        k += 1
    return blocks


def _cr_minimal_solution(sym: LaurentSymbol, lam: complex, p: int) -> np.ndarray:
    """Minimal-spectral-radius solution of the unilateral block equation
    via cyclic reduction, for the quadratic case (at most three blocks).

    Quadratic convergence requires a spectral gap at the circle, which
    the caller's winding computation has already certified.
    """
    blocks = _blocks(sym, lam, p)
    while len(blocks) < 3:
        blocks.append(np.zeros((p, p), dtype=complex))
    if len(blocks) > 3:
        raise InvalidInputError(
            "cyclic reduction path requires 2 p >= m + n; use the roots method"
        )
    b_m1, b_0, b_1 = blocks
    a_m1 = b_m1.copy()
    hat = b_0.copy()
    for _ in range(60):
        t1 = lu_solve(b_0, b_m1)
        t2 = lu_solve(b_0, b_1)
        hat = hat - b_1 @ t1
        b_0 = b_0 - b_1 @ t1 - b_m1 @ t2
        b_m1 = -b_m1 @ t1
        b_1 = -b_1 @ t2
        drift = min(np.abs(b_m1).max(initial=0.0), np.abs(b_1).max(initial=0.0))
        if drift <= 1e-15 * max(np.abs(hat).max(initial=0.0), 1e-300):
            return -lu_solve(hat, a_m1)
    raise ConvergenceError("cyclic reduction did not converge")


def residual_mateq(sym: LaurentSymbol, lam: complex, g) -> float:
    """Row-sum norm of sum_k A_k G**(k+1) for the coefficient blocks A_k
    of the shifted band operator; a certificate that G generates the
    decaying solution space."""
    gm = np.asarray(g, dtype=complex)
    if gm.ndim != 2 or gm.shape[0] != gm.shape[1]:
        raise InvalidInputError("G must be square")
    p = gm.shape[0]
    acc = np.zeros((p, p), dtype=complex)
    power = np.eye(p, dtype=complex)
    for blk in _blocks(sym, lam, p):
        acc += blk @ power
        power = power @ gm
    return float(np.abs(acc).sum(axis=1).max())
