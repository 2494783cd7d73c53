"""Reduction of the operator eigenproblem to a finite nonlinear one.

The boundary rows of the shifted operator, applied to any decaying
solution of the interior recurrence, yield W V(lam) beta = 0 with a
constant full-rank matrix W and a shift-dependent basis V.  Two bases
are supported: columns of powers of the inside roots (Vandermonde) and
block rows I, G, G**2, ... of powers of G = F**p (Frobenius), each with
its exact shift derivative.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    ClusteredRootsError,
    DerivativeVanishesError,
    InvalidInputError,
    OnCurveError,
    SingularMatrixError,
)
from .factor import SPLIT_BAND, GPair, WienerHopfFactors, barnett_g, barnett_g_prime
from .linalg import lu_solve, qr_rank_revealing, roots_companion
from .poly import LaurentSymbol, char_poly, derivative
from .qt import QTMatrix

# Inside roots closer than this are too clustered for a root-power
# basis.  A backward-stable rootfinder splits an exact multiple root to
# a distance of roughly sqrt(unit roundoff), so the threshold sits well
# above that while still admitting merely ill-conditioned clusters.
ROOT_SEP_TOL = 1e-6


@dataclass(frozen=True, eq=False)
class NEPContext:
    """The constant boundary matrix W restricted to its m + k2 possibly
    nonzero columns, plus the reduced row count q = m + rank of the
    below-band correction rows."""

    w: np.ndarray
    m: int
    q: int
    r2: int

    @property
    def width(self) -> int:
        return self.w.shape[1]


def build_w(a: QTMatrix) -> NEPContext:
    """Assemble W = [-B, E1; 0, R] from the symbol and the correction.

    B is the m x m upper triangular Toeplitz of (a_-m, ..., a_-1); the
    correction block enters shifted right by m columns.  Correction
    rows below row m are compressed to their rank by column-pivoted QR,
    so q = m when the correction has at most m rows.
    """
    sym = a.symbol
    corr = a.correction
    m = sym.m
    k1, k2 = corr.k1, corr.k2
    width = m + k2

    r2 = 0
    compressed = None
    if k1 > m:
        e2 = corr.dense()[m:, :]
        fac = qr_rank_revealing(e2)
        r2 = fac.rank
        compressed = np.zeros((r2, k2), dtype=complex)
        compressed[:, list(fac.permutation)] = fac.r[:r2, :]

    q = m + r2
    w = np.zeros((q, width), dtype=complex)
    for i in range(m):
        for j in range(i, m):
            w[i, j] = -sym.coeff(-m + j - i)
    if k1 > 0:
        block = corr.dense()
        top = min(m, k1)
        w[:top, m:] = block[:top, :]
    if r2 > 0:
        w[m:, m:] = compressed
    return NEPContext(w=w, m=m, q=q, r2=r2)


@dataclass(frozen=True, eq=False)
class BasisPair:
    """K x p basis of decaying interior solutions and its shift derivative.

    ``xi`` carries the inside roots for the Vandermonde kind, ``g_pair``
    the matrix G and its derivative for the Frobenius kind.
    """

    v: np.ndarray
    v_prime: np.ndarray
    kind: str
    xi: tuple | None = None
    g_pair: GPair | None = None

    @property
    def p(self) -> int:
        return self.v.shape[1]


def basis_vandermonde(sym: LaurentSymbol, lam: complex, rows: int) -> BasisPair:
    """Root-power basis: column j holds xi_j**0, xi_j**1, ... for the
    inside roots sorted by modulus then argument.

    The derivative uses d xi / d lam = 1 / a'(xi).  Raises
    ClusteredRootsError when two inside roots nearly coincide or a
    root is (numerically) multiple; the G-power basis is the remedy.
    """
    roots = roots_companion(char_poly(sym, lam))
    if any(abs(abs(r) - 1.0) <= SPLIT_BAND for r in roots):
        raise OnCurveError(f"root split undefined at shift {lam}")
    inside = sorted(
        (r for r in roots if abs(r) < 1.0), key=lambda z: (abs(z), np.angle(z))
    )
    p = len(inside)
    xi = np.asarray(inside, dtype=complex)
    for i in range(p):
        for j in range(i + 1, p):
            if abs(xi[i] - xi[j]) < ROOT_SEP_TOL:
                raise ClusteredRootsError(
                    f"inside roots {xi[i]} and {xi[j]} closer than {ROOT_SEP_TOL:g}"
                )
    da = derivative(sym)
    dvals = np.array([da(x) for x in xi], dtype=complex)
    if np.any(np.abs(dvals) < 1e-250):
        raise ClusteredRootsError("vanishing a'(xi): numerically multiple root")
    v = np.zeros((rows, p), dtype=complex)
    v_prime = np.zeros((rows, p), dtype=complex)
    if p:
        v[0, :] = 1.0
        for i in range(1, rows):
            v[i, :] = v[i - 1, :] * xi
        for i in range(1, rows):
            v_prime[i, :] = i * v[i - 1, :] / dvals
    return BasisPair(v=v, v_prime=v_prime, kind="vandermonde", xi=tuple(xi))


def basis_frobenius(factors: WienerHopfFactors, rows: int) -> BasisPair:
    """G-power basis: block rows I, G, G**2, ... truncated to ``rows``,
    with derivative block rows 0, G', (G**2)', ... built from the
    product rule (G**j)' = (G**(j-1))' G + G**(j-1) G'."""
    p = factors.p
    if p < 1:
        raise InvalidInputError("Frobenius basis requires p >= 1")
    if rows < p:
        raise InvalidInputError("basis must have at least p rows")
    g = barnett_g(factors.s)
    g_prime = barnett_g_prime(factors.s, factors.s_prime)
    v = np.zeros((rows, p), dtype=complex)
    v_prime = np.zeros((rows, p), dtype=complex)
    power = np.eye(p, dtype=complex)
    d_power = np.zeros((p, p), dtype=complex)
    row = 0
    while row < rows:
        take = min(p, rows - row)
        v[row : row + take] = power[:take]
        v_prime[row : row + take] = d_power[:take]
        d_power = d_power @ g + power @ g_prime
        power = power @ g
        row += take
    return BasisPair(
        v=v, v_prime=v_prime, kind="frobenius", g_pair=GPair(g=g, g_prime=g_prime)
    )


def phi(ctx: NEPContext, basis: BasisPair, rows: int) -> tuple:
    """The leading ``rows`` rows of W V and of W V', as a pair.

    Square exactly when rows equals the basis width p; with q > p only
    the first p equations are kept.
    """
    if basis.v.shape[0] != ctx.width:
        raise InvalidInputError(
            f"basis has {basis.v.shape[0]} rows, context width is {ctx.width}"
        )
    if rows > ctx.q:
        raise InvalidInputError("cannot take more rows than equations")
    full = ctx.w @ basis.v
    full_prime = ctx.w @ basis.v_prime
    return full[:rows], full_prime[:rows]


def newton_correction(phi_mat, phi_prime) -> complex:
    """The ratio det / (det)' for the square pencil, computed through the
    trace identity 1 / trace(Phi^{-1} Phi').

    A singular Phi means the determinant already vanishes and the
    correction is 0.  A vanishing trace (below 1e-300) cannot drive the
    iteration and is surfaced as DerivativeVanishesError.
    """
    try:
        x = lu_solve(phi_mat, phi_prime)
    except SingularMatrixError:
        return 0j
    tr = complex(np.trace(np.atleast_2d(x)))
    if abs(tr) < 1e-300:
        raise DerivativeVanishesError("trace of Phi^{-1} Phi' vanished")
    return 1.0 / tr


def eigvec_prefix(
    basis: BasisPair, beta, length: int, sym: LaurentSymbol, lam: complex
) -> np.ndarray:
    """Leading ``length`` eigenvector entries v_i = (row i + m of the
    basis) . beta, extending past the stored rows by the interior
    recurrence (root powers or further G powers)."""
    bvec = np.asarray(beta, dtype=complex)
    if bvec.ndim != 1 or bvec.size != basis.p or not np.any(bvec):
        raise InvalidInputError("beta must be a nonzero vector of length p")
    m = sym.m
    total = length + m
    if basis.kind == "vandermonde":
        xi = np.asarray(basis.xi, dtype=complex)
        out = np.zeros(length, dtype=complex)
        powers = xi ** m
        for i in range(length):
            out[i] = powers @ bvec
            powers = powers * xi
        return out
    g = basis.g_pair.g
    p = basis.p
    out = np.zeros(total, dtype=complex)
    vec = bvec
    row = 0
    while row < total:
        take = min(p, total - row)
        out[row : row + take] = vec[:take]
        vec = g @ vec
        row += take
    return out[m:]
