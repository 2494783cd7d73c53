"""Laurent symbols, dense polynomials, and unit-disk root counting.

The root counter squares the roots of a polynomial repeatedly (the even
part of b(z)*b(-z)) until a single coefficient dominates the 1-norm of
the rest; the index of that coefficient is the number of roots strictly
inside the unit circle, certified without computing any root.  When
roots hug the circle the squaring never separates them and an explicit
companion-matrix rootfinder takes over.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import (
    DomainError,
    InconsistentConstantError,
    InvalidSymbolError,
    OnCurveError,
)

# Number of root squarings before giving up: coefficient dynamic range
# grows doubly exponentially, so double precision is exhausted well
# before 30 steps.
GRAEFFE_MAXIT = 30

# A fallback root whose modulus is within this distance of 1 is treated
# as sitting on the symbol curve.
CIRCLE_TOL = 1e-8


def _complex_tuple(values) -> tuple:
    return tuple(complex(v) for v in values)


@dataclass(frozen=True)
class LaurentSymbol:
    """Coefficients of a banded two-sided symbol sum(a_i z^i, -m <= i <= n).

    ``neg`` holds (a_0, a_-1, ..., a_-m) and ``pos`` holds
    (a_0, a_1, ..., a_n); the constant term is stored in both halves.
    Requires m, n >= 1 and nonzero trailing coefficients a_-m, a_n.
    """

    neg: tuple
    pos: tuple

    def __post_init__(self):
        neg = _complex_tuple(self.neg)
        pos = _complex_tuple(self.pos)
        object.__setattr__(self, "neg", neg)
        object.__setattr__(self, "pos", pos)
        if len(neg) < 2 or len(pos) < 2:
            raise InvalidSymbolError("need at least m >= 1 and n >= 1 coefficients")
        if neg[0] != pos[0]:
            raise InconsistentConstantError(
                "constant coefficient differs between neg and pos"
            )
        if neg[-1] == 0:
            raise InvalidSymbolError("trailing coefficient a_-m must be nonzero")
        if pos[-1] == 0:
            raise InvalidSymbolError("trailing coefficient a_n must be nonzero")

    @property
    def m(self) -> int:
        return len(self.neg) - 1

    @property
    def n(self) -> int:
        return len(self.pos) - 1

    def coeff(self, j: int) -> complex:
        """The coefficient a_j, zero outside the band."""
        if j >= 0:
            return self.pos[j] if j <= self.n else 0j
        return self.neg[-j] if -j <= self.m else 0j

    def coeffs(self) -> np.ndarray:
        """All coefficients a_-m .. a_n in ascending power order."""
        return np.array(tuple(reversed(self.neg)) + self.pos[1:], dtype=complex)


@dataclass(frozen=True)
class Laurent:
    """A two-sided polynomial sum(c_k z^k) for k = low .. low + len(coeffs) - 1."""

    coeffs: tuple
    low: int

    def __post_init__(self):
        object.__setattr__(self, "coeffs", _complex_tuple(self.coeffs))

    def __call__(self, z: complex) -> complex:
        if z == 0 and self.low < 0:
            raise DomainError("cannot evaluate negative powers at z = 0")
        zc = complex(z)
        acc = 0j
        for k, c in enumerate(self.coeffs):
            if c != 0:
                acc += c * zc ** (self.low + k)
        return acc


@dataclass(frozen=True)
class Poly:
    """A dense polynomial, coefficients in ascending power order.

    Trailing exact zeros are trimmed so that the leading coefficient is
    nonzero unless the polynomial is identically zero (empty coeffs,
    degree -1).
    """

    coeffs: tuple

    def __post_init__(self):
        c = _complex_tuple(self.coeffs)
        end = len(c)
        while end > 0 and c[end - 1] == 0:
            end -= 1
        object.__setattr__(self, "coeffs", c[:end])

    @property
    def degree(self) -> int:
        return len(self.coeffs) - 1

    @property
    def is_zero(self) -> bool:
        return not self.coeffs

    def __call__(self, z: complex) -> complex:
        acc = 0j
        for c in reversed(self.coeffs):
            acc = acc * z + c
        return acc

    def norm1(self) -> float:
        return float(sum(abs(c) for c in self.coeffs))


def evaluate(sym: LaurentSymbol, z: complex) -> complex:
    """Value of the symbol at a nonzero point z."""
    if z == 0:
        raise DomainError("symbol has negative powers; z must be nonzero")
    zc = complex(z)
    acc = complex(sym.pos[0])
    zp = 1.0 + 0j
    for c in sym.pos[1:]:
        zp *= zc
        acc += c * zp
    zm = 1.0 + 0j
    for c in sym.neg[1:]:
        zm /= zc
        acc += c * zm
    return acc


def derivative(sym: LaurentSymbol) -> Laurent:
    """Term-by-term derivative: coefficients j*a_j for z**(j-1), j = -m..n."""
    coeffs = [j * sym.coeff(j) for j in range(-sym.m, sym.n + 1)]
    return Laurent(tuple(coeffs), low=-sym.m - 1)


def char_poly(sym: LaurentSymbol, lam: complex) -> Poly:
    """The degree m+n polynomial z**m * (a(z) - lam).

    Its roots inside the unit disk span the decaying solutions of the
    three-term-style recurrence attached to the shifted operator.
    """
    c = sym.coeffs()
    c[sym.m] -= lam
    return Poly(tuple(c))


def convolve(p: Poly, q: Poly) -> Poly:
    """Coefficient convolution, i.e. the product polynomial."""
    if p.is_zero or q.is_zero:
        return Poly(())
    a = np.asarray(p.coeffs)
    b = np.asarray(q.coeffs)
    return Poly(tuple(np.convolve(a, b)))


@dataclass(frozen=True)
class RootCount:
    """Outcome of counting roots inside the unit disk.

    ``roots`` carries the explicitly computed roots when the fallback
    rootfinder ran, so callers can inspect proximity to the circle.
    """

    count: int
    iterations_used: int
    fallback_used: bool
    roots: tuple | None = None


def graeffe_step(b: Poly) -> Poly:
    """One root-squaring step: the even part of b(z)*b(-z), scaled so its
    first maximum-modulus coefficient becomes 1.

    The roots of the output are the squares of the roots of the input;
    the degree is preserved in exact arithmetic.
    """
    if b.is_zero:
        raise DomainError("cannot square the roots of the zero polynomial")
    c = np.asarray(b.coeffs)
    alt = c * ((-1.0) ** np.arange(c.size))
    even = np.convolve(c, alt)[0::2]
    h = int(np.argmax(np.abs(even)))
    return Poly(tuple(even / even[h]))


def count_inside(b: Poly, maxit: int = GRAEFFE_MAXIT) -> RootCount:
    """Number of roots of b strictly inside the unit disk.

    Runs the root-squaring iteration until one coefficient holds more
    than half of the 1-norm, which certifies the count.  If that never
    happens within ``maxit`` steps (roots on or hugging the circle),
    falls back to explicit companion-matrix rootfinding on the original
    polynomial and reports the computed roots.
    """
    if b.is_zero:
        raise DomainError("root count of the zero polynomial is undefined")
    if maxit < 1:
        raise InvalidSymbolError("maxit must be at least 1")
    bk = b
    for nu in range(1, maxit + 1):
        bk = graeffe_step(bk)
        mags = np.abs(np.asarray(bk.coeffs))
        if mags.sum() < 2.0:
            return RootCount(
                count=int(np.argmax(mags)), iterations_used=nu, fallback_used=False
            )
    from .linalg import roots_companion  # deferred: linalg depends on this module

    roots = tuple(roots_companion(b)) if b.degree >= 1 else ()
    count = sum(1 for r in roots if abs(r) < 1.0)
    return RootCount(count=count, iterations_used=maxit, fallback_used=True, roots=roots)


def winding(sym: LaurentSymbol, lam: complex, maxit: int = GRAEFFE_MAXIT) -> int:
    """Winding number of the symbol curve around ``lam``.

    Equals the number of roots of a(z) - lam inside the unit disk minus
    m.  Raises OnCurveError when the count falls back to explicit roots
    and one of them sits within CIRCLE_TOL of the unit circle.
    """
    rc = count_inside(char_poly(sym, lam), maxit)
    if rc.fallback_used and rc.roots:
        if any(abs(abs(r) - 1.0) <= CIRCLE_TOL for r in rc.roots):
            raise OnCurveError(f"shift {lam} lies numerically on the symbol curve")
    return rc.count - sym.m
