"""The operator model: a banded two-sided part plus a finite correction.

A matrix here is the semi-infinite operator A whose entry (i, j) is
a_{j-i} + e_{i,j}, acting on square-summable sequences.  The module
builds finite sections, applies the operator to vector prefixes,
computes the exact row-sum norm, and samples the symbol curve.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (
    InvalidInputError,
    PrefixTooShortError,
    SectionTooSmallError,
)
from .poly import LaurentSymbol


@dataclass(frozen=True)
class Correction:
    """A finite-support correction stored as 1-based (row, col, value) triplets.

    k1 and k2 are the tight row and column support: some entry lies in
    row k1 and some entry in column k2, or both are 0 for the zero
    correction.  Values are nonzero and positions unique.
    """

    k1: int
    k2: int
    entries: tuple

    def __post_init__(self):
        ents = tuple(
            (int(i), int(j), complex(v)) for i, j, v in self.entries
        )
        object.__setattr__(self, "entries", ents)
        seen = set()
        for i, j, v in ents:
            if i < 1 or j < 1:
                raise InvalidInputError("correction positions are 1-based")
            if v == 0:
                raise InvalidInputError("correction stores only nonzero values")
            if (i, j) in seen:
                raise InvalidInputError(f"duplicate correction entry at ({i}, {j})")
            seen.add((i, j))
        k1 = max((i for i, _, _ in ents), default=0)
        k2 = max((j for _, j, _ in ents), default=0)
        if (self.k1, self.k2) != (k1, k2):
            raise InvalidInputError(
                f"support ({self.k1}, {self.k2}) is not tight; expected ({k1}, {k2})"
            )

    @classmethod
    def from_entries(cls, entries) -> "Correction":
        """Normalize arbitrary triplets: drop zeros, sort, recompute support."""
        ents = sorted(
            ((int(i), int(j), complex(v)) for i, j, v in entries if complex(v) != 0),
            key=lambda t: (t[0], t[1]),
        )
        k1 = max((i for i, _, _ in ents), default=0)
        k2 = max((j for _, j, _ in ents), default=0)
        return cls(k1=k1, k2=k2, entries=tuple(ents))

    @classmethod
    def from_dense(cls, block) -> "Correction":
        arr = np.asarray(block, dtype=complex)
        if arr.ndim != 2:
            raise InvalidInputError("dense correction block must be 2-D")
        ents = [
            (i + 1, j + 1, arr[i, j])
            for i in range(arr.shape[0])
            for j in range(arr.shape[1])
            if arr[i, j] != 0
        ]
        return cls.from_entries(ents)

    @classmethod
    def zero(cls) -> "Correction":
        return cls(k1=0, k2=0, entries=())

    @property
    def is_zero(self) -> bool:
        return not self.entries

    def dense(self) -> np.ndarray:
        """The k1 x k2 block holding every nonzero entry."""
        block = np.zeros((self.k1, self.k2), dtype=complex)
        for i, j, v in self.entries:
            block[i - 1, j - 1] = v
        return block


@dataclass(frozen=True)
class QTMatrix:
    """The operator: Toeplitz part from ``symbol`` plus ``correction``."""

    symbol: LaurentSymbol
    correction: Correction


def qt_new(neg, pos, correction=None) -> QTMatrix:
    """Validated construction from the (a_0, a_-1, ...), (a_0, a_1, ...)
    coefficient convention plus an optional correction.

    ``correction`` may be None, a Correction, or an iterable of
    1-based (row, col, value) triplets; its support is re-tightened
    (zero values dropped, k1/k2 recomputed).
    """
    sym = LaurentSymbol(neg=tuple(neg), pos=tuple(pos))
    if correction is None:
        corr = Correction.zero()
    elif isinstance(correction, Correction):
        corr = Correction.from_entries(correction.entries)
    else:
        corr = Correction.from_entries(correction)
    return QTMatrix(symbol=sym, correction=corr)


def finite_section(a: QTMatrix, size: int) -> np.ndarray:
    """The size x size leading principal submatrix."""
    sym = a.symbol
    corr = a.correction
    n = int(size)
    if n < max(sym.m, sym.n, corr.k1, corr.k2, 1):
        raise SectionTooSmallError(
            f"section size {n} does not cover the band and correction"
        )
    out = np.zeros((n, n), dtype=complex)
    for d in range(-sym.m, sym.n + 1):
        c = sym.coeff(d)
        if c == 0:
            continue
        if d >= 0:
            np.fill_diagonal(out[:, d:], c)
        else:
            np.fill_diagonal(out[-d:, :], c)
    for i, j, v in corr.entries:
        out[i - 1, j - 1] += v
    return out


def apply_prefix(a: QTMatrix, v, out_len: int) -> np.ndarray:
    """First ``out_len`` entries of A v, where v is the prefix of a
    square-summable vector whose tail is negligible.

    The prefix must be long enough that every requested entry sees its
    full band (len(v) >= out_len + n) and, when correction rows are
    requested, every correction column (len(v) >= k2).
    """
    sym = a.symbol
    corr = a.correction
    vec = np.asarray(v, dtype=complex)
    if vec.ndim != 1:
        raise InvalidInputError("prefix must be a 1-D vector")
    L = vec.size
    out_len = int(out_len)
    if out_len < 0:
        raise InvalidInputError("out_len must be nonnegative")
    if L < out_len + sym.n:
        raise PrefixTooShortError(f"need at least {out_len + sym.n} entries, got {L}")
    need_cols = max((j for i, j, _ in corr.entries if i <= out_len), default=0)
    if L < need_cols:
        raise PrefixTooShortError(
            f"correction rows require {need_cols} entries, got {L}"
        )
    out = np.zeros(out_len, dtype=complex)
    for d in range(-sym.m, sym.n + 1):
        c = sym.coeff(d)
        if c == 0:
            continue
        start = max(0, -d)
        if start < out_len:
            out[start:] += c * vec[start + d : out_len + d]
    for i, j, v_e in corr.entries:
        if i <= out_len:
            out[i - 1] += v_e * vec[j - 1]
    return out


def norm_inf(a: QTMatrix) -> float:
    """Exact row-sum operator norm: the maximum of the corrected row sums
    and the generic band row sum."""
    sym = a.symbol
    corr = a.correction
    generic = float(np.abs(sym.coeffs()).sum())
    best = generic
    if not corr.is_zero:
        block = corr.dense()
        for i in range(1, corr.k1 + 1):
            hi = max(i + sym.n, corr.k2)
            row = np.zeros(hi, dtype=complex)
            for j in range(max(1, i - sym.m), i + sym.n + 1):
                row[j - 1] = sym.coeff(j - i)
            row[: corr.k2] += block[i - 1]
            best = max(best, float(np.abs(row).sum()))
    return best


def symbol_curve(a: QTMatrix, nsamples: int) -> np.ndarray:
    """The symbol evaluated at nsamples equispaced points of the unit
    circle, starting at z = 1."""
    if nsamples < 2:
        raise InvalidInputError("nsamples must be at least 2")
    sym = a.symbol
    z = np.exp(2j * np.pi * np.arange(nsamples) / nsamples)
    vals = np.zeros(nsamples, dtype=complex)
    for d in range(-sym.m, sym.n + 1):
        c = sym.coeff(d)
        if c != 0:
            vals += c * z**d
    return vals


class SolveStatus(Enum):
    """Classification of one Newton run."""

    ISOLATED_PQ = "isolated_pq"
    ISOLATED_PLTQ = "isolated_pltq"
    CONTINUOUS_SET = "continuous_set"
    OUT_OF_COMPONENT = "out_of_component"
    NO_CONVERGENCE_PLTQ = "no_convergence_pltq"
    MAX_ITERATIONS = "max_iterations"
    DIVERGED = "diverged"
    ON_CURVE = "on_curve"


_ISOLATED = (SolveStatus.ISOLATED_PQ, SolveStatus.ISOLATED_PLTQ)


@dataclass(frozen=True)
class EigRecord:
    """Classified result of one Newton run.

    For isolated outcomes ``beta`` is the combination vector in the
    decaying-solution basis, ``vec_prefix`` the leading eigenvector
    entries, and ``residual`` the relative residual of the defining
    equations.  Other outcomes carry the last shift and an infinite or
    irrelevant residual.
    """

    lam: complex
    beta: tuple
    vec_prefix: tuple
    residual: float
    iterations: int
    status: SolveStatus

    @property
    def is_isolated(self) -> bool:
        return self.status in _ISOLATED

    @property
    def tail_abs(self) -> float:
        """Modulus of the last reported eigenvector entry (decay witness)."""
        return abs(self.vec_prefix[-1]) if self.vec_prefix else 0.0
