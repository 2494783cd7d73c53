"""Newton's iteration on the determinant of the reduced pencil, the
all-eigenvalue driver seeded by finite-section eigenvalues, and the
winding / attraction-basin rasters.

Each iteration re-checks the winding number (the component must not
change), flags components with more decaying solutions than equations
as continuous eigenvalue sets, and guards against shifts escaping the
operator norm.  Iterations halt once the step modulus drops below the
step tolerance without shrinking further, after which one extra
refining step is applied; the run is accepted only if the relative
residual of the boundary equations passes.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (
    ClusteredRootsError,
    DerivativeVanishesError,
    FactorizationUnstableError,
    InvalidInputError,
    OnCurveError,
    SingularMatrixError,
)
from .factor import wiener_hopf
from .linalg import eig_dense, qr_rank_revealing
from .nep import (
    basis_frobenius,
    basis_vandermonde,
    build_w,
    eigvec_prefix,
    newton_correction,
    phi,
)
from .poly import winding
from .qt import EigRecord, QTMatrix, SolveStatus, apply_prefix, finite_section, norm_inf

_UNIT_ROUNDOFF = float(np.finfo(float).eps)

# Raster labels for attraction basins.
BASIN_CONTINUOUS = -1
BASIN_NONCONV = -2

# Raster sentinel for winding cells on the symbol curve.
CURVE_SENTINEL = -128


@dataclass(frozen=True)
class SolverConfig:
    """Knobs for a Newton run.

    tol_step is absolute but scaled by max(1, |shift|) at use;
    the default is 1000 unit roundoffs.
    """

    tol_step: float = 1e3 * _UNIT_ROUNDOFF
    maxit: int = 20
    method: str = "frobenius"
    gamma: float = 3.0
    residual_tol: float = 1e-10
    dedupe_tol: float = 1e-8
    vec_len: int = 100

    def __post_init__(self):
        if min(self.tol_step, self.gamma, self.residual_tol, self.dedupe_tol) <= 0:
            raise InvalidInputError("tolerances and gamma must be positive")
        if self.maxit < 1:
            raise InvalidInputError("maxit must be at least 1")
        if self.method not in ("frobenius", "vandermonde"):
            raise InvalidInputError(f"unknown method {self.method!r}")
        if self.vec_len < 1:
            raise InvalidInputError("vec_len must be at least 1")


@dataclass(frozen=True)
class EigenSolveReport:
    """Deduplicated isolated eigenvalues plus bookkeeping for one driver run."""

    records: tuple
    section_size: int
    raw_starts: int
    converged: int
    continuous_detected: bool


def _failure(lam: complex, iterations: int, status: SolveStatus, residual=math.inf) -> EigRecord:
    return EigRecord(
        lam=complex(lam),
        beta=(),
        vec_prefix=(),
        residual=float(residual),
        iterations=iterations,
        status=status,
    )


def _build_basis(a: QTMatrix, lam: complex, width: int, method: str):
    """Basis of decaying solutions at the given shift; the Vandermonde
    kind falls back to the G-power kind on clustered roots."""
    sym = a.symbol
    if method == "vandermonde":
        try:
            return basis_vandermonde(sym, lam, width)
        except ClusteredRootsError:
            pass
    factors = wiener_hopf(sym, lam, method="roots")
    return basis_frobenius(factors, width)


def _null_direction(phi_mat: np.ndarray) -> np.ndarray:
    """Approximate null vector of a square matrix: the last column of the
    full Q factor from column-pivoted QR of its conjugate transpose."""
    fac = qr_rank_revealing(phi_mat.conj().T)
    return fac.q[:, -1].copy()


class _Guard(Exception):
    """Internal: carries an early classification out of the step helpers."""

    def __init__(self, status: SolveStatus):
        self.status = status


def _checked_step(a, ctx, lam, w0, a_norm, method):
    """One guarded Newton evaluation: winding, component, size and
    balance checks, then the trace correction.  Returns (step, p)."""
    sym = a.symbol
    try:
        w = winding(sym, lam)
    except OnCurveError:
        raise _Guard(SolveStatus.ON_CURVE)
    if w != w0:
        raise _Guard(SolveStatus.OUT_OF_COMPONENT)
    p = sym.m + w
    if p > ctx.q:
        raise _Guard(SolveStatus.CONTINUOUS_SET)
    if abs(lam) > a_norm:
        raise _Guard(SolveStatus.DIVERGED)
    if p == 0:
        # no decaying solutions at all in this component: nothing to solve
        raise _Guard(SolveStatus.NO_CONVERGENCE_PLTQ)
    try:
        basis = _build_basis(a, lam, ctx.width, method)
    except OnCurveError:
        raise _Guard(SolveStatus.ON_CURVE)
    except (FactorizationUnstableError, SingularMatrixError):
        # the factorization pipeline broke down at this shift; classified
        # as a failed run rather than escaping the driver
        raise _Guard(SolveStatus.MAX_ITERATIONS)
    if basis.p != p:
        # root split and winding disagree: the shift hugs a component boundary
        raise _Guard(SolveStatus.ON_CURVE)
    phi_mat, phi_prime = phi(ctx, basis, p)
    return newton_correction(phi_mat, phi_prime), p


def _classify(a, ctx, lam, p, iterations, cfg):
    """Residual test and, for p < q, the rank certificate, at a converged
    shift.  Returns an EigRecord or None when not accepted."""
    sym = a.symbol
    corr = a.correction
    q = ctx.q
    try:
        basis = _build_basis(a, lam, ctx.width, cfg.method)
    except OnCurveError:
        return _failure(lam, iterations, SolveStatus.ON_CURVE)
    except (FactorizationUnstableError, SingularMatrixError):
        return None
    if basis.p != p:
        return _failure(lam, iterations, SolveStatus.ON_CURVE)
    phi_mat, _ = phi(ctx, basis, p)
    beta = _null_direction(phi_mat)
    res_len = max(q + sym.n, corr.k2)
    vec = eigvec_prefix(basis, beta, res_len, sym, lam)
    denom_q = float(np.linalg.norm(vec[:q]))
    if denom_q == 0.0:
        return None
    res_q = float(np.linalg.norm(apply_prefix(a, vec, q) - lam * vec[:q])) / denom_q
    if p == q:
        if res_q > cfg.residual_tol:
            return None
        status = SolveStatus.ISOLATED_PQ
    else:
        denom_p = float(np.linalg.norm(vec[:p]))
        if denom_p == 0.0:
            return None
        res_p = float(np.linalg.norm(apply_prefix(a, vec, p) - lam * vec[:p])) / denom_p
        if res_p > cfg.residual_tol:
            return None
        full_rank_fac = qr_rank_revealing(ctx.w @ basis.v)
        if full_rank_fac.rank >= p or res_q > cfg.residual_tol:
            return _failure(lam, iterations, SolveStatus.NO_CONVERGENCE_PLTQ, res_q)
        status = SolveStatus.ISOLATED_PLTQ
    prefix = eigvec_prefix(basis, beta, cfg.vec_len, sym, lam)
    return EigRecord(
        lam=complex(lam),
        beta=tuple(beta),
        vec_prefix=tuple(prefix),
        residual=res_q,
        iterations=iterations,
        status=status,
    )


def _run_newton(a, ctx, a_norm, lam0, cfg) -> EigRecord:
    sym = a.symbol
    lam = complex(lam0)
    try:
        w0 = winding(sym, lam)
    except OnCurveError:
        return _failure(lam, 0, SolveStatus.ON_CURVE)
    prev_step = math.inf
    iters = 0
    jittered = False
    while iters < cfg.maxit:
        try:
            step, p = _checked_step(a, ctx, lam, w0, a_norm, cfg.method)
        except _Guard as g:
            return _failure(lam, iters, g.status)
        except DerivativeVanishesError:
            if jittered:
                return _failure(lam, iters, SolveStatus.MAX_ITERATIONS)
            jittered = True
            lam = lam * (1 + 1e-8) + 1e-8j
            continue
        iters += 1
        nxt = lam - step
        smod = abs(step)
        if smod < cfg.tol_step * max(1.0, abs(lam)) and smod >= prev_step:
            # stagnated at the rounding floor: one extra refining step,
            # charged against the same iteration budget
            if iters >= cfg.maxit:
                break
            try:
                refine, p = _checked_step(a, ctx, nxt, w0, a_norm, cfg.method)
            except _Guard as g:
                return _failure(nxt, iters, g.status)
            except DerivativeVanishesError:
                return _failure(nxt, iters, SolveStatus.MAX_ITERATIONS)
            iters += 1
            final = nxt - refine
            record = _classify(a, ctx, final, p, iters, cfg)
            if record is not None:
                return record
            prev_step = abs(refine)
            lam = final
        else:
            prev_step = smod
            lam = nxt
    return _failure(lam, iters, SolveStatus.MAX_ITERATIONS)


def eig_single(a: QTMatrix, lam0: complex, cfg: SolverConfig | None = None) -> EigRecord:
    """Refine one starting shift by Newton's iteration and classify the
    outcome (isolated eigenvalue, continuous component, escape, ...)."""
    cfg = cfg or SolverConfig()
    start = complex(lam0)
    if not (math.isfinite(start.real) and math.isfinite(start.imag)):
        raise InvalidInputError("starting shift must be finite")
    ctx = build_w(a)
    return _run_newton(a, ctx, norm_inf(a), start, cfg)


def _dedupe(records, tol):
    """Cluster isolated records by shift, keeping the representative with
    the smallest residual per cluster."""
    reps: list = []
    for rec in sorted(records, key=lambda r: (r.lam.real, r.lam.imag)):
        for k, rep in enumerate(reps):
            if abs(rec.lam - rep.lam) <= tol * max(1.0, abs(rec.lam)):
                if rec.residual < rep.residual:
                    reps[k] = rec
                break
        else:
            reps.append(rec)
    return sorted(reps, key=lambda r: (r.lam.real, r.lam.imag))


def section_size(a: QTMatrix, gamma: float) -> int:
    """Seeding truncation level: gamma times the larger of the correction
    support and the bandwidth."""
    sym = a.symbol
    corr = a.correction
    return int(math.ceil(gamma * max(corr.k1, corr.k2, sym.m + sym.n)))


def eig_all(a: QTMatrix, cfg: SolverConfig | None = None) -> EigenSolveReport:
    """Find isolated eigenvalues by running Newton from every eigenvalue
    of a finite section, then deduplicating the converged limits.

    Seeding from a finite truncation is a heuristic: eigenvalues whose
    basins the section misses are not found.
    """
    cfg = cfg or SolverConfig()
    size = section_size(a, cfg.gamma)
    starts = eig_dense(finite_section(a, size))
    a_norm = norm_inf(a)
    ctx = build_w(a)
    isolated = []
    continuous = False
    for start in starts:
        if abs(start) > 1.1 * a_norm:
            continue
        rec = _run_newton(a, ctx, a_norm, start, cfg)
        if rec.status is SolveStatus.CONTINUOUS_SET:
            continuous = True
        if rec.is_isolated:
            isolated.append(rec)
    deduped = tuple(_dedupe(isolated, cfg.dedupe_tol))
    return EigenSolveReport(
        records=deduped,
        section_size=size,
        raw_starts=len(starts),
        converged=len(deduped),
        continuous_detected=continuous,
    )


def _grid_axes(re_range, im_range, resolution):
    if isinstance(resolution, int):
        n_re = n_im = resolution
    else:
        n_re, n_im = (int(r) for r in resolution)
    if n_re < 2 or n_im < 2:
        raise InvalidInputError("resolution must be at least 2 per axis")
    re0, re1 = (float(x) for x in re_range)
    im0, im1 = (float(x) for x in im_range)
    if re1 <= re0 or im1 <= im0:
        raise InvalidInputError("ranges must be increasing")
    res = re0 + (np.arange(n_re) + 0.5) * (re1 - re0) / n_re
    ims = im0 + (np.arange(n_im) + 0.5) * (im1 - im0) / n_im
    return res, ims


def winding_map(a: QTMatrix, re_range, im_range, resolution) -> np.ndarray:
    """Winding number of the symbol curve at every cell center of the box,
    with CURVE_SENTINEL marking cells that land on the curve.

    Returns an (n_im, n_re) integer grid; row k belongs to the k-th
    imaginary coordinate, column j to the j-th real coordinate.
    """
    res, ims = _grid_axes(re_range, im_range, resolution)
    sym = a.symbol
    out = np.zeros((ims.size, res.size), dtype=np.int64)
    for k, y in enumerate(ims):
        for j, x in enumerate(res):
            try:
                out[k, j] = winding(sym, complex(x, y))
            except OnCurveError:
                out[k, j] = CURVE_SENTINEL
    return out


def basins(a: QTMatrix, re_range, im_range, resolution, cfg: SolverConfig | None = None):
    """Label each cell center of the box by the limit of Newton's iteration
    started there: the index of the deduplicated limit eigenvalue,
    BASIN_CONTINUOUS for continuous-component cells, BASIN_NONCONV for
    everything else.

    Returns (labels, eigenvalues): the (n_im, n_re) label grid and the
    list of limit eigenvalues the nonnegative labels refer to.
    """
    cfg = cfg or SolverConfig()
    res, ims = _grid_axes(re_range, im_range, resolution)
    ctx = build_w(a)
    a_norm = norm_inf(a)
    labels = np.full((ims.size, res.size), BASIN_NONCONV, dtype=np.int64)
    limits: list = []
    for k, y in enumerate(ims):
        for j, x in enumerate(res):
            rec = _run_newton(a, ctx, a_norm, complex(x, y), cfg)
            if rec.status is SolveStatus.CONTINUOUS_SET:
                labels[k, j] = BASIN_CONTINUOUS
            elif rec.is_isolated:
                for idx, lim in enumerate(limits):
                    if abs(rec.lam - lim) <= cfg.dedupe_tol * max(1.0, abs(rec.lam)):
                        labels[k, j] = idx
                        break
                else:
                    limits.append(rec.lam)
                    labels[k, j] = len(limits) - 1
    return labels, limits
