import numpy as np
import pytest

import qteig as q
from qteig.errors import (
    ClusteredRootsError,
    DerivativeVanishesError,
    InvalidInputError,
)
from qteig.factor import wiener_hopf
from qteig.linalg import lu_solve
from qteig.nep import (
    NEPContext,
    basis_frobenius,
    basis_vandermonde,
    build_w,
    eigvec_prefix,
    newton_correction,
    phi,
)


def det_lu(a):
    a = np.array(a, dtype=complex)
    sign = 1.0
    n = a.shape[0]
    for k in range(n):
        piv = k + int(np.argmax(np.abs(a[k:, k])))
        if piv != k:
            a[[k, piv]] = a[[piv, k]]
            sign = -sign
        if a[k, k] == 0:
            return 0j
        a[k + 1 :, k + 1 :] -= np.outer(a[k + 1 :, k] / a[k, k], a[k, k + 1 :])
    return sign * np.prod(np.diag(a))


def det_phi(a, ctx, lam, rows, method="vandermonde"):
    sym = a.symbol
    if method == "vandermonde":
        basis = basis_vandermonde(sym, lam, ctx.width)
    else:
        basis = basis_frobenius(wiener_hopf(sym, lam), ctx.width)
    p_mat, _ = phi(ctx, basis, rows)
    return det_lu(p_mat)


class TestBuildW:
    def test_fix_a(self, fix_a):
        ctx = build_w(fix_a)
        assert (ctx.q, ctx.r2, ctx.width) == (1, 0, 2)
        assert np.allclose(ctx.w, [[2.0, -4.0]])

    def test_wide_correction(self, test1_case2):
        ctx = build_w(test1_case2)
        assert (ctx.q, ctx.r2, ctx.width) == (3, 0, 103)
        # top-left block is minus the upper triangular Toeplitz of
        # (a_-3, a_-2, a_-1), diagonal -a_-3
        assert np.allclose(ctx.w[:3, :3], [[1, -1, 1], [0, 1, -1], [0, 0, 1]])
        assert ctx.w[0, 102] == 8
        assert ctx.w[2, 102] == 24

    def test_rank_compressed_rows(self, test1_case1):
        ctx = build_w(test1_case1)
        assert (ctx.q, ctx.r2, ctx.width) == (4, 1, 103)
        # the compressed row carries the norm of the tail column
        tail = np.linalg.norm(np.arange(4, 21))
        assert np.abs(ctx.w[3, :102]).max() == 0
        assert abs(ctx.w[3, 102]) == pytest.approx(tail)

    def test_no_correction(self):
        ctx = build_w(q.qt_new([0, 1], [0, 2]))
        assert (ctx.q, ctx.r2, ctx.width) == (1, 0, 1)
        assert np.allclose(ctx.w, [[-1.0]])


class TestBasisVandermonde:
    def test_fix_a(self, fix_a):
        bas = basis_vandermonde(fix_a.symbol, 0.0, 3)
        assert bas.p == 1
        assert np.allclose(bas.v[:, 0], [1, 0.5, 0.25])
        assert np.allclose(bas.v_prime[:, 0], [0, 1 / 6, 1 / 6])

    def test_two_columns(self):
        sym = q.LaurentSymbol(neg=(0, 1), pos=(0, 2))
        bas = basis_vandermonde(sym, 0.0, 2)
        r = 1 / np.sqrt(2)
        assert bas.p == 2
        assert np.allclose(np.abs(bas.v[1, :]), [r, r])
        assert np.allclose(bas.v[0, :], [1, 1])
        assert bas.v[1, 0] == pytest.approx(-bas.v[1, 1])

    def test_clustered_roots_rejected(self):
        # z (a(z) - 0) = (z - 0.3)**2 (z - 2): exact double root inside
        sym = q.LaurentSymbol(neg=(1.29, -0.18), pos=(1.29, -2.6, 1.0))
        assert q.char_poly(sym, 0.0).coeffs == (-0.18, 1.29, -2.6, 1.0)
        with pytest.raises(ClusteredRootsError):
            basis_vandermonde(sym, 0.0, 4)

    def test_columns_satisfy_recurrence(self, fix_b_symbol):
        lam = -1 + 0.5j
        sym = fix_b_symbol
        rows = 12 + sym.n
        bas = basis_vandermonde(sym, lam, rows)
        coeffs = sym.coeffs()
        for c in range(bas.p):
            col = bas.v[:, c]
            for k in range(rows - sym.m - sym.n):
                window = col[k : k + sym.m + sym.n + 1]
                resid = coeffs @ window - lam * col[k + sym.m]
                assert abs(resid) <= 1e-8 * np.linalg.norm(col)


class TestBasisFrobenius:
    def test_fix_a(self, fix_a):
        f = wiener_hopf(fix_a.symbol, 0.0)
        bas = basis_frobenius(f, 3)
        assert np.allclose(bas.v[:, 0], [1, 0.5, 0.25])
        assert np.allclose(bas.v_prime[:, 0], [0, 1 / 6, 1 / 6])

    def test_zero_derivative_propagates(self, fix_a):
        f = wiener_hopf(fix_a.symbol, 0.0)
        frozen = q.WienerHopfFactors(s=f.s, u=f.u, s_prime=(0.0,), u_prime=f.u_prime)
        bas = basis_frobenius(frozen, 5)
        assert np.abs(bas.v_prime).max() == 0.0

    def test_block_structure(self):
        s = q.Poly((-0.12, 0.1, 1.0))
        f = q.WienerHopfFactors(s=s, u=q.Poly((1.0,)), s_prime=(0, 0), u_prime=())
        bas = basis_frobenius(f, 4)
        assert np.allclose(bas.v[:2], np.eye(2))
        assert np.allclose(bas.v[2:], [[0.12, -0.1], [-0.012, 0.13]])

    def test_columns_satisfy_recurrence(self, fix_b_symbol):
        lam = -1 + 0.5j
        sym = fix_b_symbol
        rows = 12 + sym.n
        bas = basis_frobenius(wiener_hopf(sym, lam), rows)
        coeffs = sym.coeffs()
        for c in range(bas.p):
            col = bas.v[:, c]
            for k in range(rows - sym.m - sym.n):
                window = col[k : k + sym.m + sym.n + 1]
                resid = coeffs @ window - lam * col[k + sym.m]
                assert abs(resid) <= 1e-8 * np.linalg.norm(col)


class TestPhi:
    def test_fix_a_certificate(self, fix_a):
        ctx = build_w(fix_a)
        bas = basis_vandermonde(fix_a.symbol, 0.0, ctx.width)
        p_mat, p_prime = phi(ctx, bas, 1)
        assert abs(p_mat[0, 0]) < 1e-15
        assert p_prime[0, 0] == pytest.approx(-2 / 3)

    def test_determinant_relation(self, test1_case2):
        # det of the root-power pencil equals det of the G-power pencil
        # times det of the leading p x p root-power block
        ctx = build_w(test1_case2)
        sym = test1_case2.symbol
        for lam in (-1 + 0.5j, -2.5 + 0.2j, 0.5 + 1.1j):
            bas_v = basis_vandermonde(sym, lam, ctx.width)
            p = bas_v.p
            if not 1 <= p <= ctx.q:
                continue
            bas_f = basis_frobenius(wiener_hopf(sym, lam), ctx.width)
            f_v = det_lu(phi(ctx, bas_v, p)[0])
            f_f = det_lu(phi(ctx, bas_f, p)[0])
            det_vp = det_lu(bas_v.v[:p, :])
            assert f_v == pytest.approx(f_f * det_vp, rel=1e-8)

    def test_row_scaling_leaves_correction_invariant(self, fix_a):
        ctx = build_w(fix_a)
        scaled = NEPContext(w=10.0 * ctx.w, m=ctx.m, q=ctx.q, r2=ctx.r2)
        lam = 0.1
        bas = basis_vandermonde(fix_a.symbol, lam, ctx.width)
        c1 = newton_correction(*phi(ctx, bas, 1))
        c2 = newton_correction(*phi(scaled, bas, 1))
        assert c1 == pytest.approx(c2, abs=1e-10)


class TestNewtonCorrection:
    def test_scalar(self):
        assert newton_correction([[3.0]], [[2.0]]) == pytest.approx(1.5)

    def test_singular_returns_zero(self):
        assert newton_correction([[0.0]], [[1.0]]) == 0

    def test_vanishing_trace(self):
        with pytest.raises(DerivativeVanishesError):
            newton_correction([[1.0]], [[0.0]])

    def test_trace_product_rule(self):
        rng = np.random.default_rng(41)
        for _ in range(10):
            n = int(rng.integers(2, 6))
            p0 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) + 3 * np.eye(n)
            p1 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            q0 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n)) + 3 * np.eye(n)
            q1 = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
            prod = p0 @ q0
            prod_prime = p1 @ q0 + p0 @ q1
            lhs = np.trace(lu_solve(prod, prod_prime))
            rhs = np.trace(lu_solve(p0, p1)) + np.trace(lu_solve(q0, q1))
            assert lhs == pytest.approx(rhs, rel=1e-8)

    def test_matches_determinant_finite_difference(self, fix_a, test1_case2):
        h = 1e-7
        cases = [
            (fix_a, [0.1, 0.3j, -0.2 + 0.1j]),
            (test1_case2, [-1 + 0.5j, -1.2 + 0.4j]),
        ]
        for a, shifts in cases:
            ctx = build_w(a)
            rng = np.random.default_rng(43)
            for base in shifts:
                for _ in range(10):
                    lam = base + 0.02 * (rng.standard_normal() + 1j * rng.standard_normal())
                    bas = basis_vandermonde(a.symbol, lam, ctx.width)
                    if not 1 <= bas.p <= ctx.q:
                        continue
                    rows = bas.p
                    corr = newton_correction(*phi(ctx, bas, rows))
                    f0 = det_phi(a, ctx, lam, rows)
                    fp = det_phi(a, ctx, lam + h, rows)
                    fm = det_phi(a, ctx, lam - h, rows)
                    fd = f0 * 2 * h / (fp - fm)
                    assert corr == pytest.approx(fd, rel=1e-5, abs=1e-9)


class TestEigvecPrefix:
    def test_fix_a(self, fix_a):
        bas = basis_vandermonde(fix_a.symbol, 0.0, 2)
        v = eigvec_prefix(bas, [1.0], 4, fix_a.symbol, 0.0)
        assert np.allclose(v, [0.5, 0.25, 0.125, 0.0625])

    def test_linearity(self, fix_a):
        bas = basis_vandermonde(fix_a.symbol, 0.0, 2)
        v1 = eigvec_prefix(bas, [1.0], 6, fix_a.symbol, 0.0)
        v2 = eigvec_prefix(bas, [2.5j], 6, fix_a.symbol, 0.0)
        assert np.allclose(v2, 2.5j * v1)

    def test_frobenius_matches_vandermonde(self, fix_a):
        bas_v = basis_vandermonde(fix_a.symbol, 0.0, 2)
        bas_f = basis_frobenius(wiener_hopf(fix_a.symbol, 0.0), 2)
        v1 = eigvec_prefix(bas_v, [1.0], 8, fix_a.symbol, 0.0)
        v2 = eigvec_prefix(bas_f, [1.0], 8, fix_a.symbol, 0.0)
        assert np.allclose(v1, v2)

    def test_zero_beta_rejected(self, fix_a):
        bas = basis_vandermonde(fix_a.symbol, 0.0, 2)
        with pytest.raises(InvalidInputError):
            eigvec_prefix(bas, [0.0], 4, fix_a.symbol, 0.0)
