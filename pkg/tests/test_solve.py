import numpy as np
import pytest
from hypothesis import given
from hypothesis import strategies as st

from oracles import cond1, grid_laplacian, minnorm_lstsq, scaled_residual
from cscmat.analyze import SolverParams, force_type, matrix_type
from cscmat.build import from_dense, from_triplets, spdiag, spdiags, speye, sprandn
from cscmat.core import CscMatrix
from cscmat.errors import ShapeError, SingularMatrixError
from cscmat.ops import ewise_binary, norm1, permute, transpose, tril
from cscmat.order import amd_order, symbfact
from cscmat.solve import (backslash, banded_solve, cholesky_factor, dense_minnorm, entry_branch,
                          householder_qr, lu_factor, qr_minnorm_solve, rcond_estimate,
                          triangular_solve, tridiag_solve)


def band(n, coeffs, offsets):
    return spdiags(np.tile(coeffs, (n, 1)), offsets, n, n)


def lower_example(n=64, seed=1):
    return ewise_binary(tril(sprandn(n, n, 0.05, seed=seed), -1), speye(n), "+")


def spd(n, seed=0, density=0.1):
    r = np.random.default_rng(seed)
    m = r.standard_normal((n, n)) * (r.random((n, n)) < density)
    return from_dense(m.T @ m + n * np.eye(n))


def grid(k):
    r, c, v, n = grid_laplacian(k)
    return from_triplets(r, c, v, n, n)


# -- substitution ---------------------------------------------------------------------------


def test_triangular_identity_and_bidiagonal():
    b = np.arange(1.0, 6.0)
    assert np.array_equal(triangular_solve(speye(5), b, lower=True), b)
    bi = band(5, [-1.0, 2.0], [-1, 0])
    x = triangular_solve(bi, b, lower=True)
    assert np.allclose(bi.todense() @ x, b)
    up = transpose(bi)
    assert np.allclose(up.todense() @ triangular_solve(up, b, lower=False), b)


def test_triangular_sparse_rhs_stays_sparse():
    low = lower_example(30, 2)
    b = from_triplets([3], [0], [1.0], 30, 1)
    x = triangular_solve(low, b, lower=True)
    assert isinstance(x, CscMatrix)
    assert np.allclose(low.todense() @ x.todense(), b.todense())
    assert np.all(x.todense()[:3] == 0)


def test_permuted_triangular():
    low = lower_example(30, 3)
    p = np.random.default_rng(1).permutation(30)
    a = permute(low, p, None)
    t = matrix_type(a)
    b = np.ones(30)
    x = triangular_solve(a, b, lower=True, row_perm=np.asarray(t.perm))
    assert np.allclose(a.todense() @ x, b)


def test_zero_diagonal_is_singular():
    a = from_dense(np.array([[1.0, 0], [1, 0]]))
    with pytest.raises(SingularMatrixError):
        triangular_solve(a, np.ones(2), lower=True)


# -- tridiagonal and banded ---------------------------------------------------------------------


def test_tridiagonal_laplacian_uses_ldl():
    a = band(10, [-1.0, 2.0, -1.0], [-1, 0, 1])
    b = np.arange(10.0)
    x, used_ldl = tridiag_solve(a, b, True)
    assert used_ldl and np.allclose(x, np.linalg.solve(a.todense(), b), rtol=1e-12)
    x, _ = tridiag_solve(speye(4), np.ones(4), True)
    assert np.array_equal(x, np.ones(4))


def test_indefinite_tridiagonal_falls_back_to_pivoting():
    a = band(12, [1.0, 0.0, 1.0], [-1, 0, 1])
    a = ewise_binary(a, spdiag(np.r_[0.0, np.ones(11) * 0.1]), "+")
    b = np.ones(12)
    x, used_ldl = tridiag_solve(a, b, True)
    assert not used_ldl
    assert np.allclose(x, np.linalg.solve(a.todense(), b), rtol=1e-10)


def test_banded_solvers():
    a = band(30, [1.0, -4, 10, -4, 1], [-2, -1, 0, 1, 2])
    b = np.linspace(0, 1, 30)
    x, used_chol = banded_solve(a, b, 2, 2, True)
    assert used_chol and np.allclose(x, np.linalg.solve(a.todense(), b), rtol=1e-12)
    g = from_dense(np.triu(np.tril(np.random.default_rng(3).standard_normal((30, 30)), 2), -1))
    x, used_chol = banded_solve(g, b, 1, 2, False)
    assert not used_chol and np.allclose(g.todense() @ x, b)
    x, _ = banded_solve(spdiag(np.arange(1.0, 5.0)), np.ones(4), 0, 0, True)
    assert np.allclose(x, 1 / np.arange(1.0, 5.0))


def test_nonspd_banded_fails_cholesky_then_lu():
    a = band(20, [1.0, 3, -2, 3, 1], [-2, -1, 0, 1, 2])
    b = np.ones(20)
    x, used_chol = banded_solve(a, b, 2, 2, True)
    assert not used_chol and np.allclose(x, np.linalg.solve(a.todense(), b))


# -- Cholesky ----------------------------------------------------------------------------------


def test_cholesky_of_diagonal():
    f = cholesky_factor(spdiag([4.0, 9.0, 16.0]))
    assert np.array_equal(f.L.todense(), np.diag([2.0, 3, 4]))


def test_cholesky_matches_symbfact_on_grid():
    g = grid(12)
    for p in (None, amd_order(g)):
        f = cholesky_factor(g, p)
        assert f.L.nnz == symbfact(g, p).total
        pp = np.arange(g.nrows) if p is None else p
        rec = f.L.todense() @ f.L.todense().T
        assert np.allclose(rec, g.todense()[np.ix_(pp, pp)], atol=1e-12)


def test_cholesky_of_indefinite_returns_none():
    assert cholesky_factor(from_dense(np.array([[1.0, 2], [2, 1]]))) is None


# -- LU -------------------------------------------------------------------------------------------


def test_lu_of_permutation_matrix():
    p = np.random.default_rng(2).permutation(6)
    f = lu_factor(permute(speye(6), p, None))
    assert np.array_equal(f.L.todense(), np.eye(6)) and np.array_equal(f.U.todense(), np.eye(6))


@given(st.integers(1, 40), st.integers(0, 2**31))
def test_lu_reconstructs(n, seed):
    r = np.random.default_rng(seed)
    d = r.standard_normal((n, n)) * (r.random((n, n)) < 0.3) + np.eye(n) * 0.5
    a = from_dense(d)
    try:
        f = lu_factor(a, amd_order(a, "column"))
    except SingularMatrixError:
        assert np.linalg.matrix_rank(d) < n or np.linalg.cond(d) > 1e12
        return
    assert np.all(np.diag(f.L.todense()) == 1)
    rec = f.L.todense() @ f.U.todense()
    want = d[f.row_perm][:, f.col_perm]
    assert np.linalg.norm(rec - want) <= 1e-11 * max(np.linalg.norm(d), 1.0)


def test_lu_fill_amd_beats_natural_on_asymmetric_grid():
    g = grid(20).todense()
    g += np.triu(np.eye(400, k=1) * 0.3)
    a = from_dense(g)
    nat = lu_factor(a)
    amd = lu_factor(a, amd_order(a, "column"))
    assert amd.L.nnz + amd.U.nnz < nat.L.nnz + nat.U.nnz


def test_lu_random_50_matches_dense():
    r = np.random.default_rng(9)
    d = r.standard_normal((50, 50))
    f = lu_factor(from_dense(d))
    b = r.standard_normal(50)
    assert scaled_residual(d, f.solve(b), b) <= 1e-11


def test_lu_singular_reports_rank():
    d = np.array([[1.0, 2, 3], [2, 4, 6], [0, 0, 1]])
    with pytest.raises(SingularMatrixError) as err:
        lu_factor(from_dense(d))
    assert err.value.rank is not None and err.value.rank < 3


# -- QR and minimum norm ------------------------------------------------------------------------


def test_householder_qr_reconstructs():
    d = np.random.default_rng(1).standard_normal((7, 4))
    f = householder_qr(d)
    q = f.q_columns(7)
    assert np.allclose(q @ f.R, d[:, f.perm])
    assert f.rank() == 4


@pytest.mark.parametrize("m,n,rank", [(6, 3, 3), (3, 7, 3), (8, 8, 5), (5, 9, 2)])
def test_dense_minnorm_matches_pseudoinverse(m, n, rank):
    r = np.random.default_rng(m * 10 + n)
    d = r.standard_normal((m, rank)) @ r.standard_normal((rank, n))
    b = r.standard_normal(m)
    x, got_rank = dense_minnorm(d, b)
    assert got_rank == rank
    assert np.allclose(x, minnorm_lstsq(d, b), atol=1e-10)


def test_qr_minnorm_overdetermined():
    r = np.random.default_rng(4)
    a = sprandn(6, 3, 0.9, seed=4)
    b = r.standard_normal(6)
    d = a.todense()
    want = np.linalg.solve(d.T @ d, d.T @ b)
    assert np.allclose(qr_minnorm_solve(a, b), want, atol=1e-10)
    assert np.allclose(qr_minnorm_solve(a, b, use_dm=False), want, atol=1e-10)


def test_qr_minnorm_singular_square_is_finite():
    d = np.random.default_rng(5).standard_normal((6, 6))
    d[:, 3] = d[:, 2]
    x, info = qr_minnorm_solve(from_dense(d), np.ones(6), return_info=True)
    assert np.all(np.isfinite(x)) and info.numerical_rank == 5


def test_qr_minnorm_zero():
    assert qr_minnorm_solve(CscMatrix(1, 1), np.zeros(1)).tolist() == [0.0]


@given(st.integers(1, 8), st.integers(1, 8), st.integers(0, 2**31))
def test_qr_minnorm_matches_pseudoinverse_on_full_rank_blocks(m, n, seed):
    r = np.random.default_rng(seed)
    d = r.standard_normal((m, n)) * (r.random((m, n)) < 0.6)
    b = r.standard_normal(m)
    x = qr_minnorm_solve(from_dense(d), b)
    xo = minnorm_lstsq(d, b)
    # the decomposed solve is a least-squares solution; it is minimum norm
    # whenever the whole system goes through one block
    assert np.linalg.norm(d @ x - b) <= np.linalg.norm(d @ xo - b) + 1e-9
    x_direct = qr_minnorm_solve(from_dense(d), b, use_dm=False)
    assert np.allclose(x_direct, xo, atol=1e-8)


# -- condition estimate -------------------------------------------------------------------------


def test_rcond_identity_and_scaled():
    assert rcond_estimate(lu_factor(speye(5)), 1.0) == 1.0
    d = spdiag([1.0, 1e-8])
    r = rcond_estimate(lu_factor(d), norm1(d))
    assert 1e-9 <= r <= 1e-7


def test_rcond_random_within_factor_ten():
    r = np.random.default_rng(11)
    for _ in range(20):
        d = r.standard_normal((30, 30))
        est = rcond_estimate(lu_factor(from_dense(d)), np.abs(d).sum(axis=0).max())
        exact = 1 / cond1(d)
        assert exact / 10 <= est <= exact * 10


# -- dispatch -----------------------------------------------------------------------------------


def test_backslash_identity():
    x, rep = backslash(speye(3), np.array([1.0, 2, 3]))
    assert x.tolist() == [1, 2, 3] and rep.branch == "step2" and rep.rcond is None


def test_backslash_lower():
    a = lower_example()
    b = np.arange(64.0)
    x, rep = backslash(a, b)
    assert rep.branch == "step5" and scaled_residual(a.todense(), x, b) <= 1e-12


def test_backslash_spd_matches_dense():
    a = spd(50, 1)
    b = np.ones(50)
    x, rep = backslash(a, b, SolverParams(bandden=1.0))
    want = np.linalg.solve(a.todense(), b)
    assert rep.branch == "step7" and rep.rcond is not None
    assert np.allclose(x, want, rtol=1e-10)


def test_backslash_shape_error():
    with pytest.raises(ShapeError):
        backslash(speye(3), np.ones(4))


def test_backslash_zero_matrix():
    x, rep = backslash(CscMatrix(3, 3), np.ones(3))
    assert rep.branch == "step9" and rep.singular and np.array_equal(x, np.zeros(3))


def test_sparse_rhs_gives_sparse_solution():
    b = from_triplets([0, 2], [0, 1], [1.0, 2.0], 4, 2)
    x, rep = backslash(spdiag([1.0, 2, 4, 8]), b)
    assert isinstance(x, CscMatrix) and rep.branch == "step2"
    x, rep = backslash(band(4, [-1.0, 2.0, -1.0], [-1, 0, 1]), b)
    assert isinstance(x, CscMatrix) and rep.branch in ("step4b", "step4c")


def test_forced_type_matches_detected():
    a = lower_example(30, 4)
    b = np.ones(30)
    x1, _ = backslash(a, b)
    x2, rep = backslash(force_type(a, "Lower"), b)
    assert rep.matrix_type.forced and np.array_equal(x1, x2)


def test_forced_singular_goes_to_step9():
    x, rep = backslash(force_type(speye(3), "Singular"), np.ones(3))
    assert rep.branch == "step9" and np.allclose(x, 1)


def test_branch_is_predicted_by_type():
    cases = [spdiag([1.0, 2]), band(8, [-1.0, 3, -1], [-1, 0, 1]), lower_example(20, 5),
             spd(20, 2), sprandn(4, 3, 0.8, seed=1)]
    for a in cases:
        mtype = matrix_type(a)
        _, rep = backslash(a, np.ones(a.nrows))
        assert rep.fallbacks[0] == entry_branch(mtype) or rep.branch == entry_branch(mtype)
        assert rep.fallbacks[-1] == rep.branch


def test_fallback_chain_is_monotone():
    d = np.random.default_rng(5).standard_normal((10, 10))
    d[:, 4] = d[:, 3]
    _, rep = backslash(from_dense(d), np.ones(10), SolverParams(bandden=1.0))
    order = ["step2", "step3", "step4a-i", "step4a-ii", "step4b", "step4c", "step5", "step6",
             "step7", "step8", "step9"]
    idx = [order.index(b) for b in rep.fallbacks]
    assert idx == sorted(idx) and len(set(idx)) == len(idx)
    assert rep.branch == "step9"
