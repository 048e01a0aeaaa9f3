"""The polymorphic left-division operator.

``backslash`` picks a solver from the structural type of the matrix and
falls back down a fixed chain when a solver reports failure:

========== ===========================================================
step1      not square: go straight to step9
step2      diagonal
step3      permuted diagonal
step4a-i   tridiagonal, dense right-hand side, hermitian: LDL'
step4a-ii  tridiagonal, dense right-hand side: pivoting elimination
step4b     banded, hermitian: band Cholesky
step4c     banded: band LU with partial pivoting
step5      triangular substitution
step6      permuted triangular substitution
step7      hermitian with positive real diagonal: sparse Cholesky
step8      sparse LU
step9      Dulmage-Mendelsohn split plus minimum-norm QR
========== ===========================================================

Singularity (an exactly zero pivot, or for steps 7 and 8 a reciprocal
condition estimate below ``sing_tol``) sends the solve to step9.  The
structured steps 2 to 6 never estimate the condition number.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Optional

import numpy as np

from ..analyze import MatrixType, SolverParams, TypedMatrix, matrix_type
from ..build import from_dense
from ..core import CscMatrix, ValueKind
from ..errors import ShapeError, SingularMatrixError
from ..ops import norm1, submatrix
from ..order import amd_order
from .banded import banded_solve, tridiag_solve
from .cholesky import cholesky_factor
from .condest import rcond_estimate
from .lu import lu_factor
from .qr import qr_minnorm_solve
from .triangular import triangular_solve

BRANCHES = ("step2", "step3", "step4a-i", "step4a-ii", "step4b", "step4c", "step5", "step6",
            "step7", "step8", "step9")


@dataclass
class SolveReport:
    """Which solver produced the answer and what was tried on the way."""

    branch: str
    matrix_type: MatrixType
    rcond: Optional[float] = None
    fallbacks: list = field(default_factory=list)
    singular: bool = False


def entry_branch(mtype: MatrixType, rhs_sparse: bool = False) -> str:
    """First branch the selection tree tries for a matrix of this type."""
    tag = mtype.tag
    if tag in ("Rectangular", "Singular"):
        return "step9"
    if tag == "Diagonal":
        return "step2"
    if tag == "PermutedDiagonal":
        return "step3"
    if tag == "Tridiagonal" and not rhs_sparse:
        return "step4a-i" if mtype.hermitian else "step4a-ii"
    if tag in ("Tridiagonal", "Banded"):
        return "step4b" if mtype.hermitian and mtype.kl == mtype.ku else "step4c"
    if tag in ("Lower", "Upper"):
        return "step5"
    if tag in ("PermutedLower", "PermutedUpper"):
        return "step6"
    if mtype.hermitian:
        return "step7"
    return "step8"


def _diagonal_solve(a: CscMatrix, b):
    d = np.zeros(a.ncols, dtype=np.result_type(a.data.dtype, np.float64))
    c = a.compressed(remove_zeros=True)
    on = c.rows() == c.column_of_entries()
    d[c.rows()[on]] = c.values()[on]
    if np.any(d == 0):
        raise SingularMatrixError("zero on the diagonal")
    return _scale_rows(b, None, d)


def _scale_rows(b, rows, d):
    """``x[j] = b[rows[j]] / d[j]`` for dense or sparse ``b``."""
    if isinstance(b, CscMatrix):
        bb = b if rows is None else submatrix(b, rows, np.arange(b.ncols))
        vals = bb.values().astype(np.result_type(bb.data.dtype, d.dtype)) / d[bb.rows()]
        return CscMatrix(bb.nrows, bb.ncols, bb.cidx.copy(), bb.rows().copy(), vals, check=False)
    b = np.asarray(b)
    bb = b if rows is None else b[np.asarray(rows)]
    return bb / (d if bb.ndim == 1 else d[:, None])


def _permuted_diagonal_solve(a: CscMatrix, b, perm):
    c = a.compressed(remove_zeros=True)
    if c.nnz != a.ncols:
        raise SingularMatrixError("empty column")
    d = c.values().astype(np.result_type(c.data.dtype, np.float64))
    return _scale_rows(b, np.asarray(perm), d)


def _dense_rhs(b):
    return b.todense() if isinstance(b, CscMatrix) else np.asarray(b)


def _match_rhs_format(x, b):
    if isinstance(b, CscMatrix) and not isinstance(x, CscMatrix):
        return from_dense(x)
    return x


def backslash(a, b, params: SolverParams | None = None, known_type: MatrixType | None = None):
    """Solve ``a x = b``, returning ``(x, SolveReport)``.

    ``a`` may be a ``TypedMatrix`` from ``force_type``; ``known_type`` does
    the same job.  A sparse ``b`` gives a sparse ``x``.
    """
    params = params or SolverParams()
    if isinstance(a, TypedMatrix):
        known_type = known_type or a.mtype
        a = a.matrix
    if a.is_pattern:
        a = a.astype(ValueKind.REAL)
    m, n = a.shape
    if b.shape[0] != m:
        raise ShapeError(f"right-hand side has {b.shape[0]} rows, expected {m}")
    mtype = known_type if known_type is not None else matrix_type(a, params)
    rhs_sparse = isinstance(b, CscMatrix)
    report = SolveReport(branch="", matrix_type=mtype)
    tried = report.fallbacks

    def done(x, branch):
        report.branch = branch
        return _match_rhs_format(x, b), report

    branch = entry_branch(mtype, rhs_sparse)
    try:
        if branch == "step2":
            tried.append(branch)
            return done(_diagonal_solve(a, b), branch)
        if branch == "step3":
            tried.append(branch)
            return done(_permuted_diagonal_solve(a, b, mtype.perm), branch)
        if branch.startswith("step4a"):
            x, used_ldl = tridiag_solve(a, _dense_rhs(b), mtype.hermitian)
            if mtype.hermitian:
                tried.append("step4a-i")
            if used_ldl:
                return done(x, "step4a-i")
            tried.append("step4a-ii")
            return done(x, "step4a-ii")
        if branch in ("step4b", "step4c"):
            herm = branch == "step4b"
            x, used_chol = banded_solve(a, _dense_rhs(b), mtype.kl, mtype.ku, herm)
            if herm:
                tried.append("step4b")
            if used_chol:
                return done(x, "step4b")
            tried.append("step4c")
            return done(x, "step4c")
        if branch == "step5":
            tried.append(branch)
            return done(triangular_solve(a, b, lower=mtype.tag == "Lower"), branch)
        if branch == "step6":
            tried.append(branch)
            if mtype.tag == "PermutedLower":
                x = triangular_solve(a, b, lower=True, row_perm=np.asarray(mtype.perm))
            else:
                x = triangular_solve(a, b, lower=False, col_perm=np.asarray(mtype.perm))
            return done(x, branch)
        if branch in ("step7", "step8"):
            tol = params.singular_threshold(n)
            anorm = norm1(a)
            bd = _dense_rhs(b)
            if branch == "step7":
                tried.append("step7")
                f = cholesky_factor(a, amd_order(a, "symmetric"))
                if f is not None:
                    report.rcond = rcond_estimate(f, anorm)
                    if report.rcond < tol:
                        raise SingularMatrixError("near singular")
                    return done(f.solve(bd), "step7")
            tried.append("step8")
            f = lu_factor(a, amd_order(a, "column"), params.pivot_tol)
            report.rcond = rcond_estimate(f, anorm)
            if report.rcond < tol:
                raise SingularMatrixError("near singular")
            return done(f.solve(bd), "step8")
    except SingularMatrixError:
        report.singular = True

    tried.append("step9")
    x = qr_minnorm_solve(a, _dense_rhs(b), sing_tol=params.sing_tol)
    return done(x, "step9")
