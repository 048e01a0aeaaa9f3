"""Direct solvers and the dispatching left-division operator."""

from .banded import banded_solve, tridiag_solve
from .cholesky import CholFactor, cholesky_factor
from .condest import inverse_norm1_estimate, rcond_estimate
from .dispatch import BRANCHES, SolveReport, backslash, entry_branch
from .lu import LuFactors, lu_factor
from .qr import dense_minnorm, householder_qr, qr_minnorm_solve
from .triangular import triangular_solve

__all__ = [
    "BRANCHES", "CholFactor", "LuFactors", "SolveReport", "backslash", "banded_solve",
    "cholesky_factor", "dense_minnorm", "entry_branch", "householder_qr",
    "inverse_norm1_estimate", "lu_factor", "qr_minnorm_solve", "rcond_estimate",
    "triangular_solve", "tridiag_solve",
]
