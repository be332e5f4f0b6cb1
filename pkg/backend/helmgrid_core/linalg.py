"""
Shared numerical kernels: sparse products and direct factorizations, dense
eigenvalues for symbols, and a triplet dump for debugging matrices.
"""

import warnings
from typing import Union

import numpy as np
import scipy.linalg as sla
import scipy.sparse as sp
from scipy.sparse.linalg import splu

from .errors import FactorizationError
from .logs.core.logger_config import get_component_logger

logger = get_component_logger(__name__)

Matrix = Union[np.ndarray, sp.spmatrix]


def spmv(matrix: Matrix, x: np.ndarray) -> np.ndarray:
    return matrix @ x


class SparseFactorization:
    """
    Sparse LU with COLAMD fill-reducing column ordering (SuperLU).

    Immutable once built; ``solve`` may be called concurrently.
    """

    def __init__(self, matrix: Matrix):
        matrix = sp.csc_matrix(matrix)
        if matrix.shape[0] != matrix.shape[1]:
            raise FactorizationError(f"cannot factor a non-square {matrix.shape} matrix")
        self.shape = matrix.shape
        self.dtype = np.result_type(matrix.dtype, np.float64)
        try:
            self._lu = splu(matrix.astype(self.dtype), permc_spec="COLAMD")
        except RuntimeError as exc:
            raise FactorizationError(f"sparse LU failed: {exc}") from exc
        diag_u = self._lu.U.diagonal()
        zero = np.flatnonzero(diag_u == 0)
        if len(zero):
            raise FactorizationError("sparse LU produced a singular factor", pivot=int(zero[0]))

    @property
    def nnz(self) -> int:
        return self._lu.L.nnz + self._lu.U.nnz

    def solve(self, b: np.ndarray) -> np.ndarray:
        dtype = np.result_type(self.dtype, b.dtype)
        if dtype != self.dtype:
            # real factors, complex right-hand side
            return self._lu.solve(np.ascontiguousarray(b.real)) + 1j * self._lu.solve(np.ascontiguousarray(b.imag))
        return self._lu.solve(np.ascontiguousarray(b, dtype=dtype))


def sparse_lu(matrix: Matrix) -> SparseFactorization:
    return SparseFactorization(matrix)


def lu_solve(factorization: SparseFactorization, b: np.ndarray) -> np.ndarray:
    return factorization.solve(b)


class DenseFactorization:
    """Partial-pivoting LU of a small dense matrix."""

    def __init__(self, matrix: np.ndarray):
        matrix = np.asarray(matrix)
        with warnings.catch_warnings():
            warnings.simplefilter("ignore", sla.LinAlgWarning)
            self._lu, self._piv = sla.lu_factor(matrix)
        zero = np.flatnonzero(np.diag(self._lu) == 0)
        if len(zero):
            raise FactorizationError("dense LU is singular", pivot=int(zero[0]))

    def solve(self, b: np.ndarray) -> np.ndarray:
        return sla.lu_solve((self._lu, self._piv), b)


def dense_eigenvalues(matrix: np.ndarray) -> np.ndarray:
    """Eigenvalues of a dense (or stacked dense) complex matrix."""
    return np.linalg.eigvals(np.asarray(matrix, dtype=complex))


def spectral_radius(matrix: np.ndarray) -> Union[float, np.ndarray]:
    """max |eigenvalue|; works on stacks of matrices along the leading axes."""
    radius = np.max(np.abs(dense_eigenvalues(matrix)), axis=-1)
    return float(radius) if np.ndim(radius) == 0 else radius


def write_triplets(matrix: Matrix, path: str) -> None:
    """One 'row col re im' line per stored entry."""
    coo = sp.coo_matrix(matrix)
    data = coo.data.astype(complex)
    table = np.column_stack([coo.row, coo.col, data.real, data.imag])
    np.savetxt(path, table, fmt=["%d", "%d", "%.17g", "%.17g"])
    logger.debug("Wrote %d triplets to %s", coo.nnz, path)
