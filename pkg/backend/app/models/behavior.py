"""
Behavioral vectors and the pairwise similarity table built from them.
"""

import hashlib
from enum import Enum
from typing import Optional

import numpy as np
from scipy import sparse

from ..core.errors import DataError, DimensionMismatchError


class VectorKind(str, Enum):
    RATING = "rating"
    INTEREST = "interest"
    CELEBRITY = "celebrity"


class BehavioralMatrix:
    """One sparse non-negative row vector per node, all of dimension d."""

    __slots__ = ("kind", "vectors")

    def __init__(self, vectors: sparse.spmatrix, kind: VectorKind):
        self.kind = VectorKind(kind)
        matrix = sparse.csr_matrix(vectors, dtype=np.float64)
        matrix.sum_duplicates()
        matrix.eliminate_zeros()
        matrix.sort_indices()

        values = matrix.data
        if self.kind is VectorKind.RATING:
            allowed = np.isin(values, (1.0, 2.0, 3.0, 4.0, 5.0))
        else:
            allowed = values == 1.0
        if not np.all(allowed):
            raise DataError(f"{self.kind.value} vectors contain entries outside the allowed range")
        self.vectors: sparse.csr_matrix = matrix

    @property
    def node_count(self) -> int:
        return self.vectors.shape[0]

    @property
    def dimension(self) -> int:
        return self.vectors.shape[1]

    def vector(self, node: int) -> np.ndarray:
        return self.vectors.getrow(node).toarray().ravel()

    def content_hash(self) -> str:
        digest = hashlib.sha256()
        digest.update(self.kind.value.encode("ascii"))
        digest.update(np.asarray(self.vectors.shape, dtype=np.int64).tobytes())
        digest.update(self.vectors.indptr.astype(np.int64).tobytes())
        digest.update(self.vectors.indices.astype(np.int64).tobytes())
        digest.update(self.vectors.data.tobytes())
        return digest.hexdigest()


class SimMatrix:
    """Symmetric |V| x |V| cosine similarity table, read-only.

    The diagonal holds 1.0; like-mindedness and homophily never read it.
    """

    __slots__ = ("values", "kind")

    def __init__(self, values: np.ndarray, kind: Optional[VectorKind] = None):
        array = np.array(values, dtype=np.float64, copy=True)
        if array.ndim != 2 or array.shape[0] != array.shape[1]:
            raise DimensionMismatchError(f"Similarity table must be square, got shape {array.shape}")
        if not np.allclose(array, array.T, rtol=0.0, atol=1e-12):
            raise DataError("Similarity table must be symmetric")
        np.fill_diagonal(array, 1.0)
        array.setflags(write=False)
        self.values = array
        self.kind = VectorKind(kind) if kind is not None else None

    @property
    def size(self) -> int:
        return self.values.shape[0]

    def sim(self, u: int, v: int) -> float:
        return float(self.values[u, v])

    def upper(self) -> np.ndarray:
        """Entries u < v in row-major order."""
        rows, cols = np.triu_indices(self.size, k=1)
        return self.values[rows, cols]

    @classmethod
    def from_upper(cls, upper: np.ndarray, size: int, kind: Optional[VectorKind] = None) -> "SimMatrix":
        expected = size * (size - 1) // 2
        if upper.shape != (expected,):
            raise DimensionMismatchError(f"Expected {expected} upper-triangle entries, got {upper.shape}")
        square = np.zeros((size, size), dtype=np.float64)
        rows, cols = np.triu_indices(size, k=1)
        square[rows, cols] = upper
        square[cols, rows] = upper
        return cls(square, kind)

    def content_hash(self) -> str:
        return hashlib.sha256(self.values.tobytes()).hexdigest()
