"""
Cosine similarity over behavioral vectors, plus the on-disk similarity cache.
"""

import struct
from pathlib import Path
from typing import Optional, Sequence, Union

import numpy as np
from scipy import sparse

from app.core.config import settings
from app.core.errors import DataError, DimensionMismatchError
from app.core.logging import get_logger
from app.models.behavior import BehavioralMatrix, SimMatrix, VectorKind

logger = get_logger()

_CACHE_MAGIC = b"SIMTRI01"
_KIND_CODES = {VectorKind.RATING: 0, VectorKind.INTEREST: 1, VectorKind.CELEBRITY: 2}
# magic, size, kind code, sha256 digest
_CACHE_HEADER = struct.Struct("<8sQB32s")


def cosine_similarity(x: Sequence[float], y: Sequence[float]) -> float:
    """Cosine of two non-negative vectors; 0.0 when either has zero norm."""
    x = np.asarray(x, dtype=np.float64).ravel()
    y = np.asarray(y, dtype=np.float64).ravel()
    if x.shape != y.shape:
        raise DimensionMismatchError(f"Vector dimensions differ: {x.shape[0]} vs {y.shape[0]}")
    norm_product = np.sqrt(np.dot(x, x)) * np.sqrt(np.dot(y, y))
    if norm_product == 0.0:
        return 0.0
    return float(min(1.0, max(0.0, np.dot(x, y) / norm_product)))


def similarity_matrix(b: BehavioralMatrix) -> SimMatrix:
    """All-pairs cosine similarity, computed as one sparse Gram product."""
    vectors = b.vectors
    gram = (vectors @ vectors.T).toarray()
    norms = np.sqrt(np.diag(gram))
    denominator = np.outer(norms, norms)
    with np.errstate(divide="ignore", invalid="ignore"):
        values = np.where(denominator > 0.0, gram / denominator, 0.0)
    np.clip(values, 0.0, 1.0, out=values)
    # the Gram product is symmetric up to summation order
    values = np.triu(values, k=1)
    values = values + values.T
    logger.info(f"Computed {b.kind.value} similarity table for {b.node_count} nodes (d={b.dimension})")
    return SimMatrix(values, b.kind)


def matrix_cosine(a: SimMatrix, b: SimMatrix) -> float:
    """Cosine of two similarity tables flattened over their u < v entries."""
    if a.size != b.size:
        raise DimensionMismatchError(f"Similarity tables differ in size: {a.size} vs {b.size}")
    return cosine_similarity(a.upper(), b.upper())


def save_behavioral_matrix(b: BehavioralMatrix, path: Union[str, Path]) -> None:
    sparse.save_npz(str(path), b.vectors, compressed=True)
    Path(f"{path}.kind").write_text(b.kind.value, encoding="utf-8")


def load_behavioral_matrix(path: Union[str, Path]) -> BehavioralMatrix:
    try:
        vectors = sparse.load_npz(str(path))
        kind = Path(f"{path}.kind").read_text(encoding="utf-8").strip()
    except (OSError, ValueError) as e:
        raise DataError(f"Cannot load behavioral vectors from {path}: {e}") from e
    return BehavioralMatrix(vectors, VectorKind(kind))


class SimMatrixCache:
    """Binary cache of similarity tables keyed by the vectors' content hash.

    File layout: header (magic, size, kind, sha256) then the upper triangle
    as row-major little-endian float64.
    """

    def __init__(self, cache_path: Optional[str] = None):
        self.cache_path = Path(cache_path if cache_path is not None else settings.SIM_CACHE_PATH or ".sim_cache")

    def path_for(self, digest: str) -> Path:
        return self.cache_path / f"{digest}.simtri"

    def load(self, b: BehavioralMatrix) -> Optional[SimMatrix]:
        digest = b.content_hash()
        path = self.path_for(digest)
        if not path.exists():
            logger.debug(f"Similarity cache miss for {digest[:12]}")
            return None

        try:
            raw = path.read_bytes()
            magic, size, kind_code, stored_digest = _CACHE_HEADER.unpack_from(raw)
            if magic != _CACHE_MAGIC or stored_digest.hex() != digest or size != b.node_count:
                logger.warning(f"Ignoring mismatched similarity cache file {path.name}")
                return None
            upper = np.frombuffer(raw, dtype="<f8", offset=_CACHE_HEADER.size)
            kind = next(k for k, code in _KIND_CODES.items() if code == kind_code)
            logger.info(f"Loaded similarity table for {size} nodes from cache")
            return SimMatrix.from_upper(upper.astype(np.float64), int(size), kind)
        except (OSError, struct.error, StopIteration, DataError) as e:
            logger.warning(f"Corrupt similarity cache file {path.name}: {e}")
            return None

    def store(self, b: BehavioralMatrix, s: SimMatrix) -> Path:
        digest = b.content_hash()
        self.cache_path.mkdir(parents=True, exist_ok=True)
        path = self.path_for(digest)
        header = _CACHE_HEADER.pack(_CACHE_MAGIC, s.size, _KIND_CODES[b.kind], bytes.fromhex(digest))
        path.write_bytes(header + s.upper().astype("<f8").tobytes())
        logger.info(f"Stored similarity table in cache: {path.name}")
        return path

    def get_or_compute(self, b: BehavioralMatrix) -> SimMatrix:
        cached = self.load(b)
        if cached is not None:
            return cached
        s = similarity_matrix(b)
        self.store(b, s)
        return s


def get_similarity(b: BehavioralMatrix, use_cache: Optional[bool] = None) -> SimMatrix:
    """Similarity table for `b`, going through the cache when one is configured."""
    if use_cache is None:
        use_cache = settings.SIM_CACHE_PATH is not None
    if not use_cache:
        return similarity_matrix(b)
    return SimMatrixCache().get_or_compute(b)
