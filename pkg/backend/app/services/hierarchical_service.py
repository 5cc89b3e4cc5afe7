"""
Agglomerative clustering over a similarity table: single, average and
complete linkage, and like-mindedness maximization (LMM).

Both build a Dendrogram bottom-up. At every step the highest-scoring pair
of active communities merges; ties go to the lexicographically smallest
(min id, other id) pair. A merged community keeps the smaller of the two
ids, which is always its smallest node id.
"""

import heapq
from enum import Enum
from typing import Callable, Dict, Iterable, List, Optional, Tuple

import numpy as np

from app.core.errors import PartitionMismatchError, UsageError
from app.core.logging import get_logger
from app.models.behavior import SimMatrix
from app.models.dendrogram import Dendrogram, MergeStep, cut

logger = get_logger()

__all__ = [
    "Linkage",
    "ScoreQueue",
    "CountingSimilarity",
    "MergeState",
    "LmmAgglomerator",
    "linkage_score",
    "agglomerate",
    "lmm_score",
    "lmm_agglomerate",
    "cut",
]


class Linkage(str, Enum):
    SINGLE = "single"
    AVERAGE = "average"
    COMPLETE = "complete"


class ScoreQueue:
    """Dense pair-score matrix with a lazily invalidated max-heap.

    The heap holds each active row's best partner, stamped with the row's
    version. Rewriting a row bumps its version, so older entries for it are
    skipped on pop. Only scores involving the merged community change after
    a merge, so most rows keep their heap entry.
    """

    def __init__(self, scores: np.ndarray):
        n = scores.shape[0]
        self.scores = np.array(scores, dtype=np.float64, copy=True)
        np.fill_diagonal(self.scores, -np.inf)
        self.active = np.ones(n, dtype=bool)
        self.version = np.zeros(n, dtype=np.int64)
        self.best_partner = np.full(n, -1, dtype=np.int64)
        self.best_score = np.full(n, -np.inf)
        self.heap: List[Tuple[float, int, int, int, int]] = []

        if n > 1:
            self.best_partner[:] = np.argmax(self.scores, axis=1)
            self.best_score[:] = self.scores[np.arange(n), self.best_partner]
            self.heap = [self._entry(i) for i in range(n)]
            heapq.heapify(self.heap)

    @property
    def active_count(self) -> int:
        return int(self.active.sum())

    def _entry(self, row: int) -> Tuple[float, int, int, int, int]:
        partner = int(self.best_partner[row])
        return (-float(self.best_score[row]), min(row, partner), max(row, partner), row, int(self.version[row]))

    def _refresh(self, row: int) -> None:
        self.version[row] += 1
        partner = int(np.argmax(self.scores[row]))
        score = self.scores[row, partner]
        if score == -np.inf:
            self.best_partner[row] = -1
            self.best_score[row] = -np.inf
            return
        self.best_partner[row] = partner
        self.best_score[row] = score
        heapq.heappush(self.heap, self._entry(row))

    def pop(self) -> Optional[Tuple[float, int, int]]:
        """Highest (score, low id, high id) among active pairs, or None."""
        while self.heap:
            neg_score, low, high, row, version = heapq.heappop(self.heap)
            if self.active[row] and self.version[row] == version:
                return -neg_score, low, high
        return None

    def merge(self, kept: int, removed: int, kept_scores: np.ndarray) -> None:
        """Retire `removed` and install `kept_scores` as the kept community's row."""
        self.active[removed] = False
        self.scores[removed, :] = -np.inf
        self.scores[:, removed] = -np.inf

        row = np.where(self.active, kept_scores, -np.inf)
        row[kept] = -np.inf
        self.scores[kept, :] = row
        self.scores[:, kept] = row
        self._refresh(kept)

        others = np.flatnonzero(self.active)
        others = others[others != kept]
        if others.size == 0:
            return
        partners = self.best_partner[others]
        stale = (partners == kept) | (partners == removed)
        column = self.scores[others, kept]
        current = self.best_score[others]
        better = ~stale & ((column > current) | ((column == current) & (kept < partners)))

        for node in others[stale]:
            self._refresh(int(node))
        for node in others[better]:
            node = int(node)
            self.version[node] += 1
            self.best_partner[node] = kept
            self.best_score[node] = self.scores[node, kept]
            heapq.heappush(self.heap, self._entry(node))

        if len(self.heap) > 4 * self.active_count + 64:
            self._prune()

    def _prune(self) -> None:
        rows = np.flatnonzero(self.active & (self.best_partner >= 0))
        self.heap = [self._entry(int(row)) for row in rows]
        heapq.heapify(self.heap)


def _check_node_sets(s: SimMatrix, a: Iterable[int], b: Iterable[int]) -> Tuple[np.ndarray, np.ndarray]:
    a_nodes = np.asarray(sorted(set(a)), dtype=np.int64)
    b_nodes = np.asarray(sorted(set(b)), dtype=np.int64)
    if a_nodes.size == 0 or b_nodes.size == 0:
        raise PartitionMismatchError("Linkage needs two non-empty node sets")
    if np.intersect1d(a_nodes, b_nodes).size:
        raise PartitionMismatchError("Linkage node sets overlap")
    for nodes in (a_nodes, b_nodes):
        if nodes[0] < 0 or nodes[-1] >= s.size:
            raise PartitionMismatchError(f"Node set reaches outside 0..{s.size - 1}")
    return a_nodes, b_nodes


def linkage_score(s: SimMatrix, a: Iterable[int], b: Iterable[int], linkage: Linkage) -> float:
    """Single = min similarity, average = mean, complete = max, over pairs across a and b."""
    a_nodes, b_nodes = _check_node_sets(s, a, b)
    block = s.values[np.ix_(a_nodes, b_nodes)]
    linkage = Linkage(linkage)
    if linkage is Linkage.SINGLE:
        return float(block.min())
    if linkage is Linkage.COMPLETE:
        return float(block.max())
    return float(block.sum()) / (a_nodes.size * b_nodes.size)


def agglomerate(s: SimMatrix, linkage: Linkage) -> Dendrogram:
    """Full linkage hierarchy, merging the maximum-linkage pair at each step."""
    try:
        linkage = Linkage(linkage)
    except ValueError:
        raise UsageError(f"Unknown linkage: {linkage!r}") from None

    n = s.size
    queue = ScoreQueue(s.values)
    sizes = np.ones(n, dtype=np.float64)
    sums = np.array(s.values, copy=True) if linkage is Linkage.AVERAGE else None
    steps: List[MergeStep] = []

    while True:
        popped = queue.pop()
        if popped is None:
            break
        score, low, high = popped
        steps.append(MergeStep(low, high, low, score))

        if linkage is Linkage.SINGLE:
            kept_scores = np.minimum(queue.scores[low], queue.scores[high])
        elif linkage is Linkage.COMPLETE:
            kept_scores = np.maximum(queue.scores[low], queue.scores[high])
        else:
            sums[low, :] += sums[high, :]
            sums[:, low] = sums[low, :]
            sizes[low] += sizes[high]
            kept_scores = sums[low] / (sizes[low] * sizes)
        queue.merge(low, high, kept_scores)

    logger.info(f"{linkage.value.capitalize()} linkage built {len(steps)} merges over {n} nodes")
    return Dendrogram(n, tuple(steps))


class CountingSimilarity:
    """Read access to a SimMatrix that counts every node pair read."""

    def __init__(self, s: SimMatrix):
        self._values = s.values
        self.size = s.size
        self.reads = 0

    def pairs(self, rows: np.ndarray, cols: np.ndarray) -> np.ndarray:
        rows, cols = np.asarray(rows), np.asarray(cols)
        self.reads += int(rows.size)
        return self._values[rows, cols]


class MergeState:
    """Running state of an LMM agglomeration.

    `pair_sim_sums[a, b]` is the similarity summed over every node pair split
    across communities a and b. It is filled from one read of each pair u < v
    and only combined row-wise afterwards.
    """

    def __init__(self, s: SimMatrix):
        n = s.size
        self.node_count = n
        self.similarity = CountingSimilarity(s)
        self.sizes = np.ones(n, dtype=np.float64)
        rows, cols = np.triu_indices(n, k=1)
        upper = self.similarity.pairs(rows, cols)
        self.pair_sim_sums = np.zeros((n, n), dtype=np.float64)
        self.pair_sim_sums[rows, cols] = upper
        self.pair_sim_sums[cols, rows] = upper
        self.members: Dict[int, List[int]] = {node: [node] for node in range(n)}
        self.queue = ScoreQueue(self._initial_scores())

    def _initial_scores(self) -> np.ndarray:
        return 1.0 / np.maximum.outer(self.sizes, self.sizes) + self.pair_sim_sums / np.outer(self.sizes, self.sizes)

    @property
    def sim_accesses(self) -> int:
        return self.similarity.reads

    @property
    def active_communities(self) -> List[int]:
        return sorted(self.members)

    @property
    def score_index(self) -> np.ndarray:
        return self.queue.scores

    def score_row(self, community: int) -> np.ndarray:
        size = self.sizes[community]
        # retired communities have size 0; their entries are masked by the queue
        with np.errstate(divide="ignore", invalid="ignore"):
            return 1.0 / np.maximum(size, self.sizes) + self.pair_sim_sums[community] / (size * self.sizes)

    def merge(self, low: int, high: int) -> int:
        self.pair_sim_sums[low, :] += self.pair_sim_sums[high, :]
        self.pair_sim_sums[:, low] = self.pair_sim_sums[low, :]
        self.pair_sim_sums[low, low] = 0.0
        self.pair_sim_sums[high, :] = 0.0
        self.pair_sim_sums[:, high] = 0.0
        self.sizes[low] += self.sizes[high]
        self.sizes[high] = 0.0
        self.members[low].extend(self.members.pop(high))
        self.queue.merge(low, high, self.score_row(low))
        return low


def lmm_score(state: MergeState, a: int, b: int) -> float:
    """1 / max(|A|, |B|) plus the mean similarity across A and B."""
    if a == b:
        raise PartitionMismatchError("LMM score needs two distinct communities")
    for community in (a, b):
        if community not in state.members:
            raise PartitionMismatchError(f"Community {community} is not active")
    size_a, size_b = state.sizes[a], state.sizes[b]
    return float(1.0 / max(size_a, size_b) + state.pair_sim_sums[a, b] / (size_a * size_b))


class LmmAgglomerator:
    """Like-mindedness maximization: merge the pair with the highest LMM score until one community is left."""

    def __init__(self, s: SimMatrix, on_merge: Optional[Callable[[MergeStep, MergeState], None]] = None):
        self.sim = s
        self.on_merge = on_merge
        self.state = MergeState(s)

    def run(self) -> Dendrogram:
        steps: List[MergeStep] = []
        while True:
            popped = self.state.queue.pop()
            if popped is None:
                break
            score, low, high = popped
            merged = self.state.merge(low, high)
            step = MergeStep(low, high, merged, score)
            steps.append(step)
            if self.on_merge is not None:
                self.on_merge(step, self.state)

        logger.info(f"LMM built {len(steps)} merges over {self.state.node_count} nodes")
        return Dendrogram(self.state.node_count, tuple(steps))


def lmm_agglomerate(s: SimMatrix) -> Dendrogram:
    return LmmAgglomerator(s).run()
