"""
Merge hierarchies produced by the agglomerative and divisive algorithms.
"""

from dataclasses import dataclass
from pathlib import Path
from typing import List, Union

from ..core.errors import ParseError, UsageError
from .graph import Partition


@dataclass(frozen=True)
class MergeStep:
    a_id: int
    b_id: int
    merged_id: int
    score: float


@dataclass(frozen=True)
class Dendrogram:
    """Ordered merges from `leaf_count` singletons upwards.

    Community ids are the smallest node id they contain. A complete run has
    leaf_count - 1 steps; a divisive run on a disconnected graph stops at
    its component count, reported as `min_k`.
    """

    leaf_count: int
    merge_steps: tuple[MergeStep, ...]

    @property
    def min_k(self) -> int:
        return self.leaf_count - len(self.merge_steps)

    def levels(self) -> range:
        """Community counts the hierarchy can be cut at, largest first."""
        return range(self.leaf_count, self.min_k - 1, -1)

    def cut(self, k: int) -> Partition:
        return cut(self, k)

    def to_text(self) -> str:
        lines = [
            f"{step} {m.a_id} {m.b_id} {m.merged_id} {m.score!r}"
            for step, m in enumerate(self.merge_steps, start=1)
        ]
        return "\n".join(lines) + ("\n" if lines else "")

    def write(self, path: Union[str, Path]) -> None:
        Path(path).write_text(f"# leaves {self.leaf_count}\n" + self.to_text(), encoding="utf-8")

    @classmethod
    def read(cls, path: Union[str, Path]) -> "Dendrogram":
        leaf_count = None
        steps: List[MergeStep] = []
        for line_number, line in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), start=1):
            fields = line.split()
            if not fields:
                continue
            if fields[0] == "#":
                if len(fields) == 3 and fields[1] == "leaves":
                    leaf_count = int(fields[2])
                continue
            if len(fields) != 5:
                raise ParseError("expected 'step a_id b_id merged_id score'", str(path), line_number)
            try:
                steps.append(MergeStep(int(fields[1]), int(fields[2]), int(fields[3]), float(fields[4])))
            except ValueError as e:
                raise ParseError(str(e), str(path), line_number) from e
        if leaf_count is None:
            raise ParseError("missing '# leaves N' header", str(path))
        return cls(leaf_count, tuple(steps))


def cut(dendrogram: Dendrogram, k: int) -> Partition:
    """Replay the first leaf_count - k merges and return the k-community partition."""
    if not dendrogram.min_k <= k <= dendrogram.leaf_count:
        raise UsageError(
            f"k={k} outside the hierarchy range [{dendrogram.min_k}, {dendrogram.leaf_count}]"
        )

    parent = list(range(dendrogram.leaf_count))

    def find(node: int) -> int:
        while parent[node] != node:
            parent[node] = parent[parent[node]]
            node = parent[node]
        return node

    for step in dendrogram.merge_steps[: dendrogram.leaf_count - k]:
        root_a, root_b = find(step.a_id), find(step.b_id)
        merged = min(root_a, root_b)
        parent[root_a] = merged
        parent[root_b] = merged

    return Partition.from_assignment([find(v) for v in range(dendrogram.leaf_count)])
