"""
Graph construction, edge-list I/O and basic structural queries.
"""

from collections import deque
from pathlib import Path
from typing import Iterable, List, Optional, Sequence, Set, Tuple, Union

from app.core.errors import GraphError, ParseError
from app.core.logging import get_logger
from app.models.graph import Graph, Partition

logger = get_logger()

NodeRef = Union[int, str]


def natural_order(labels: Iterable[str]) -> List[str]:
    """Numeric order when every label is an integer, lexicographic otherwise."""
    unique = set(labels)
    try:
        return sorted(unique, key=int)
    except ValueError:
        return sorted(unique)


def build_graph(
    edges: Iterable[Tuple[NodeRef, NodeRef]],
    node_labels: Optional[Sequence[str]] = None,
    node_count: Optional[int] = None,
) -> Graph:
    """Build a simple undirected graph.

    Endpoints are either integer ids in 0..n-1 or labels found in
    `node_labels`. Duplicate edges collapse and self-loops are dropped.
    """
    edges = list(edges)
    if node_labels is not None:
        labels = [str(label) for label in node_labels]
    elif node_count is not None:
        labels = [str(i) for i in range(node_count)]
    else:
        max_id = -1
        for u, v in edges:
            if not isinstance(u, int) or not isinstance(v, int):
                raise GraphError("String endpoints need node_labels")
            max_id = max(max_id, u, v)
        labels = [str(i) for i in range(max_id + 1)]

    if not labels:
        raise GraphError("Empty node universe")

    index = {label: i for i, label in enumerate(labels)}
    n = len(labels)

    def resolve(node: NodeRef) -> int:
        if isinstance(node, int) and not isinstance(node, bool):
            if 0 <= node < n:
                return node
            raise GraphError(f"Node id {node} outside 0..{n - 1}")
        try:
            return index[str(node)]
        except KeyError:
            raise GraphError(f"Unresolvable node label: {node!r}") from None

    adjacency: List[Set[int]] = [set() for _ in range(n)]
    dropped_loops = 0
    for u, v in edges:
        a, b = resolve(u), resolve(v)
        if a == b:
            dropped_loops += 1
            continue
        adjacency[a].add(b)
        adjacency[b].add(a)

    if dropped_loops:
        logger.debug(f"Dropped {dropped_loops} self-loops while building graph")

    return Graph(adjacency, labels)


def connected_components(g: Graph) -> Partition:
    """Components numbered by their smallest node id."""
    assignment = [-1] * g.node_count
    component = 0
    for start in range(g.node_count):
        if assignment[start] != -1:
            continue
        assignment[start] = component
        queue = deque([start])
        while queue:
            node = queue.popleft()
            for nbr in g.adjacency(node):
                if assignment[nbr] == -1:
                    assignment[nbr] = component
                    queue.append(nbr)
        component += 1
    return Partition(tuple(assignment))


def induced_subgraph(g: Graph, keep: Iterable[int]) -> Graph:
    """Subgraph on `keep` with every edge among kept nodes; labels preserved."""
    kept = sorted(set(keep))
    for node in kept:
        if not 0 <= node < g.node_count:
            raise GraphError(f"Unknown node {node}")
    if not kept:
        raise GraphError("Empty node universe")

    new_id = {old: new for new, old in enumerate(kept)}
    adjacency = [
        [new_id[nbr] for nbr in g.adjacency(old) if nbr in new_id]
        for old in kept
    ]
    return Graph(adjacency, [g.label_of(old) for old in kept])


def read_edge_list(path: Union[str, Path], node_labels: Optional[Sequence[str]] = None) -> Graph:
    """Read `label label` lines; `#` lines and blank lines are skipped.

    Without `node_labels` the nodes are the labels seen, in natural order.
    With it, ids follow that list, which may name isolated nodes too.
    """
    path = Path(path)
    pairs: List[Tuple[str, str]] = []
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read edge list: {e}", str(path)) from e

    for line_number, line in enumerate(text.splitlines(), start=1):
        stripped = line.strip()
        if not stripped or stripped.startswith("#"):
            continue
        fields = stripped.split()
        if len(fields) != 2:
            raise ParseError(f"expected two labels, got {len(fields)} fields", str(path), line_number)
        pairs.append((fields[0], fields[1]))

    if node_labels is None:
        labels = natural_order([label for pair in pairs for label in pair])
    else:
        labels = [str(label) for label in node_labels]
    logger.info(f"Read {len(pairs)} edge lines over {len(labels)} nodes from {path.name}")
    return build_graph(pairs, node_labels=labels)


def write_edge_list(g: Graph, path: Union[str, Path]) -> None:
    lines = [f"# nodes {g.node_count} edges {g.edge_count}"]
    lines.extend(f"{g.label_of(u)} {g.label_of(v)}" for u, v in g.edges())
    Path(path).write_text("\n".join(lines) + "\n", encoding="utf-8")


def read_node_list(path: Union[str, Path]) -> List[str]:
    """One label per line. Carries isolated nodes, which an edge list cannot."""
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read node list: {e}", str(path)) from e
    return [line.strip() for line in text.splitlines() if line.strip() and not line.startswith("#")]


def write_node_list(g: Graph, path: Union[str, Path]) -> None:
    Path(path).write_text("".join(f"{label}\n" for label in g.labels), encoding="utf-8")
