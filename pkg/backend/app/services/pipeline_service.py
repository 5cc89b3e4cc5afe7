"""
Dataset ingestion, the filtering cascade and behavioral-vector construction.

Ratings-type data (user/item/rating plus follows) goes through the movie
filter and then the active/social user filter. Follow-type data is split
into celebrities and the non-celebrity friendship network.
"""

from collections import Counter
from dataclasses import dataclass, field
from pathlib import Path
from typing import Dict, Iterable, List, Mapping, Optional, Sequence, Set, Tuple, Union

import numpy as np
from dotenv import dotenv_values
from pydantic import ValidationError
from scipy import sparse

from app.core.config import settings
from app.core.errors import DataError, ParseError, PipelineOrderError, UsageError
from app.core.logging import get_logger
from app.models.base import FilterConfig
from app.models.behavior import BehavioralMatrix, VectorKind
from app.models.graph import Graph
from app.services.behavior_service import save_behavioral_matrix
from app.services.graph_service import (
    build_graph,
    induced_subgraph,
    natural_order,
    write_edge_list,
    write_node_list,
)

logger = get_logger()


class RatingsTable:
    """(user, item) -> rating, with per-item and per-user rating counts."""

    def __init__(self, ratings: Mapping[Tuple[str, str], int], movie_filter_threshold: Optional[int] = None):
        self.ratings: Dict[Tuple[str, str], int] = dict(ratings)
        # set once the movie filter has run; the user filter requires it
        self.movie_filter_threshold = movie_filter_threshold
        self.item_rating_counts: Counter = Counter(item for _, item in self.ratings)
        self.user_rating_counts: Counter = Counter(user for user, _ in self.ratings)

    @property
    def records(self) -> List[Tuple[str, str, int]]:
        return [(user, item, rating) for (user, item), rating in sorted(self.ratings.items())]

    def users(self) -> List[str]:
        return natural_order(self.user_rating_counts)

    def items(self) -> List[str]:
        """Item index: lexicographic by item label."""
        return sorted(self.item_rating_counts)

    def __len__(self) -> int:
        return len(self.ratings)


class FollowTable:
    """Directed follow records; `follower_counts[u]` is how many users follow u."""

    def __init__(self, records: Iterable[Tuple[str, str]]):
        self.records: List[Tuple[str, str]] = sorted(set(records))
        for follower, followee in self.records:
            if follower == followee:
                raise ParseError(f"self-follow by {follower!r}")
        self.follower_counts: Counter = Counter(followee for _, followee in self.records)
        self._followees: Dict[str, Set[str]] = {}
        for follower, followee in self.records:
            self._followees.setdefault(follower, set()).add(followee)

    def users(self) -> List[str]:
        return natural_order([label for record in self.records for label in record])

    def follows(self, follower: str, followee: str) -> bool:
        return followee in self._followees.get(follower, ())

    def followees(self, follower: str) -> Set[str]:
        return self._followees.get(follower, set())

    def mutual_pairs(self) -> List[Tuple[str, str]]:
        return [(u, v) for u, v in self.records if u < v and self.follows(v, u)]

    def __len__(self) -> int:
        return len(self.records)


def _read_tsv(path: Union[str, Path], field_count: int) -> Iterable[Tuple[int, List[str]]]:
    path = Path(path)
    try:
        text = path.read_text(encoding="utf-8")
    except OSError as e:
        raise ParseError(f"cannot read file: {e}", str(path)) from e
    for line_number, line in enumerate(text.splitlines(), start=1):
        if not line.strip() or line.lstrip().startswith("#"):
            continue
        fields = [value.strip() for value in line.split("\t")]
        if len(fields) != field_count or not all(fields):
            raise ParseError(f"expected {field_count} tab-separated fields", str(path), line_number)
        yield line_number, fields


def load_ratings(path: Union[str, Path]) -> RatingsTable:
    """Parse `user<TAB>item<TAB>rating` lines; a repeated (user, item) keeps the last rating."""
    ratings: Dict[Tuple[str, str], int] = {}
    duplicates = 0
    for line_number, (user, item, raw) in _read_tsv(path, 3):
        try:
            rating = int(raw)
        except ValueError:
            raise ParseError(f"rating {raw!r} is not an integer", str(path), line_number) from None
        if not 1 <= rating <= 5:
            raise ParseError(f"rating {rating} outside 1..5", str(path), line_number)
        if (user, item) in ratings:
            duplicates += 1
        ratings[(user, item)] = rating

    if duplicates:
        logger.warning(f"{duplicates} repeated ratings in {Path(path).name}; kept the last of each")
    table = RatingsTable(ratings)
    logger.info(f"Loaded {len(table)} ratings from {len(table.user_rating_counts)} users")
    return table


def load_follows(path: Union[str, Path]) -> FollowTable:
    """Parse `follower<TAB>followee` lines; self-follows are dropped."""
    records: List[Tuple[str, str]] = []
    for line_number, (follower, followee) in _read_tsv(path, 2):
        if follower == followee:
            logger.warning(f"Dropping self-follow by {follower!r} at {Path(path).name}:{line_number}")
            continue
        records.append((follower, followee))
    table = FollowTable(records)
    logger.info(f"Loaded {len(table)} follow records")
    return table


def mutual_friend_graph(f: FollowTable, extra_users: Iterable[str] = ()) -> Graph:
    """Friends are users who follow each other. Every user seen becomes a node."""
    labels = natural_order(f.users() + list(extra_users))
    return build_graph(f.mutual_pairs(), node_labels=labels)


def movie_filter(r: RatingsTable, max_popularity: int) -> RatingsTable:
    """Drop every item rated max_popularity or more times."""
    if max_popularity < 1:
        raise UsageError(f"movie_max_popularity must be at least 1, got {max_popularity}")
    removed = {item for item, count in r.item_rating_counts.items() if count >= max_popularity}
    kept = {key: rating for key, rating in r.ratings.items() if key[1] not in removed}
    logger.info(f"Movie filter removed {len(removed)} items rated at least {max_popularity} times")
    return RatingsTable(kept, movie_filter_threshold=max_popularity)


def user_filter(r: RatingsTable, g: Graph, min_ratings: int, min_friends: int) -> List[int]:
    """Node ids of users that are both active (enough ratings left) and social (enough friends)."""
    if r.movie_filter_threshold is None:
        raise PipelineOrderError("Movie filtering must run before user filtering")
    kept = [
        node for node in range(g.node_count)
        if r.user_rating_counts.get(g.label_of(node), 0) >= min_ratings and g.degree(node) >= min_friends
    ]
    logger.info(f"User filter kept {len(kept)} of {g.node_count} users")
    return kept


def celebrity_split(
    f: FollowTable, celeb_threshold: int, min_noncelebrity_friends: int
) -> Tuple[Set[str], Set[str]]:
    """Celebrities have more than celeb_threshold followers. Kept users are the
    non-celebrities with at least min_noncelebrity_friends non-celebrity friends."""
    if celeb_threshold < 1:
        raise UsageError(f"celeb_threshold must be at least 1, got {celeb_threshold}")
    celebrities = {user for user, count in f.follower_counts.items() if count > celeb_threshold}

    friend_counts: Counter = Counter()
    for u, v in f.mutual_pairs():
        if u in celebrities or v in celebrities:
            continue
        friend_counts[u] += 1
        friend_counts[v] += 1
    kept = {
        user for user in f.users()
        if user not in celebrities and friend_counts[user] >= min_noncelebrity_friends
    }
    logger.info(f"Found {len(celebrities)} celebrities; {len(kept)} non-celebrities kept")
    return celebrities, kept


def _vectors(
    users: Sequence[str], columns: Sequence[str], entries: Iterable[Tuple[str, str, float]], kind: VectorKind
) -> BehavioralMatrix:
    row_of = {user: i for i, user in enumerate(users)}
    column_of = {label: j for j, label in enumerate(columns)}
    rows: List[int] = []
    cols: List[int] = []
    data: List[float] = []
    seen: Set[str] = set()
    for user, label, value in entries:
        if user in row_of and label in column_of:
            rows.append(row_of[user])
            cols.append(column_of[label])
            data.append(value)
            seen.add(user)

    missing = len(users) - len(seen)
    if missing:
        logger.warning(f"{missing} users have no {kind.value} record; their vectors are all zero")
    matrix = sparse.csr_matrix(
        (np.asarray(data, dtype=np.float64), (np.asarray(rows, dtype=np.int64), np.asarray(cols, dtype=np.int64))),
        shape=(len(users), len(columns)),
    )
    return BehavioralMatrix(matrix, kind)


def build_rating_vectors(r: RatingsTable, users: Sequence[str], item_index: Sequence[str]) -> BehavioralMatrix:
    """R_u: the rating given to each indexed item, 0 when unrated."""
    return _vectors(users, item_index, ((u, i, float(x)) for u, i, x in r.records), VectorKind.RATING)


def build_interest_vectors(r: RatingsTable, users: Sequence[str], item_index: Sequence[str]) -> BehavioralMatrix:
    """S_u: 1 for every indexed item the user rated."""
    return _vectors(users, item_index, ((u, i, 1.0) for u, i, _ in r.records), VectorKind.INTEREST)


def build_celebrity_vectors(f: FollowTable, users: Sequence[str], celebrities: Sequence[str]) -> BehavioralMatrix:
    """F_u: 1 for every indexed celebrity the user follows."""
    return _vectors(users, celebrities, ((u, v, 1.0) for u, v in f.records), VectorKind.CELEBRITY)


def default_filter_config() -> FilterConfig:
    return FilterConfig(
        movie_max_popularity=settings.MOVIE_MAX_POPULARITY,
        min_ratings=settings.MIN_RATINGS,
        min_friends=settings.MIN_FRIENDS,
        celeb_threshold=settings.CELEB_THRESHOLD,
        min_noncelebrity_friends=settings.MIN_NONCELEBRITY_FRIENDS,
    )


def load_filter_config(
    path: Optional[Union[str, Path]] = None, overrides: Optional[Mapping[str, Optional[int]]] = None
) -> FilterConfig:
    """Settings defaults, then a key=value file, then explicit overrides."""
    values = default_filter_config().model_dump()
    if path is not None:
        if not Path(path).is_file():
            raise UsageError(f"Filter config file not found: {path}")
        values.update({key.lower(): value for key, value in dotenv_values(path).items()})
    if overrides:
        values.update({key: value for key, value in overrides.items() if value is not None})
    try:
        return FilterConfig(**values)
    except ValidationError as e:
        raise UsageError(f"Invalid filter configuration: {e}") from e


@dataclass
class FilteredDataset:
    graph: Graph
    vectors: Dict[VectorKind, BehavioralMatrix] = field(default_factory=dict)
    columns: List[str] = field(default_factory=list)

    def write(self, out_dir: Union[str, Path]) -> List[Path]:
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        written = [out / "edges.txt", out / "nodes.txt", out / "columns.txt"]
        write_edge_list(self.graph, written[0])
        write_node_list(self.graph, written[1])
        written[2].write_text("".join(f"{label}\n" for label in self.columns), encoding="utf-8")
        for kind, matrix in sorted(self.vectors.items(), key=lambda item: item[0].value):
            path = out / f"vectors-{kind.value}.npz"
            save_behavioral_matrix(matrix, path)
            written.append(path)
        logger.info(f"Wrote filtered dataset ({self.graph.node_count} nodes) to {out}")
        return written


class PipelineService:
    """Runs the two filtering recipes end to end."""

    def __init__(self, config: Optional[FilterConfig] = None):
        self.config = config or default_filter_config()

    def filter_ratings_dataset(self, ratings: RatingsTable, follows: FollowTable) -> FilteredDataset:
        graph = mutual_friend_graph(follows, extra_users=ratings.users())
        filtered = movie_filter(ratings, self.config.movie_max_popularity)
        keep = user_filter(filtered, graph, self.config.min_ratings, self.config.min_friends)
        if not keep:
            raise DataError("No users survive the filters; loosen min_ratings or min_friends")
        sub = induced_subgraph(graph, keep)
        items = filtered.items()
        users = list(sub.labels)
        return FilteredDataset(
            graph=sub,
            vectors={
                VectorKind.RATING: build_rating_vectors(filtered, users, items),
                VectorKind.INTEREST: build_interest_vectors(filtered, users, items),
            },
            columns=items,
        )

    def filter_follow_dataset(self, follows: FollowTable) -> FilteredDataset:
        celebrities, kept = celebrity_split(
            follows, self.config.celeb_threshold, self.config.min_noncelebrity_friends
        )
        if not kept:
            raise DataError("No non-celebrity users survive the filters; loosen min_noncelebrity_friends")
        graph = mutual_friend_graph(follows)
        sub = induced_subgraph(graph, [graph.index_of(user) for user in kept])
        celebrity_index = sorted(celebrities)
        return FilteredDataset(
            graph=sub,
            vectors={VectorKind.CELEBRITY: build_celebrity_vectors(follows, list(sub.labels), celebrity_index)},
            columns=celebrity_index,
        )

    def run(
        self,
        follows_path: Union[str, Path],
        out_dir: Union[str, Path],
        ratings_path: Optional[Union[str, Path]] = None,
    ) -> FilteredDataset:
        follows = load_follows(follows_path)
        if ratings_path is not None:
            dataset = self.filter_ratings_dataset(load_ratings(ratings_path), follows)
        else:
            dataset = self.filter_follow_dataset(follows)
        dataset.write(out_dir)
        return dataset


def get_pipeline_service(config: Optional[FilterConfig] = None) -> PipelineService:
    """Get a configured pipeline service instance."""
    return PipelineService(config)
