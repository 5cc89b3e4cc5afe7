"""
Synthetic datasets with planted communities, in the same TSV layout as the
real ratings and follow datasets.
"""

import json
from pathlib import Path
from typing import Dict, List, Optional, Set, Tuple, Union

import numpy as np
from pydantic import BaseModel, Field

from app.core.logging import get_logger

logger = get_logger()


class FixtureConfig(BaseModel):
    users: int = Field(default=90, ge=2)
    communities: int = Field(default=3, ge=1)
    p_in: float = Field(default=0.35, ge=0, le=1)
    p_out: float = Field(default=0.01, ge=0, le=1)
    # one-directional follows that never become friendships
    noise_follows: float = Field(default=0.02, ge=0, le=1)
    items_per_community: int = Field(default=40, ge=1)
    blockbusters: int = Field(default=5, ge=0)
    ratings_per_user: int = Field(default=12, ge=1)
    # chance that a rating is drawn from the user's own community pool
    taste_affinity: float = Field(default=0.85, ge=0, le=1)
    celebrities: int = Field(default=6, ge=0)
    celebrity_follow_rate: float = Field(default=0.8, ge=0, le=1)


class FixtureService:
    """Seeded generator; the same seed and config always give the same files."""

    def __init__(self, config: Optional[FixtureConfig] = None, seed: int = 0):
        self.config = config or FixtureConfig()
        self.seed = seed

    def _rng(self) -> np.random.Generator:
        return np.random.default_rng(self.seed)

    @staticmethod
    def user_label(node: int) -> str:
        return f"u{node:05d}"

    def planted_assignment(self) -> List[int]:
        """Users are dealt round-robin into communities."""
        return [node % self.config.communities for node in range(self.config.users)]

    def _friendships(self, rng: np.random.Generator, assignment: List[int]) -> List[Tuple[int, int]]:
        n = self.config.users
        community = np.asarray(assignment)
        rows, cols = np.triu_indices(n, k=1)
        same = community[rows] == community[cols]
        p = np.where(same, self.config.p_in, self.config.p_out)
        chosen = rng.random(rows.size) < p
        return list(zip(rows[chosen].tolist(), cols[chosen].tolist()))

    def _follow_records(self, rng: np.random.Generator, assignment: List[int]) -> List[Tuple[str, str]]:
        records: Set[Tuple[str, str]] = set()
        for u, v in self._friendships(rng, assignment):
            records.add((self.user_label(u), self.user_label(v)))
            records.add((self.user_label(v), self.user_label(u)))

        n = self.config.users
        noise_count = int(round(self.config.noise_follows * n * (n - 1) / 2))
        for _ in range(noise_count):
            u, v = rng.choice(n, size=2, replace=False).tolist()
            if (self.user_label(v), self.user_label(u)) not in records:
                records.add((self.user_label(u), self.user_label(v)))
        return sorted(records)

    def _ratings(self, rng: np.random.Generator, assignment: List[int]) -> List[Tuple[str, str, int]]:
        cfg = self.config
        pools = [
            [f"m{c:02d}{i:04d}" for i in range(cfg.items_per_community)] for c in range(cfg.communities)
        ]
        blockbusters = [f"b{i:03d}" for i in range(cfg.blockbusters)]
        # each community has its own taste per item
        taste: Dict[Tuple[int, str], int] = {}
        for c in range(cfg.communities):
            for pool in pools:
                for item in pool:
                    taste[(c, item)] = int(rng.integers(1, 6))

        records: List[Tuple[str, str, int]] = []
        for node, c in enumerate(assignment):
            rated: Set[str] = set(blockbusters)
            for item in blockbusters:
                records.append((self.user_label(node), item, int(rng.integers(3, 6))))
            for _ in range(cfg.ratings_per_user):
                own = rng.random() < cfg.taste_affinity
                pool = pools[c] if own else pools[int(rng.integers(cfg.communities))]
                item = pool[int(rng.integers(len(pool)))]
                if item in rated:
                    continue
                rated.add(item)
                rating = int(np.clip(taste[(c, item)] + rng.integers(-1, 2), 1, 5))
                records.append((self.user_label(node), item, rating))
        return sorted(records)

    def _celebrity_follows(self, rng: np.random.Generator, assignment: List[int]) -> List[Tuple[str, str]]:
        cfg = self.config
        records: List[Tuple[str, str]] = []
        for i in range(cfg.celebrities):
            celebrity = f"c{i:03d}"
            home = i % cfg.communities
            for node, c in enumerate(assignment):
                rate = cfg.celebrity_follow_rate if c == home else cfg.celebrity_follow_rate / 4
                if rng.random() < rate:
                    records.append((self.user_label(node), celebrity))
        return records

    def _write_truth(self, out: Path, assignment: List[int]) -> Path:
        groups: Dict[int, List[str]] = {}
        for node, c in enumerate(assignment):
            groups.setdefault(c, []).append(self.user_label(node))
        path = out / "planted.json"
        path.write_text(
            json.dumps({"seed": self.seed, "communities": [groups[c] for c in sorted(groups)]}, indent=2) + "\n",
            encoding="utf-8",
        )
        return path

    def _write_filter_config(self, out: Path, values: Dict[str, int]) -> Path:
        path = out / "filter.env"
        path.write_text("".join(f"{key}={value}\n" for key, value in values.items()), encoding="utf-8")
        return path

    def write_ratings_dataset(self, out_dir: Union[str, Path]) -> List[Path]:
        """follows.tsv, ratings.tsv, planted.json and a filter.env sized for this fixture."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rng = self._rng()
        assignment = self.planted_assignment()
        follows = self._follow_records(rng, assignment)
        ratings = self._ratings(rng, assignment)

        follows_path = out / "follows.tsv"
        follows_path.write_text("".join(f"{u}\t{v}\n" for u, v in follows), encoding="utf-8")
        ratings_path = out / "ratings.tsv"
        ratings_path.write_text("".join(f"{u}\t{i}\t{r}\n" for u, i, r in ratings), encoding="utf-8")

        # blockbusters are rated by every user and should fall to the movie filter
        popularity = max(2, self.config.users // 2)
        written = [
            follows_path,
            ratings_path,
            self._write_truth(out, assignment),
            self._write_filter_config(out, {"movie_max_popularity": popularity, "min_ratings": 3, "min_friends": 2}),
        ]
        logger.info(f"Wrote ratings fixture with {len(follows)} follows and {len(ratings)} ratings to {out}")
        return written

    def write_follow_dataset(self, out_dir: Union[str, Path]) -> List[Path]:
        """follows.tsv including celebrity follows, planted.json and filter.env."""
        out = Path(out_dir)
        out.mkdir(parents=True, exist_ok=True)
        rng = self._rng()
        assignment = self.planted_assignment()
        follows = sorted(set(self._follow_records(rng, assignment)) | set(self._celebrity_follows(rng, assignment)))

        follows_path = out / "follows.tsv"
        follows_path.write_text("".join(f"{u}\t{v}\n" for u, v in follows), encoding="utf-8")
        # noise follows give ordinary users a handful of followers at most
        celeb_threshold = max(1, int(self.config.users * self.config.celebrity_follow_rate / 3))
        written = [
            follows_path,
            self._write_truth(out, assignment),
            self._write_filter_config(out, {"celeb_threshold": celeb_threshold, "min_noncelebrity_friends": 2}),
        ]
        logger.info(f"Wrote follow fixture with {len(follows)} follows to {out}")
        return written


def get_fixture_service(config: Optional[FixtureConfig] = None, seed: int = 0) -> FixtureService:
    """Get a configured fixture service instance."""
    return FixtureService(config, seed)
