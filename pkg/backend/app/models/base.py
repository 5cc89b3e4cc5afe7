import math
from typing import Dict, List, Literal, Optional, Tuple
from pydantic import BaseModel, Field, field_validator, model_validator

ModularityVariant = Literal["newman", "paper_literal"]


class NetworkStats(BaseModel):
    node_count: int = Field(ge=0)
    isolated_count: int = Field(ge=0)
    edge_count: int = Field(ge=0)
    avg_degree: float = Field(ge=0)
    avg_clustering_coefficient: float = Field(ge=0, le=1)
    diameter: int = Field(ge=0)
    avg_path_length: float = Field(ge=0)
    giant_component_size: int = Field(ge=1)
    giant_component_fraction: float = Field(gt=0, le=1)
    homophily_ratio: Optional[float] = None

    def table_rows(self) -> List[Tuple[str, str]]:
        """Rows in the order and wording of the dataset property tables."""
        return [
            ("Number of nodes", str(self.node_count)),
            ("Number of isolated nodes", str(self.isolated_count)),
            ("Edge count (friendships)", str(self.edge_count)),
            ("Avg. clustering coefficient", f"{self.avg_clustering_coefficient:.3f}"),
            ("Avg. degree", f"{self.avg_degree:.3f}"),
            ("Diameter", str(self.diameter)),
            ("Avg. path length", f"{self.avg_path_length:.3f}"),
            ("Size of giant component", f"{100 * self.giant_component_fraction:.2f}%"),
            (
                "Homophily ratio",
                f"{self.homophily_ratio:.2f}" if self.homophily_ratio is not None else "Not calculated",
            ),
        ]


class MetricRow(BaseModel):
    algorithm: str
    k: int = Field(ge=1)
    modularity_newman: float
    modularity_literal: float
    like_mindedness: float

    @field_validator("modularity_newman", "modularity_literal", "like_mindedness")
    @classmethod
    def check_finite(cls, value: float) -> float:
        if not math.isfinite(value):
            raise ValueError("metric values must be finite")
        return value


class MetricSeries(BaseModel):
    rows: List[MetricRow] = Field(default_factory=list)

    @model_validator(mode="after")
    def check_ordering(self) -> "MetricSeries":
        seen = set()
        last_k: Dict[str, int] = {}
        for row in self.rows:
            key = (row.algorithm, row.k)
            if key in seen:
                raise ValueError(f"duplicate row for algorithm {row.algorithm} at k={row.k}")
            seen.add(key)
            if row.algorithm in last_k and row.k >= last_k[row.algorithm]:
                raise ValueError(f"k must be descending within algorithm {row.algorithm}")
            last_k[row.algorithm] = row.k
        return self

    def algorithms(self) -> List[str]:
        ordered: List[str] = []
        for row in self.rows:
            if row.algorithm not in ordered:
                ordered.append(row.algorithm)
        return ordered

    def rows_for(self, algorithm: str) -> List[MetricRow]:
        return [row for row in self.rows if row.algorithm == algorithm]


class MaxModularityRow(BaseModel):
    algorithm: str
    max_modularity_newman: float
    k_newman: int
    max_modularity_literal: float
    k_literal: int


class RunTiming(BaseModel):
    algorithm: str
    node_count: int
    seconds: float = Field(ge=0)


class PartitionRecord(BaseModel):
    algorithm: str
    k: int
    communities: List[List[str]]


class FilterConfig(BaseModel):
    movie_max_popularity: int = Field(ge=1)
    min_ratings: int = Field(ge=0)
    min_friends: int = Field(ge=0)
    celeb_threshold: int = Field(ge=1)
    min_noncelebrity_friends: int = Field(ge=0)

    model_config = {"extra": "forbid"}
