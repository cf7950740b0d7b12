"""Request/response models for the HTTP service."""

from __future__ import annotations

from pydantic import BaseModel, Field, model_validator


class SpaceBuildRequest(BaseModel):
    """Build a semantic space from inline sentences or a server-side file."""

    name: str
    sentences: list[str] | None = None
    corpus_path: str | None = None
    basis_size: int = 2000
    skip_top: int = 50
    window: int = 5
    svd_rank: int = 300
    normalize: bool = True
    stopwords: list[str] = Field(default_factory=list)
    merge_phrases: list[tuple[str, str]] = Field(default_factory=list)

    @model_validator(mode="after")
    def _exactly_one_source(self):
        if (self.sentences is None) == (self.corpus_path is None):
            raise ValueError("provide exactly one of `sentences` or `corpus_path`")
        return self


class SpaceInfo(BaseModel):
    name: str
    dim: int
    vocabulary_size: int
    meta: dict


class VectorResponse(BaseModel):
    space: str
    word: str
    in_vocabulary: bool
    vector: list[float]


class VerbStoreBuildRequest(BaseModel):
    """Build verb matrices against a registered space."""

    name: str
    space: str
    method: str = "relational"
    pairs: list[tuple[str, str, str]] = Field(
        default_factory=list, description="(verb, subject, object) occurrences"
    )
    holistic_space: str | None = None
    learning_rate: float | None = None
    max_epochs: int = 5000
    tolerance: float = 1e-8
    init: str = "zeros"
    seed: int = 0


class VerbStoreInfo(BaseModel):
    name: str
    dim: int
    verbs: list[str]
    skipped: list[str] = Field(default_factory=list)


class EntanglementResponse(BaseModel):
    store: str
    scores: dict[str, float]
    mean: float
    bin_edges: list[float]
    bin_counts: list[int]


class ComposeRequest(BaseModel):
    space: str
    model: str
    sentence: list[str]
    verbs: str | None = None


class ComposeResponse(BaseModel):
    model: str
    shape: list[int]
    is_matrix: bool
    data: list


class SimilarityRequest(BaseModel):
    space: str
    model: str
    left: list[str]
    right: list[str]
    verbs: str | None = None


class SimilarityResponse(BaseModel):
    model: str
    cosine: float
    euclidean: float


class TaskPair(BaseModel):
    left: list[str]
    right: list[str]
    score: float


class TaskRequest(BaseModel):
    space: str
    models: list[str]
    pairs: list[TaskPair]
    verbs: str | None = None
    rank1: bool = False


class TaskResultModel(BaseModel):
    model: str
    rho_cosine: float
    rho_euclidean: float
    n_pairs_used: int
    excluded: int


class TaskResponse(BaseModel):
    results: list[TaskResultModel]


class ReduceRequest(BaseModel):
    types: list[str] = Field(description="one pregroup type per word, e.g. 'n^r·s·n^l'")
    target: str = "s"


class ReduceResponse(BaseModel):
    reducible: bool
    steps: list[tuple[int, int]]
    residue: list[int]
    detail: str | None = None


class HealthResponse(BaseModel):
    status: str
    version: str
