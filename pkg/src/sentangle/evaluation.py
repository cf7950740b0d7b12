"""Similarity-task harness.

Loads scored sentence pairs, composes both sides of every pair under a
chosen model, measures cosine and Euclidean similarity, and correlates
the model scores with the human judgments by Spearman rank correlation
(average ranks on ties).  Euclidean distances are negated before
correlating so that larger always means more similar for both metrics.

Pairs whose composed representation is exactly zero, or whose two sides
end up with different shapes, are dropped pairwise and counted in the
result rather than failing the run.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from . import compose
from .compose import MODEL_NAMES, SentenceRep
from .semspace import SemanticSpace
from .tensors import VerbMatrix, entanglement_score

Sentence = tuple[str, ...]

#: Models that compose from a verb matrix rather than the verb's vector.
MATRIX_MODELS = frozenset(
    {"relational", "separable", "regression", "copy_subject", "copy_object",
     "frob_add", "frob_mul", "frob_tensor", "verb_object"}
)


class EvalError(Exception):
    """Base class for evaluation failures."""


class ShapeMismatchError(EvalError):
    """Raised when comparing a vector against a matrix representation."""


class ZeroRepresentationError(EvalError):
    """Raised when a cosine against an all-zero representation is requested."""


class MissingVerbError(EvalError):
    """Raised when a matrix model finds no matrix for a dataset verb."""


class ConstantInputError(EvalError):
    """Raised when a rank correlation over a constant sequence is requested."""


class DatasetError(EvalError):
    """Raised on malformed dataset files."""


class EmptyStoreError(EvalError):
    """Raised when an entanglement report over no verbs is requested."""


@dataclass
class SentencePair:
    """Two same-shaped sentences, (subject, verb, object) or
    (verb, object), with an averaged human similarity score."""

    left: Sentence
    right: Sentence
    human_score: float


@dataclass
class TaskResult:
    model: str
    rho_cosine: float
    rho_euclidean: float
    n_pairs_used: int
    excluded: int


@dataclass
class PairScore:
    """Per-pair detail behind a task result."""

    left: Sentence
    right: Sentence
    human_score: float
    cosine: float
    euclidean: float


def _flat(rep: "SentenceRep | np.ndarray") -> np.ndarray:
    data = rep.data if isinstance(rep, SentenceRep) else np.asarray(rep, dtype=np.float64)
    return data.ravel()


def _check_shapes(a, b) -> tuple[np.ndarray, np.ndarray]:
    fa, fb = _flat(a), _flat(b)
    da = a.data.ndim if isinstance(a, SentenceRep) else np.asarray(a).ndim
    db = b.data.ndim if isinstance(b, SentenceRep) else np.asarray(b).ndim
    if da != db or fa.shape != fb.shape:
        raise ShapeMismatchError(
            "cannot compare representations of different shapes "
            f"(order {da} vs {db})"
        )
    return fa, fb


def cosine_sim(a, b) -> float:
    """Cosine similarity; matrices compare via their flattened entries."""
    fa, fb = _check_shapes(a, b)
    na, nb = np.linalg.norm(fa), np.linalg.norm(fb)
    if na == 0 or nb == 0:
        raise ZeroRepresentationError("cosine undefined for a zero representation")
    return float(fa @ fb / (na * nb))


def euclidean_dist(a, b) -> float:
    """Euclidean distance; matrices compare via their flattened entries."""
    fa, fb = _check_shapes(a, b)
    return float(np.linalg.norm(fa - fb))


def _average_ranks(values: np.ndarray) -> np.ndarray:
    order = np.argsort(values, kind="stable")
    sorted_values = values[order]
    ranks = np.empty(len(values), dtype=np.float64)
    i = 0
    while i < len(values):
        j = i
        while j + 1 < len(values) and sorted_values[j + 1] == sorted_values[i]:
            j += 1
        ranks[order[i : j + 1]] = 0.5 * (i + j) + 1.0  # mean of ranks i+1 .. j+1
        i = j + 1
    return ranks


def spearman_rho(xs: Sequence[float], ys: Sequence[float]) -> float:
    """Spearman rank correlation: Pearson correlation of average ranks,
    ties receiving the mean of the ranks they span."""
    x = np.asarray(xs, dtype=np.float64)
    y = np.asarray(ys, dtype=np.float64)
    if x.shape != y.shape or x.ndim != 1:
        raise EvalError("inputs must be two equal-length sequences")
    if len(x) < 2:
        raise EvalError("need at least two observations")
    rx, ry = _average_ranks(x), _average_ranks(y)
    rx = rx - rx.mean()
    ry = ry - ry.mean()
    denom = np.sqrt(np.sum(rx * rx) * np.sum(ry * ry))
    if denom == 0:
        raise ConstantInputError("rank correlation undefined for constant input")
    return float(np.sum(rx * ry) / denom)


def load_dataset(path: str | Path) -> list[SentencePair]:
    """Read a similarity dataset.

    Each tab-separated line is either
    `subject verb object subject2 verb2 object2 score` (7 columns) or
    `verb object verb2 object2 score` (5 columns, verb-phrase task).
    Repeated sentence pairs (one line per annotator) are averaged into
    a single pair, keeping first-seen order.
    """
    order: list[tuple[Sentence, Sentence]] = []
    scores: dict[tuple[Sentence, Sentence], list[float]] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = [p.strip().lower() for p in line.split("\t")]
        if len(parts) == 7:
            left, right = tuple(parts[0:3]), tuple(parts[3:6])
        elif len(parts) == 5:
            left, right = tuple(parts[0:2]), tuple(parts[2:4])
        else:
            raise DatasetError(
                f"{path}:{lineno}: expected 5 or 7 tab-separated columns, got {len(parts)}"
            )
        try:
            score = float(parts[-1])
        except ValueError as exc:
            raise DatasetError(f"{path}:{lineno}: bad score {parts[-1]!r}") from exc
        if not np.isfinite(score):
            raise DatasetError(f"{path}:{lineno}: non-finite score")
        key = (left, right)
        if key not in scores:
            order.append(key)
            scores[key] = []
        scores[key].append(score)
    return [
        SentencePair(left, right, float(np.mean(scores[(left, right)])))
        for left, right in order
    ]


def _verb_matrix(verbs: Mapping[str, VerbMatrix] | None, verb: str, model: str) -> VerbMatrix:
    if verbs is None or verb not in verbs:
        raise MissingVerbError(f"model {model!r} needs a matrix for verb {verb!r}")
    return verbs[verb]


def compose_sentence(
    sentence: Sentence,
    model: str,
    space: SemanticSpace,
    verbs: Mapping[str, VerbMatrix] | None = None,
) -> SentenceRep:
    """Compose one (subject, verb, object) or (verb, object) sentence.

    Matrix-built stores compose identically under the ids "relational",
    "separable" and "regression": the id names the matrix recipe, the
    transitive formula is the argument-gating one in all three cases,
    and two-word sentences fall back to matrix-times-object.
    """
    if model not in MODEL_NAMES:
        raise EvalError(f"unknown model {model!r} (known: {', '.join(MODEL_NAMES)})")
    if len(sentence) == 3:
        subj_w, verb_w, obj_w = sentence
    elif len(sentence) == 2:
        subj_w, (verb_w, obj_w) = None, sentence
    else:
        raise EvalError(f"sentence must have 2 or 3 words, got {len(sentence)}")

    if model not in MATRIX_MODELS:
        if model == "verbs_only":
            return compose.compose_baseline([space.vector(verb_w)], "verbs_only")
        words = [w for w in (subj_w, verb_w, obj_w) if w is not None]
        return compose.compose_baseline([space.vector(w) for w in words], model)

    vm = _verb_matrix(verbs, verb_w, model)
    if subj_w is None:
        if model in ("relational", "separable", "regression", "verb_object"):
            return compose.compose_verb_object(vm, space.vector(obj_w))
        raise EvalError(f"model {model!r} needs a transitive (3-word) sentence")
    subj, obj = space.vector(subj_w), space.vector(obj_w)
    if model in ("relational", "separable", "regression"):
        return compose.compose_relational(subj, vm, obj)
    if model == "copy_subject":
        return compose.compose_copy_subject(subj, vm, obj)
    if model == "copy_object":
        return compose.compose_copy_object(subj, vm, obj)
    if model == "frob_add":
        return compose.compose_frobenius(subj, vm, obj, "additive")
    if model == "frob_mul":
        return compose.compose_frobenius(subj, vm, obj, "multiplicative")
    if model == "frob_tensor":
        return compose.compose_frobenius(subj, vm, obj, "tensored")
    if model == "verb_object":
        return compose.compose_verb_object(vm, obj)
    raise AssertionError(f"unhandled model {model!r}")


def score_pairs(
    dataset: Sequence[SentencePair],
    model: str,
    space: SemanticSpace,
    verbs: Mapping[str, VerbMatrix] | None = None,
) -> tuple[list[PairScore], int]:
    """Compose and score every pair; returns (kept scores, excluded count)."""
    kept: list[PairScore] = []
    excluded = 0
    for pair in dataset:
        left = compose_sentence(pair.left, model, space, verbs)
        right = compose_sentence(pair.right, model, space, verbs)
        try:
            cos = cosine_sim(left, right)
            euc = euclidean_dist(left, right)
        except (ShapeMismatchError, ZeroRepresentationError):
            excluded += 1
            continue
        kept.append(PairScore(pair.left, pair.right, pair.human_score, cos, euc))
    return kept, excluded


def run_task(
    dataset: Sequence[SentencePair],
    model: str,
    space: SemanticSpace,
    verbs: Mapping[str, VerbMatrix] | None = None,
) -> TaskResult:
    """Correlate one model's similarity scores with the human scores.

    Returns Spearman rho under cosine and under negated Euclidean
    distance, plus how many pairs were used and excluded.
    """
    kept, excluded = score_pairs(dataset, model, space, verbs)
    if len(kept) < 2:
        raise EvalError(
            f"model {model!r}: only {len(kept)} usable pairs, cannot correlate"
        )
    human = [p.human_score for p in kept]
    rho_cos = spearman_rho([p.cosine for p in kept], human)
    rho_euc = spearman_rho([-p.euclidean for p in kept], human)
    return TaskResult(
        model=model,
        rho_cosine=rho_cos,
        rho_euclidean=rho_euc,
        n_pairs_used=len(kept),
        excluded=excluded,
    )


@dataclass
class EntanglementReport:
    """Per-verb separability scores with their mean and a histogram
    over [0, 1] (bin edges and counts)."""

    scores: dict[str, float]
    mean: float
    bin_edges: list[float]
    bin_counts: list[int]


def entanglement_report(store: Mapping[str, VerbMatrix], bins: int = 10) -> EntanglementReport:
    """Score every stored verb matrix against its rank-1 approximation."""
    if not store:
        raise EmptyStoreError("verb store is empty")
    scores = {verb: entanglement_score(store[verb]) for verb in sorted(store)}
    values = np.array(list(scores.values()))
    counts, edges = np.histogram(values, bins=bins, range=(0.0, 1.0))
    return EntanglementReport(
        scores=scores,
        mean=float(values.mean()),
        bin_edges=[float(e) for e in edges],
        bin_counts=[int(c) for c in counts],
    )
