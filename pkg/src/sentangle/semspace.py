"""Distributional semantic spaces built from tokenized corpora.

The pipeline: pick the highest-frequency content words as a context
basis, count co-occurrences inside a symmetric word window that never
crosses sentence boundaries, weight the counts with local mutual
information (pointwise mutual information times the raw count), then
optionally row-normalize and project onto the leading left-singular
directions scaled by their singular values.

Multi-word phrases can be folded into the vocabulary before counting by
rewriting selected token bigrams into single underscore-joined tokens,
so a phrase gets a vector "as if it were a word"; those holistic
vectors are the regression targets in `sentangle.tensors`.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterable, Mapping, Sequence

import numpy as np

logger = logging.getLogger(__name__)

Corpus = Sequence[Sequence[str]]

FORMAT_TAG = "sentangle-space/1"


class SemSpaceError(Exception):
    """Base class for space-construction failures."""


class BasisError(SemSpaceError):
    """Raised when the corpus has fewer eligible words than requested."""


class SpaceBuildError(SemSpaceError):
    """Raised on an oversized SVD rank or a degenerate all-zero table."""


def merge_bigrams(
    sentence: Sequence[str],
    merges: frozenset[tuple[str, str]] | set[tuple[str, str]],
    joiner: str = "_",
) -> list[str]:
    """Rewrite adjacent token pairs in `merges` into single joined tokens.

    Scans left to right without overlap, so in "play play games" only
    the second bigram is merged when ("play", "games") is requested.
    """
    out: list[str] = []
    i = 0
    while i < len(sentence):
        if i + 1 < len(sentence) and (sentence[i], sentence[i + 1]) in merges:
            out.append(sentence[i] + joiner + sentence[i + 1])
            i += 2
        else:
            out.append(sentence[i])
            i += 1
    return out


def load_corpus(
    path: str | Path,
    merge_phrases: Iterable[tuple[str, str]] | None = None,
) -> list[list[str]]:
    """Read a corpus file: one sentence per line, space-separated tokens.

    Tokens are lowercased; empty lines are skipped.  `merge_phrases`
    rewrites the listed bigrams into single tokens before anything is
    counted.
    """
    merges = frozenset(merge_phrases) if merge_phrases else frozenset()
    sentences = []
    for line in Path(path).read_text(encoding="utf-8").splitlines():
        tokens = line.lower().split()
        if not tokens:
            continue
        if merges:
            tokens = merge_bigrams(tokens, merges)
        sentences.append(tokens)
    return sentences


def select_basis(
    corpus: Corpus,
    k: int,
    stopwords: frozenset[str] = frozenset(),
    skip_top: int = 0,
) -> list[str]:
    """Return the k most frequent non-stopword tokens after dropping the
    `skip_top` most frequent ones.  Ties break lexicographically."""
    if k <= 0:
        raise ValueError("basis size must be positive")
    freq: dict[str, int] = {}
    for sentence in corpus:
        for token in sentence:
            if token not in stopwords:
                freq[token] = freq.get(token, 0) + 1
    ranked = sorted(freq, key=lambda w: (-freq[w], w))
    eligible = ranked[skip_top:]
    if len(eligible) < k:
        raise BasisError(
            f"only {len(eligible)} eligible words after skipping "
            f"{skip_top}, need {k}"
        )
    return eligible[:k]


@dataclass
class CooccurrenceTable:
    """Window co-occurrence counts of targets (rows) against a context
    basis (columns), with marginal totals."""

    targets: list[str]
    contexts: list[str]
    counts: np.ndarray
    target_totals: np.ndarray
    context_totals: np.ndarray
    grand_total: int

    def merge(self, other: "CooccurrenceTable") -> "CooccurrenceTable":
        """Additively combine two tables (associative and commutative).

        Targets are union-aligned so shards of a corpus can be counted
        independently and merged; contexts must share one basis.
        """
        if self.contexts != other.contexts:
            raise SemSpaceError("cannot merge tables over different bases")
        targets = sorted(set(self.targets) | set(other.targets))
        index = {t: i for i, t in enumerate(targets)}
        counts = np.zeros((len(targets), len(self.contexts)), dtype=np.int64)
        for table in (self, other):
            rows = [index[t] for t in table.targets]
            counts[rows, :] += table.counts
        return _table_from_counts(targets, self.contexts, counts)


def _table_from_counts(
    targets: list[str], contexts: list[str], counts: np.ndarray
) -> CooccurrenceTable:
    return CooccurrenceTable(
        targets=targets,
        contexts=contexts,
        counts=counts,
        target_totals=counts.sum(axis=1),
        context_totals=counts.sum(axis=0),
        grand_total=int(counts.sum()),
    )


def count_cooccurrences(corpus: Corpus, basis: Sequence[str], window: int) -> CooccurrenceTable:
    """Count, for every vocabulary word, how often each basis word occurs
    within `window` tokens on either side, inside one sentence."""
    if window < 1:
        raise ValueError("window must be at least 1")
    vocab = sorted({token for sentence in corpus for token in sentence})
    target_index = {t: i for i, t in enumerate(vocab)}
    context_index = {c: i for i, c in enumerate(basis)}
    counts = np.zeros((len(vocab), len(basis)), dtype=np.int64)
    for sentence in corpus:
        n = len(sentence)
        for i, token in enumerate(sentence):
            row = target_index[token]
            for j in range(max(0, i - window), min(n, i + window + 1)):
                if j == i:
                    continue
                col = context_index.get(sentence[j])
                if col is not None:
                    counts[row, col] += 1
    return _table_from_counts(vocab, list(basis), counts)


def weight_lmi(table: CooccurrenceTable) -> np.ndarray:
    """Local mutual information: count * ln(count * N / (row_total * col_total)).

    Zero counts map to exactly zero; negative values are kept.
    """
    if table.grand_total <= 0:
        raise SemSpaceError("empty co-occurrence table (grand total is zero)")
    counts = table.counts.astype(np.float64)
    expected = np.outer(
        table.target_totals.astype(np.float64),
        table.context_totals.astype(np.float64),
    )
    out = np.zeros_like(counts)
    nz = counts > 0
    out[nz] = counts[nz] * np.log(counts[nz] * float(table.grand_total) / expected[nz])
    return out


@dataclass(frozen=True)
class SpaceConfig:
    """Knobs of the space-building pipeline.

    The defaults mirror the production recipe this package grew out of:
    a 2000-word content basis after skipping the 50 most frequent
    words, a 5-word window, LMI weighting, row normalization, and a
    rank-300 projection.
    """

    basis_size: int = 2000
    skip_top: int = 50
    stopwords: frozenset[str] = frozenset()
    window: int = 5
    svd_rank: int = 300
    normalize: bool = True

    def as_meta(self) -> dict:
        return {
            "basis_size": self.basis_size,
            "skip_top": self.skip_top,
            "stopwords": sorted(self.stopwords),
            "window": self.window,
            "svd_rank": self.svd_rank,
            "normalized": self.normalize,
            "weighting": "lmi",
        }


@dataclass
class SemanticSpace:
    """A word-to-vector map with the build configuration in `meta`.

    Out-of-vocabulary lookups resolve to the zero vector with a warning
    (logged once per word) so batch composition never aborts.
    """

    dim: int
    vectors: dict[str, np.ndarray]
    meta: dict = field(default_factory=dict)
    _warned: set = field(default_factory=set, repr=False)

    def __contains__(self, word: str) -> bool:
        return word in self.vectors

    @property
    def words(self) -> list[str]:
        return sorted(self.vectors)

    def vector(self, word: str) -> np.ndarray:
        vec = self.vectors.get(word)
        if vec is None:
            if word not in self._warned:
                self._warned.add(word)
                logger.warning("word %r not in space, using zero vector", word)
            return np.zeros(self.dim)
        return vec


def _fix_signs(u: np.ndarray, vt: np.ndarray) -> tuple[np.ndarray, np.ndarray]:
    # Each singular pair (u_j, v_j) is only defined up to a joint sign;
    # pin it so the largest-magnitude entry of u_j is positive.
    for j in range(u.shape[1]):
        if u[np.argmax(np.abs(u[:, j])), j] < 0:
            u[:, j] = -u[:, j]
            vt[j, :] = -vt[j, :]
    return u, vt


def build_space(corpus: Corpus, config: SpaceConfig) -> SemanticSpace:
    """Run the full pipeline and return the projected space.

    Pipeline: basis selection, window counting, LMI weighting, optional
    L2 row normalization, truncated SVD keeping `svd_rank` left-singular
    directions scaled by their singular values.  Deterministic: reruns
    on identical input produce bit-identical vectors.
    """
    basis = select_basis(corpus, config.basis_size, config.stopwords, config.skip_top)
    table = count_cooccurrences(corpus, basis, config.window)
    matrix = weight_lmi(table)
    if config.normalize:
        norms = np.linalg.norm(matrix, axis=1, keepdims=True)
        matrix = np.divide(matrix, norms, out=np.zeros_like(matrix), where=norms > 0)
    rank = config.svd_rank
    if rank > min(matrix.shape):
        raise SpaceBuildError(
            f"svd rank {rank} exceeds table shape {matrix.shape}"
        )
    if not matrix.any():
        raise SpaceBuildError("weighted table is all zero, nothing to project")
    u, s, vt = np.linalg.svd(matrix, full_matrices=False)
    u, vt = _fix_signs(u, vt)
    projected = u[:, :rank] * s[:rank]
    vectors = {word: projected[i].copy() for i, word in enumerate(table.targets)}
    meta = config.as_meta()
    meta["vocab_size"] = len(table.targets)
    return SemanticSpace(dim=rank, vectors=vectors, meta=meta)


def save_space(space: SemanticSpace, path: str | Path) -> None:
    """Write a space as TSV lines `word<TAB>v1 ... vd` plus a JSON
    metadata sidecar at `<path>.meta.json`.  Output is byte-stable."""
    path = Path(path)
    lines = []
    for word in sorted(space.vectors):
        values = " ".join(repr(float(x)) for x in space.vectors[word])
        lines.append(f"{word}\t{values}")
    path.write_text("\n".join(lines) + "\n", encoding="utf-8")
    sidecar = {
        "format": FORMAT_TAG,
        "dim": space.dim,
        "words": len(space.vectors),
        "meta": space.meta,
    }
    Path(str(path) + ".meta.json").write_text(
        json.dumps(sidecar, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_space(path: str | Path) -> SemanticSpace:
    """Read a space written by `save_space`."""
    path = Path(path)
    vectors: dict[str, np.ndarray] = {}
    dim = None
    for lineno, line in enumerate(path.read_text(encoding="utf-8").splitlines(), 1):
        if not line.strip():
            continue
        word, _, values = line.partition("\t")
        vec = np.array([float(x) for x in values.split()])
        if dim is None:
            dim = len(vec)
        elif len(vec) != dim:
            raise SemSpaceError(f"{path}:{lineno}: expected {dim} values")
        vectors[word] = vec
    if dim is None:
        raise SemSpaceError(f"{path}: empty space file")
    meta = {}
    sidecar = Path(str(path) + ".meta.json")
    if sidecar.exists():
        meta = json.loads(sidecar.read_text(encoding="utf-8")).get("meta", {})
    return SemanticSpace(dim=dim, vectors=vectors, meta=meta)


def load_stopwords(path: str | Path) -> frozenset[str]:
    """Read one stopword per line; `#` starts a comment."""
    words = set()
    for raw in Path(path).read_text(encoding="utf-8").splitlines():
        word = raw.split("#", 1)[0].strip().lower()
        if word:
            words.add(word)
    return frozenset(words)


def load_phrase_list(path: str | Path) -> list[tuple[str, str]]:
    """Read token bigrams to merge: two tokens per line (tab or space
    separated), `#` comments ignored."""
    merges = []
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.replace("\t", " ").split()
        if len(parts) != 2:
            raise SemSpaceError(f"{path}:{lineno}: expected two tokens per line")
        merges.append((parts[0].lower(), parts[1].lower()))
    return merges
