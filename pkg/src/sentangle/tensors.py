"""Verb matrices: corpus-based builders, regression training, and
separability analytics.

A transitive verb is represented by a d x d matrix over the semantic
space.  Two corpus-based builders are provided: the argument-mixing sum
of subject/object outer products, and its deliberately separable
variant, the outer product of the summed arguments.  A third route
trains the matrix by gradient descent so that it maps object vectors
onto the holistic vectors of the corresponding verb-object phrases.

How close a matrix is to separable is scored by the Frobenius cosine
between the matrix and its best rank-1 approximation (the leading
singular triplet); the score is 1 exactly when the matrix has rank 1
and drops as the singular mass spreads over more directions.
"""

from __future__ import annotations

import json
import logging
from dataclasses import dataclass
from pathlib import Path
from typing import Mapping, Sequence

import numpy as np

from .semspace import SemanticSpace

logger = logging.getLogger(__name__)

FORMAT_TAG = "sentangle-verbs/1"

METHODS = ("relational", "separable", "regression")


class TensorError(Exception):
    """Base class for verb-matrix failures."""


class DimensionMismatchError(TensorError):
    """Raised when argument vectors disagree on dimension."""


class ZeroMatrixError(TensorError):
    """Raised when a cosine against an all-zero matrix is requested."""


class DivergenceError(TensorError):
    """Gradient descent produced non-finite values (step size too large)."""

    def __init__(self, message: str, epoch: int):
        super().__init__(f"{message} at epoch {epoch}")
        self.epoch = epoch


@dataclass
class VerbMatrix:
    """A named d x d matrix plus the method that produced it."""

    verb: str
    data: np.ndarray
    method: str


@dataclass
class ArgumentPairs:
    """Subject/object occurrences of a verb, resolved against one space.

    `pairs` may repeat entries (corpus multiplicity); `resolved` holds
    the corresponding vector pairs actually used by the builders.
    """

    verb: str
    pairs: list[tuple[str, str]]
    resolved: list[tuple[np.ndarray, np.ndarray]]


def resolve_pairs(
    space: SemanticSpace, verb: str, pairs: Sequence[tuple[str, str]]
) -> ArgumentPairs:
    """Look up argument vectors, dropping pairs where either side is
    out of vocabulary (a zero vector contributes nothing anyway)."""
    resolved = []
    for subject, obj in pairs:
        sv, ov = space.vector(subject), space.vector(obj)
        if not sv.any() or not ov.any():
            logger.warning(
                "dropping pair (%s, %s) for verb %r: argument not in space",
                subject, obj, verb,
            )
            continue
        resolved.append((sv, ov))
    return ArgumentPairs(verb=verb, pairs=list(pairs), resolved=resolved)


def _stack(args: ArgumentPairs) -> tuple[np.ndarray, np.ndarray]:
    if not args.resolved:
        raise TensorError(f"no resolvable argument pairs for verb {args.verb!r}")
    subjects = np.array([s for s, _ in args.resolved], dtype=np.float64)
    objects = np.array([o for _, o in args.resolved], dtype=np.float64)
    if subjects.shape[1] != objects.shape[1]:
        raise DimensionMismatchError(
            f"subject dim {subjects.shape[1]} != object dim {objects.shape[1]}"
        )
    return subjects, objects


def build_relational(args: ArgumentPairs) -> VerbMatrix:
    """Sum of outer products over all occurrences: mixes the arguments
    the verb appeared with, entry by entry."""
    subjects, objects = _stack(args)
    return VerbMatrix(args.verb, subjects.T @ objects, "relational")


def build_separable(args: ArgumentPairs) -> VerbMatrix:
    """Outer product of the summed subjects with the summed objects;
    rank 1 by construction."""
    subjects, objects = _stack(args)
    return VerbMatrix(args.verb, np.outer(subjects.sum(0), objects.sum(0)), "separable")


def _best_rank1(matrix: np.ndarray) -> np.ndarray:
    u, s, vt = np.linalg.svd(matrix, full_matrices=False)
    return s[0] * np.outer(u[:, 0], vt[0, :])


def rank1_approx(m: "VerbMatrix | np.ndarray") -> "VerbMatrix | np.ndarray":
    """Closest rank-1 matrix in Frobenius norm: the leading singular
    value times the outer product of its singular vectors."""
    if isinstance(m, VerbMatrix):
        return VerbMatrix(m.verb, _best_rank1(m.data), f"rank1_of({m.method})")
    return _best_rank1(np.asarray(m, dtype=np.float64))


def matrix_cosine(a: np.ndarray, b: np.ndarray) -> float:
    """Cosine of two equally shaped matrices flattened to vectors."""
    a = np.asarray(a, dtype=np.float64)
    b = np.asarray(b, dtype=np.float64)
    if a.shape != b.shape:
        raise DimensionMismatchError(f"shapes {a.shape} and {b.shape} differ")
    na, nb = np.linalg.norm(a), np.linalg.norm(b)
    if na == 0 or nb == 0:
        raise ZeroMatrixError("cosine undefined for an all-zero matrix")
    return float(np.tensordot(a, b) / (na * nb))


def entanglement_score(m: "VerbMatrix | np.ndarray") -> float:
    """Cosine between a matrix and its best rank-1 approximation.

    Equals 1 (within floating point) iff the matrix has rank 1; lower
    values mean the matrix genuinely mixes several directions.
    """
    data = m.data if isinstance(m, VerbMatrix) else np.asarray(m, dtype=np.float64)
    return matrix_cosine(data, _best_rank1(data))


@dataclass
class RegressionExample:
    """One training instance: an object vector and the holistic vector
    of the verb-object phrase it should map to."""

    input: np.ndarray
    target: np.ndarray


@dataclass(frozen=True)
class RegressionConfig:
    """Gradient-descent hyperparameters.

    `learning_rate=None` picks 0.1 divided by the mean squared input
    norm, a stable default for normalized spaces.  `init` is "zeros" or
    "scaled_gaussian" (entries drawn N(0, 1/d) from `seed`).
    """

    learning_rate: float | None = None
    max_epochs: int = 5000
    tolerance: float = 1e-8
    init: str = "zeros"
    seed: int = 0

    def __post_init__(self):
        if self.learning_rate is not None and self.learning_rate <= 0:
            raise ValueError("learning_rate must be positive")
        if self.tolerance < 0:
            raise ValueError("tolerance must be nonnegative")
        if self.init not in ("zeros", "scaled_gaussian"):
            raise ValueError(f"unknown init {self.init!r}")


def _example_matrices(examples: Sequence[RegressionExample]) -> tuple[np.ndarray, np.ndarray]:
    if not examples:
        raise TensorError("need at least one regression example")
    x = np.array([ex.input for ex in examples], dtype=np.float64)
    y = np.array([ex.target for ex in examples], dtype=np.float64)
    if x.shape != y.shape:
        raise DimensionMismatchError(
            f"input dim {x.shape[1]} != target dim {y.shape[1]}"
        )
    return x, y


def regression_loss(matrix: np.ndarray, examples: Sequence[RegressionExample]) -> float:
    """Mean squared prediction error (1/2m) sum_i ||V x_i - y_i||^2."""
    x, y = _example_matrices(examples)
    residual = x @ matrix.T - y
    return float(np.sum(residual * residual) / (2 * len(examples)))


def _gradient(v: np.ndarray, x: np.ndarray, y: np.ndarray) -> np.ndarray:
    return (x @ v.T - y).T @ x / len(x)


def regression_gradient(
    matrix: np.ndarray, examples: Sequence[RegressionExample]
) -> np.ndarray:
    """Gradient of `regression_loss` in V: (1/m) sum_i (V x_i - y_i) x_i^T."""
    x, y = _example_matrices(examples)
    return _gradient(matrix, x, y)


def train_regression(
    verb: str,
    examples: Sequence[RegressionExample],
    config: RegressionConfig | None = None,
) -> VerbMatrix:
    """Fit V by batch gradient descent on (1/2m) sum ||V x_i - y_i||^2.

    The gradient is (1/m) sum (V x_i - y_i) x_i^T.  Stops when its
    Frobenius norm drops to `tolerance` or after `max_epochs`; the final
    loss is logged and recomputable with `regression_loss`.
    """
    cfg = config or RegressionConfig()
    x, y = _example_matrices(examples)
    d = x.shape[1]
    if cfg.init == "zeros":
        v = np.zeros((d, d))
    else:
        rng = np.random.default_rng(cfg.seed)
        v = rng.normal(0.0, 1.0 / np.sqrt(d), size=(d, d))
    lr = cfg.learning_rate
    if lr is None:
        mean_sq = float(np.mean(np.sum(x * x, axis=1)))
        lr = 0.1 / mean_sq if mean_sq > 0 else 0.1
    epoch = 0
    # Overflow is detected explicitly below, so silence numpy's warning.
    with np.errstate(over="ignore", invalid="ignore"):
        for epoch in range(1, cfg.max_epochs + 1):
            grad = _gradient(v, x, y)
            if not np.isfinite(grad).all():
                raise DivergenceError("gradient is non-finite", epoch)
            if np.linalg.norm(grad) <= cfg.tolerance:
                break
            v -= lr * grad
            if not np.isfinite(v).all():
                raise DivergenceError("weights diverged", epoch)
    result = VerbMatrix(verb, v, "regression")
    logger.info(
        "trained %r: %d epochs, final loss %.6g",
        verb, epoch, regression_loss(v, examples),
    )
    return result


def least_squares_oracle(examples: Sequence[RegressionExample]) -> np.ndarray:
    """Closed-form minimizer of the regression objective via the normal
    equations with a pseudo-inverse (minimum-norm on rank deficiency)."""
    x, y = _example_matrices(examples)
    return (np.linalg.pinv(x) @ y).T


def build_regression_examples(
    space: SemanticSpace,
    verb: str,
    objects: Sequence[str],
    joiner: str = "_",
) -> list[RegressionExample]:
    """Pair each object vector with the holistic vector of the merged
    `verb<joiner>object` token; instances missing from the space are
    dropped with a warning."""
    examples = []
    for obj in objects:
        phrase = verb + joiner + obj
        x, y = space.vector(obj), space.vector(phrase)
        if not x.any() or not y.any():
            logger.warning(
                "dropping instance (%s, %s): object or phrase not in space",
                obj, phrase,
            )
            continue
        examples.append(RegressionExample(input=x, target=y))
    return examples


def rank1_store(store: Mapping[str, VerbMatrix]) -> dict[str, VerbMatrix]:
    """Replace every matrix in a store by its rank-1 approximation."""
    return {verb: rank1_approx(vm) for verb, vm in store.items()}


def load_argument_pairs(path: str | Path) -> dict[str, list[tuple[str, str]]]:
    """Read `verb<TAB>subject<TAB>object` lines (repeats allowed) into
    an ordered per-verb mapping."""
    pairs: dict[str, list[tuple[str, str]]] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 3:
            raise TensorError(
                f"{path}:{lineno}: expected `verb<TAB>subject<TAB>object`"
            )
        verb, subject, obj = (p.strip().lower() for p in parts)
        pairs.setdefault(verb, []).append((subject, obj))
    return pairs


def _safe_filename(verb: str) -> str:
    return "".join(
        c if c.isalnum() or c in "_-" else f"%{ord(c):02x}" for c in verb
    )


def save_verb_store(
    directory: str | Path,
    store: Mapping[str, VerbMatrix],
    extra_meta: dict | None = None,
) -> None:
    """Write one TSV matrix file per verb plus a `store.json` manifest
    carrying each verb's method tag.  Output is byte-stable."""
    directory = Path(directory)
    directory.mkdir(parents=True, exist_ok=True)
    manifest: dict = {"format": FORMAT_TAG, "verbs": {}}
    if extra_meta:
        manifest["meta"] = extra_meta
    for verb in sorted(store):
        vm = store[verb]
        filename = _safe_filename(verb) + ".tsv"
        lines = [" ".join(repr(float(x)) for x in row) for row in vm.data]
        (directory / filename).write_text("\n".join(lines) + "\n", encoding="utf-8")
        manifest["verbs"][verb] = {"file": filename, "method": vm.method}
    (directory / "store.json").write_text(
        json.dumps(manifest, sort_keys=True, indent=2) + "\n", encoding="utf-8"
    )


def load_verb_store(directory: str | Path) -> dict[str, VerbMatrix]:
    """Read a store written by `save_verb_store`."""
    directory = Path(directory)
    manifest_path = directory / "store.json"
    if not manifest_path.exists():
        raise TensorError(f"no store.json manifest in {directory}")
    manifest = json.loads(manifest_path.read_text(encoding="utf-8"))
    store = {}
    for verb, entry in manifest.get("verbs", {}).items():
        text = (directory / entry["file"]).read_text(encoding="utf-8")
        rows = [
            [float(x) for x in line.split()]
            for line in text.splitlines()
            if line.strip()
        ]
        store[verb] = VerbMatrix(verb, np.array(rows), entry["method"])
    return store
