"""Sentence and phrase composition.

The basis-copying primitives (copy, merge, delete, unit) come from the
monoid/comonoid pair every space with a fixed basis carries: copying
sends a basis vector to its tensor square, merging is the element-wise
product, deleting sums the coordinates, and the unit is the all-ones
vector.  They let a d x d verb matrix stand in for the higher-order
tensor its grammatical type asks for without ever materializing it.

Composition models for a transitive sentence (subject s, verb matrix V,
object o):

    relational        (s (x) o) .* V          (a matrix)
    copy_subject      s .* (V o)
    copy_object       o .* (V^T s)
    frob_add          copy_subject + copy_object
    frob_mul          copy_subject .* copy_object
    frob_tensor       copy_subject (x) copy_object   (a matrix)
    verb_object       V o                            (no subject needed)

plus the word-vector baselines: additive, multiplicative, verbs_only.
`execute_plan` contracts arbitrary word tensors along a compiled
`ContractionPlan` with plain summation semantics.
"""

from __future__ import annotations

import string
from dataclasses import dataclass
from typing import Sequence

import numpy as np

from .pregroup import ContractionPlan
from .tensors import VerbMatrix

MODEL_NAMES = (
    "relational",
    "separable",
    "copy_subject",
    "copy_object",
    "frob_add",
    "frob_mul",
    "frob_tensor",
    "additive",
    "multiplicative",
    "verbs_only",
    "verb_object",
    "regression",
)

MAX_ORDER = 4


class ComposeError(Exception):
    """Raised on shape problems or unsupported composition requests."""


@dataclass
class SentenceRep:
    """A composed representation: a vector or a matrix, tagged with the
    model that produced it."""

    data: np.ndarray
    model: str

    @property
    def is_matrix(self) -> bool:
        return self.data.ndim == 2


def frob_copy(v: np.ndarray) -> np.ndarray:
    """Basis copying, extended linearly: the diagonal matrix of v."""
    return np.diag(np.asarray(v, dtype=np.float64))


def frob_mul(u: np.ndarray, w: np.ndarray) -> np.ndarray:
    """Basis merging on a product state: the element-wise product."""
    u = np.asarray(u, dtype=np.float64)
    w = np.asarray(w, dtype=np.float64)
    if u.shape != w.shape:
        raise ComposeError(f"shapes {u.shape} and {w.shape} differ")
    return u * w


def frob_delete(v: np.ndarray) -> float:
    """Basis deleting, extended linearly: the sum of the coordinates."""
    return float(np.sum(v))


def frob_unit(d: int) -> np.ndarray:
    """The unit state: the all-ones vector of dimension d."""
    return np.ones(d)


def _matrix(verb: "VerbMatrix | np.ndarray") -> np.ndarray:
    data = verb.data if isinstance(verb, VerbMatrix) else np.asarray(verb, dtype=np.float64)
    if data.ndim != 2:
        raise ComposeError(f"verb matrix must be 2-d, got order {data.ndim}")
    return data


def compose_relational(
    subj: np.ndarray, verb: "VerbMatrix | np.ndarray", obj: np.ndarray
) -> SentenceRep:
    """Sentence matrix: the outer product of the arguments, gated
    entry-wise by the verb matrix (both verb dimensions copied)."""
    v = _matrix(verb)
    return SentenceRep(np.outer(subj, obj) * v, "relational")


def compose_copy_subject(
    subj: np.ndarray, verb: "VerbMatrix | np.ndarray", obj: np.ndarray
) -> SentenceRep:
    """Vector s .* (V o): the subject dimension is copied."""
    v = _matrix(verb)
    return SentenceRep(frob_mul(np.asarray(subj, dtype=np.float64), v @ obj), "copy_subject")


def compose_copy_object(
    subj: np.ndarray, verb: "VerbMatrix | np.ndarray", obj: np.ndarray
) -> SentenceRep:
    """Vector o .* (V^T s): the object dimension is copied."""
    v = _matrix(verb)
    return SentenceRep(frob_mul(np.asarray(obj, dtype=np.float64), v.T @ subj), "copy_object")


def compose_frobenius(
    subj: np.ndarray,
    verb: "VerbMatrix | np.ndarray",
    obj: np.ndarray,
    mode: str,
) -> SentenceRep:
    """Combine the copy-subject and copy-object vectors.

    `mode` is "additive" (sum), "multiplicative" (element-wise product)
    or "tensored" (outer product, yielding a matrix).
    """
    cs = compose_copy_subject(subj, verb, obj).data
    co = compose_copy_object(subj, verb, obj).data
    if mode == "additive":
        return SentenceRep(cs + co, "frob_add")
    if mode == "multiplicative":
        return SentenceRep(cs * co, "frob_mul")
    if mode == "tensored":
        return SentenceRep(np.outer(cs, co), "frob_tensor")
    raise ComposeError(f"unknown frobenius mode {mode!r}")


def compose_baseline(vectors: Sequence[np.ndarray], mode: str) -> SentenceRep:
    """Word-vector baselines: sum, element-wise product, or the verb
    vector alone (pass just that vector for `verbs_only`)."""
    if not vectors:
        raise ComposeError("baseline composition needs at least one vector")
    arrays = [np.asarray(v, dtype=np.float64) for v in vectors]
    if mode == "additive":
        return SentenceRep(np.sum(arrays, axis=0), "additive")
    if mode == "multiplicative":
        out = arrays[0].copy()
        for v in arrays[1:]:
            out = out * v
        return SentenceRep(out, "multiplicative")
    if mode == "verbs_only":
        if len(arrays) != 1:
            raise ComposeError("verbs_only takes exactly the verb vector")
        return SentenceRep(arrays[0].copy(), "verbs_only")
    raise ComposeError(f"unknown baseline mode {mode!r}")


def compose_verb_object(verb: "VerbMatrix | np.ndarray", obj: np.ndarray) -> SentenceRep:
    """Verb-phrase vector: the verb matrix applied to the object."""
    v = _matrix(verb)
    return SentenceRep(v @ np.asarray(obj, dtype=np.float64), "verb_object")


def execute_plan(plan: ContractionPlan, tensors: Sequence[np.ndarray]) -> np.ndarray:
    """Contract word tensors along a plan, by plain summation.

    Tensor orders must match `plan.word_orders`; paired axes must agree
    on dimension.  Axis order of the result follows `plan.output_axes`.
    Orders above 4 are rejected as a memory guard.
    """
    arrays = [np.asarray(t, dtype=np.float64) for t in tensors]
    if len(arrays) != len(plan.word_orders):
        raise ComposeError(
            f"plan covers {len(plan.word_orders)} words, got {len(arrays)} tensors"
        )
    for w, (arr, order) in enumerate(zip(arrays, plan.word_orders)):
        if arr.ndim != order:
            raise ComposeError(
                f"word {w}: expected order {order}, got order {arr.ndim}"
            )
        if arr.ndim > MAX_ORDER:
            raise ComposeError(f"word {w}: order {arr.ndim} exceeds the guard ({MAX_ORDER})")
    if len(plan.output_axes) > MAX_ORDER:
        raise ComposeError(
            f"output order {len(plan.output_axes)} exceeds the guard ({MAX_ORDER})"
        )

    labels: dict[tuple[int, int], int] = {}
    next_label = 0
    for (wa, aa), (wb, ab) in plan.pairings:
        for key in ((wa, aa), (wb, ab)):
            if key in labels:
                raise ComposeError(f"axis {key} appears in more than one pairing")
        if arrays[wa].shape[aa] != arrays[wb].shape[ab]:
            raise ComposeError(
                f"paired axes {(wa, aa)} and {(wb, ab)} have different "
                f"dimensions {arrays[wa].shape[aa]} != {arrays[wb].shape[ab]}"
            )
        labels[(wa, aa)] = labels[(wb, ab)] = next_label
        next_label += 1
    for w, arr in enumerate(arrays):
        for a in range(arr.ndim):
            if (w, a) not in labels:
                labels[(w, a)] = next_label
                next_label += 1
    unpaired = {
        (w, a)
        for w, arr in enumerate(arrays)
        for a in range(arr.ndim)
    } - {key for pairing in plan.pairings for key in pairing}
    if set(plan.output_axes) != unpaired:
        raise ComposeError("output axes are not exactly the unpaired axes")
    if next_label > len(string.ascii_letters):
        raise ComposeError("too many distinct axes for one contraction")

    alphabet = string.ascii_letters
    operands = [
        "".join(alphabet[labels[(w, a)]] for a in range(arr.ndim))
        for w, arr in enumerate(arrays)
    ]
    output = "".join(alphabet[labels[key]] for key in plan.output_axes)
    return np.einsum(",".join(operands) + "->" + output, *arrays)
