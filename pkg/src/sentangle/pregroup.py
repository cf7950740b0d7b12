"""Pregroup types, grammatical reductions, and contraction plans.

A pregroup type is a sequence of simple types, each an atomic generator
decorated with an integer adjoint order: negative values are iterated
left adjoints, positive values iterated right adjoints.  A sequence of
word types is grammatical when adjacent factors cancel pairwise down to
a target type; a factor of adjoint order z cancels against a following
factor of order z + 1 over the same generator (the left-adjoint rule
for z < 0, the right-adjoint rule for z >= 0).

`reduce` finds such a reduction with a greedy left-to-right stack scan
and `compile_plan` translates it into an index-level recipe: every word
becomes a tensor with one axis per type factor, every cancellation an
axis pairing, and the surviving factors the output axes.  Plans are
executed by `sentangle.compose.execute_plan`.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Sequence

DEFAULT_GENERATORS = frozenset({"n", "s"})

SEPARATOR = "·"  # the middle dot used when printing compound types


class PregroupError(Exception):
    """Base class for grammar-side failures."""


class TypeParseError(PregroupError):
    """Raised on malformed type strings or atoms outside the generator set."""


class NotReducibleError(PregroupError):
    """Raised when no planar cancellation-only reduction reaches the target."""


class PlanError(PregroupError):
    """Raised when a reduction does not fit a word-type assignment."""


@dataclass(frozen=True)
class Simple:
    """One factor of a pregroup type: a generator with an adjoint order."""

    base: str
    z: int = 0

    @property
    def l(self) -> "Simple":
        return Simple(self.base, self.z - 1)

    @property
    def r(self) -> "Simple":
        return Simple(self.base, self.z + 1)

    def __str__(self) -> str:
        if self.z < 0:
            return self.base + "^l" * (-self.z)
        return self.base + "^r" * self.z


@dataclass(frozen=True)
class Type:
    """A pregroup type: an ordered sequence of simple types.

    Concatenation (`@`) is the monoid product; the empty sequence is the
    unit and prints as "1".
    """

    factors: tuple[Simple, ...] = ()

    def __len__(self) -> int:
        return len(self.factors)

    def __iter__(self):
        return iter(self.factors)

    def __getitem__(self, key):
        if isinstance(key, slice):
            return Type(self.factors[key])
        return self.factors[key]

    def __matmul__(self, other: "Type") -> "Type":
        return Type(self.factors + other.factors)

    @property
    def l(self) -> "Type":
        return Type(tuple(f.l for f in reversed(self.factors)))

    @property
    def r(self) -> "Type":
        return Type(tuple(f.r for f in reversed(self.factors)))

    def __str__(self) -> str:
        if not self.factors:
            return "1"
        return SEPARATOR.join(str(f) for f in self.factors)


_FACTOR_RE = re.compile(r"^([a-z]+)((?:\^[lr])*)$")


def parse_type(text: str, generators: frozenset[str] = DEFAULT_GENERATORS) -> Type:
    """Parse a type string such as "n^r·s·n^l".

    The middle dot separates factors; a plain "." is accepted as an
    ASCII fallback.  Iterated adjoints stack suffixes ("n^l^l").  "1"
    denotes the empty (unit) type.
    """
    text = text.strip()
    if text == "1":
        return Type(())
    if not text:
        raise TypeParseError("empty type string")
    factors = []
    for chunk in re.split(rf"[{SEPARATOR}.]", text):
        chunk = chunk.strip()
        match = _FACTOR_RE.match(chunk)
        if match is None:
            raise TypeParseError(f"malformed type factor {chunk!r}")
        base, suffixes = match.group(1), match.group(2)
        if base not in generators:
            raise TypeParseError(
                f"unknown atom {base!r} (generators: {sorted(generators)})"
            )
        z = suffixes.count("^l") * -1 + suffixes.count("^r")
        factors.append(Simple(base, z))
    return Type(tuple(factors))


@dataclass(frozen=True)
class Reduction:
    """A cancellation-only reduction over a concatenated type sequence.

    `steps` holds (i, j) position pairs with i < j, each annihilated by
    one cancellation; `residue` holds the surviving positions in order.
    Steps produced by `reduce` are non-crossing by construction.
    """

    steps: tuple[tuple[int, int], ...]
    residue: tuple[int, ...]


def _contracts(left: Simple, right: Simple) -> bool:
    return left.base == right.base and left.z + 1 == right.z


def reduce(sentence_types: Sequence[Type], target: Type) -> Reduction:
    """Greedily reduce a sequence of word types to `target`.

    Scans left to right with a stack: an incoming factor cancels the top
    of the stack whenever the pair matches the adjoint rule, otherwise
    it is pushed.  The scan is eager, so it returns the unique maximal
    planar reduction of the sequence; it reaches any irreducible target
    that is reachable at all.  When several reductions to the target
    exist the eager one is returned, deterministically.
    """
    if not sentence_types:
        raise NotReducibleError("empty sentence")
    factors = [f for t in sentence_types for f in t.factors]
    stack: list[int] = []
    steps: list[tuple[int, int]] = []
    for pos, factor in enumerate(factors):
        if stack and _contracts(factors[stack[-1]], factor):
            steps.append((stack.pop(), pos))
        else:
            stack.append(pos)
    residue = [factors[p] for p in stack]
    if residue != list(target.factors):
        achieved = str(Type(tuple(residue)))
        raise NotReducibleError(
            f"no reduction to {target} (irreducible residue: {achieved})"
        )
    return Reduction(tuple(steps), tuple(stack))


@dataclass(frozen=True)
class ContractionPlan:
    """Index-level recipe for contracting word tensors.

    `word_orders[w]` is the tensor order of word w; `pairings` lists
    ((word_a, axis_a), (word_b, axis_b)) contractions; `output_axes`
    lists the surviving (word, axis) pairs left to right.
    """

    word_orders: tuple[int, ...]
    pairings: tuple[tuple[tuple[int, int], tuple[int, int]], ...]
    output_axes: tuple[tuple[int, int], ...]


def compile_plan(reduction: Reduction, type_assignment: Sequence[Type]) -> ContractionPlan:
    """Translate a reduction into a contraction plan for a word sequence.

    Each word of a k-factor type becomes an order-k tensor; each
    reduction step becomes one axis pairing; surviving factors become
    output axes in sentence order.
    """
    orders = tuple(len(t) for t in type_assignment)
    total = sum(orders)
    covered = [False] * total

    def word_axis(pos: int) -> tuple[int, int]:
        if not 0 <= pos < total:
            raise PlanError(f"position {pos} outside the {total}-factor sentence")
        if covered[pos]:
            raise PlanError(f"position {pos} consumed twice")
        covered[pos] = True
        for word, order in enumerate(orders):
            if pos < order:
                return (word, pos)
            pos -= order
        raise AssertionError("unreachable")

    pairings = tuple((word_axis(i), word_axis(j)) for i, j in reduction.steps)
    output_axes = tuple(word_axis(p) for p in sorted(reduction.residue))
    if not all(covered):
        raise PlanError(
            "reduction does not cover the type assignment "
            f"({sum(covered)} of {total} factors)"
        )
    return ContractionPlan(orders, pairings, output_axes)


def load_lexicon(
    path: str | Path, generators: frozenset[str] = DEFAULT_GENERATORS
) -> dict[str, Type]:
    """Read a lexicon file: one `word<TAB>type-string` per line.

    Blank lines are skipped and anything after a `#` is ignored.
    """
    lexicon: dict[str, Type] = {}
    for lineno, raw in enumerate(Path(path).read_text(encoding="utf-8").splitlines(), 1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        parts = line.split("\t")
        if len(parts) != 2:
            raise TypeParseError(f"{path}:{lineno}: expected `word<TAB>type`")
        word, type_text = parts[0].strip(), parts[1].strip()
        lexicon[word] = parse_type(type_text, generators)
    return lexicon


def sentence_plan(
    words: Iterable[str], lexicon: dict[str, Type], target: Type
) -> tuple[list[Type], Reduction, ContractionPlan]:
    """Look up word types, reduce to `target`, and compile the plan."""
    types = []
    for word in words:
        if word not in lexicon:
            raise TypeParseError(f"word {word!r} not in lexicon")
        types.append(lexicon[word])
    reduction = reduce(types, target)
    return types, reduction, compile_plan(reduction, types)
