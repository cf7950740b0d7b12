import itertools
from pathlib import Path

import numpy as np
import pytest

from sentangle.semspace import SemanticSpace

TOY = Path(__file__).resolve().parents[1] / "data" / "toy"


@pytest.fixture(scope="session")
def toy_dir() -> Path:
    return TOY


@pytest.fixture()
def rng() -> np.random.Generator:
    return np.random.default_rng(20260815)


def make_space(words, dim, seed=7):
    """A small synthetic space with unit-norm random vectors."""
    generator = np.random.default_rng(seed)
    vectors = {}
    for word in words:
        v = generator.normal(size=dim)
        vectors[word] = v / np.linalg.norm(v)
    return SemanticSpace(dim, vectors, meta={"synthetic": True})


def loop_contract(plan, arrays):
    """Reference contraction: explicit nested loops over every index.

    Deliberately shares no code with the einsum execution path; used to
    cross-check plan execution on small inputs.
    """
    dims = {}
    for w, arr in enumerate(arrays):
        for a in range(arr.ndim):
            dims[(w, a)] = arr.shape[a]
    out_shape = tuple(dims[axis] for axis in plan.output_axes)
    summed = [range(dims[pair[0]]) for pair in plan.pairings]
    out = np.zeros(out_shape)
    for out_index in itertools.product(*(range(s) for s in out_shape)):
        assignment = dict(zip(plan.output_axes, out_index))
        total = 0.0
        for sum_index in itertools.product(*summed):
            for (axis_a, axis_b), value in zip(plan.pairings, sum_index):
                assignment[axis_a] = value
                assignment[axis_b] = value
            term = 1.0
            for w, arr in enumerate(arrays):
                term *= arr[tuple(assignment[(w, a)] for a in range(arr.ndim))]
            total += term
        out[out_index] = total
    return out
