import numpy as np
import pytest

from conftest import make_space
from sentangle.compose import SentenceRep, compose_relational
from sentangle.evaluation import (
    ConstantInputError,
    EmptyStoreError,
    EvalError,
    MissingVerbError,
    SentencePair,
    ShapeMismatchError,
    ZeroRepresentationError,
    compose_sentence,
    cosine_sim,
    entanglement_report,
    euclidean_dist,
    load_dataset,
    run_task,
    score_pairs,
    spearman_rho,
)
from sentangle.tensors import VerbMatrix, build_relational, build_separable
from sentangle.tensors import ArgumentPairs


class TestDistances:
    def test_cosine_self(self, rng):
        v = SentenceRep(rng.normal(size=5), "additive")
        np.testing.assert_allclose(cosine_sim(v, v), 1.0, rtol=1e-12)

    def test_cosine_orthogonal(self):
        a = SentenceRep(np.array([1.0, 0.0]), "additive")
        b = SentenceRep(np.array([0.0, 1.0]), "additive")
        assert cosine_sim(a, b) == 0.0

    def test_euclidean_three_four_five(self):
        a = SentenceRep(np.array([1.0, 2.0]), "additive")
        b = SentenceRep(np.array([4.0, 6.0]), "additive")
        assert euclidean_dist(a, b) == 5.0

    def test_matrices_compare_flattened(self, rng):
        m = rng.normal(size=(3, 3))
        a = SentenceRep(m, "relational")
        b = SentenceRep(2.0 * m, "relational")
        np.testing.assert_allclose(cosine_sim(a, b), 1.0, rtol=1e-12)
        np.testing.assert_allclose(
            euclidean_dist(a, b), np.linalg.norm(m.ravel()), rtol=1e-12
        )

    def test_shape_mismatch(self):
        vec = SentenceRep(np.ones(4), "additive")
        mat = SentenceRep(np.ones((2, 2)), "relational")
        with pytest.raises(ShapeMismatchError):
            cosine_sim(vec, mat)
        with pytest.raises(ShapeMismatchError):
            euclidean_dist(vec, mat)

    def test_zero_vector_cosine(self):
        zero = SentenceRep(np.zeros(3), "additive")
        one = SentenceRep(np.ones(3), "additive")
        with pytest.raises(ZeroRepresentationError):
            cosine_sim(zero, one)
        # euclidean distance is still fine
        assert euclidean_dist(zero, one) == pytest.approx(np.sqrt(3.0))


class TestSpearman:
    def test_monotone(self):
        assert spearman_rho([1, 2, 3], [10, 20, 30]) == 1.0

    def test_reversal(self):
        assert spearman_rho([1, 2, 3], [3, 2, 1]) == -1.0

    def test_tied_case_by_hand(self):
        # ranks of [1,2,2,4] are [1, 2.5, 2.5, 4]; of [1,3,2,4] are
        # [1,3,2,4]; their Pearson correlation is 4.5/sqrt(4.5*5).
        rho = spearman_rho([1, 2, 2, 4], [1, 3, 2, 4])
        np.testing.assert_allclose(rho, 4.5 / np.sqrt(22.5), rtol=1e-12)

    def test_monotone_transform_invariance(self, rng):
        x = rng.normal(size=40)
        y = rng.normal(size=40)
        base = spearman_rho(x, y)
        np.testing.assert_allclose(spearman_rho(np.exp(x), y), base, rtol=1e-12)
        np.testing.assert_allclose(spearman_rho(x, 3.0 * y + 7.0), base, rtol=1e-12)

    def test_self_correlation_with_ties(self, rng):
        x = rng.integers(0, 5, size=30).astype(float)
        assert spearman_rho(x, x) == 1.0

    def test_constant_input(self):
        with pytest.raises(ConstantInputError):
            spearman_rho([1.0, 1.0, 1.0], [1.0, 2.0, 3.0])

    def test_bad_lengths(self):
        with pytest.raises(EvalError):
            spearman_rho([1.0], [1.0])
        with pytest.raises(EvalError):
            spearman_rho([1.0, 2.0], [1.0, 2.0, 3.0])


class TestLoadDataset:
    def test_seven_columns(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("Kids\tplay\tgames\tchildren\tplay\tchess\t5.5\n")
        pairs = load_dataset(path)
        assert pairs[0].left == ("kids", "play", "games")
        assert pairs[0].right == ("children", "play", "chess")
        assert pairs[0].human_score == 5.5

    def test_five_columns(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("play\tgames\tread\tbooks\t2.0\n")
        pairs = load_dataset(path)
        assert pairs[0].left == ("play", "games")
        assert pairs[0].right == ("read", "books")

    def test_annotator_scores_averaged(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text(
            "a\tb\tc\td\te\tf\t2.0\n"
            "a\tb\tc\td\te\tf\t4.0\n"
            "g\tb\tc\td\te\tf\t1.0\n"
        )
        pairs = load_dataset(path)
        assert len(pairs) == 2
        assert pairs[0].human_score == 3.0

    def test_comments_and_blanks_skipped(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("# header\n\na\tb\tc\td\te\tf\t2.0\n")
        assert len(load_dataset(path)) == 1

    def test_wrong_column_count(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("a\tb\tc\t1.0\n")
        with pytest.raises(EvalError, match="columns"):
            load_dataset(path)

    def test_bad_score(self, tmp_path):
        path = tmp_path / "d.tsv"
        path.write_text("a\tb\tc\td\te\tf\thigh\n")
        with pytest.raises(EvalError, match="score"):
            load_dataset(path)

    def test_toy_datasets_load(self, toy_dir):
        assert len(load_dataset(toy_dir / "dataset.tsv")) == 12
        assert len(load_dataset(toy_dir / "vo_dataset.tsv")) == 8


WORDS = ["kids", "play", "games", "children", "chess", "read", "books"]


@pytest.fixture()
def space():
    return make_space(WORDS, dim=6)


@pytest.fixture()
def store(space):
    verbs = {}
    for verb, args in {
        "play": [("kids", "games"), ("children", "chess")],
        "read": [("kids", "books"), ("children", "books")],
    }.items():
        resolved = [(space.vector(s), space.vector(o)) for s, o in args]
        verbs[verb] = build_relational(
            ArgumentPairs(verb=verb, pairs=args, resolved=resolved)
        )
    return verbs


class TestComposeSentence:
    def test_relational_matches_direct_call(self, space, store):
        rep = compose_sentence(("kids", "play", "games"), "relational", space, store)
        direct = compose_relational(
            space.vector("kids"), store["play"], space.vector("games")
        )
        np.testing.assert_array_equal(rep.data, direct.data)

    def test_two_word_sentences_use_verb_object(self, space, store):
        rep = compose_sentence(("play", "games"), "relational", space, store)
        np.testing.assert_allclose(
            rep.data, store["play"].data @ space.vector("games"), rtol=1e-12
        )

    def test_baselines_need_no_store(self, space):
        rep = compose_sentence(("kids", "play", "games"), "additive", space)
        expected = (
            space.vector("kids") + space.vector("play") + space.vector("games")
        )
        np.testing.assert_allclose(rep.data, expected, rtol=1e-12)

    def test_verbs_only_picks_the_verb(self, space):
        rep = compose_sentence(("kids", "play", "games"), "verbs_only", space)
        np.testing.assert_array_equal(rep.data, space.vector("play"))
        rep2 = compose_sentence(("play", "games"), "verbs_only", space)
        np.testing.assert_array_equal(rep2.data, space.vector("play"))

    def test_copy_models_need_three_words(self, space, store):
        with pytest.raises(EvalError, match="transitive"):
            compose_sentence(("play", "games"), "copy_subject", space, store)

    def test_missing_verb_matrix(self, space, store):
        with pytest.raises(MissingVerbError):
            compose_sentence(("kids", "eat", "games"), "relational", space, store)

    def test_unknown_model(self, space):
        with pytest.raises(EvalError, match="unknown model"):
            compose_sentence(("kids", "play", "games"), "square", space)

    def test_bad_sentence_length(self, space):
        with pytest.raises(EvalError, match="2 or 3 words"):
            compose_sentence(("kids",), "additive", space)


def angular_verb_space(n=6):
    """Verb vectors at increasing angles: cosine to v0 strictly decreases."""
    vectors = {}
    for i in range(n):
        theta = i * np.pi / (2 * n)
        vectors[f"v{i}"] = np.array([np.cos(theta), np.sin(theta)])
    vectors["x"] = np.array([1.0, 1.0])
    vectors["y"] = np.array([1.0, -1.0])
    from sentangle.semspace import SemanticSpace

    return SemanticSpace(2, vectors)


class TestRunTask:
    def test_monotone_dataset_gives_rho_one(self):
        space = angular_verb_space()
        dataset = [
            SentencePair(("x", "v0", "y"), ("x", f"v{i}", "y"), float(10 - i))
            for i in range(1, 6)
        ]
        result = run_task(dataset, "verbs_only", space)
        assert result.rho_cosine == 1.0
        assert result.n_pairs_used == 5
        assert result.excluded == 0

    def test_euclidean_sign_convention(self):
        # distances grow while human scores shrink: agreement, rho = 1
        space = angular_verb_space()
        dataset = [
            SentencePair(("x", "v0", "y"), ("x", f"v{i}", "y"), float(10 - i))
            for i in range(1, 6)
        ]
        result = run_task(dataset, "verbs_only", space)
        assert result.rho_euclidean == 1.0

    def test_deterministic(self, space, store, toy_dir):
        dataset = load_dataset(toy_dir / "dataset.tsv")
        vocab = {w for p in dataset for w in p.left + p.right}
        big_space = make_space(sorted(vocab), dim=6)
        big_store = {}
        for pair in dataset:
            for _, verb, _ in (pair.left, pair.right):
                if verb not in big_store:
                    big_store[verb] = VerbMatrix(
                        verb, np.eye(6) + 0.1 * np.outer(big_space.vector(verb),
                                                         big_space.vector(verb)),
                        "relational",
                    )
        a = run_task(dataset, "relational", big_space, big_store)
        b = run_task(dataset, "relational", big_space, big_store)
        assert a == b

    def test_shape_mismatch_pairs_counted_excluded(self, space, store):
        dataset = [
            SentencePair(("kids", "play", "games"), ("children", "play", "chess"), 3.0),
            SentencePair(("kids", "play", "games"), ("play", "games"), 2.0),
            SentencePair(("kids", "read", "books"), ("children", "read", "books"), 5.0),
        ]
        result = run_task(dataset, "relational", space, store)
        assert result.excluded == 1
        assert result.n_pairs_used == 2

    def test_zero_representation_excluded(self, space, store):
        # "void" is out of vocabulary: multiplicative product is zero
        dataset = [
            SentencePair(("kids", "play", "games"), ("void", "play", "games"), 1.0),
            SentencePair(("kids", "play", "games"), ("children", "play", "chess"), 2.0),
            SentencePair(("kids", "read", "books"), ("children", "read", "books"), 3.0),
        ]
        kept, excluded = score_pairs(dataset, "multiplicative", space)
        assert excluded == 1
        assert len(kept) == 2

    def test_too_few_usable_pairs(self, space, store):
        dataset = [
            SentencePair(("kids", "play", "games"), ("children", "play", "chess"), 3.0)
        ]
        with pytest.raises(EvalError, match="usable pairs"):
            run_task(dataset, "relational", space, store)

    def test_missing_verb_fails_unless_baseline(self, space, store):
        dataset = [
            SentencePair(("kids", "eat", "games"), ("children", "eat", "chess"), 3.0),
            SentencePair(("kids", "eat", "books"), ("children", "eat", "chess"), 2.0),
        ]
        with pytest.raises(MissingVerbError):
            run_task(dataset, "relational", space, store)
        result = run_task(dataset, "additive", space)
        assert result.n_pairs_used == 2


def symmetric_spectrum_store(n=4):
    """Verb matrices with two equal singular values: score 1/sqrt(2)."""
    e1, e2 = np.array([1.0, 0.0]), np.array([0.0, 1.0])
    store = {}
    for i in range(n):
        args = ArgumentPairs(
            verb=f"v{i}", pairs=[("a", "b"), ("b", "a")],
            resolved=[(e1, e2), (e2, e1)],
        )
        store[f"v{i}"] = build_relational(args)
    return store


class TestEntanglementReport:
    def test_separable_store_means_one(self, rng):
        store = {}
        for i in range(5):
            resolved = [(rng.normal(size=4), rng.normal(size=4)) for _ in range(3)]
            store[f"v{i}"] = build_separable(
                ArgumentPairs(f"v{i}", [("s", "o")] * 3, resolved)
            )
        report = entanglement_report(store)
        np.testing.assert_allclose(report.mean, 1.0, atol=1e-10)

    def test_symmetric_spectrum_store(self):
        report = entanglement_report(symmetric_spectrum_store())
        np.testing.assert_allclose(report.mean, 1.0 / np.sqrt(2.0), atol=1e-12)

    def test_histogram_covers_unit_interval(self):
        report = entanglement_report(symmetric_spectrum_store())
        assert report.bin_edges[0] == 0.0
        assert report.bin_edges[-1] == 1.0
        assert len(report.bin_counts) == 10
        assert sum(report.bin_counts) == len(report.scores)

    def test_empty_store(self):
        with pytest.raises(EmptyStoreError):
            entanglement_report({})

    def test_scores_sorted_by_verb(self):
        report = entanglement_report(symmetric_spectrum_store())
        assert list(report.scores) == sorted(report.scores)
