import numpy as np
import pytest

from conftest import make_space
from sentangle.tensors import (
    ArgumentPairs,
    DivergenceError,
    RegressionConfig,
    RegressionExample,
    TensorError,
    VerbMatrix,
    ZeroMatrixError,
    build_regression_examples,
    build_relational,
    build_separable,
    entanglement_score,
    least_squares_oracle,
    load_argument_pairs,
    load_verb_store,
    matrix_cosine,
    rank1_approx,
    rank1_store,
    regression_gradient,
    regression_loss,
    resolve_pairs,
    save_verb_store,
    train_regression,
)

E1 = np.array([1.0, 0.0])
E2 = np.array([0.0, 1.0])


def pairs_of(verb, resolved):
    return ArgumentPairs(verb=verb, pairs=[("s", "o")] * len(resolved), resolved=resolved)


class TestBuilders:
    def test_relational_hand_sum(self):
        vm = build_relational(pairs_of("swap", [(E1, E2), (E2, E1)]))
        np.testing.assert_array_equal(vm.data, np.array([[0.0, 1.0], [1.0, 0.0]]))
        assert vm.method == "relational"

    def test_relational_equals_outer_sum(self, rng):
        resolved = [(rng.normal(size=6), rng.normal(size=6)) for _ in range(5)]
        vm = build_relational(pairs_of("v", resolved))
        expected = sum(np.outer(s, o) for s, o in resolved)
        np.testing.assert_allclose(vm.data, expected, rtol=1e-12)

    def test_separable_is_outer_of_sums(self, rng):
        resolved = [(rng.normal(size=6), rng.normal(size=6)) for _ in range(5)]
        vm = build_separable(pairs_of("v", resolved))
        subj_sum = sum(s for s, _ in resolved)
        obj_sum = sum(o for _, o in resolved)
        np.testing.assert_allclose(vm.data, np.outer(subj_sum, obj_sum), rtol=1e-12)
        assert np.linalg.matrix_rank(vm.data) == 1

    def test_no_resolvable_pairs(self):
        with pytest.raises(TensorError):
            build_relational(pairs_of("v", []))


class TestResolvePairs:
    def test_oov_pairs_dropped(self):
        space = make_space(["dog", "bone"], dim=4)
        resolved = resolve_pairs(space, "eat", [("dog", "bone"), ("dog", "zebra")])
        assert len(resolved.resolved) == 1
        assert len(resolved.pairs) == 2


class TestRank1:
    def test_hand_example(self):
        approx = rank1_approx(np.array([[2.0, 0.0], [0.0, 1.0]]))
        np.testing.assert_allclose(approx, [[2.0, 0.0], [0.0, 0.0]], atol=1e-12)

    def test_separable_fixed_point(self, rng):
        m = np.outer(rng.normal(size=5), rng.normal(size=5))
        np.testing.assert_allclose(rank1_approx(m), m, atol=1e-12)

    def test_verb_matrix_dispatch(self):
        vm = VerbMatrix("v", np.array([[2.0, 0.0], [0.0, 1.0]]), "relational")
        approx = rank1_approx(vm)
        assert isinstance(approx, VerbMatrix)
        assert approx.verb == "v"
        assert approx.method == "rank1_of(relational)"

    def test_rank1_store_maps_all(self):
        store = {
            "a": VerbMatrix("a", np.eye(2), "relational"),
            "b": VerbMatrix("b", np.outer(E1, E2), "relational"),
        }
        approx = rank1_store(store)
        assert set(approx) == {"a", "b"}
        assert all(np.linalg.matrix_rank(vm.data) <= 1 for vm in approx.values())


class TestMatrixCosine:
    def test_hand_value(self):
        a = np.array([[2.0, 0.0], [0.0, 1.0]])
        np.testing.assert_allclose(
            matrix_cosine(a, rank1_approx(a)), 2.0 / np.sqrt(5.0), rtol=1e-12
        )

    def test_self_similarity(self, rng):
        m = rng.normal(size=(4, 4))
        np.testing.assert_allclose(matrix_cosine(m, m), 1.0, rtol=1e-12)

    def test_zero_matrix_rejected(self):
        with pytest.raises(ZeroMatrixError):
            matrix_cosine(np.zeros((2, 2)), np.eye(2))


class TestEntanglementScore:
    def test_identity_matrix(self):
        np.testing.assert_allclose(
            entanglement_score(np.eye(2)), 1.0 / np.sqrt(2.0), atol=1e-12
        )

    def test_planted_swap_matrix(self):
        vm = build_relational(pairs_of("swap", [(E1, E2), (E2, E1)]))
        np.testing.assert_allclose(
            entanglement_score(vm), 1.0 / np.sqrt(2.0), atol=1e-12
        )

    def test_separable_scores_one(self, rng):
        vm = build_separable(
            pairs_of("v", [(rng.normal(size=7), rng.normal(size=7)) for _ in range(4)])
        )
        np.testing.assert_allclose(entanglement_score(vm), 1.0, atol=1e-10)

    def test_score_equals_sigma_ratio(self, rng):
        # For any matrix the score is sigma_1 / ||sigma||_2.
        m = rng.normal(size=(5, 5))
        s = np.linalg.svd(m, compute_uv=False)
        np.testing.assert_allclose(
            entanglement_score(m), s[0] / np.linalg.norm(s), rtol=1e-12
        )


def planted_problem(rng, d=4, m=40, noise=0.0):
    target = rng.normal(size=(d, d))
    xs = rng.normal(size=(m, d))
    ys = xs @ target.T + noise * rng.normal(size=(m, d))
    examples = [RegressionExample(x, y) for x, y in zip(xs, ys)]
    return target, examples


class TestRegression:
    def test_loss_by_hand(self):
        examples = [RegressionExample(E1, E2)]
        # V x = (0, 0); residual (0, -1); loss = 1/(2*1) * 1
        assert regression_loss(np.zeros((2, 2)), examples) == 0.5

    def test_gradient_by_hand(self):
        examples = [RegressionExample(E1, E2)]
        grad = regression_gradient(np.zeros((2, 2)), examples)
        # (Vx - y) x^T = (0,-1)^T (1,0) = [[0,0],[-1,0]]
        np.testing.assert_array_equal(grad, np.array([[0.0, 0.0], [-1.0, 0.0]]))

    def test_recovers_planted_matrix(self, rng):
        target, examples = planted_problem(rng)
        vm = train_regression("v", examples)
        rel = np.linalg.norm(vm.data - target) / np.linalg.norm(target)
        assert rel <= 1e-3
        assert vm.method == "regression"

    def test_matches_least_squares_on_noisy_data(self, rng):
        _, examples = planted_problem(rng, noise=0.1)
        vm = train_regression("v", examples)
        oracle = least_squares_oracle(examples)
        assert abs(regression_loss(vm.data, examples) - regression_loss(oracle, examples)) < 1e-9

    def test_custom_learning_rate_diverges_loudly(self, rng):
        _, examples = planted_problem(rng)
        config = RegressionConfig(learning_rate=100.0, max_epochs=200)
        with pytest.raises(DivergenceError):
            train_regression("v", examples, config)

    def test_gaussian_init_is_seeded(self, rng):
        _, examples = planted_problem(rng)
        config = RegressionConfig(init="scaled_gaussian", seed=3, max_epochs=1,
                                  tolerance=0.0)
        a = train_regression("v", examples, config)
        b = train_regression("v", examples, config)
        np.testing.assert_array_equal(a.data, b.data)

    def test_config_validation(self):
        with pytest.raises(ValueError):
            RegressionConfig(learning_rate=-1.0)
        with pytest.raises(ValueError):
            RegressionConfig(init="magic")
        with pytest.raises(ValueError):
            RegressionConfig(tolerance=-1e-3)

    def test_least_squares_oracle_matches_lstsq(self, rng):
        _, examples = planted_problem(rng, noise=0.2)
        xs = np.array([e.input for e in examples])
        ys = np.array([e.target for e in examples])
        direct = np.linalg.lstsq(xs, ys, rcond=None)[0].T
        np.testing.assert_allclose(least_squares_oracle(examples), direct, atol=1e-10)


class TestRegressionExamplesFromSpace:
    def test_pairs_object_with_phrase_vector(self):
        space = make_space(["flute", "play_flute", "chess", "play_chess"], dim=5)
        examples = build_regression_examples(space, "play", ["flute", "chess"])
        assert len(examples) == 2
        np.testing.assert_array_equal(examples[0].input, space.vector("flute"))
        np.testing.assert_array_equal(examples[0].target, space.vector("play_flute"))

    def test_missing_phrase_dropped(self):
        space = make_space(["flute", "play_flute", "chess"], dim=5)
        examples = build_regression_examples(space, "play", ["flute", "chess"])
        assert len(examples) == 1


class TestStoreIO:
    def test_roundtrip(self, tmp_path, rng):
        store = {
            "play": VerbMatrix("play", rng.normal(size=(4, 4)), "relational"),
            "eat": VerbMatrix("eat", rng.normal(size=(4, 4)), "separable"),
        }
        save_verb_store(tmp_path / "verbs", store)
        loaded = load_verb_store(tmp_path / "verbs")
        assert set(loaded) == {"play", "eat"}
        for verb in store:
            assert np.array_equal(loaded[verb].data, store[verb].data)
            assert loaded[verb].method == store[verb].method

    def test_byte_stable(self, tmp_path, rng):
        store = {"play": VerbMatrix("play", rng.normal(size=(3, 3)), "relational")}
        save_verb_store(tmp_path / "a", store)
        save_verb_store(tmp_path / "b", store)
        assert (tmp_path / "a" / "play.tsv").read_bytes() == (
            tmp_path / "b" / "play.tsv"
        ).read_bytes()
        assert (tmp_path / "a" / "store.json").read_bytes() == (
            tmp_path / "b" / "store.json"
        ).read_bytes()

    def test_unusual_verb_names_survive(self, tmp_path):
        store = {"pick/up": VerbMatrix("pick/up", np.eye(2), "relational")}
        save_verb_store(tmp_path / "verbs", store)
        loaded = load_verb_store(tmp_path / "verbs")
        assert "pick/up" in loaded

    def test_missing_manifest(self, tmp_path):
        with pytest.raises(TensorError):
            load_verb_store(tmp_path)


class TestLoadArgumentPairs:
    def test_parse(self, toy_dir):
        pairs = load_argument_pairs(toy_dir / "pairs.tsv")
        assert ("kids", "games") in pairs["play"]
        assert all(len(p) == 2 for ps in pairs.values() for p in ps)

    def test_repeats_preserved(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("play\tkids\tgames\nplay\tkids\tgames\n")
        pairs = load_argument_pairs(path)
        assert pairs["play"] == [("kids", "games"), ("kids", "games")]

    def test_wrong_columns(self, tmp_path):
        path = tmp_path / "pairs.tsv"
        path.write_text("play\tkids\n")
        with pytest.raises(TensorError):
            load_argument_pairs(path)
