"""sentangle: tensor-based sentence composition over distributional spaces.

The package builds word vector spaces from plain-text corpora, builds
per-verb matrices from subject/object co-occurrences (or trains them by
regression against holistic phrase vectors), composes sentences under a
family of models, measures how far each verb matrix is from separable,
and scores every model against human similarity judgments.
"""

__version__ = "0.1.0"

from .compose import (
    MODEL_NAMES,
    ComposeError,
    SentenceRep,
    compose_baseline,
    compose_copy_object,
    compose_copy_subject,
    compose_frobenius,
    compose_relational,
    compose_verb_object,
    execute_plan,
    frob_copy,
    frob_delete,
    frob_mul,
    frob_unit,
)
from .evaluation import (
    EntanglementReport,
    SentencePair,
    TaskResult,
    compose_sentence,
    cosine_sim,
    entanglement_report,
    euclidean_dist,
    load_dataset,
    run_task,
    spearman_rho,
)
from .pregroup import (
    ContractionPlan,
    NotReducibleError,
    Reduction,
    Simple,
    Type,
    compile_plan,
    load_lexicon,
    parse_type,
    reduce,
    sentence_plan,
)
from .semspace import (
    SemanticSpace,
    SpaceConfig,
    build_space,
    load_corpus,
    load_space,
    save_space,
)
from .tensors import (
    ArgumentPairs,
    RegressionConfig,
    RegressionExample,
    VerbMatrix,
    build_regression_examples,
    build_relational,
    build_separable,
    entanglement_score,
    least_squares_oracle,
    load_verb_store,
    matrix_cosine,
    rank1_approx,
    rank1_store,
    regression_gradient,
    regression_loss,
    save_verb_store,
    train_regression,
)

__all__ = [
    "__version__",
    # pregroup
    "Simple", "Type", "Reduction", "ContractionPlan", "NotReducibleError",
    "parse_type", "reduce", "compile_plan", "load_lexicon", "sentence_plan",
    # semantic spaces
    "SpaceConfig", "SemanticSpace", "build_space", "load_corpus",
    "save_space", "load_space",
    # verb tensors
    "VerbMatrix", "ArgumentPairs", "RegressionExample", "RegressionConfig",
    "build_relational", "build_separable", "rank1_approx", "rank1_store",
    "matrix_cosine", "entanglement_score", "train_regression",
    "regression_loss", "regression_gradient",
    "least_squares_oracle", "build_regression_examples",
    "save_verb_store", "load_verb_store",
    # composition
    "MODEL_NAMES", "SentenceRep", "ComposeError",
    "frob_copy", "frob_mul", "frob_delete", "frob_unit",
    "compose_relational", "compose_copy_subject", "compose_copy_object",
    "compose_frobenius", "compose_baseline", "compose_verb_object",
    "execute_plan",
    # evaluation
    "SentencePair", "TaskResult", "EntanglementReport",
    "cosine_sim", "euclidean_dist", "spearman_rho", "compose_sentence",
    "load_dataset", "run_task", "entanglement_report",
]
