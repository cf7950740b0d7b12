"""FastAPI application.

Spaces and verb stores live in in-memory registries on ``app.state``;
build them once (expensive), then compose, compare and score against
them from any client.  Domain errors map to HTTP 400, unknown registry
names to 404; request-shape problems get FastAPI's standard 422.
"""

from __future__ import annotations

from dataclasses import dataclass

from fastapi import FastAPI, HTTPException, Request
from fastapi.responses import JSONResponse

from .. import __version__, evaluation, semspace, tensors
from ..compose import ComposeError, SentenceRep
from ..evaluation import EvalError, SentencePair
from ..pregroup import NotReducibleError, PregroupError, parse_type, reduce
from ..semspace import SemanticSpace, SemSpaceError, SpaceConfig
from ..tensors import RegressionConfig, TensorError, VerbMatrix
from . import schemas


@dataclass
class RegisteredStore:
    matrices: dict[str, VerbMatrix]
    skipped: list[str]


def _corpus_from_sentences(sentences, merges):
    corpus = []
    for line in sentences:
        words = line.lower().split()
        if merges:
            words = semspace.merge_bigrams(words, merges)
        if words:
            corpus.append(words)
    return corpus


def _space_info(name: str, space: SemanticSpace) -> schemas.SpaceInfo:
    return schemas.SpaceInfo(
        name=name, dim=space.dim, vocabulary_size=len(space.vectors), meta=space.meta
    )


def _store_info(name: str, registered: RegisteredStore) -> schemas.VerbStoreInfo:
    matrices = registered.matrices
    dim = next(iter(matrices.values())).data.shape[0] if matrices else 0
    return schemas.VerbStoreInfo(
        name=name, dim=dim, verbs=sorted(matrices), skipped=registered.skipped
    )


def create_app() -> FastAPI:
    app = FastAPI(title="sentangle", version=__version__)
    app.state.spaces = {}
    app.state.verb_stores = {}

    def _domain_error(_request: Request, exc: Exception) -> JSONResponse:
        return JSONResponse(status_code=400, content={"detail": str(exc)})

    for error_class in (
        SemSpaceError, TensorError, EvalError, ComposeError, PregroupError,
        ValueError, OSError,
    ):
        app.add_exception_handler(error_class, _domain_error)

    def get_space(name: str) -> SemanticSpace:
        space = app.state.spaces.get(name)
        if space is None:
            raise HTTPException(status_code=404, detail=f"no space named {name!r}")
        return space

    def get_store(name: str) -> RegisteredStore:
        store = app.state.verb_stores.get(name)
        if store is None:
            raise HTTPException(status_code=404, detail=f"no verb store named {name!r}")
        return store

    def optional_matrices(name: str | None, rank1: bool = False):
        if name is None:
            return None
        matrices = get_store(name).matrices
        return tensors.rank1_store(matrices) if rank1 else matrices

    @app.get("/health", response_model=schemas.HealthResponse)
    def health():
        return schemas.HealthResponse(status="ok", version=__version__)

    @app.post("/spaces", response_model=schemas.SpaceInfo)
    def build_space(request: schemas.SpaceBuildRequest):
        merges = [tuple(m) for m in request.merge_phrases]
        if request.corpus_path is not None:
            corpus = semspace.load_corpus(request.corpus_path, merge_phrases=merges or None)
        else:
            corpus = _corpus_from_sentences(request.sentences, merges)
        config = SpaceConfig(
            basis_size=request.basis_size,
            skip_top=request.skip_top,
            stopwords=frozenset(w.lower() for w in request.stopwords),
            window=request.window,
            svd_rank=request.svd_rank,
            normalize=request.normalize,
        )
        space = semspace.build_space(corpus, config)
        app.state.spaces[request.name] = space
        return _space_info(request.name, space)

    @app.get("/spaces", response_model=list[schemas.SpaceInfo])
    def list_spaces():
        return [_space_info(name, app.state.spaces[name]) for name in sorted(app.state.spaces)]

    @app.get("/spaces/{name}", response_model=schemas.SpaceInfo)
    def space_info(name: str):
        return _space_info(name, get_space(name))

    @app.get("/spaces/{name}/vectors/{word}", response_model=schemas.VectorResponse)
    def word_vector(name: str, word: str):
        space = get_space(name)
        word = word.lower()
        return schemas.VectorResponse(
            space=name,
            word=word,
            in_vocabulary=word in space,
            vector=[float(x) for x in space.vector(word)],
        )

    @app.post("/verb-stores", response_model=schemas.VerbStoreInfo)
    def build_verb_store(request: schemas.VerbStoreBuildRequest):
        if request.method not in ("relational", "separable", "regression"):
            raise HTTPException(
                status_code=400, detail=f"unknown method {request.method!r}"
            )
        space = get_space(request.space)
        pairs: dict[str, list[tuple[str, str]]] = {}
        for verb, subject, obj in request.pairs:
            pairs.setdefault(verb.lower(), []).append((subject.lower(), obj.lower()))
        if request.method == "regression":
            if request.holistic_space is None:
                raise HTTPException(
                    status_code=400, detail="regression requires `holistic_space`"
                )
            holistic = get_space(request.holistic_space)
            if holistic.dim != space.dim:
                raise HTTPException(
                    status_code=400,
                    detail="holistic space dimension differs from the base space",
                )
            lookup = SemanticSpace(
                space.dim, {**space.vectors, **holistic.vectors}, meta=space.meta
            )
            regression_config = RegressionConfig(
                learning_rate=request.learning_rate,
                max_epochs=request.max_epochs,
                tolerance=request.tolerance,
                init=request.init,
                seed=request.seed,
            )

        matrices: dict[str, VerbMatrix] = {}
        skipped: list[str] = []
        for verb in sorted(pairs):
            if request.method == "regression":
                objects = [obj for _, obj in pairs[verb]]
                examples = tensors.build_regression_examples(lookup, verb, objects)
                if not examples:
                    skipped.append(verb)
                    continue
                matrices[verb] = tensors.train_regression(verb, examples, regression_config)
            else:
                resolved = tensors.resolve_pairs(space, verb, pairs[verb])
                if not resolved.resolved:
                    skipped.append(verb)
                    continue
                builder = (
                    tensors.build_relational
                    if request.method == "relational"
                    else tensors.build_separable
                )
                matrices[verb] = builder(resolved)
        if not matrices:
            raise HTTPException(status_code=400, detail="no verb matrices could be built")
        registered = RegisteredStore(matrices=matrices, skipped=skipped)
        app.state.verb_stores[request.name] = registered
        return _store_info(request.name, registered)

    @app.get("/verb-stores", response_model=list[schemas.VerbStoreInfo])
    def list_verb_stores():
        return [
            _store_info(name, app.state.verb_stores[name])
            for name in sorted(app.state.verb_stores)
        ]

    @app.get("/verb-stores/{name}/entanglement", response_model=schemas.EntanglementResponse)
    def store_entanglement(name: str):
        report = evaluation.entanglement_report(get_store(name).matrices)
        return schemas.EntanglementResponse(
            store=name,
            scores=report.scores,
            mean=report.mean,
            bin_edges=report.bin_edges,
            bin_counts=report.bin_counts,
        )

    @app.post("/compose", response_model=schemas.ComposeResponse)
    def compose_endpoint(request: schemas.ComposeRequest):
        space = get_space(request.space)
        matrices = optional_matrices(request.verbs)
        rep: SentenceRep = evaluation.compose_sentence(
            tuple(w.lower() for w in request.sentence), request.model, space, matrices
        )
        return schemas.ComposeResponse(
            model=rep.model,
            shape=list(rep.data.shape),
            is_matrix=rep.is_matrix,
            data=rep.data.tolist(),
        )

    @app.post("/similarity", response_model=schemas.SimilarityResponse)
    def similarity(request: schemas.SimilarityRequest):
        space = get_space(request.space)
        matrices = optional_matrices(request.verbs)
        left = evaluation.compose_sentence(
            tuple(w.lower() for w in request.left), request.model, space, matrices
        )
        right = evaluation.compose_sentence(
            tuple(w.lower() for w in request.right), request.model, space, matrices
        )
        return schemas.SimilarityResponse(
            model=request.model,
            cosine=evaluation.cosine_sim(left, right),
            euclidean=evaluation.euclidean_dist(left, right),
        )

    @app.post("/tasks", response_model=schemas.TaskResponse)
    def run_task_endpoint(request: schemas.TaskRequest):
        space = get_space(request.space)
        matrices = optional_matrices(request.verbs, rank1=request.rank1)
        dataset = [
            SentencePair(
                tuple(w.lower() for w in pair.left),
                tuple(w.lower() for w in pair.right),
                pair.score,
            )
            for pair in request.pairs
        ]
        results = []
        for model in request.models:
            result = evaluation.run_task(dataset, model, space, matrices)
            results.append(
                schemas.TaskResultModel(
                    model=result.model,
                    rho_cosine=result.rho_cosine,
                    rho_euclidean=result.rho_euclidean,
                    n_pairs_used=result.n_pairs_used,
                    excluded=result.excluded,
                )
            )
        return schemas.TaskResponse(results=results)

    @app.post("/pregroup/reduce", response_model=schemas.ReduceResponse)
    def reduce_types(request: schemas.ReduceRequest):
        types = [parse_type(t) for t in request.types]
        target = parse_type(request.target)
        try:
            reduction = reduce(types, target)
        except NotReducibleError as exc:
            return schemas.ReduceResponse(
                reducible=False, steps=[], residue=[], detail=str(exc)
            )
        return schemas.ReduceResponse(
            reducible=True,
            steps=[list(step) for step in reduction.steps],
            residue=list(reduction.residue),
        )

    return app


app = create_app()
