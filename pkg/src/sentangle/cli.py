"""Command-line pipeline driver.

Subcommands:

* ``build-space``  — corpus file -> semantic space (TSV + metadata sidecar)
* ``build-verbs``  — argument pairs + space -> verb-matrix store
* ``analyze``      — verb store -> per-verb entanglement report
* ``run-task``     — dataset + space + store -> model/metric correlation table
* ``serve``        — run the HTTP service on a host/port

Option precedence is flags > config file > built-in defaults.  The config
file is JSON keyed by subcommand (plus an optional ``global`` section for
``seed``/``output``/``format``).  Every run echoes its effective
configuration to ``<output>/<subcommand>.config.json`` next to the
artifacts it writes.

Exit codes: 0 success, 1 usage or configuration error, 2 data error.
"""

from __future__ import annotations

import argparse
import csv
import json
import logging
import sys
import time
from pathlib import Path

from . import evaluation, semspace, tensors
from .compose import MODEL_NAMES
from .pregroup import PregroupError
from .semspace import SemSpaceError, SemanticSpace, SpaceConfig
from .tensors import RegressionConfig, TensorError

logger = logging.getLogger(__name__)

METRICS = ("cosine", "euclidean")


class UsageError(Exception):
    """Bad flags or configuration (exit code 1)."""


GLOBAL_DEFAULTS = {"seed": 0, "output": ".", "format": "table"}

DEFAULTS: dict[str, dict] = {
    "build-space": {
        "basis_size": 2000,
        "skip_top": 50,
        "window": 5,
        "svd_rank": 300,
        "normalize": True,
        "stopwords": None,
        "merge_phrases": None,
    },
    "build-verbs": {
        "space": None,
        "method": "relational",
        "holistic": None,
        "learning_rate": None,
        "max_epochs": 5000,
        "tolerance": 1e-8,
        "init": "zeros",
    },
    "analyze": {},
    "run-task": {
        "space": None,
        "verbs": None,
        "models": "relational",
        "metrics": "cosine,euclidean",
        "rank1": False,
        "per_pair": False,
    },
    "serve": {"host": "127.0.0.1", "port": 8000},
}


def build_parser() -> argparse.ArgumentParser:
    # argument_default=SUPPRESS keeps unset flags out of the namespace so
    # they cannot shadow config-file values during the merge.
    common = argparse.ArgumentParser(add_help=False, argument_default=argparse.SUPPRESS)
    common.add_argument("--config", metavar="PATH", help="JSON config file")
    common.add_argument("--seed", type=int, help="seed for randomized initialization")
    common.add_argument("--output", metavar="DIR", help="directory for output artifacts")
    common.add_argument("--format", choices=["csv", "json", "table"], help="report format")

    parser = argparse.ArgumentParser(
        prog="sentangle",
        description="Build semantic spaces and verb matrices, analyze "
        "their separability, and score composition models on "
        "similarity datasets.",
    )
    sub = parser.add_subparsers(dest="command", metavar="SUBCOMMAND")

    def add_command(name: str, help_text: str) -> argparse.ArgumentParser:
        return sub.add_parser(
            name, parents=[common], help=help_text,
            argument_default=argparse.SUPPRESS,
        )

    p = add_command("build-space", "build a semantic space from a corpus")
    p.add_argument("corpus", help="one-sentence-per-line text file")
    p.add_argument("--basis-size", type=int, help="number of basis context words")
    p.add_argument("--skip-top", type=int, help="most-frequent words to skip for the basis")
    p.add_argument("--window", type=int, help="co-occurrence window (each side)")
    p.add_argument("--svd-rank", type=int, help="rank of the projected space")
    p.add_argument("--no-normalize", dest="normalize", action="store_false",
                   help="skip row normalization before the projection")
    p.add_argument("--stopwords", metavar="PATH", help="one stopword per line")
    p.add_argument("--merge-phrases", metavar="PATH",
                   help="two-word phrases (one per line) to merge into single tokens")

    p = add_command("build-verbs", "build verb matrices from argument pairs")
    p.add_argument("pairs", help="TSV file of verb<TAB>subject<TAB>object lines")
    p.add_argument("--space", metavar="PATH", help="space file from build-space")
    p.add_argument("--method", choices=["relational", "separable", "regression"],
                   help="matrix construction method")
    p.add_argument("--holistic", metavar="PATH",
                   help="space file with holistic verb_object phrase vectors "
                        "(required for --method regression)")
    p.add_argument("--learning-rate", type=float, help="gradient step (default: auto-scaled)")
    p.add_argument("--max-epochs", type=int, help="gradient descent epoch cap")
    p.add_argument("--tolerance", type=float, help="gradient-norm stopping threshold")
    p.add_argument("--init", choices=["zeros", "scaled_gaussian"], help="matrix initialization")

    p = add_command("analyze", "entanglement report for a verb store")
    p.add_argument("verbs", help="verb store directory from build-verbs")

    p = add_command("run-task", "score models on a similarity dataset")
    p.add_argument("dataset", help="TSV similarity dataset")
    p.add_argument("--space", metavar="PATH", help="space file from build-space")
    p.add_argument("--verbs", metavar="PATH", help="verb store directory")
    p.add_argument("--models", help="comma-separated model ids")
    p.add_argument("--metrics", help="comma-separated metrics (cosine,euclidean)")
    p.add_argument("--rank1", action="store_true",
                   help="replace every verb matrix by its rank-1 approximation")
    p.add_argument("--per-pair", dest="per_pair", action="store_true",
                   help="include per-pair scores in JSON output")

    p = add_command("serve", "run the HTTP service")
    p.add_argument("--host", help="bind address")
    p.add_argument("--port", type=int, help="bind port")

    return parser


def _load_config_file(path: str) -> dict:
    try:
        raw = json.loads(Path(path).read_text(encoding="utf-8"))
    except OSError as exc:
        raise UsageError(f"cannot read config file {path}: {exc}") from exc
    except json.JSONDecodeError as exc:
        raise UsageError(f"config file {path} is not valid JSON: {exc}") from exc
    if not isinstance(raw, dict):
        raise UsageError(f"config file {path} must contain a JSON object")
    return raw


def effective_options(command: str, cli_flags: dict, config_path: str | None) -> dict:
    """Merge defaults, the config file section, and explicit flags."""
    options = {**GLOBAL_DEFAULTS, **DEFAULTS[command]}
    if config_path:
        raw = _load_config_file(config_path)
        for section_name in ("global", command):
            section = raw.get(section_name, {})
            if not isinstance(section, dict):
                raise UsageError(f"config section {section_name!r} must be an object")
            for key, value in section.items():
                key = key.replace("-", "_")
                if key not in options:
                    raise UsageError(
                        f"unknown config key {key!r} in section {section_name!r}"
                    )
                options[key] = value
    options.update(cli_flags)
    if options["format"] not in ("csv", "json", "table"):
        raise UsageError(f"unknown format {options['format']!r}")
    return options


def _prepare_output(options: dict, command: str) -> Path:
    out = Path(options["output"])
    out.mkdir(parents=True, exist_ok=True)
    echo = {k: v for k, v in sorted(options.items())}
    (out / f"{command}.config.json").write_text(
        json.dumps(echo, sort_keys=True, indent=2, default=str) + "\n",
        encoding="utf-8",
    )
    return out


def cmd_build_space(options: dict) -> int:
    started = time.perf_counter()
    stopwords = (
        semspace.load_stopwords(options["stopwords"]) if options["stopwords"] else frozenset()
    )
    merges = (
        semspace.load_phrase_list(options["merge_phrases"])
        if options["merge_phrases"]
        else None
    )
    corpus = semspace.load_corpus(options["corpus"], merge_phrases=merges)
    config = SpaceConfig(
        basis_size=int(options["basis_size"]),
        skip_top=int(options["skip_top"]),
        stopwords=stopwords,
        window=int(options["window"]),
        svd_rank=int(options["svd_rank"]),
        normalize=bool(options["normalize"]),
    )
    space = semspace.build_space(corpus, config)
    out = _prepare_output(options, "build-space")
    path = out / "space.tsv"
    semspace.save_space(space, path)
    elapsed = time.perf_counter() - started
    print(f"vocabulary: {len(space.vectors)} words")
    print(f"dimension: {space.dim}")
    print(f"wrote {path} in {elapsed:.2f}s")
    return 0


def _overlay_space(base: SemanticSpace, extra: SemanticSpace) -> SemanticSpace:
    if base.dim != extra.dim:
        raise TensorError(
            f"holistic space dimension {extra.dim} != space dimension {base.dim}"
        )
    return SemanticSpace(base.dim, {**base.vectors, **extra.vectors}, meta=base.meta)


def cmd_build_verbs(options: dict) -> int:
    if not options["space"]:
        raise UsageError("build-verbs requires --space")
    method = options["method"]
    if method not in ("relational", "separable", "regression"):
        raise UsageError(f"unknown method {method!r}")
    space = semspace.load_space(options["space"])
    pairs = tensors.load_argument_pairs(options["pairs"])
    if method == "regression":
        if not options["holistic"]:
            raise UsageError("--method regression requires --holistic")
        lookup = _overlay_space(space, semspace.load_space(options["holistic"]))
        regression_config = RegressionConfig(
            learning_rate=(
                float(options["learning_rate"])
                if options["learning_rate"] is not None
                else None
            ),
            max_epochs=int(options["max_epochs"]),
            tolerance=float(options["tolerance"]),
            init=options["init"],
            seed=int(options["seed"]),
        )

    store: dict[str, tensors.VerbMatrix] = {}
    skipped: list[str] = []
    for verb in sorted(pairs):
        if method == "regression":
            objects = [obj for _, obj in pairs[verb]]
            examples = tensors.build_regression_examples(lookup, verb, objects)
            if not examples:
                skipped.append(verb)
                continue
            store[verb] = tensors.train_regression(verb, examples, regression_config)
        else:
            resolved = tensors.resolve_pairs(space, verb, pairs[verb])
            if not resolved.resolved:
                skipped.append(verb)
                continue
            builder = (
                tensors.build_relational if method == "relational" else tensors.build_separable
            )
            store[verb] = builder(resolved)
    if not store:
        raise TensorError("no verb matrices could be built from the given pairs")

    out = _prepare_output(options, "build-verbs")
    store_dir = out / "verbs"
    tensors.save_verb_store(store_dir, store, extra_meta={"method": method})
    print(f"built {len(store)} verb matrices with method {method!r}")
    if skipped:
        print(f"skipped {len(skipped)} verbs with no usable pairs: {', '.join(skipped)}")
    print(f"wrote {store_dir}")
    return 0


def cmd_analyze(options: dict) -> int:
    store = tensors.load_verb_store(options["verbs"])
    report = evaluation.entanglement_report(store)
    out = _prepare_output(options, "analyze")
    fmt = options["format"]
    if fmt == "csv":
        path = out / "entanglement.csv"
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["verb", "entanglement"])
            for verb, score in report.scores.items():
                writer.writerow([verb, repr(score)])
            writer.writerow(["__mean__", repr(report.mean)])
        print(f"wrote {path}")
    elif fmt == "json":
        path = out / "entanglement.json"
        payload = {
            "scores": report.scores,
            "mean": report.mean,
            "histogram": {"bin_edges": report.bin_edges, "bin_counts": report.bin_counts},
        }
        path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path}")
    else:
        width = max(len("verb"), *(len(v) for v in report.scores))
        print(f"{'verb':<{width}}  entanglement")
        for verb, score in report.scores.items():
            print(f"{verb:<{width}}  {score:.6f}")
    print(f"mean entanglement: {report.mean:.6f} over {len(report.scores)} verbs")
    return 0


def _parse_list(value, name: str, allowed: tuple[str, ...]) -> list[str]:
    items = [part.strip() for part in str(value).split(",") if part.strip()]
    if not items:
        raise UsageError(f"no {name} selected")
    for item in items:
        if item not in allowed:
            raise UsageError(
                f"unknown {name[:-1]} {item!r} (known: {', '.join(allowed)})"
            )
    return items


def cmd_run_task(options: dict) -> int:
    if not options["space"]:
        raise UsageError("run-task requires --space")
    models = _parse_list(options["models"], "models", MODEL_NAMES)
    metrics = _parse_list(options["metrics"], "metrics", METRICS)
    space = semspace.load_space(options["space"])
    dataset = evaluation.load_dataset(options["dataset"])
    verbs = tensors.load_verb_store(options["verbs"]) if options["verbs"] else None
    if options["rank1"]:
        if verbs is None:
            raise UsageError("--rank1 requires --verbs")
        verbs = tensors.rank1_store(verbs)

    results = [evaluation.run_task(dataset, model, space, verbs) for model in models]
    rows = []
    for result in results:
        for metric in metrics:
            rho = result.rho_cosine if metric == "cosine" else result.rho_euclidean
            rows.append(
                {
                    "model": result.model,
                    "metric": metric,
                    "rho": rho,
                    "n_pairs_used": result.n_pairs_used,
                    "excluded": result.excluded,
                }
            )

    out = _prepare_output(options, "run-task")
    fmt = options["format"]
    if fmt == "csv":
        path = out / "task_results.csv"
        with path.open("w", encoding="utf-8", newline="") as handle:
            writer = csv.writer(handle)
            writer.writerow(["model", "metric", "rho", "n_pairs_used", "excluded"])
            for row in rows:
                writer.writerow(
                    [row["model"], row["metric"], repr(row["rho"]),
                     row["n_pairs_used"], row["excluded"]]
                )
        print(f"wrote {path}")
    elif fmt == "json":
        payload: dict = {"results": rows}
        if options["per_pair"]:
            payload["per_pair"] = {}
            for model in models:
                kept, _ = evaluation.score_pairs(dataset, model, space, verbs)
                payload["per_pair"][model] = [
                    {
                        "left": " ".join(p.left),
                        "right": " ".join(p.right),
                        "human": p.human_score,
                        "cosine": p.cosine,
                        "euclidean": p.euclidean,
                    }
                    for p in kept
                ]
        path = out / "task_results.json"
        path.write_text(json.dumps(payload, sort_keys=True, indent=2) + "\n", encoding="utf-8")
        print(f"wrote {path}")
    else:
        width = max(len("model"), *(len(m) for m in models))
        header = f"{'model':<{width}}"
        for metric in metrics:
            header += f"  rho ({metric})"
        print(header + "  pairs  excluded")
        for result in results:
            line = f"{result.model:<{width}}"
            for metric in metrics:
                rho = result.rho_cosine if metric == "cosine" else result.rho_euclidean
                line += f"  {rho:>11.4f}"
            print(line + f"  {result.n_pairs_used:>5}  {result.excluded:>8}")
    return 0


def cmd_serve(options: dict) -> int:
    import uvicorn

    from .service.app import create_app

    uvicorn.run(create_app(), host=options["host"], port=int(options["port"]))
    return 0


COMMANDS = {
    "build-space": cmd_build_space,
    "build-verbs": cmd_build_verbs,
    "analyze": cmd_analyze,
    "run-task": cmd_run_task,
    "serve": cmd_serve,
}

DATA_ERRORS = (
    SemSpaceError,
    TensorError,
    PregroupError,
    evaluation.EvalError,
    OSError,
)


def main(argv: list[str] | None = None) -> int:
    logging.basicConfig(format="%(levelname)s %(name)s: %(message)s")
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as exc:
        # argparse exits 0 for --help and 2 for usage errors; usage errors
        # are exit code 1 here (2 is reserved for data errors).
        return 0 if exc.code in (0, None) else 1
    if args.command is None:
        parser.print_help()
        return 1

    # Positional inputs ride along in `flags`; they are not configurable
    # through the config file, only on the command line.
    flags = {k: v for k, v in vars(args).items() if k not in ("command", "config")}
    try:
        options = effective_options(args.command, flags, getattr(args, "config", None))
        return COMMANDS[args.command](options)
    except UsageError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except ValueError as exc:
        print(f"configuration error: {exc}", file=sys.stderr)
        return 1
    except DATA_ERRORS as exc:
        print(f"data error: {exc}", file=sys.stderr)
        return 2


def entrypoint() -> None:
    sys.exit(main(sys.argv[1:]))


if __name__ == "__main__":
    entrypoint()
