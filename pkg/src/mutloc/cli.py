"""Command-line front end.

Five subcommands cover the ahead-of-time workflow: ``analyze`` builds a
kill matrix from toy-language sources, ``sample`` shrinks a matrix,
``train`` fits a classifier, ``localize`` ranks methods for an observed
failure, and ``evaluate`` runs the planted-fault harness.

Exit codes: 0 success, 1 usage or bad flag value, 2 domain error
(failing baseline test, invalid observation, malformed input file).

Every artifact written carries a run manifest (tool version, subcommand,
inputs, configuration) for reproducibility: JSON artifacts embed it
under a ``manifest`` key, CSV artifacts get a ``<name>.manifest.json``
sidecar.  Manifests contain no timestamps, so identical invocations
produce identical bytes.
"""

from __future__ import annotations

import argparse
import json
import sys

from . import __version__
from .classifiers import (
    LR,
    MLP,
    TrainConfig,
    build_dataset,
    build_query_vector,
    load_model,
    predict_scores,
    save_model,
    train,
)
from .errors import InvalidConfig, MutlocError
from .matrix import load_matrix, load_observation, save_matrix
from .metrics import planted_fault_eval, save_report
from .ranking import (
    ModelSpec,
    RankerConfig,
    Scope,
    format_ranking,
    localize,
    rank,
    save_ranking,
)
from .sampling import sample_stratified, sample_uniform
from .toylang import analyze_source

EXIT_OK = 0
EXIT_USAGE = 1
EXIT_DOMAIN = 2

_BAYES_MODELS = ("em", "pm*", "pm+")
_CLASSIFIER_MODELS = (LR, MLP)


class _ArgumentParser(argparse.ArgumentParser):
    """argparse exits with 2 on usage errors; this tool reserves 2 for
    domain errors, so usage problems are remapped to exit 1."""

    def error(self, message):
        self.print_usage(sys.stderr)
        print(f"{self.prog}: error: {message}", file=sys.stderr)
        raise SystemExit(EXIT_USAGE)


def _manifest(subcommand: str, inputs: dict, config: dict) -> dict:
    return {
        "tool": "mutloc",
        "version": __version__,
        "subcommand": subcommand,
        "inputs": inputs,
        "config": config,
    }


def _emit_sidecar_manifest(out_path: str, manifest: dict) -> None:
    with open(f"{out_path}.manifest.json", "w", encoding="utf-8", newline="\n") as fh:
        json.dump(manifest, fh, indent=2)
        fh.write("\n")


def _is_json(path: str) -> bool:
    return path.endswith(".json")


# -- analyze -------------------------------------------------------------------


def cmd_analyze(args) -> int:
    with open(args.program, encoding="utf-8") as fh:
        program_source = fh.read()
    with open(args.tests, encoding="utf-8") as fh:
        tests_source = fh.read()
    operators = None
    if args.ops:
        operators = [tag.strip() for tag in args.ops.split(",") if tag.strip()]
    matrix = analyze_source(
        program_source,
        tests_source,
        operators=operators,
        step_limit=args.step_limit,
        jobs=args.jobs,
    )
    manifest = _manifest(
        "analyze",
        {"program": args.program, "tests": args.tests},
        {"ops": sorted(operators) if operators else "all", "step_limit": args.step_limit},
    )
    if _is_json(args.out):
        save_matrix(matrix, args.out, extra={"manifest": manifest})
    else:
        save_matrix(matrix, args.out)
        _emit_sidecar_manifest(args.out, manifest)
    print(f"{matrix.n_mutants} mutants x {matrix.n_tests} tests -> {args.out}")
    return EXIT_OK


# -- localize --------------------------------------------------------------------


def _bayes_ranking(matrix, obs, model: str, scope: str, epsilon: float):
    spec = ModelSpec.parse(model, scope)
    config = RankerConfig(epsilon=epsilon)
    return localize(matrix, obs, spec, config)


def _classifier_ranking(matrix, obs, model: str, scope_token: str, args):
    scope = Scope.F if scope_token == "f" else Scope.FP
    if args.model_file:
        clf = load_model(args.model_file)
    else:
        # No persisted model: train on the spot.  f scope trains on the
        # matrix restricted to the observed failing columns.
        train_matrix = matrix
        if scope is Scope.F:
            failing = [t for t in matrix.tests if t in obs.failing]
            if len(failing) != len(obs.failing):
                missing = sorted(obs.failing - set(matrix.tests))
                raise InvalidConfig(f"failing tests not in matrix: {missing}")
            train_matrix = matrix.restrict(failing)
        clf = train(build_dataset(train_matrix), model, _train_config(args))
    vector = build_query_vector(obs, clf.test_index, scope)
    return rank(predict_scores(clf, vector))


def cmd_localize(args) -> int:
    matrix = load_matrix(args.matrix)
    obs = load_observation(args.observation)
    if args.model in _BAYES_MODELS:
        ranking = _bayes_ranking(matrix, obs, args.model, args.scope, args.epsilon)
    else:
        ranking = _classifier_ranking(matrix, obs, args.model, args.scope, args)
    manifest = _manifest(
        "localize",
        {"matrix": args.matrix, "observation": args.observation,
         "model_file": args.model_file},
        {"model": args.model, "scope": args.scope, "epsilon": args.epsilon,
         "seed": args.seed, "top_k": args.top_k},
    )
    if args.out:
        if _is_json(args.out):
            save_ranking(ranking, args.out, extra={"manifest": manifest})
        else:
            save_ranking(ranking, args.out)
            _emit_sidecar_manifest(args.out, manifest)
    print(format_ranking(ranking, args.top_k))
    return EXIT_OK


# -- train -----------------------------------------------------------------------


def _train_config(args) -> TrainConfig:
    return TrainConfig(
        hidden_size=args.hidden_size,
        max_iter=args.max_iter,
        learning_rate=args.learning_rate,
        adam_beta1=args.adam_beta1,
        adam_beta2=args.adam_beta2,
        adam_eps=args.adam_eps,
        seed=args.seed,
        activation=args.activation,
    )


def cmd_train(args) -> int:
    matrix = load_matrix(args.matrix)
    if args.scope == "f":
        if not args.observation:
            raise InvalidConfig("--scope f training needs --observation to fix the failing set")
        obs = load_observation(args.observation)
        failing = [t for t in matrix.tests if t in obs.failing]
        if len(failing) != len(obs.failing):
            missing = sorted(obs.failing - set(matrix.tests))
            raise InvalidConfig(f"failing tests not in matrix: {missing}")
        matrix = matrix.restrict(failing)
    model = train(build_dataset(matrix), args.kind, _train_config(args))
    manifest = _manifest(
        "train",
        {"matrix": args.matrix, "observation": args.observation},
        {"kind": args.kind, "scope": args.scope,
         "hidden_size": args.hidden_size, "max_iter": args.max_iter,
         "learning_rate": args.learning_rate, "seed": args.seed},
    )
    save_model(model, args.out, extra={"manifest": manifest})
    print(
        f"{args.kind} model on {len(model.method_index)} methods, "
        f"loss {model.initial_loss:.6g} -> {model.final_loss:.6g}, saved to {args.out}"
    )
    return EXIT_OK


# -- sample -----------------------------------------------------------------------


def cmd_sample(args) -> int:
    matrix = load_matrix(args.matrix)
    if args.rate is not None:
        sampled = sample_uniform(matrix, args.rate, args.seed)
        config = {"rate": args.rate, "seed": args.seed}
    else:
        sampled = sample_stratified(matrix, args.per_method, args.seed)
        config = {"per_method": args.per_method, "seed": args.seed}
    manifest = _manifest("sample", {"matrix": args.matrix}, config)
    if _is_json(args.out):
        save_matrix(sampled, args.out, extra={"manifest": manifest})
    else:
        save_matrix(sampled, args.out)
        _emit_sidecar_manifest(args.out, manifest)
    print(f"kept {sampled.n_mutants} of {matrix.n_mutants} mutants -> {args.out}")
    return EXIT_OK


# -- evaluate ---------------------------------------------------------------------


def cmd_evaluate(args) -> int:
    matrix = load_matrix(args.matrix)
    model_matrix = load_matrix(args.model_matrix) if args.model_matrix else None
    spec = ModelSpec.parse(args.model, args.scope)
    report = planted_fault_eval(
        matrix,
        spec,
        RankerConfig(epsilon=args.epsilon),
        model_matrix=model_matrix,
        jobs=args.jobs,
    )
    manifest = _manifest(
        "evaluate",
        {"matrix": args.matrix, "model_matrix": args.model_matrix},
        {"model": args.model, "scope": args.scope, "epsilon": args.epsilon},
    )
    if args.out:
        save_report(report, args.out, extra={"manifest": manifest})
    print(report.format_table())
    return EXIT_OK


# -- wiring -----------------------------------------------------------------------


def build_parser() -> argparse.ArgumentParser:
    parser = _ArgumentParser(
        prog="mutloc",
        description="Mutation-based fault localisation with ahead-of-time analysis.",
    )
    parser.add_argument("--version", action="version", version=f"mutloc {__version__}")
    sub = parser.add_subparsers(dest="subcommand", required=True)

    p = sub.add_parser("analyze", help="mutate a toy program and build its kill matrix")
    p.add_argument("program", help="toy-language source file (.toy)")
    p.add_argument("tests", help="test file (.toytest)")
    p.add_argument("--ops", help="comma-separated operator tags (default: all eight)")
    p.add_argument("--step-limit", type=int, default=100_000)
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", required=True, help="matrix output (.csv or .json)")
    p.set_defaults(func=cmd_analyze)

    p = sub.add_parser("localize", help="rank methods for an observed failure")
    p.add_argument("matrix", help="kill matrix (.csv or .json)")
    p.add_argument("--observation", required=True, help="failure observation JSON")
    p.add_argument("--model", required=True,
                   choices=list(_BAYES_MODELS) + list(_CLASSIFIER_MODELS))
    p.add_argument("--scope", required=True, choices=["f", "fp"])
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--model-file", help="pre-trained classifier model JSON")
    p.add_argument("--top-k", type=int, default=10)
    p.add_argument("--out", help="ranking output (.csv or .json)")
    _add_train_flags(p)
    p.set_defaults(func=cmd_localize)

    p = sub.add_parser("train", help="train a classifier on a kill matrix")
    p.add_argument("matrix")
    p.add_argument("--kind", required=True, choices=list(_CLASSIFIER_MODELS))
    p.add_argument("--scope", required=True, choices=["f", "fp"])
    p.add_argument("--observation", help="required for --scope f: fixes the failing set")
    p.add_argument("--out", required=True, help="model output (.json)")
    _add_train_flags(p)
    p.set_defaults(func=cmd_train)

    p = sub.add_parser("sample", help="sample mutants out of a kill matrix")
    p.add_argument("matrix")
    group = p.add_mutually_exclusive_group(required=True)
    group.add_argument("--rate", type=float, help="uniform sampling rate in (0, 1]")
    group.add_argument("--per-method", type=int, help="stratified cap per method")
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--out", required=True, help="matrix output (.csv or .json)")
    p.set_defaults(func=cmd_sample)

    p = sub.add_parser("evaluate", help="planted-fault evaluation of a matrix")
    p.add_argument("matrix")
    p.add_argument("--model", required=True, choices=list(_BAYES_MODELS))
    p.add_argument("--scope", required=True, choices=["f", "fp"])
    p.add_argument("--epsilon", type=float, default=0.001)
    p.add_argument("--model-matrix",
                   help="localise on this (e.g. sampled) matrix instead")
    p.add_argument("--jobs", type=int, default=1)
    p.add_argument("--out", help="report output (.json)")
    p.set_defaults(func=cmd_evaluate)

    return parser


def _add_train_flags(p) -> None:
    p.add_argument("--hidden-size", type=int, default=50)
    p.add_argument("--max-iter", type=int, default=50)
    p.add_argument("--learning-rate", type=float, default=0.01)
    p.add_argument("--adam-beta1", type=float, default=0.9)
    p.add_argument("--adam-beta2", type=float, default=0.999)
    p.add_argument("--adam-eps", type=float, default=1e-8)
    p.add_argument("--seed", type=int, default=0)
    p.add_argument("--activation", choices=["relu", "tanh"], default="relu")


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except InvalidConfig as exc:
        print(f"mutloc: {exc}", file=sys.stderr)
        return EXIT_USAGE
    except MutlocError as exc:
        print(f"mutloc: {exc}", file=sys.stderr)
        return EXIT_DOMAIN
    except OSError as exc:
        print(f"mutloc: {exc}", file=sys.stderr)
        return EXIT_DOMAIN


if __name__ == "__main__":
    sys.exit(main())
