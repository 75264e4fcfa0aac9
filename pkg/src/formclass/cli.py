"""Batch command-line interface.

Commands mirror the pipeline stages: validate and stats inspect a
dataset, train fits one model, estimate runs the cross-validated
evaluations, report assembles the full measure battery, oracle-check
cross-checks the fast measure implementations against the brute-force
reference. Artifacts land under --out together with a run manifest;
nothing is timestamped, so a rerun with the same inputs reproduces
every file byte for byte.

Exit codes: 0 success, 1 dataset validation failure, 2 runtime error.
"""

from __future__ import annotations

import argparse
import json
import os
import sys
from dataclasses import replace
from pathlib import Path

import numpy as np

from . import __version__
from .errors import FormClassError, LexiconError
from .experiment import SearchSpace, run_cv, search
from .infotheory import JointTable, conditional_entropy, mutual_information
from .lexicon import (
    TASK_ALLOMORPH,
    TASK_ETYMOLOGY,
    TASK_TYPE,
    build_instances,
    distribution_table,
    parse_lexicon,
    prune_classes,
    summarize,
)
from .neural import ClassifierModel, ModelConfig, Vocabulary, encode_dataset, gradient_check
from .oracles import (
    cells_from_array,
    oracle_conditional_entropy,
    oracle_entropy,
    oracle_mutual_information,
    oracle_tripartite,
    xor_joint,
)
from .report import assemble, compute_plugin_measures, emit
from .synthetic import last_symbol_task

TASK_NAMES = {"type": TASK_TYPE, "allomorph": TASK_ALLOMORPH,
              "etymology": TASK_ETYMOLOGY}

DEFAULT_CONFIG = ModelConfig(char_embedding_dim=32, hidden_dims=(64,),
                             epochs=40, learning_rate=2e-3, batch_size=32,
                             seed=0)


def load_config(path: str, seed: int) -> ModelConfig:
    """Read a model config from JSON or key=value lines."""
    text = Path(path).read_text(encoding="utf-8")
    stripped = text.lstrip()
    if stripped.startswith("{"):
        raw = json.loads(text)
    else:
        raw = {}
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            key, _, value = line.partition("=")
            raw[key.strip()] = value.strip()
    fields = {}
    if "char_embedding_dim" in raw:
        fields["char_embedding_dim"] = int(raw["char_embedding_dim"])
    if "hidden_dims" in raw:
        dims = raw["hidden_dims"]
        if isinstance(dims, str):
            dims = [d for d in dims.split(",") if d]
        fields["hidden_dims"] = tuple(int(d) for d in dims)
    if "epochs" in raw:
        fields["epochs"] = int(raw["epochs"])
    if "learning_rate" in raw:
        fields["learning_rate"] = float(raw["learning_rate"])
    if "batch_size" in raw:
        fields["batch_size"] = int(raw["batch_size"])
    return replace(DEFAULT_CONFIG, seed=seed, **fields)


def _read_lexicon(path: str):
    with open(path, "rb") as fh:
        return parse_lexicon(fh)


def _write_artifacts(out_dir: str, artifacts: dict[str, str], manifest: dict):
    out = Path(out_dir)
    out.mkdir(parents=True, exist_ok=True)
    manifest = dict(manifest)
    manifest["artifacts"] = sorted(artifacts)
    manifest["version"] = __version__
    artifacts = dict(artifacts)
    artifacts["run-manifest.json"] = json.dumps(manifest, sort_keys=True,
                                                indent=2) + "\n"
    for name, text in artifacts.items():
        (out / name).write_text(text, encoding="utf-8")


def _dumps(data) -> str:
    return json.dumps(data, sort_keys=True, indent=2) + "\n"


# ---- commands ----

def cmd_validate(args) -> int:
    lexicon = _read_lexicon(args.dataset)
    print(_dumps(summarize(lexicon)), end="")
    return 0


def cmd_stats(args) -> int:
    lexicon = _read_lexicon(args.dataset)
    table = distribution_table(lexicon)
    artifacts = {
        "distribution.csv": table.to_csv(),
        "distribution.json": _dumps(table.to_json_dict()),
    }
    manifest = {"command": "stats", "dataset_hash": lexicon.content_hash,
                "options": {"dataset": os.path.basename(args.dataset)}}
    _write_artifacts(args.out, artifacts, manifest)
    print(table.to_csv(), end="")
    return 0


def _prepared_instances(args, task_name):
    lexicon = _read_lexicon(args.dataset)
    pruned = prune_classes(lexicon, args.min_count)
    return pruned, build_instances(pruned, TASK_NAMES[task_name])


def cmd_train(args) -> int:
    pruned, instances = _prepared_instances(args, args.task)
    genders = tuple(sorted({i.gender for i in instances.instances}))
    config = (load_config(args.config, args.seed) if args.config
              else replace(DEFAULT_CONFIG, seed=args.seed))

    artifacts = {}
    if args.budget:
        found = search(instances, SearchSpace(), budget=args.budget,
                       seed=args.seed, with_etymology=args.with_etymology,
                       genders=genders)
        config = replace(found.best_config, seed=args.seed)
        artifacts["trials.json"] = _dumps([t.to_json_dict() for t in found.trials])

    vocab = Vocabulary.from_instances(instances.instances)
    model = ClassifierModel(config, vocab, genders, instances.label_space)
    data = encode_dataset(instances.instances, vocab, genders,
                          instances.label_space, args.with_etymology)
    losses = model.fit(data)

    artifacts["model.json"] = model.to_json() + "\n"
    artifacts["losses.json"] = _dumps(losses)
    manifest = {
        "command": "train", "dataset_hash": pruned.content_hash,
        "options": {"task": args.task, "with_etymology": args.with_etymology,
                    "seed": args.seed, "budget": args.budget,
                    "min_count": args.min_count},
    }
    _write_artifacts(args.out, artifacts, manifest)
    print(f"trained {args.task} model: final epoch loss "
          f"{losses[-1]:.4f} bits over {len(instances.instances)} instances")
    return 0


def _cv_settings(args):
    return dict(k=args.k, seed=args.seed, jobs=args.jobs)


def cmd_estimate(args) -> int:
    pruned, class_set = _prepared_instances(args, args.task)
    ety_set = build_instances(pruned, TASK_ETYMOLOGY)
    config = (load_config(args.config, args.seed) if args.config
              else replace(DEFAULT_CONFIG, seed=args.seed))
    space = SearchSpace() if args.budget else None

    runs = {
        "eval_class_form.json": run_cv(
            class_set, config, with_etymology=False, search_space=space,
            search_budget=args.budget or 0, **_cv_settings(args)),
        "eval_class_form_etymology.json": run_cv(
            class_set, config, with_etymology=True, search_space=space,
            search_budget=args.budget or 0, **_cv_settings(args)),
        "eval_etymology_form.json": run_cv(
            ety_set, config, with_etymology=False, search_space=space,
            search_budget=args.budget or 0, **_cv_settings(args)),
    }
    artifacts = {name: _dumps(result.to_json_dict(include_probs=True))
                 for name, result in runs.items()}
    manifest = {
        "command": "estimate", "dataset_hash": pruned.content_hash,
        "options": {"task": args.task, "k": args.k, "seed": args.seed,
                    "budget": args.budget, "min_count": args.min_count},
    }
    _write_artifacts(args.out, artifacts, manifest)
    for name, result in runs.items():
        print(f"{name}: cross-entropy {result.cross_entropy:.4f} bits, "
              f"accuracy {result.accuracy:.4f}")
    return 0


def cmd_report(args) -> int:
    if args.task not in ("type", "allomorph"):
        raise FormClassError("report requires --task type or allomorph")
    pruned, class_set = _prepared_instances(args, args.task)
    ety_set = build_instances(pruned, TASK_ETYMOLOGY)
    config = (load_config(args.config, args.seed) if args.config
              else replace(DEFAULT_CONFIG, seed=args.seed))
    space = SearchSpace() if args.budget else None

    plugin = compute_plugin_measures(class_set, ety_set)
    shared = dict(search_space=space, search_budget=args.budget or 0,
                  **_cv_settings(args))
    result_cw = run_cv(class_set, config, with_etymology=False, **shared)
    result_cwe = run_cv(class_set, config, with_etymology=True, **shared)
    result_ew = run_cv(ety_set, config, with_etymology=False, **shared)

    report = assemble(TASK_NAMES[args.task], plugin, result_cw, result_cwe,
                      result_ew)
    artifacts = {
        "report.json": emit(report, "json"),
        "report.csv": emit(report, "csv"),
        "report.txt": emit(report, "text-table"),
    }
    manifest = {
        "command": "report", "dataset_hash": pruned.content_hash,
        "options": {"task": args.task, "k": args.k, "seed": args.seed,
                    "budget": args.budget, "min_count": args.min_count},
    }
    _write_artifacts(args.out, artifacts, manifest)
    print(emit(report, "text-table"))
    return 0


def cmd_oracle_check(args) -> int:
    rng = np.random.default_rng(args.seed)
    failures = 0

    # measure implementations vs brute-force double sums
    worst = 0.0
    for _ in range(args.n):
        n_axes = int(rng.integers(2, 4))
        shape = tuple(int(rng.integers(2, 6)) for _ in range(n_axes))
        counts = rng.multinomial(int(rng.integers(20, 501)),
                                 np.ones(int(np.prod(shape))) / np.prod(shape))
        counts = counts.reshape(shape).astype(float)
        axes = tuple("ABC"[:n_axes])
        labels = tuple(tuple(f"{a}{i}" for i in range(s))
                       for a, s in zip(axes, shape))
        table = JointTable(axes=axes, labels=labels, counts=counts)
        cells = cells_from_array(counts)
        gpos = tuple(range(2, n_axes))
        diffs = [
            abs(conditional_entropy(table, "A") - oracle_entropy(
                cells_from_array(table.marginal_counts(("A",))))),
            abs(conditional_entropy(table, "A", ("B",) + table.axes[2:])
                - oracle_conditional_entropy(cells, (0,), (1,) + gpos)),
            abs(mutual_information(table, "A", "B", table.axes[2:])
                - oracle_mutual_information(cells, (0,), (1,), gpos)),
        ]
        worst = max(worst, *diffs)
    ok = worst < 1e-9
    failures += not ok
    print(f"{'PASS' if ok else 'FAIL'} plug-in vs oracle on {args.n} random "
          f"joints (max abs diff {worst:.3e} bits)")

    # signed interaction information witness
    xor = xor_joint()
    tri = oracle_tripartite(xor, (0,), (1,), (2,))
    ok = abs(tri - (-1.0)) < 1e-12
    failures += not ok
    print(f"{'PASS' if ok else 'FAIL'} xor interaction information = {tri:+.6f} bits")

    # analytic gradients vs finite differences on small models
    worst = 0.0
    for trial in range(5):
        inst = last_symbol_task(n_instances=12, n_classes=3, seed=trial)
        vocab = Vocabulary.from_instances(inst.instances)
        config = ModelConfig(char_embedding_dim=3, hidden_dims=(4,), epochs=1,
                             batch_size=12, seed=trial)
        model = ClassifierModel(config, vocab, ("f", "m"), inst.label_space)
        data = encode_dataset(inst.instances, vocab, ("f", "m"),
                              inst.label_space)
        report = gradient_check(model, data.X, data.mask, data.gender, data.y,
                                n_coords=20, rng=rng)
        worst = max(worst, max(report.values()))
    ok = worst < 1e-4
    failures += not ok
    print(f"{'PASS' if ok else 'FAIL'} gradient check on 5 small models "
          f"(max relative error {worst:.3e})")

    return 1 if failures else 0


# ---- argument parsing ----

def _add_common(sub, *, config=True):
    sub.add_argument("--dataset", required=True, help="tagged TSV lexicon")
    sub.add_argument("--out", default="out", help="artifact directory")
    sub.add_argument("--min-count", type=int, default=20,
                     help="prune classes with fewer distinct lexemes")
    if config:
        sub.add_argument("--task", required=True, choices=sorted(TASK_NAMES))
        sub.add_argument("--seed", type=int, required=True)
        sub.add_argument("--config", help="model config file (JSON or key=value)")
        sub.add_argument("--budget", type=int, default=0,
                         help="random-search trials; 0 disables search")
        sub.add_argument("--jobs", type=int, default=os.cpu_count(),
                         help="parallel fold workers")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="formclass",
        description="How predictive are a noun's form and etymology of its "
                    "plural class?")
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("validate", help="parse and summarize a dataset")
    p.add_argument("--dataset", required=True)
    p.set_defaults(fn=cmd_validate)

    p = sub.add_parser("stats", help="pair counts by marker category and etymology")
    p.add_argument("--dataset", required=True)
    p.add_argument("--out", default="out")
    p.set_defaults(fn=cmd_stats)

    p = sub.add_parser("train", help="fit one model on the full dataset")
    _add_common(p)
    p.add_argument("--with-etymology", action="store_true",
                   help="append the etymology marker to the input")
    p.set_defaults(fn=cmd_train)

    p = sub.add_parser("estimate",
                       help="cross-validated evaluation of all model variants")
    _add_common(p)
    p.add_argument("--k", type=int, default=10, help="folds")
    p.set_defaults(fn=cmd_estimate)

    p = sub.add_parser("report", help="assemble the full measure battery")
    _add_common(p)
    p.add_argument("--k", type=int, default=10, help="folds")
    p.set_defaults(fn=cmd_report)

    p = sub.add_parser("oracle-check",
                       help="cross-check measures and gradients against "
                            "brute-force references")
    p.add_argument("--n", type=int, default=200, help="random joints to test")
    p.add_argument("--seed", type=int, default=0)
    p.set_defaults(fn=cmd_oracle_check)
    return parser


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.fn(args)
    except LexiconError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1
    except (FormClassError, OSError, ValueError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2


def entry_point():
    sys.exit(main())
