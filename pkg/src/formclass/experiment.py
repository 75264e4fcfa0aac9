"""Cross-validated estimation of model cross-entropies.

The estimation protocol: split the instances into k label-stratified
folds, train a fresh classifier per fold on the other k-1 folds with a
per-fold vocabulary, collect the predicted probability of the true label
for every held-out instance, and pool. The pooled mean of -log2 q is the
cross-entropy upper bound that the report layer combines with plug-in
entropies; it only gets tighter as the model improves.

Fold seeds, shuffling and the hyperparameter search all derive from
numpy SeedSequence, so a (seed, k, config) triple pins the whole
procedure bit for bit.
"""

from __future__ import annotations

import math
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass, field, replace, asdict

import numpy as np

from .errors import NonFiniteLoss, TooFewInstances
from .infotheory import MeasureValue
from .lexicon import InstanceSet
from .neural import ModelConfig, Vocabulary, ClassifierModel, encode_dataset


def fold_seed(seed: int, fold: int) -> int:
    """Stable derived seed for one fold of one run."""
    return int(np.random.SeedSequence((seed, fold)).generate_state(1)[0])


@dataclass(frozen=True)
class FoldPlan:
    k: int
    seed: int
    assignments: np.ndarray  # (N,) fold id per instance

    def fold_indices(self, fold: int):
        val = np.flatnonzero(self.assignments == fold)
        train = np.flatnonzero(self.assignments != fold)
        return train, val

    def fold_sizes(self):
        return np.bincount(self.assignments, minlength=self.k)


def make_folds(instance_set: InstanceSet, k: int, seed: int) -> FoldPlan:
    """Label-stratified fold assignment.

    Each label's instances are shuffled and dealt round-robin style:
    every fold first receives floor(n_label / k), then the remainder goes
    one instance at a time to the currently least-loaded folds. This
    keeps per-label fold counts within one of each other and, because
    remainders always flow to the lightest folds, overall fold sizes
    within one as well.
    """
    n = len(instance_set.instances)
    if k < 2:
        raise ValueError("k must be at least 2")
    if n < k:
        raise TooFewInstances(f"{n} instances cannot fill {k} folds")

    rng = np.random.default_rng(np.random.SeedSequence(seed))
    by_label: dict[str, list[int]] = {}
    for i, inst in enumerate(instance_set.instances):
        by_label.setdefault(inst.label, []).append(i)

    assignments = np.full(n, -1, dtype=np.int64)
    load = np.zeros(k, dtype=np.int64)
    for label in sorted(by_label):
        idx = np.array(by_label[label])
        rng.shuffle(idx)
        base, extra = divmod(len(idx), k)
        pos = 0
        for f in range(k):
            assignments[idx[pos: pos + base]] = f
            pos += base
            load[f] += base
        # remainder to the least-loaded folds, lowest id on ties
        order = np.lexsort((np.arange(k), load))
        for f in order[:extra]:
            assignments[idx[pos]] = f
            pos += 1
            load[f] += 1
    return FoldPlan(k=k, seed=seed, assignments=assignments)


def subset(instance_set: InstanceSet, idx) -> InstanceSet:
    """Sub-InstanceSet by index, keeping task, label space and provenance."""
    return InstanceSet(
        task=instance_set.task,
        instances=tuple(instance_set.instances[int(i)] for i in idx),
        label_space=instance_set.label_space,
        source_hash=instance_set.source_hash,
    )


# ---- hyperparameter search ----

@dataclass(frozen=True)
class SearchSpace:
    """Random-search ranges; integer ranges are inclusive, the learning
    rate is sampled log-uniformly. Explicit candidates, when given,
    replace sampling entirely."""

    char_embedding_dim: tuple[int, int] = (16, 128)
    hidden_dim: tuple[int, int] = (32, 256)
    n_layers: tuple[int, int] = (1, 2)
    epochs: tuple[int, int] = (10, 100)
    learning_rate: tuple[float, float] = (1e-4, 1e-2)
    batch_sizes: tuple[int, ...] = (16, 32, 64)
    candidates: tuple[ModelConfig, ...] = ()

    def sample(self, rng, seed: int) -> ModelConfig:
        n_layers = int(rng.integers(self.n_layers[0], self.n_layers[1] + 1))
        hidden = tuple(
            int(rng.integers(self.hidden_dim[0], self.hidden_dim[1] + 1))
            for _ in range(n_layers)
        )
        lo, hi = self.learning_rate
        lr = float(np.exp(rng.uniform(np.log(lo), np.log(hi))))
        return ModelConfig(
            char_embedding_dim=int(rng.integers(self.char_embedding_dim[0],
                                                self.char_embedding_dim[1] + 1)),
            hidden_dims=hidden,
            epochs=int(rng.integers(self.epochs[0], self.epochs[1] + 1)),
            learning_rate=lr,
            batch_size=int(rng.choice(self.batch_sizes)),
            seed=seed,
        )


def config_as_dict(config: ModelConfig) -> dict:
    out = asdict(config)
    out["hidden_dims"] = list(config.hidden_dims)
    return out


@dataclass(frozen=True)
class Trial:
    config: ModelConfig
    score: float  # dev cross-entropy in bits; inf when training diverged

    def to_json_dict(self):
        return {"config": config_as_dict(self.config), "score": self.score}


@dataclass(frozen=True)
class SearchResult:
    best_config: ModelConfig
    trials: tuple[Trial, ...]


def search(
    instance_set: InstanceSet,
    space: SearchSpace,
    budget: int = 20,
    seed: int = 0,
    with_etymology: bool = False,
    genders: tuple[str, ...] | None = None,
) -> SearchResult:
    """Random hyperparameter search scored on a held-out fifth.

    Configurations are sampled from the space (or taken verbatim from
    space.candidates), each trained on the inner training split and
    scored by dev cross-entropy. Diverged runs score inf but stay in the
    trial log. Ties keep the earliest trial.
    """
    if genders is None:
        genders = tuple(sorted({i.gender for i in instance_set.instances}))
    inner_k = 5 if len(instance_set.instances) >= 10 else 2
    plan = make_folds(instance_set, inner_k, fold_seed(seed, 0))
    train_idx, dev_idx = plan.fold_indices(0)
    train_set = subset(instance_set, train_idx)
    dev_set = subset(instance_set, dev_idx)

    rng = np.random.default_rng(np.random.SeedSequence((seed, 1)))
    if space.candidates:
        configs = list(space.candidates[:budget])
    else:
        configs = [space.sample(rng, seed=fold_seed(seed, 100 + j))
                   for j in range(budget)]

    labels = instance_set.label_space
    trials = []
    best = None
    for config in configs:
        try:
            vocab = Vocabulary.from_instances(train_set.instances)
            model = ClassifierModel(config, vocab, genders, labels)
            data = encode_dataset(train_set.instances, vocab, genders, labels,
                                  with_etymology)
            model.fit(data)
            dev = encode_dataset(dev_set.instances, vocab, genders, labels,
                                 with_etymology)
            score, _ = model.evaluate(dev)
            if not math.isfinite(score):
                score = math.inf
        except NonFiniteLoss:
            score = math.inf
        trial = Trial(config=config, score=float(score))
        trials.append(trial)
        if best is None or trial.score < best.score:
            best = trial
    return SearchResult(best_config=best.config, trials=tuple(trials))


# ---- cross-validated evaluation ----

@dataclass(frozen=True)
class EvalResult:
    task: str
    with_etymology: bool
    k: int
    seed: int
    label_space: tuple[str, ...]
    source_hash: str
    fold_assignments: np.ndarray = field(repr=False)
    per_instance_probs: np.ndarray = field(repr=False)  # (N, K), held-out
    predictions: np.ndarray = field(repr=False)         # (N,) label indices
    true_labels: np.ndarray = field(repr=False)
    fold_cross_entropies: tuple[float, ...] = ()
    fold_configs: tuple[ModelConfig, ...] = ()

    @property
    def cross_entropy(self) -> float:
        """Pooled held-out cross-entropy in bits."""
        n = len(self.true_labels)
        with np.errstate(divide="ignore"):
            return float(-np.log2(self.per_instance_probs[np.arange(n),
                                                          self.true_labels]).mean())

    @property
    def accuracy(self) -> float:
        return float((self.predictions == self.true_labels).mean())

    def confusion_matrix(self) -> np.ndarray:
        """(K, K) counts, rows true label, columns predicted."""
        k = len(self.label_space)
        matrix = np.zeros((k, k), dtype=np.int64)
        np.add.at(matrix, (self.true_labels, self.predictions), 1)
        return matrix

    def to_json_dict(self, include_probs: bool = False) -> dict:
        out = {
            "task": self.task,
            "with_etymology": self.with_etymology,
            "k": self.k,
            "seed": self.seed,
            "label_space": list(self.label_space),
            "source_hash": self.source_hash,
            "cross_entropy": self.cross_entropy,
            "accuracy": self.accuracy,
            "fold_cross_entropies": list(self.fold_cross_entropies),
            "fold_sizes": np.bincount(self.fold_assignments,
                                      minlength=self.k).tolist(),
            "confusion_matrix": self.confusion_matrix().tolist(),
            "fold_configs": [config_as_dict(c) for c in self.fold_configs],
        }
        if include_probs:
            out["fold_assignments"] = self.fold_assignments.tolist()
            out["per_instance_probs"] = self.per_instance_probs.tolist()
        return out


def _run_fold(args):
    (fold, instance_set, train_idx, val_idx, config, seed, with_etymology,
     genders, space, budget) = args
    train_set = subset(instance_set, train_idx)
    labels = instance_set.label_space

    if space is not None:
        found = search(train_set, space, budget=budget,
                       seed=fold_seed(seed, fold), with_etymology=with_etymology,
                       genders=genders)
        config = found.best_config
    config = replace(config, seed=fold_seed(seed, fold))

    vocab = Vocabulary.from_instances(train_set.instances)
    model = ClassifierModel(config, vocab, genders, labels)
    data = encode_dataset(train_set.instances, vocab, genders, labels,
                          with_etymology)
    model.fit(data)

    val_set = subset(instance_set, val_idx)
    val_data = encode_dataset(val_set.instances, vocab, genders, labels,
                              with_etymology)
    ce, probs = model.evaluate(val_data)
    return fold, val_idx, probs, ce, config


def run_cv(
    instance_set: InstanceSet,
    config: ModelConfig,
    k: int = 10,
    seed: int = 0,
    with_etymology: bool = False,
    jobs: int = 1,
    search_space: SearchSpace | None = None,
    search_budget: int = 20,
) -> EvalResult:
    """k-fold cross-validated evaluation of the classifier.

    When search_space is given the hyperparameters are re-searched inside
    every training fold (nested, so the held-out fold never leaks into
    model selection) and `config` is ignored except as a fallback shape.
    """
    plan = make_folds(instance_set, k, seed)
    genders = tuple(sorted({i.gender for i in instance_set.instances}))
    n = len(instance_set.instances)
    k_labels = len(instance_set.label_space)

    tasks = []
    for fold in range(k):
        train_idx, val_idx = plan.fold_indices(fold)
        tasks.append((fold, instance_set, train_idx, val_idx, config, seed,
                      with_etymology, genders, search_space, search_budget))

    if jobs > 1:
        with ProcessPoolExecutor(max_workers=jobs) as pool:
            outcomes = list(pool.map(_run_fold, tasks))
    else:
        outcomes = [_run_fold(t) for t in tasks]

    probs = np.zeros((n, k_labels))
    fold_ces = [0.0] * k
    fold_configs: list[ModelConfig] = [config] * k
    for fold, val_idx, fold_probs, ce, used in outcomes:
        probs[val_idx] = fold_probs
        fold_ces[fold] = ce
        fold_configs[fold] = used

    true_labels = np.array(
        [instance_set.label_space.index(i.label) for i in instance_set.instances]
    )
    return EvalResult(
        task=instance_set.task,
        with_etymology=with_etymology,
        k=k,
        seed=seed,
        label_space=instance_set.label_space,
        source_hash=instance_set.source_hash,
        fold_assignments=plan.assignments,
        per_instance_probs=probs,
        predictions=probs.argmax(axis=1),
        true_labels=true_labels,
        fold_cross_entropies=tuple(fold_ces),
        fold_configs=tuple(fold_configs),
    )


def majority_baseline(instance_set: InstanceSet, k: int = 10, seed: int = 0) -> float:
    """Pooled held-out accuracy of always predicting the training fold's
    most frequent label (lexicographically first on ties)."""
    plan = make_folds(instance_set, k, seed)
    labels = [i.label for i in instance_set.instances]
    hits = 0
    for fold in range(k):
        train_idx, val_idx = plan.fold_indices(fold)
        counts: dict[str, int] = {}
        for i in train_idx:
            counts[labels[i]] = counts.get(labels[i], 0) + 1
        top = max(sorted(counts), key=counts.get)
        hits += sum(1 for i in val_idx if labels[i] == top)
    return hits / len(labels)


def estimate_upper_bound(result: EvalResult) -> MeasureValue:
    """Wrap a cross-validation result as a cross-entropy measure.

    The value bounds H(C | W, G) from above, or H(C | W, E, G) when the
    run consumed the etymology marker."""
    conditioning = "W,E,G" if result.with_etymology else "W,G"
    target = "E" if result.task == "etymology_target" else "C"
    return MeasureValue(
        name=f"CE({target}|{conditioning})",
        value=result.cross_entropy,
        unit="bits",
        upper_bound=True,
    )
