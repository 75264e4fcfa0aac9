"""Plug-in information measures over finite categorical systems, in bits.

Entropies are plug-in estimates: empirical relative frequencies are
substituted into H = -sum p log2 p, with the 0 log 0 = 0 convention and
no smoothing. Conditional entropy is computed as a difference of joint
entropies, H(A|B) = H(A,B) - H(B), which is algebraically identical to
sum_b p(b) H(A|B=b) and keeps the chain identity

    H(A|G) = MI(A;B|G) + H(A|B,G)

exact up to floating point.
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Mapping

import numpy as np

from .errors import (
    AlignmentMismatch,
    InvalidDistribution,
    UnknownAxis,
    ZeroNormalizer,
)
from .lexicon import InstanceSet

_PROB_TOL = 1e-9

# Which instance attribute each conventional axis name reads.
AXIS_ATTRIBUTES = {"C": "label", "E": "etymology", "G": "gender"}


@dataclass(frozen=True)
class CategoricalDistribution:
    labels: tuple[str, ...]
    probabilities: np.ndarray

    def __post_init__(self):
        probs = np.asarray(self.probabilities, dtype=np.float64)
        object.__setattr__(self, "probabilities", probs)
        if probs.ndim != 1 or len(self.labels) != probs.shape[0]:
            raise InvalidDistribution("labels and probabilities must align 1:1")
        if probs.size == 0:
            raise InvalidDistribution("empty distribution")
        if np.any(probs < -_PROB_TOL):
            raise InvalidDistribution("negative probability")
        if abs(float(probs.sum()) - 1.0) > _PROB_TOL:
            raise InvalidDistribution(f"probabilities sum to {probs.sum()}, not 1")

    @classmethod
    def from_counts(cls, labels, counts) -> "CategoricalDistribution":
        counts = np.asarray(counts, dtype=np.float64)
        total = counts.sum()
        if total <= 0:
            raise InvalidDistribution("cannot normalize all-zero counts")
        return cls(labels=tuple(labels), probabilities=counts / total)


@dataclass(frozen=True)
class JointTable:
    """Dense empirical joint counts over named categorical axes."""

    axes: tuple[str, ...]
    labels: tuple[tuple[str, ...], ...]
    counts: np.ndarray = field(repr=False)

    def __post_init__(self):
        counts = np.asarray(self.counts, dtype=np.float64)
        object.__setattr__(self, "counts", counts)
        if counts.ndim != len(self.axes):
            raise InvalidDistribution("counts rank must match number of axes")
        if counts.shape != tuple(len(ls) for ls in self.labels):
            raise InvalidDistribution("counts shape must match axis label counts")
        if np.any(counts < 0):
            raise InvalidDistribution("negative count")

    @property
    def total(self) -> float:
        return float(self.counts.sum())

    def axis_index(self, name: str) -> int:
        try:
            return self.axes.index(name)
        except ValueError:
            raise UnknownAxis(f"no axis {name!r} in {self.axes}") from None

    def marginal_counts(self, keep: tuple[str, ...]) -> np.ndarray:
        """Counts summed over every axis not in `keep`, axes in `keep` order."""
        idx = [self.axis_index(a) for a in keep]
        drop = tuple(i for i in range(len(self.axes)) if i not in idx)
        summed = self.counts.sum(axis=drop) if drop else self.counts
        # `sum` preserves the original axis order; transpose into `keep` order
        remaining = [i for i in range(len(self.axes)) if i not in drop]
        perm = [remaining.index(i) for i in idx]
        return summed.transpose(perm) if perm != list(range(len(perm))) else summed

    def marginal_distribution(self, axis: str) -> CategoricalDistribution:
        counts = self.marginal_counts((axis,))
        return CategoricalDistribution.from_counts(
            self.labels[self.axis_index(axis)], counts
        )


def joint_from_instances(instance_set: InstanceSet, axes=("C", "E", "G")) -> JointTable:
    """Empirical joint table over instance attributes.

    Axis names follow the C (class label) / E (etymology) / G (gender)
    convention; each adds one categorical dimension with lexicographically
    sorted labels.
    """
    getters = []
    for axis in axes:
        if axis not in AXIS_ATTRIBUTES:
            raise UnknownAxis(f"no axis {axis!r}, expected one of {sorted(AXIS_ATTRIBUTES)}")
        getters.append(AXIS_ATTRIBUTES[axis])

    axis_labels = []
    for attr in getters:
        axis_labels.append(tuple(sorted({getattr(i, attr) for i in instance_set.instances})))
    index = [{lab: k for k, lab in enumerate(labs)} for labs in axis_labels]

    counts = np.zeros(tuple(len(l) for l in axis_labels), dtype=np.float64)
    for inst in instance_set.instances:
        cell = tuple(ix[getattr(inst, attr)] for ix, attr in zip(index, getters))
        counts[cell] += 1.0
    return JointTable(axes=tuple(axes), labels=tuple(axis_labels), counts=counts)


def _entropy_of_counts(counts: np.ndarray) -> float:
    total = counts.sum()
    if total <= 0:
        raise InvalidDistribution("entropy of an empty table")
    p = counts[counts > 0] / total
    return float(-(p * np.log2(p)).sum())


def entropy(dist: CategoricalDistribution) -> float:
    """H(X) = -sum p log2 p, in bits."""
    p = dist.probabilities
    p = p[p > 0]
    return float(-(p * np.log2(p)).sum())


def conditional_entropy(joint: JointTable, target: str, given=()) -> float:
    """Plug-in H(target | given), in bits. `given` may be empty."""
    given = tuple(given)
    if target in given:
        raise ValueError(f"target {target!r} cannot appear in given {given}")
    joint.axis_index(target)  # raises UnknownAxis early
    h_joint = _entropy_of_counts(joint.marginal_counts((target, *given)))
    if not given:
        return h_joint
    return h_joint - _entropy_of_counts(joint.marginal_counts(given))


def mutual_information(joint: JointTable, a: str, b: str, given=()) -> float:
    """Plug-in MI(a;b | given) = H(a|given) - H(a|b,given), in bits.

    Mathematically nonnegative for plug-in estimates; floating-point
    residue in (-1e-9, 0) is clipped to exactly 0.
    """
    given = tuple(given)
    if a == b:
        raise ValueError("the two axes of a mutual information must differ")
    value = conditional_entropy(joint, a, given) - conditional_entropy(
        joint, a, (b, *given)
    )
    if -_PROB_TOL < value < 0.0:
        return 0.0
    return value


def tripartite_mi(mi_cw: float, mi_cw_given_e: float) -> float:
    """Interaction information MI(C;E;W) = MI(C;W) - MI(C;W|E).

    Both inputs must be computed under identical conditioning. The result
    may legitimately be negative and is reported signed.
    """
    return mi_cw - mi_cw_given_e


@dataclass(frozen=True)
class MeasureValue:
    """A named measure: entropies in bits, NMI dimensionless."""

    name: str
    value: float
    unit: str = "bits"
    normalizer: str | None = None
    upper_bound: bool = False

    def to_json_dict(self) -> dict:
        d = {
            "name": self.name,
            "value": self.value,
            "unit": self.unit,
            "normalizer": self.normalizer,
        }
        if self.upper_bound:
            d["upper_bound"] = True
        return d


def nmi(mi: MeasureValue, normalizer: MeasureValue) -> float:
    """mi / normalizer, the [0,1] interpredictability share for plug-in inputs."""
    if normalizer.value <= 0:
        raise ZeroNormalizer(f"normalizer {normalizer.name} is {normalizer.value}")
    return mi.value / normalizer.value


def class_given_gender(instance_set: InstanceSet) -> dict[str, CategoricalDistribution]:
    """Empirical p(label | gender) over the instance set, one distribution
    per attested gender, labels in label_space order."""
    labels = instance_set.label_space
    label_ix = {lab: k for k, lab in enumerate(labels)}
    counts: dict[str, np.ndarray] = {}
    for inst in instance_set.instances:
        counts.setdefault(inst.gender, np.zeros(len(labels)))[label_ix[inst.label]] += 1
    return {
        g: CategoricalDistribution.from_counts(labels, c) for g, c in sorted(counts.items())
    }


def per_class_pmi(
    instance_set: InstanceSet,
    model_probs: np.ndarray,
    class_marginal: Mapping[str, CategoricalDistribution],
) -> dict[str, float]:
    """Per-class decomposition of the model-based MI estimate.

    For each class c:

        part(c) = (1/M) * sum over instances i with label c of
                  [log2 q(c | w_i, g_i) - log2 p(c | g_i)]

    where q is the model's predicted probability of the true class and
    p(.|g) the empirical class marginal for gender g. Summing part(c)
    over classes reproduces H(C|G) minus the model cross-entropy on the
    same instances.
    """
    probs = np.asarray(model_probs, dtype=np.float64)
    m = len(instance_set.instances)
    if probs.shape != (m, len(instance_set.label_space)):
        raise AlignmentMismatch(
            f"model_probs shape {probs.shape} does not match "
            f"{m} instances x {len(instance_set.label_space)} labels"
        )
    label_ix = {lab: k for k, lab in enumerate(instance_set.label_space)}

    parts = dict.fromkeys(instance_set.label_space, 0.0)
    for i, inst in enumerate(instance_set.instances):
        k = label_ix[inst.label]
        q = probs[i, k]
        p = class_marginal[inst.gender].probabilities[k]
        if q <= 0 or p <= 0:
            raise InvalidDistribution(
                f"zero probability for instance {i} (q={q}, p={p})"
            )
        parts[inst.label] += (np.log2(q) - np.log2(p)) / m
    return parts
