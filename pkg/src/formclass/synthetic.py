"""Synthetic data generators for validation and the bundled fixture.

Three kinds of data live here. The Maltese-shaped fixture is a 300-pair
tagged lexicon with the structural correlations of the real system
(etymology shapes both phonotactics and class choice, gender follows the
final vowel) so the full pipeline can run end to end without the real
corpus. The stochastic closed-vocabulary task has a known true
H(C|W,G), which makes the cross-entropy upper bound testable as an
inequality against ground truth. The last-symbol task is a learnability
control: the class is a deterministic function of the final symbol, so
any competent sequence model must drive accuracy to 1 and cross-entropy
to 0, while a label-shuffled copy must fall back to the majority rate.

Everything is a pure function of its seed.
"""

from __future__ import annotations

import numpy as np

from .lexicon import Instance, InstanceSet, serialize_entries, LexicalEntry

# Seed used to generate the bundled tests/data fixture. Regenerating with
# this seed must reproduce that file byte for byte.
FIXTURE_SEED = 20260819

_ONSETS = list("ptkbdgfvmnrls")
_VOWELS = list("aeiou")
_SEM_CONS = ["b", "d", "k", "l", "m", "n", "q", "r", "s", "t", "x", "ħ", "ż"]

# class -> sampling weight, per etymology; -a is deliberately rare so the
# default pruning threshold of 20 lexemes removes exactly one class
_NON_SEMITIC_CLASSES = (("-i", 0.75), ("-ijiet", 0.25))
_SEMITIC_CLASSES = (
    ("-iet", 0.30), ("-ijiet", 0.22), ("-in", 0.14), ("-a", 0.04),
    ("CVCCV", 0.16), ("CCVVC", 0.14),
)


def _weighted_choice(rng, pairs):
    names = [n for n, _ in pairs]
    weights = np.array([w for _, w in pairs])
    return str(rng.choice(names, p=weights / weights.sum()))


def _romance_stem(rng):
    n_syll = int(rng.integers(2, 4))
    parts = []
    for _ in range(n_syll):
        parts.append(str(rng.choice(_ONSETS)) + str(rng.choice(_VOWELS)))
    final = str(rng.choice(["a", "a", "u", "o"]))
    return "".join(parts)[:-1] + final


def _semitic_stem(rng, shape):
    c = [str(x) for x in rng.choice(_SEM_CONS, size=3, replace=False)]
    v = str(rng.choice(_VOWELS))
    if shape == "CVCC":
        return c[0] + v + c[1] + c[2]
    if shape == "CCVC":
        return c[0] + c[1] + "i" + c[2]
    return c[0] + v + c[1] + str(rng.choice(_VOWELS)) + c[2] + "a"


def _pluralize(singular, label):
    # suffixes replace a stem-final vowel, as in karta -> kartiet
    base = singular[:-1] if singular[-1] in _VOWELS else singular
    if label == "-i":
        return base + "i"
    if label == "-ijiet":
        return base + "ijiet"
    if label == "-iet":
        return base + "iet"
    if label == "-in":
        return base + "in"
    if label == "-a":
        return base + "a"
    if label == "CVCCV":
        # C1C2iC3 -> C1oC2C3a, the kotba pattern
        return singular[0] + "o" + singular[1] + singular[3] + "a"
    if label == "CCVVC":
        # C1vC2C3 -> C1C2ieC3, the dnieb pattern
        return singular[0] + singular[2] + "ie" + singular[3]
    raise ValueError(f"no plural rule for {label!r}")


def maltese_fixture_text(n_pairs: int = 300, seed: int = FIXTURE_SEED) -> str:
    """Deterministic Maltese-shaped TSV with n_pairs (lexeme, plural) rows.

    Roughly 37% of lexemes are non-Semitic. A handful of Semitic lexemes
    take two plurals of different classes, as in the real lexicon.
    """
    rng = np.random.default_rng(seed)
    entries = []
    seen_singulars: set[str] = set()
    seen_pairs: set[tuple] = set()

    def add(singular, gender, etymology, label):
        plural = _pluralize(singular, label)
        concat = "templatic" if label in ("CVCCV", "CCVVC") else "affixal"
        entry = LexicalEntry(singular_form=singular, plural_form=plural,
                             gender=gender, etymology=etymology,
                             allomorph_class=label, concat_type=concat)
        key = (entry.lexeme_id, plural)
        if key in seen_pairs:
            return False
        seen_pairs.add(key)
        entries.append(entry)
        return True

    while len(entries) < n_pairs:
        semitic = rng.random() < 0.63
        if semitic:
            label = _weighted_choice(rng, _SEMITIC_CLASSES)
            shape = {"CVCCV": "CCVC", "CCVVC": "CVCC", "-a": "CVCC"}.get(
                label, "CVCVCa" if rng.random() < 0.5 else "CVCC")
            singular = _semitic_stem(rng, shape)
            etymology = "semitic"
        else:
            label = _weighted_choice(rng, _NON_SEMITIC_CLASSES)
            singular = _romance_stem(rng)
            etymology = "non_semitic"
        if singular in seen_singulars:
            continue
        gender = "f" if singular.endswith("a") else "m"
        if not add(singular, gender, etymology, label):
            continue
        seen_singulars.add(singular)

        # occasional doublet: a second plural from a different class
        if semitic and rng.random() < 0.05 and len(entries) < n_pairs:
            others = [n for n, _ in _SEMITIC_CLASSES
                      if n != label and n not in ("CVCCV", "CCVVC", "-a")]
            add(singular, gender, etymology, str(rng.choice(others)))

    return serialize_entries(entries)


def stochastic_task(n_forms: int = 50, n_classes: int = 8,
                    n_instances: int = 5000, seed: int = 0):
    """Closed-vocabulary classification with known true H(C|W,G).

    Every form is tied to a fixed gender and two candidate classes drawn
    at form creation, emitted with probabilities 0.7/0.3. Because every
    form shares that split, the true conditional entropy is exactly
    H(0.7) = -(0.7 log2 0.7 + 0.3 log2 0.3), independent of the form
    frequencies. Returns (instance_set, true_entropy_bits).
    """
    rng = np.random.default_rng(seed)
    labels = tuple(f"K{i}" for i in range(n_classes))

    forms = []
    seen = set()
    while len(forms) < n_forms:
        length = int(rng.integers(3, 7))
        form = "".join(rng.choice(list("abcdefgh"), size=length))
        if form in seen:
            continue
        seen.add(form)
        first, second = rng.choice(n_classes, size=2, replace=False)
        forms.append((form, str(rng.choice(["f", "m"])),
                      labels[int(first)], labels[int(second)]))

    instances = []
    for _ in range(n_instances):
        form, gender, major, minor = forms[int(rng.integers(n_forms))]
        label = major if rng.random() < 0.7 else minor
        instances.append(Instance(form_symbols=tuple(form), gender=gender,
                                  etymology="semitic", label=label))
    instance_set = InstanceSet(task="allomorph", instances=tuple(instances),
                               label_space=labels, source_hash=f"stochastic-{seed}")
    true_h = float(-(0.7 * np.log2(0.7) + 0.3 * np.log2(0.3)))
    return instance_set, true_h


def last_symbol_task(n_instances: int = 2000, n_classes: int = 8,
                     seed: int = 0) -> InstanceSet:
    """Class is read off the final symbol; everything before it is noise."""
    rng = np.random.default_rng(seed)
    finals = list("efghijkl")[:n_classes]
    labels = tuple(f"K{i}" for i in range(n_classes))
    instances = []
    for _ in range(n_instances):
        body = "".join(rng.choice(list("abcd"), size=int(rng.integers(1, 6))))
        which = int(rng.integers(n_classes))
        instances.append(Instance(
            form_symbols=tuple(body + finals[which]),
            gender=str(rng.choice(["f", "m"])),
            etymology=str(rng.choice(["semitic", "non_semitic"])),
            label=labels[which],
        ))
    return InstanceSet(task="allomorph", instances=tuple(instances),
                       label_space=labels, source_hash=f"last-symbol-{seed}")


def shuffle_labels(instance_set: InstanceSet, seed: int = 0) -> InstanceSet:
    """Random label permutation across instances: the label marginal is
    preserved but every form-label link is broken."""
    rng = np.random.default_rng(seed)
    labels = [inst.label for inst in instance_set.instances]
    order = rng.permutation(len(labels))
    shuffled = tuple(
        Instance(form_symbols=inst.form_symbols, gender=inst.gender,
                 etymology=inst.etymology, label=labels[int(j)])
        for inst, j in zip(instance_set.instances, order)
    )
    return InstanceSet(task=instance_set.task, instances=shuffled,
                       label_space=instance_set.label_space,
                       source_hash=instance_set.source_hash)
