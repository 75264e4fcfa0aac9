from collections import Counter
from pathlib import Path

import numpy as np

from formclass.infotheory import conditional_entropy, joint_from_instances, mutual_information
from formclass.lexicon import build_instances, parse_lexicon, prune_classes, summarize
from formclass.synthetic import (
    FIXTURE_SEED,
    last_symbol_task,
    maltese_fixture_text,
    shuffle_labels,
    stochastic_task,
)

FIXTURE_PATH = Path(__file__).parent / "data" / "maltese_synthetic_300.tsv"

# content hashes of the bundled fixture, before and after prune(20)
FIXTURE_HASH = "cdd443d4c26af6a3d44529355742dc61ecbded7a3e94c0a470f0c39167180a47"
PRUNED_HASH = "58de99c87368b7de4b4441f9c4e8993cda8cc3089bb5929bcc31845a65259785"


def test_fixture_regenerates_bitwise():
    # the bundled file must be exactly what the documented seed produces
    assert maltese_fixture_text(seed=FIXTURE_SEED) == FIXTURE_PATH.read_text(
        encoding="utf-8")


def test_fixture_composition():
    lex = parse_lexicon(FIXTURE_PATH.read_text(encoding="utf-8"))
    assert lex.content_hash == FIXTURE_HASH
    s = summarize(lex)
    assert s["pairs"] == 300
    assert s["lexemes"] == 291
    assert s["class_lexeme_counts"] == {
        "-a": 5, "-i": 68, "-iet": 60, "-ijiet": 62, "-in": 37,
        "CCVVC": 27, "CVCCV": 41,
    }
    assert s["pairs_after_pruning_20"] == 295
    assert s["classes_after_pruning_20"] == 6
    pruned = prune_classes(lex, 20)
    assert pruned.content_hash == PRUNED_HASH


def test_fixture_plugin_measures_match_frozen_oracle_values():
    # frozen via the independent double-sum oracle on the pruned fixture
    lex = prune_classes(parse_lexicon(FIXTURE_PATH.read_text(encoding="utf-8")), 20)

    allo = build_instances(lex, "allomorph")
    assert len(allo.instances) == 295
    joint = joint_from_instances(allo)
    np.testing.assert_allclose(conditional_entropy(joint, "C", ("G",)),
                               2.351223844944132, atol=1e-12)
    np.testing.assert_allclose(conditional_entropy(joint, "C", ("E", "G")),
                               1.6802137182393877, atol=1e-12)
    np.testing.assert_allclose(mutual_information(joint, "C", "E", ("G",)),
                               0.6710101267047444, atol=1e-12)

    typ = build_instances(lex, "type")
    assert len(typ.instances) == 289
    joint = joint_from_instances(typ)
    np.testing.assert_allclose(conditional_entropy(joint, "C", ("G",)),
                               0.6229930257628595, atol=1e-12)
    np.testing.assert_allclose(mutual_information(joint, "C", "E", ("G",)),
                               0.12903895598052206, atol=1e-12)

    ety = build_instances(lex, "etymology_target")
    assert len(ety.instances) == 288
    joint = joint_from_instances(ety, axes=("C", "G"))
    np.testing.assert_allclose(conditional_entropy(joint, "C", ("G",)),
                               0.877234244844115, atol=1e-12)


def test_stochastic_task_structure():
    inst, true_h = stochastic_task(n_forms=20, n_instances=500, seed=5)
    np.testing.assert_allclose(
        true_h, -(0.7 * np.log2(0.7) + 0.3 * np.log2(0.3)), atol=1e-15)
    forms = {i.form_symbols for i in inst.instances}
    assert len(forms) <= 20
    # gender is a function of the form in the closed vocabulary
    by_form = {}
    for i in inst.instances:
        by_form.setdefault(i.form_symbols, set()).add(i.gender)
    assert all(len(g) == 1 for g in by_form.values())
    # every form emits exactly two labels
    labels_by_form = {}
    for i in inst.instances:
        labels_by_form.setdefault(i.form_symbols, Counter())[i.label] += 1
    assert all(len(c) <= 2 for c in labels_by_form.values())

    again, _ = stochastic_task(n_forms=20, n_instances=500, seed=5)
    assert again.instances == inst.instances


def test_last_symbol_task_is_deterministic_function():
    inst = last_symbol_task(n_instances=300, seed=2)
    assert len(inst.instances) == 300
    assert len(inst.label_space) == 8
    mapping = {}
    for i in inst.instances:
        final = i.form_symbols[-1]
        assert mapping.setdefault(final, i.label) == i.label
    assert len(mapping) == 8
    assert last_symbol_task(n_instances=300, seed=2).instances == inst.instances


def test_shuffle_labels_breaks_links_keeps_marginal():
    inst = last_symbol_task(n_instances=300, seed=3)
    shuffled = shuffle_labels(inst, seed=4)
    assert Counter(i.label for i in shuffled.instances) == Counter(
        i.label for i in inst.instances)
    assert [i.form_symbols for i in shuffled.instances] == [
        i.form_symbols for i in inst.instances]
    moved = sum(a.label != b.label
                for a, b in zip(inst.instances, shuffled.instances))
    assert moved > 200
    assert shuffle_labels(inst, seed=4).instances == shuffled.instances
