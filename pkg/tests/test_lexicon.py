import io
import unicodedata

import pytest

from formclass import errors, lexicon
from formclass.lexicon import (
    build_instances,
    class_lexeme_counts,
    distribution_table,
    parse_lexicon,
    prune_classes,
    segment,
    serialize_lexicon,
    summarize,
)


def test_parse_counts(sample_tsv):
    lex = parse_lexicon(sample_tsv)
    assert len(lex) == 14
    assert len(lex.lexeme_ids()) == 11


def test_parse_accepts_bytes_and_files(sample_tsv):
    from_str = parse_lexicon(sample_tsv)
    from_bytes = parse_lexicon(sample_tsv.encode("utf-8"))
    from_file = parse_lexicon(io.StringIO(sample_tsv))
    assert from_str.content_hash == from_bytes.content_hash == from_file.content_hash


def test_segmentation_splits_digraphs():
    # għ and ie are two codepoints each, so no special casing applies
    assert segment("għarus") == ("g", "ħ", "a", "r", "u", "s")
    assert segment("ktieb") == ("k", "t", "i", "e", "b")


def test_parse_normalizes_to_nfc(sample_tsv):
    decomposed = unicodedata.normalize("NFD", "żarbun")
    assert decomposed != "żarbun"
    text = sample_tsv + f"{decomposed}\tżraben\tm\tsemitic\t(C)CVCVC\ttemplatic\n"
    lex = parse_lexicon(text)
    assert lex.entries[-1].singular_form == "żarbun"
    assert "ż" in lex.alphabet and len("żarbun") == 6


def test_label_aliases(sample_tsv):
    text = sample_tsv.replace("\tf\t", "\tFeminine\t").replace(
        "\tsemitic\t", "\tSemitic\t"
    ).replace("\tnon_semitic\t", "\tnon-semitic\t")
    lex = parse_lexicon(text)
    assert {e.gender for e in lex.entries} == {"f", "m"}
    assert {e.etymology for e in lex.entries} == {"semitic", "non_semitic"}


def test_round_trip_is_stable(sample_tsv):
    lex = parse_lexicon(sample_tsv)
    text = serialize_lexicon(lex)
    again = parse_lexicon(text)
    assert again.entries == lex.entries
    assert again.content_hash == lex.content_hash
    assert serialize_lexicon(again) == text


def test_blank_lines_skipped(sample_tsv):
    padded = sample_tsv.replace(
        "omm\tommijiet", "\nomm\tommijiet"
    ) + "\n\n"
    assert len(parse_lexicon(padded)) == 14


@pytest.mark.parametrize(
    "mutation, exc",
    [
        (lambda t: t.replace("singular\tplural", "plural\tsingular"), errors.MalformedRow),
        (lambda t: t.replace("omm\tommijiet\tf", "omm\tommijiet\tf\textra"), errors.MalformedRow),
        (lambda t: t.replace("omm\tommijiet\tf", "omm\tommijiet\tneuter"), errors.UnknownLabel),
        (lambda t: t.replace("\tsemitic\t-ijiet", "\tgreek\t-ijiet"), errors.UnknownLabel),
        (lambda t: t.replace("-ijiet", "-xyz", 1), errors.UnknownLabel),
        (lambda t: t.replace("CVCCV\ttemplatic", "CVCCV\taffixal"), errors.UnknownLabel),
        (lambda t: t.replace("omm\tommijiet", "\tommijiet"), errors.EmptyForm),
        (lambda t: t + "omm\tommijiet\tf\tsemitic\t-ijiet\taffixal\n", errors.DuplicatePair),
    ],
)
def test_parse_rejects_bad_rows(sample_tsv, mutation, exc):
    with pytest.raises(exc):
        parse_lexicon(mutation(sample_tsv))


def test_errors_carry_row_numbers(sample_tsv):
    bad = sample_tsv + "qattus\t\tm\tsemitic\t-i\taffixal\n"
    with pytest.raises(errors.EmptyForm) as info:
        parse_lexicon(bad)
    assert info.value.row == 16
    assert "row 16" in str(info.value)


def test_class_lexeme_counts(sample_tsv):
    counts = class_lexeme_counts(parse_lexicon(sample_tsv))
    assert counts["-ijiet"] == 3
    assert counts["-iet"] == 2
    assert counts["CCVjjVC"] == 2
    assert counts["CVCCV"] == 1


def test_prune_classes(sample_tsv):
    lex = parse_lexicon(sample_tsv)
    pruned = prune_classes(lex, 2)
    assert len(pruned) == 7
    assert set(class_lexeme_counts(pruned)) == {"-ijiet", "-iet", "CCVjjVC"}
    # pruning recomputes the hash over the surviving rows
    assert pruned.content_hash != lex.content_hash
    with pytest.raises(ValueError):
        prune_classes(lex, 0)


def test_instance_cardinalities_per_task(sample_tsv):
    lex = parse_lexicon(sample_tsv)
    assert len(build_instances(lex, "allomorph")) == 14
    assert len(build_instances(lex, "type")) == 13
    assert len(build_instances(lex, "etymology_target")) == 11


def test_instance_labels_and_spaces(sample_tsv):
    lex = parse_lexicon(sample_tsv)
    allo = build_instances(lex, "allomorph")
    assert allo.label_space == tuple(sorted(class_lexeme_counts(lex)))
    typ = build_instances(lex, "type")
    assert typ.label_space == ("affixal", "templatic")
    ety = build_instances(lex, "etymology_target")
    assert ety.label_space == ("non_semitic", "semitic")
    assert ety.source_hash == lex.content_hash
    with pytest.raises(ValueError):
        build_instances(lex, "plural")


def test_instances_use_singular_form(sample_tsv):
    lex = parse_lexicon(sample_tsv)
    allo = build_instances(lex, "allomorph")
    forms = {"".join(i.form_symbols) for i in allo.instances}
    assert "ktieb" in forms
    assert "kotba" not in forms


def test_distribution_table(sample_tsv):
    table = distribution_table(parse_lexicon(sample_tsv))
    assert table.rows == ("non_semitic_affix", "semitic_affix", "semitic_template")
    assert table.columns == ("non_semitic", "semitic")
    assert table.counts == ((2, 0), (0, 8), (0, 4))
    assert table.grand_total == 14
    assert table.row_totals() == (2, 8, 4)
    csv_text = table.to_csv()
    assert csv_text.splitlines()[0] == "category,non_semitic,semitic,total,pct"


def test_summarize(sample_tsv):
    lex = parse_lexicon(sample_tsv)
    summary = summarize(lex)
    assert summary["pairs"] == 14
    assert summary["lexemes"] == 11
    assert summary["classes"] == 10
    assert summary["pairs_after_pruning_20"] == 0
    assert summary["content_hash"] == lex.content_hash
    assert "ħ" in summary["alphabet"]


def test_hash_tracks_content(sample_tsv):
    lex = parse_lexicon(sample_tsv)
    other = parse_lexicon(sample_tsv.replace("ktieb\tkotba", "ktieb\tkotob"))
    assert lex.content_hash != other.content_hash


def test_tasks_constant():
    assert lexicon.TASKS == ("allomorph", "type", "etymology_target")
