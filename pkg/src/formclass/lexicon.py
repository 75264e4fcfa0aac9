"""Tagged plural lexicon: parsing, validation, pruning and instance building.

Input is a UTF-8 TSV file with a fixed header, one row per
(lexeme, plural form) pair:

    singular	plural	gender	etymology	allomorph	type

gender is f/m, etymology is semitic/non_semitic, allomorph is one of the
labels in the built-in inventory, type is affixal/templatic and must
agree with the allomorph's static type. Lexemes have no explicit id
column; a lexeme is identified by its (singular, gender, etymology)
triple, which is what makes per-lexeme deduplication possible when a
noun takes several plurals.

Forms are segmented as Unicode codepoints (NFC-normalized), so the
digraphs "għ" and "ie" count as two symbols each.
"""

from __future__ import annotations

import csv
import hashlib
import io
import unicodedata
from collections import Counter
from dataclasses import dataclass

from . import inventory
from .errors import (
    DuplicatePair,
    EmptyForm,
    MalformedRow,
    MissingOriginAnnotation,
    UnknownLabel,
)

HEADER = ("singular", "plural", "gender", "etymology", "allomorph", "type")

TASK_ALLOMORPH = "allomorph"
TASK_TYPE = "type"
TASK_ETYMOLOGY = "etymology_target"
TASKS = (TASK_ALLOMORPH, TASK_TYPE, TASK_ETYMOLOGY)


def segment(form: str) -> tuple[str, ...]:
    """Split a form into grapheme symbols (NFC codepoints)."""
    return tuple(unicodedata.normalize("NFC", form))


@dataclass(frozen=True)
class LexicalEntry:
    singular_form: str
    plural_form: str
    gender: str
    etymology: str
    allomorph_class: str
    concat_type: str

    @property
    def lexeme_id(self) -> tuple[str, str, str]:
        return (self.singular_form, self.gender, self.etymology)


@dataclass(frozen=True)
class Lexicon:
    entries: tuple[LexicalEntry, ...]
    alphabet: frozenset[str]
    content_hash: str

    def __len__(self):
        return len(self.entries)

    def lexeme_ids(self) -> list[tuple[str, str, str]]:
        """Distinct lexeme ids in first-occurrence order."""
        seen = dict.fromkeys(e.lexeme_id for e in self.entries)
        return list(seen)


@dataclass(frozen=True)
class Instance:
    form_symbols: tuple[str, ...]
    gender: str
    etymology: str
    label: str


@dataclass(frozen=True)
class InstanceSet:
    task: str
    instances: tuple[Instance, ...]
    label_space: tuple[str, ...]
    source_hash: str

    def __len__(self):
        return len(self.instances)


def _make_lexicon(entries) -> Lexicon:
    entries = tuple(entries)
    alphabet = frozenset(sym for e in entries for sym in segment(e.singular_form))
    text = serialize_entries(entries)
    digest = hashlib.sha256(text.encode("utf-8")).hexdigest()
    return Lexicon(entries=entries, alphabet=alphabet, content_hash=digest)


def _canonical_gender(value, row):
    try:
        return inventory.GENDER_ALIASES[value.strip().lower()]
    except KeyError:
        raise UnknownLabel(f"unknown gender {value!r}", row=row) from None


def _canonical_etymology(value, row):
    try:
        return inventory.ETYMOLOGY_ALIASES[value.strip().lower()]
    except KeyError:
        raise UnknownLabel(f"unknown etymology {value!r}", row=row) from None


def parse_lexicon(source) -> Lexicon:
    """Parse and validate a TSV lexicon.

    source may be bytes, a str, or a file object (text or binary).
    Row numbers in error messages are 1-based and include the header.
    """
    if isinstance(source, bytes):
        text = source.decode("utf-8")
    elif isinstance(source, str):
        text = source
    else:
        data = source.read()
        text = data.decode("utf-8") if isinstance(data, bytes) else data

    reader = csv.reader(io.StringIO(text), delimiter="\t", quoting=csv.QUOTE_NONE)
    try:
        header = next(reader)
    except StopIteration:
        raise MalformedRow("empty input, header row required", row=1) from None
    if tuple(h.strip() for h in header) != HEADER:
        raise MalformedRow(
            f"header must be {list(HEADER)}, got {header}", row=1
        )

    entries = []
    seen_pairs = set()
    for row_no, fields in enumerate(reader, start=2):
        if not fields:
            continue  # skip blank lines
        if len(fields) != len(HEADER):
            raise MalformedRow(
                f"expected {len(HEADER)} columns, got {len(fields)}", row=row_no
            )
        singular, plural, gender, etymology, allomorph, concat_type = (
            f.strip() for f in fields
        )
        if not singular or not plural:
            raise EmptyForm("singular and plural forms must be non-empty", row=row_no)
        singular = unicodedata.normalize("NFC", singular)
        plural = unicodedata.normalize("NFC", plural)

        gender = _canonical_gender(gender, row_no)
        etymology = _canonical_etymology(etymology, row_no)
        if allomorph not in inventory.ALLOMORPH_INVENTORY:
            raise UnknownLabel(f"unknown allomorph {allomorph!r}", row=row_no)
        if concat_type not in inventory.CONCAT_TYPES:
            raise UnknownLabel(f"unknown type {concat_type!r}", row=row_no)
        expected_type = inventory.concat_type_of(allomorph)
        if concat_type != expected_type:
            raise UnknownLabel(
                f"allomorph {allomorph!r} is {expected_type}, row says {concat_type!r}",
                row=row_no,
            )

        entry = LexicalEntry(
            singular_form=singular,
            plural_form=plural,
            gender=gender,
            etymology=etymology,
            allomorph_class=allomorph,
            concat_type=concat_type,
        )
        pair = (entry.lexeme_id, plural)
        if pair in seen_pairs:
            raise DuplicatePair(
                f"duplicate (lexeme, plural) pair: {singular!r} -> {plural!r}",
                row=row_no,
            )
        seen_pairs.add(pair)
        entries.append(entry)

    return _make_lexicon(entries)


def serialize_entries(entries) -> str:
    """Canonical TSV text for a sequence of entries (round-trips via parse)."""
    out = io.StringIO()
    writer = csv.writer(out, delimiter="\t", lineterminator="\n", quoting=csv.QUOTE_NONE)
    writer.writerow(HEADER)
    for e in entries:
        writer.writerow(
            [e.singular_form, e.plural_form, e.gender, e.etymology,
             e.allomorph_class, e.concat_type]
        )
    return out.getvalue()


def serialize_lexicon(lexicon: Lexicon) -> str:
    return serialize_entries(lexicon.entries)


def class_lexeme_counts(lexicon: Lexicon) -> dict[str, int]:
    """Distinct-lexeme count per allomorph class."""
    lexemes_by_class: dict[str, set] = {}
    for e in lexicon.entries:
        lexemes_by_class.setdefault(e.allomorph_class, set()).add(e.lexeme_id)
    return {label: len(ids) for label, ids in lexemes_by_class.items()}


def prune_classes(lexicon: Lexicon, min_count: int) -> Lexicon:
    """Drop every allomorph class attested by fewer than min_count lexemes."""
    if min_count < 1:
        raise ValueError("min_count must be >= 1")
    counts = class_lexeme_counts(lexicon)
    kept = [e for e in lexicon.entries if counts[e.allomorph_class] >= min_count]
    return _make_lexicon(kept)


def build_instances(lexicon: Lexicon, task: str) -> InstanceSet:
    """Expand the lexicon into classification instances for one task.

    allomorph: one instance per (lexeme, plural) pair, labelled with the
    allomorph class, so a noun with three plurals contributes three
    instances. type: one instance per (lexeme, concatenative type), so
    the same noun contributes at most two. etymology_target: one
    instance per lexeme, labelled with its etymology.
    """
    if task not in TASKS:
        raise ValueError(f"unknown task {task!r}, expected one of {TASKS}")

    instances = []
    if task == TASK_ALLOMORPH:
        for e in lexicon.entries:
            instances.append(Instance(
                form_symbols=segment(e.singular_form),
                gender=e.gender,
                etymology=e.etymology,
                label=e.allomorph_class,
            ))
    elif task == TASK_TYPE:
        seen = set()
        for e in lexicon.entries:
            key = (e.lexeme_id, e.concat_type)
            if key in seen:
                continue
            seen.add(key)
            instances.append(Instance(
                form_symbols=segment(e.singular_form),
                gender=e.gender,
                etymology=e.etymology,
                label=e.concat_type,
            ))
    else:
        seen = set()
        for e in lexicon.entries:
            if e.lexeme_id in seen:
                continue
            seen.add(e.lexeme_id)
            instances.append(Instance(
                form_symbols=segment(e.singular_form),
                gender=e.gender,
                etymology=e.etymology,
                label=e.etymology,
            ))

    label_space = tuple(sorted({i.label for i in instances}))
    return InstanceSet(
        task=task,
        instances=tuple(instances),
        label_space=label_space,
        source_hash=lexicon.content_hash,
    )


@dataclass(frozen=True)
class DistributionTable:
    """Counts of (lexeme, plural) pairs by lexeme etymology and marker category.

    Rows are marker categories (non-Semitic affix, Semitic affix, Semitic
    template), columns are lexeme etymologies. Percentages are shares of
    the grand total.
    """

    rows: tuple[str, ...]
    columns: tuple[str, ...]
    counts: tuple[tuple[int, ...], ...]

    @property
    def grand_total(self) -> int:
        return sum(sum(r) for r in self.counts)

    def row_totals(self) -> tuple[int, ...]:
        return tuple(sum(r) for r in self.counts)

    def column_totals(self) -> tuple[int, ...]:
        return tuple(sum(col) for col in zip(*self.counts))

    def row_percentages(self) -> tuple[float, ...]:
        total = self.grand_total
        return tuple(100.0 * t / total if total else 0.0 for t in self.row_totals())

    def column_percentages(self) -> tuple[float, ...]:
        total = self.grand_total
        return tuple(100.0 * t / total if total else 0.0 for t in self.column_totals())

    def to_json_dict(self) -> dict:
        return {
            "rows": list(self.rows),
            "columns": list(self.columns),
            "counts": [list(r) for r in self.counts],
            "row_totals": list(self.row_totals()),
            "column_totals": list(self.column_totals()),
            "row_percentages": list(self.row_percentages()),
            "column_percentages": list(self.column_percentages()),
            "grand_total": self.grand_total,
        }

    def to_csv(self) -> str:
        out = io.StringIO()
        writer = csv.writer(out, lineterminator="\n")
        writer.writerow(["category", *self.columns, "total", "pct"])
        for name, row, total, pct in zip(
            self.rows, self.counts, self.row_totals(), self.row_percentages()
        ):
            writer.writerow([name, *row, total, f"{pct:.6g}"])
        writer.writerow(["total", *self.column_totals(), self.grand_total, "100"])
        writer.writerow(
            ["pct", *(f"{p:.6g}" for p in self.column_percentages()), "100", ""]
        )
        return out.getvalue()


def distribution_table(lexicon: Lexicon) -> DistributionTable:
    """Cross-tabulate (lexeme, plural) pairs: marker category x lexeme etymology."""
    cells = Counter()
    for e in lexicon.entries:
        try:
            category = inventory.origin_category_of(e.allomorph_class)
        except KeyError:
            raise MissingOriginAnnotation(
                f"no origin annotation for allomorph {e.allomorph_class!r}"
            ) from None
        cells[(category, e.etymology)] += 1

    columns = inventory.ETYMOLOGIES
    counts = tuple(
        tuple(cells.get((row, col), 0) for col in columns)
        for row in inventory.ORIGIN_CATEGORIES
    )
    return DistributionTable(
        rows=inventory.ORIGIN_CATEGORIES, columns=columns, counts=counts
    )


def summarize(lexicon: Lexicon) -> dict:
    """Schema report used by the validate command: sizes, inventories, both
    pre- and post-pruning figures (the pruned counts use min_count=20)."""
    pruned = prune_classes(lexicon, 20)
    return {
        "pairs": len(lexicon),
        "lexemes": len(lexicon.lexeme_ids()),
        "alphabet_size": len(lexicon.alphabet),
        "alphabet": sorted(lexicon.alphabet),
        "class_lexeme_counts": dict(sorted(class_lexeme_counts(lexicon).items())),
        "classes": len(class_lexeme_counts(lexicon)),
        "pairs_after_pruning_20": len(pruned),
        "classes_after_pruning_20": len(class_lexeme_counts(pruned)),
        "content_hash": lexicon.content_hash,
    }
