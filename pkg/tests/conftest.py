import pytest

from formclass.lexicon import Instance, InstanceSet

# 14 (lexeme, plural) pairs over 11 lexemes; xmara and denb each take two
# plurals of different concatenative types, art takes two of the same type.
SAMPLE_TSV = """singular\tplural\tgender\tetymology\tallomorph\ttype
ktieb\tkotba\tm\tsemitic\tCVCCV\ttemplatic
omm\tommijiet\tf\tsemitic\t-ijiet\taffixal
karozza\tkarozzi\tf\tnon_semitic\t-i\taffixal
kompjuter\tkompjuters\tm\tnon_semitic\t-s\taffixal
bieb\tbibien\tm\tsemitic\t-ien\taffixal
widna\twidnejn\tf\tsemitic\t-ejn\taffixal
sena\tsnin\tf\tsemitic\t-in\taffixal
xmara\txmajjar\tf\tsemitic\tCCVjjVC\ttemplatic
xmara\txmariet\tf\tsemitic\t-iet\taffixal
denb\tdnieb\tm\tsemitic\tCCVVC\ttemplatic
denb\tdenbijiet\tm\tsemitic\t-ijiet\taffixal
art\tartijiet\tf\tsemitic\t-ijiet\taffixal
art\tartiet\tf\tsemitic\t-iet\taffixal
għarus\tgħarajjes\tm\tsemitic\tCCVjjVC\ttemplatic
"""


@pytest.fixture
def sample_tsv():
    return SAMPLE_TSV


def make_instance_set(rows, task="allomorph", source_hash="test"):
    """rows: (form, gender, etymology, label) tuples."""
    instances = tuple(
        Instance(form_symbols=tuple(form), gender=g, etymology=e, label=lab)
        for form, g, e, lab in rows
    )
    label_space = tuple(sorted({i.label for i in instances}))
    return InstanceSet(
        task=task, instances=instances, label_space=label_space,
        source_hash=source_hash,
    )


def random_instance_set(rng, n=40, n_labels=4, alphabet="abcd", task="allomorph"):
    labels = [f"L{i}" for i in range(n_labels)]
    rows = []
    for _ in range(n):
        length = int(rng.integers(1, 6))
        form = "".join(rng.choice(list(alphabet), size=length))
        rows.append((
            form,
            str(rng.choice(["f", "m"])),
            str(rng.choice(["semitic", "non_semitic"])),
            str(rng.choice(labels)),
        ))
    return make_instance_set(rows, task=task)


def random_probability_rows(rng, m, k):
    """(m, k) matrix with strictly positive rows summing to 1."""
    q = rng.random((m, k)) + 1e-3
    return q / q.sum(axis=1, keepdims=True)
