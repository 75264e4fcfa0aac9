"""Static inventory of Maltese nominal plural allomorph labels.

Every allomorph label the dataset schema accepts is listed here together
with its concatenative type (affixal vs templatic) and the origin of the
marker itself (semitic vs non-semitic). The origin of the marker is a
property of the allomorph, independent of the etymology of any lexeme
carrying it: the suffixes -i (Romance) and -s (English) are the two
non-Semitic plural markers of Maltese, all remaining suffixes and all
CV templates are Semitic.

Labels are matched exactly (UTF-8, case-sensitive).
"""

AFFIXAL = "affixal"
TEMPLATIC = "templatic"

SEMITIC = "semitic"
NON_SEMITIC = "non_semitic"

GENDERS = ("f", "m")
ETYMOLOGIES = (NON_SEMITIC, SEMITIC)
CONCAT_TYPES = (AFFIXAL, TEMPLATIC)

# Sound-plural suffixes. Origin: marker origin, not lexeme etymology.
SOUND_ALLOMORPHS = {
    "-i": NON_SEMITIC,
    "-ijiet": SEMITIC,
    "-iet": SEMITIC,
    "-a": SEMITIC,
    "-in": SEMITIC,
    "-s": NON_SEMITIC,
    "-at": SEMITIC,
    "-ien": SEMITIC,
    "-n": SEMITIC,
    "-jin": SEMITIC,
    "-ejn": SEMITIC,
    "-ajn": SEMITIC,
    "-an": SEMITIC,
}

# Broken-plural CV templates, all of Semitic origin.
BROKEN_ALLOMORPHS = (
    "CCVVCVC",
    "(C)CVCVC",
    "CCVVC",
    "CCVjjVC",
    "CCVVCV",
    "VCCCV",
    "CVCCV",
    "(għ)VCVC",
    "VCVC",
    "CVCCVVC(V)",
    "(għ)VCCV",
)

# label -> (concat_type, marker_origin)
ALLOMORPH_INVENTORY = {
    **{label: (AFFIXAL, origin) for label, origin in SOUND_ALLOMORPHS.items()},
    **{label: (TEMPLATIC, SEMITIC) for label in BROKEN_ALLOMORPHS},
}

# Cross-tabulation categories for the allomorph-by-etymology distribution.
NON_SEMITIC_AFFIX = "non_semitic_affix"
SEMITIC_AFFIX = "semitic_affix"
SEMITIC_TEMPLATE = "semitic_template"
ORIGIN_CATEGORIES = (NON_SEMITIC_AFFIX, SEMITIC_AFFIX, SEMITIC_TEMPLATE)

# Accepted input spellings, canonicalized at parse time.
GENDER_ALIASES = {
    "f": "f",
    "m": "m",
    "feminine": "f",
    "masculine": "m",
}

ETYMOLOGY_ALIASES = {
    "semitic": SEMITIC,
    "non_semitic": NON_SEMITIC,
    "non-semitic": NON_SEMITIC,
    "nonsemitic": NON_SEMITIC,
}


def concat_type_of(allomorph):
    """Concatenative type statically associated with an allomorph label."""
    return ALLOMORPH_INVENTORY[allomorph][0]


def origin_category_of(allomorph):
    """Distribution-table category of an allomorph label.

    Returns one of ORIGIN_CATEGORIES; raises KeyError for labels outside
    the inventory (callers translate to MissingOriginAnnotation).
    """
    concat_type, origin = ALLOMORPH_INVENTORY[allomorph]
    if concat_type == TEMPLATIC:
        return SEMITIC_TEMPLATE
    return SEMITIC_AFFIX if origin == SEMITIC else NON_SEMITIC_AFFIX
