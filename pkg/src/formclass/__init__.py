"""Quantifying how word form and etymology predict plural class.

The package has three layers: a tagged-lexicon layer (parsing, pruning,
instance building), a measure layer (plug-in entropies and mutual
information over finite systems, plus model-based upper bounds), and an
experiment layer (a character-level recurrent classifier trained from
scratch, cross-validated, and assembled into reports).
"""

from .errors import (
    AlignmentMismatch,
    DuplicatePair,
    EmptyForm,
    FormClassError,
    InconsistentProvenance,
    InvalidDistribution,
    LexiconError,
    MalformedRow,
    MissingOriginAnnotation,
    NonFiniteLoss,
    ShapeMismatch,
    TooFewInstances,
    UnknownAxis,
    UnknownLabel,
    UnsupportedFormat,
    ZeroNormalizer,
)
from .infotheory import (
    CategoricalDistribution,
    JointTable,
    MeasureValue,
    class_given_gender,
    conditional_entropy,
    entropy,
    joint_from_instances,
    mutual_information,
    nmi,
    per_class_pmi,
    tripartite_mi,
)
from .lexicon import (
    Instance,
    InstanceSet,
    LexicalEntry,
    Lexicon,
    build_instances,
    class_lexeme_counts,
    distribution_table,
    parse_lexicon,
    prune_classes,
    segment,
    serialize_lexicon,
    summarize,
)
from .neural import (
    ClassifierModel,
    ModelConfig,
    Vocabulary,
    encode_dataset,
    gradient_check,
    train_model,
)
from .experiment import (
    EvalResult,
    FoldPlan,
    SearchSpace,
    estimate_upper_bound,
    majority_baseline,
    make_folds,
    run_cv,
    search,
)
from .report import (
    MeasureReport,
    assemble,
    compute_plugin_measures,
    cross_task_violations,
    emit,
    ordering_violations,
    submodularity_violation,
)
from .synthetic import (
    last_symbol_task,
    maltese_fixture_text,
    shuffle_labels,
    stochastic_task,
)

__version__ = "0.1.0"
