"""Assembly of plug-in and model-based measures into result tables.

The report answers four questions about a class system C (plural
allomorph or concatenative type) given gender G: how much form W tells
you, how much etymology E tells you, how much of the form's information
is shared with etymology, and how recoverable E itself is from form.
All four are normalized against H(C|G) (resp. H(E|G)) so tasks of
different inherent difficulty can sit in one table:

    NMI(C;W|G)   = [H(C|G) - CE(C|W,G)] / H(C|G)
    NMI(C;E|G)   = MI(C;E|G) / H(C|G)
    NMI(C;E;W|G) = NMI(C;W|G) - [H(C|E,G) - CE(C|W,E,G)] / H(C|G)
    NMI(E;W|G)   = [H(E|G) - CE(E|W,G)] / H(E|G)

Raw mutual informations in bits are stored alongside; every NMI is the
stored raw value divided by the stored normalizer, nothing is clipped.
Cross-entropies are upper bounds, so the model-based MI values are lower
bounds and the interaction term inherits slack from both.
"""

from __future__ import annotations

import csv
import io
import json
from dataclasses import dataclass, field, fields

from .errors import InconsistentProvenance, UnsupportedFormat
from .experiment import EvalResult, config_as_dict, majority_baseline
from .infotheory import (
    MeasureValue,
    class_given_gender,
    conditional_entropy,
    joint_from_instances,
    mutual_information,
    per_class_pmi,
)
from .lexicon import TASK_ETYMOLOGY, InstanceSet

FORMATS = ("json", "csv", "text-table")


@dataclass(frozen=True)
class PluginMeasures:
    """Plug-in entropies of one class task population plus the per-lexeme
    etymology population, all in bits."""

    task: str
    source_hash: str
    class_instances: InstanceSet = field(repr=False, compare=False)
    etymology_instances: InstanceSet = field(repr=False, compare=False)
    entropy_C: float
    entropy_C_given_G: float
    entropy_C_given_EG: float
    mi_CE_G: float
    entropy_E_given_G: float


def compute_plugin_measures(
    class_instances: InstanceSet, etymology_instances: InstanceSet
) -> PluginMeasures:
    if etymology_instances.task != TASK_ETYMOLOGY:
        raise InconsistentProvenance(
            f"expected an etymology_target instance set, got {etymology_instances.task!r}"
        )
    if class_instances.source_hash != etymology_instances.source_hash:
        raise InconsistentProvenance("instance sets come from different datasets")

    joint = joint_from_instances(class_instances, axes=("C", "E", "G"))
    ety_joint = joint_from_instances(etymology_instances, axes=("C", "G"))
    return PluginMeasures(
        task=class_instances.task,
        source_hash=class_instances.source_hash,
        class_instances=class_instances,
        etymology_instances=etymology_instances,
        entropy_C=conditional_entropy(joint, "C"),
        entropy_C_given_G=conditional_entropy(joint, "C", ("G",)),
        entropy_C_given_EG=conditional_entropy(joint, "C", ("E", "G")),
        mi_CE_G=mutual_information(joint, "C", "E", ("G",)),
        # the etymology task's label axis is the etymology itself
        entropy_E_given_G=conditional_entropy(ety_joint, "C", ("G",)),
    )


@dataclass(frozen=True)
class MeasureReport:
    task: str
    dataset_hash: str
    label_space: tuple[str, ...]
    genders: tuple[str, ...]
    n_class_instances: int
    n_etymology_instances: int

    entropy_C: float
    entropy_C_given_G: float
    entropy_C_given_EG: float
    entropy_E_given_G: float
    ce_CW_G: float
    ce_CWE_G: float
    ce_EW_G: float

    # raw mutual information estimates, bits, signed
    mi_CW_G: float
    mi_CE_G: float
    mi_CW_given_EG: float
    mi_CEW_G: float
    mi_EW_G: float

    nmi_CW_G: float
    nmi_CE_G: float
    nmi_CEW_G: float
    nmi_EW_G: float

    accuracies: dict[str, float]
    baselines: dict[str, float]
    confusion: tuple[tuple[int, ...], ...]
    pmi_per_class: dict[str, float]
    class_counts: dict[str, int]
    provenance: dict

    def measures(self) -> list[MeasureValue]:
        h = "H(C|G)"
        he = "H(E|G)"
        return [
            MeasureValue("H(C)", self.entropy_C),
            MeasureValue("H(C|G)", self.entropy_C_given_G),
            MeasureValue("H(C|E,G)", self.entropy_C_given_EG),
            MeasureValue("H(E|G)", self.entropy_E_given_G),
            MeasureValue("CE(C|W,G)", self.ce_CW_G, upper_bound=True),
            MeasureValue("CE(C|W,E,G)", self.ce_CWE_G, upper_bound=True),
            MeasureValue("CE(E|W,G)", self.ce_EW_G, upper_bound=True),
            MeasureValue("MI(C;W|G)", self.mi_CW_G),
            MeasureValue("MI(C;E|G)", self.mi_CE_G),
            MeasureValue("MI(C;W|E,G)", self.mi_CW_given_EG),
            MeasureValue("MI(C;E;W|G)", self.mi_CEW_G),
            MeasureValue("MI(E;W|G)", self.mi_EW_G),
            MeasureValue("NMI(C;W|G)", self.nmi_CW_G, "dimensionless", h),
            MeasureValue("NMI(C;E|G)", self.nmi_CE_G, "dimensionless", h),
            MeasureValue("NMI(C;E;W|G)", self.nmi_CEW_G, "dimensionless", h),
            MeasureValue("NMI(E;W|G)", self.nmi_EW_G, "dimensionless", he),
        ]

    def to_json_dict(self) -> dict:
        out = {}
        for f in fields(self):
            value = getattr(self, f.name)
            if isinstance(value, tuple):
                value = [list(v) if isinstance(v, tuple) else v for v in value]
            out[f.name] = value
        return out

    @classmethod
    def from_json_dict(cls, data: dict) -> "MeasureReport":
        data = dict(data)
        data["label_space"] = tuple(data["label_space"])
        data["genders"] = tuple(data["genders"])
        data["confusion"] = tuple(tuple(row) for row in data["confusion"])
        return cls(**data)


def _check_consistency(task, plugin, result_cw, result_cwe, result_ew):
    if task != plugin.task:
        raise InconsistentProvenance(
            f"requested task {task!r} but measures are for {plugin.task!r}"
        )
    for result, want_task, want_ety in (
        (result_cw, task, False),
        (result_cwe, task, True),
        (result_ew, TASK_ETYMOLOGY, False),
    ):
        if result.task != want_task:
            raise InconsistentProvenance(
                f"evaluation for task {result.task!r}, expected {want_task!r}"
            )
        if result.with_etymology != want_ety:
            raise InconsistentProvenance(
                f"etymology conditioning is {result.with_etymology}, expected {want_ety}"
            )
        if result.source_hash != plugin.source_hash:
            raise InconsistentProvenance(
                "evaluation and measures computed on different datasets"
            )
    if result_cw.label_space != plugin.class_instances.label_space:
        raise InconsistentProvenance("label spaces differ between inputs")


def assemble(
    task: str,
    plugin: PluginMeasures,
    result_cw: EvalResult,
    result_cwe: EvalResult,
    result_ew: EvalResult,
) -> MeasureReport:
    """Combine plug-in entropies with cross-validated cross-entropies.

    result_cw predicts the class from form and gender, result_cwe also
    consumes the etymology marker, result_ew predicts etymology itself.
    All three must stem from the same dataset as the plug-in measures.
    """
    _check_consistency(task, plugin, result_cw, result_cwe, result_ew)

    h_cg = plugin.entropy_C_given_G
    h_eg = plugin.entropy_E_given_G
    mi_cw = h_cg - result_cw.cross_entropy
    mi_cw_given_eg = plugin.entropy_C_given_EG - result_cwe.cross_entropy
    mi_cew = mi_cw - mi_cw_given_eg
    mi_ew = h_eg - result_ew.cross_entropy

    class_instances = plugin.class_instances
    pmi = per_class_pmi(
        class_instances,
        result_cw.per_instance_probs,
        class_given_gender(class_instances),
    )
    counts: dict[str, int] = {lab: 0 for lab in class_instances.label_space}
    for inst in class_instances.instances:
        counts[inst.label] += 1

    provenance = {
        "dataset_hash": plugin.source_hash,
        "task": task,
        "runs": {
            "C|W,G": result_cw.to_json_dict(),
            "C|W,E,G": result_cwe.to_json_dict(),
            "E|W,G": result_ew.to_json_dict(),
        },
    }

    return MeasureReport(
        task=task,
        dataset_hash=plugin.source_hash,
        label_space=class_instances.label_space,
        genders=tuple(sorted({i.gender for i in class_instances.instances})),
        n_class_instances=len(class_instances.instances),
        n_etymology_instances=len(plugin.etymology_instances.instances),
        entropy_C=plugin.entropy_C,
        entropy_C_given_G=h_cg,
        entropy_C_given_EG=plugin.entropy_C_given_EG,
        entropy_E_given_G=h_eg,
        ce_CW_G=result_cw.cross_entropy,
        ce_CWE_G=result_cwe.cross_entropy,
        ce_EW_G=result_ew.cross_entropy,
        mi_CW_G=mi_cw,
        mi_CE_G=plugin.mi_CE_G,
        mi_CW_given_EG=mi_cw_given_eg,
        mi_CEW_G=mi_cew,
        mi_EW_G=mi_ew,
        nmi_CW_G=mi_cw / h_cg,
        nmi_CE_G=plugin.mi_CE_G / h_cg,
        nmi_CEW_G=mi_cew / h_cg,
        nmi_EW_G=mi_ew / h_eg,
        accuracies={
            "C|W,G": result_cw.accuracy,
            "C|W,E,G": result_cwe.accuracy,
            "E|W,G": result_ew.accuracy,
        },
        baselines={
            task: majority_baseline(class_instances, k=result_cw.k,
                                    seed=result_cw.seed),
            TASK_ETYMOLOGY: majority_baseline(plugin.etymology_instances,
                                              k=result_ew.k, seed=result_ew.seed),
        },
        confusion=tuple(tuple(int(x) for x in row)
                        for row in result_cw.confusion_matrix()),
        pmi_per_class=pmi,
        class_counts=counts,
        provenance=provenance,
    )


# ---- consistency checks on assembled reports ----

def submodularity_violation(report: MeasureReport, slack: float = 0.02) -> float:
    """How far NMI(C;E;W|G) exceeds min(NMI(C;W|G), NMI(C;E|G)) + slack.

    Nonpositive means the interaction term is within estimator slack of
    the bound it would obey under exact plug-in estimation."""
    bound = min(report.nmi_CW_G, report.nmi_CE_G) + slack
    return report.nmi_CEW_G - bound


def ordering_violations(report: MeasureReport) -> list[str]:
    """Within-task ordering expected of the real system: form beats
    etymology, which beats their shared part."""
    out = []
    if not report.nmi_CW_G > report.nmi_CE_G:
        out.append("NMI(C;W|G) <= NMI(C;E|G)")
    if not report.nmi_CE_G > report.nmi_CEW_G:
        out.append("NMI(C;E|G) <= NMI(C;E;W|G)")
    return out


def cross_task_violations(allomorph_report: MeasureReport,
                          type_report: MeasureReport,
                          ratio: float = 1.5) -> list[str]:
    """The allomorph system should carry clearly more recoverable
    structure than the binary type system, term by term."""
    out = []
    pairs = [
        ("NMI(C;W|G)", allomorph_report.nmi_CW_G, type_report.nmi_CW_G),
        ("NMI(C;E|G)", allomorph_report.nmi_CE_G, type_report.nmi_CE_G),
        ("NMI(C;E;W|G)", allomorph_report.nmi_CEW_G, type_report.nmi_CEW_G),
    ]
    for name, allo, typ in pairs:
        if allo < ratio * typ:
            out.append(f"{name}: {allo:.4f} < {ratio} * {typ:.4f}")
    return out


# ---- serialization ----

def _emit_json(report: MeasureReport) -> str:
    return json.dumps(report.to_json_dict(), sort_keys=True, indent=2) + "\n"


def _emit_csv(report: MeasureReport) -> str:
    """Sectioned CSV: measures, the confusion matrix, and the per-class
    figure data (class, count, pmi). Sections are introduced by comment
    lines so the file splits cleanly on '# '."""
    out = io.StringIO()
    writer = csv.writer(out, lineterminator="\n")

    out.write("# measures\n")
    writer.writerow(["name", "value", "unit", "normalizer", "upper_bound"])
    for m in report.measures():
        writer.writerow([m.name, repr(m.value), m.unit, m.normalizer or "",
                         "true" if m.upper_bound else "false"])
    for name, value in sorted(report.accuracies.items()):
        writer.writerow([f"accuracy({name})", repr(value), "fraction", "", "false"])
    for name, value in sorted(report.baselines.items()):
        writer.writerow([f"baseline({name})", repr(value), "fraction", "", "false"])

    out.write("# confusion\n")
    writer.writerow(["true_label", *report.label_space])
    for label, row in zip(report.label_space, report.confusion):
        writer.writerow([label, *row])

    out.write("# per_class\n")
    writer.writerow(["class", "count", "pmi"])
    for label in report.label_space:
        writer.writerow([label, report.class_counts[label],
                         repr(report.pmi_per_class[label])])
    return out.getvalue()


def _emit_text(report: MeasureReport) -> str:
    """Two-decimal summary tables; full precision lives in json/csv."""
    lines = []
    title = f"Predictability of plural class ({report.task} task)"
    lines.append(title)
    lines.append("=" * len(title))
    lines.append(f"dataset {report.dataset_hash[:12]}  "
                 f"instances {report.n_class_instances}  "
                 f"classes {len(report.label_space)}")
    lines.append("")
    lines.append(f"H(C|G) = {report.entropy_C_given_G:.2f} bits")
    lines.append("")
    lines.append(f"{'normalized mutual information':<34}{'value':>7}")
    for name, value in [
        ("NMI(C;W|G)", report.nmi_CW_G),
        ("NMI(C;E|G)", report.nmi_CE_G),
        ("NMI(C;E;W|G)", report.nmi_CEW_G),
        ("NMI(E;W|G)", report.nmi_EW_G),
    ]:
        lines.append(f"{name:<34}{value:>7.2f}")
    lines.append("")
    lines.append(f"{'accuracy':<34}{'value':>7}")
    for name in ("C|W,G", "C|W,E,G", "E|W,G"):
        lines.append(f"{name:<34}{report.accuracies[name]:>7.2f}")
    for name, value in sorted(report.baselines.items()):
        lines.append(f"{'majority ' + name:<34}{value:>7.2f}")
    lines.append("")
    return "\n".join(lines)


def emit(report: MeasureReport, format: str) -> str:
    """Serialize a report; json and csv carry full precision, the text
    table rounds to two decimals."""
    if format == "json":
        return _emit_json(report)
    if format == "csv":
        return _emit_csv(report)
    if format == "text-table":
        return _emit_text(report)
    raise UnsupportedFormat(f"unknown format {format!r}, expected one of {FORMATS}")
