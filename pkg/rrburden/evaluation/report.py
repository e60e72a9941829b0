#!/usr/bin/env python3
# # -*- coding: utf-8 -*-

"""
Evaluation report: window level measures overall and per subgroup, burden
error quartiles, patient level screening and error analysis.

    report.txt          human readable tables
    report.json         the full report
    groups.csv          one row per group
    intended_use.csv    patient level screening, overall and per sex
    misclassified.csv   every wrong window with its true rhythm and probability
    fp_breakdown.csv    false positives per true rhythm
________________________________________________________________________________

Created by brightSPARK Labs
www.brightsparklabs.com
"""

# standard libraries
import math
from dataclasses import asdict, dataclass
from pathlib import Path
from typing import Dict, List, Optional, Sequence

# vendor libraries
import pandas as pd
from dataclasses_json import dataclass_json
from slugify import slugify
from tabulate import tabulate

# local libraries
from rrburden.evaluation.cohort import EvaluatedRecording, pooled
from rrburden.evaluation.error_analysis import (
    afl_miss_rate,
    afl_prevalence,
    afl_share_of_false_negatives,
    fp_rhythm_breakdown,
)
from rrburden.evaluation.metrics import ConfusionCounts, auroc, eaf_stats, metrics
from rrburden.evaluation.screening import (
    PATIENT_AFB_THRESHOLD,
    intended_use_report,
    missed_patient_af_seconds,
)
from rrburden.evaluation.statistics import paired_ttest, prop_ztest
from rrburden.evaluation.stratify import GroupKey, stratify
from rrburden.exceptions import (
    DegenerateProportions,
    EmptyCohort,
    EmptyInput,
    JoinMismatch,
    NoAflWindows,
    SingleClassDataset,
)
from rrburden.functions import atomic_write_text
from rrburden.logger import logger
from rrburden.models.recording import BeatLabel

# ------------------------------------------------------------------------------
# CONSTANTS
# ------------------------------------------------------------------------------

REPORT_TEXT_FILE = "report.txt"
REPORT_JSON_FILE = "report.json"
GROUPS_FILE = "groups.csv"
INTENDED_USE_FILE = "intended_use.csv"
MISCLASSIFIED_FILE = "misclassified.csv"
FP_BREAKDOWN_FILE = "fp_breakdown.csv"

OVERALL = "overall"

# ------------------------------------------------------------------------------
# CLASSES
# ------------------------------------------------------------------------------


@dataclass_json
@dataclass
class GroupRow:
    """Window level measures of one group. Undefined values are None."""

    key: str
    group: str
    slug: str
    n_recordings: int
    n_windows: int
    tp: int
    fp: int
    tn: int
    fn: int
    se: Optional[float]
    sp: Optional[float]
    ppv: Optional[float]
    npv: Optional[float]
    f1: Optional[float]
    auroc: Optional[float]
    eaf_median: float
    eaf_q1: float
    eaf_q3: float
    afl_prevalence: Optional[float]
    undefined: str = ""
    """ Space separated names of undefined measures. """

    @property
    def counts(self) -> ConfusionCounts:
        return ConfusionCounts(self.tp, self.fp, self.tn, self.fn)


@dataclass_json
@dataclass
class ScreeningRow:
    group: str
    n_patients: int
    tp: int
    fp: int
    tn: int
    fn: int
    se: Optional[float]
    sp: Optional[float]
    ppv: Optional[float]
    npv: Optional[float]
    undefined: str = ""


@dataclass_json
@dataclass
class Comparison:
    """Head to head statistics of two prediction sets on the same recordings."""

    f1_a: Optional[float]
    f1_b: Optional[float]
    f1_z: Optional[float]
    f1_p: Optional[float]
    eaf_median_a: float
    eaf_median_b: float
    eaf_t: float
    eaf_p: float
    n_recordings: int


@dataclass_json
@dataclass
class EvalReport:
    groups: List[GroupRow]
    intended_use: List[ScreeningRow]
    screening_threshold: float
    afl_miss_rate: Optional[float]
    """ None when no window has AFL as its majority rhythm. """
    afl_share_of_false_negatives: Optional[float]
    fp_breakdown: Dict[str, Optional[float]]
    missed_af_seconds: Optional[List[float]]
    """ Median, Q1, Q3 of true AF_l seconds of missed patients. """
    comparison: Optional[Comparison] = None

    def overall(self) -> GroupRow:
        return next(row for row in self.groups if row.key == OVERALL)

    def rows(self, key: GroupKey) -> List[GroupRow]:
        return [row for row in self.groups if row.key == GroupKey(key).value]


# ------------------------------------------------------------------------------
# PUBLIC METHODS
# ------------------------------------------------------------------------------


def group_row(key: str, group: str, members: Sequence[EvaluatedRecording]) -> GroupRow:
    """Measures of one group of recordings."""
    y, y_hat, probs, categories, _ = pooled(members)
    counts = ConfusionCounts.from_labels(y, y_hat)
    measures = metrics(counts)
    undefined = list(measures.undefined)
    try:
        area = auroc(probs, y)
    except SingleClassDataset:
        area = None
        undefined.append("auroc")
    median, q1, q3 = eaf_stats([r.abs_eaf for r in members])
    return GroupRow(
        key=key,
        group=group,
        slug=slugify(f"{key}-{group}"),
        n_recordings=len(members),
        n_windows=int(len(y)),
        tp=counts.tp,
        fp=counts.fp,
        tn=counts.tn,
        fn=counts.fn,
        se=_defined(measures.se),
        sp=_defined(measures.sp),
        ppv=_defined(measures.ppv),
        npv=_defined(measures.npv),
        f1=_defined(measures.f1),
        auroc=area,
        eaf_median=median,
        eaf_q1=q1,
        eaf_q3=q3,
        afl_prevalence=_defined(afl_prevalence(categories, y)),
        undefined=" ".join(undefined),
    )


def misclassified_rows(cohort: Sequence[EvaluatedRecording]) -> List[Dict]:
    """Every window whose predicted label differs from its reference."""
    rows = []
    for r in cohort:
        for k in (r.y != r.y_hat).nonzero()[0]:
            rows.append(
                {
                    "recording_id": r.recording_id,
                    "window_index": int(r.window_index[k]),
                    "true_category": BeatLabel(int(r.categories[k])).name,
                    "mixed": bool(r.mixed[k]),
                    "true_label": int(r.y[k]),
                    "predicted_label": int(r.y_hat[k]),
                    "prob": float(r.probs[k]),
                }
            )
    return rows


def compare_models(
    cohort_a: Sequence[EvaluatedRecording], cohort_b: Sequence[EvaluatedRecording]
) -> Comparison:
    """Compares two prediction sets of the same recordings.

    F1 is compared as the proportion tp / (2tp + fp + fn) with a pooled two
    proportion z-test. |E_AF| is compared recording by recording with a paired
    t-test.

    Raises:
        JoinMismatch: the two sets cover different recordings
        EmptyInput: fewer than two recordings
    """
    ids_a = [r.recording_id for r in cohort_a]
    by_id_b = {r.recording_id: r for r in cohort_b}
    for recording_id in [*ids_a, *by_id_b]:
        if recording_id not in by_id_b or recording_id not in ids_a:
            raise JoinMismatch(
                f"Recording [{recording_id}] is not in both prediction sets"
            )
    counts_a = _total(cohort_a)
    counts_b = _total([by_id_b[i] for i in ids_a])
    f1_a, f1_b = metrics(counts_a).f1, metrics(counts_b).f1
    try:
        z, p = prop_ztest(
            counts_a.tp,
            2 * counts_a.tp + counts_a.fp + counts_a.fn,
            counts_b.tp,
            2 * counts_b.tp + counts_b.fp + counts_b.fn,
        )
    except (DegenerateProportions, EmptyInput) as ex:
        logger.warning("F1 comparison not possible: %s", ex)
        z, p = None, None
    eaf_a = [r.abs_eaf for r in cohort_a]
    eaf_b = [by_id_b[i].abs_eaf for i in ids_a]
    t, t_p = paired_ttest(eaf_a, eaf_b)
    return Comparison(
        f1_a=_defined(f1_a),
        f1_b=_defined(f1_b),
        f1_z=z,
        f1_p=p,
        eaf_median_a=eaf_stats(eaf_a)[0],
        eaf_median_b=eaf_stats(eaf_b)[0],
        eaf_t=t,
        eaf_p=t_p,
        n_recordings=len(ids_a),
    )


def build_report(
    cohort: Sequence[EvaluatedRecording],
    compare_with: Optional[Sequence[EvaluatedRecording]] = None,
    threshold: float = PATIENT_AFB_THRESHOLD,
) -> EvalReport:
    """Evaluates a joined cohort.

    Args:
        cohort (Sequence[EvaluatedRecording]): recordings with predictions
        compare_with (Optional[Sequence[EvaluatedRecording]]): a second
            prediction set of the same recordings
        threshold (float): patient screening threshold in percent

    Raises:
        EmptyCohort: no recordings
        MissingMetadata: a recording lacks metadata needed to stratify it

    Returns:
        EvalReport: the report
    """
    if not cohort:
        raise EmptyCohort("Cannot evaluate an empty cohort")
    groups = [group_row(OVERALL, "all", cohort)]
    for key in GroupKey:
        for name, members in stratify(cohort, key).items():
            groups.append(group_row(key.value, name, members))

    screening = [
        ScreeningRow(
            group=name,
            n_patients=counts.total,
            tp=counts.tp,
            fp=counts.fp,
            tn=counts.tn,
            fn=counts.fn,
            se=_defined(measures.se),
            sp=_defined(measures.sp),
            ppv=_defined(measures.ppv),
            npv=_defined(measures.npv),
            undefined=" ".join(x for x in measures.undefined if x != "f1"),
        )
        for name, (counts, measures) in intended_use_report(cohort, threshold).items()
    ]

    y, y_hat, _, categories, mixed = pooled(cohort)
    try:
        miss_rate = afl_miss_rate(categories, y_hat)
    except NoAflWindows:
        miss_rate = None
    missed = missed_patient_af_seconds(cohort, threshold)
    return EvalReport(
        groups=groups,
        intended_use=screening,
        screening_threshold=threshold,
        afl_miss_rate=miss_rate,
        afl_share_of_false_negatives=_defined(
            afl_share_of_false_negatives(categories, y, y_hat)
        ),
        fp_breakdown={
            k: _defined(v) for k, v in fp_rhythm_breakdown(categories, mixed, y, y_hat).items()
        },
        missed_af_seconds=list(missed) if missed else None,
        comparison=compare_models(cohort, compare_with) if compare_with is not None else None,
    )


def render_report(report: EvalReport) -> str:
    """The report as aligned text tables."""
    group_table = tabulate(
        [
            [r.key, r.group, r.n_recordings, r.n_windows, r.se, r.sp, r.ppv, r.npv, r.f1, r.auroc, r.eaf_median, r.eaf_q1, r.eaf_q3]
            for r in report.groups
        ],
        headers=["Key", "Group", "Recordings", "Windows", "Se", "Sp", "PPV", "NPV", "F1", "AUROC", "|E_AF| median", "Q1", "Q3"],
        floatfmt=".4f",
        missingval="n/a",
    )
    screening_table = tabulate(
        [[r.group, r.n_patients, r.tp, r.fp, r.tn, r.fn, r.se, r.sp, r.ppv, r.npv] for r in report.intended_use],
        headers=["Group", "Patients", "TP", "FP", "TN", "FN", "Se", "Sp", "PPV", "NPV"],
        floatfmt=".4f",
        missingval="n/a",
    )
    analysis = [
        ["AFL miss rate", report.afl_miss_rate],
        ["AFL share of false negatives", report.afl_share_of_false_negatives],
        *[[f"False positives in {k}", v] for k, v in report.fp_breakdown.items()],
    ]
    if report.missed_af_seconds:
        median, q1, q3 = report.missed_af_seconds
        analysis.append(["AF seconds of missed patients (median, Q1, Q3)", f"{median:.1f}, {q1:.1f}, {q3:.1f}"])
    sections = [
        "Window level performance",
        group_table,
        "",
        f"Patient level screening at [{report.screening_threshold}%] burden",
        screening_table,
        "",
        "Error analysis",
        tabulate(analysis, colalign=("right",), floatfmt=".4f", missingval="n/a"),
    ]
    if report.comparison is not None:
        c = report.comparison
        sections += [
            "",
            f"Comparison over [{c.n_recordings}] recordings",
            tabulate(
                [
                    ["F1", c.f1_a, c.f1_b, c.f1_z, c.f1_p],
                    ["|E_AF| median", c.eaf_median_a, c.eaf_median_b, c.eaf_t, c.eaf_p],
                ],
                headers=["Measure", "A", "B", "Statistic", "p"],
                floatfmt=".4g",
                missingval="n/a",
            ),
        ]
    return "\n".join(sections) + "\n"


def write_report(report: EvalReport, misclassified: Sequence[Dict], out_dir: Path):
    """Writes every report file atomically. `misclassified` holds the rows of
    `misclassified_rows`."""
    out_dir = Path(out_dir)
    atomic_write_text(out_dir / REPORT_TEXT_FILE, render_report(report))
    atomic_write_text(out_dir / REPORT_JSON_FILE, report.to_json(indent=2) + "\n")
    atomic_write_text(
        out_dir / GROUPS_FILE,
        _to_csv(pd.DataFrame([asdict(r) for r in report.groups])),
    )
    atomic_write_text(
        out_dir / INTENDED_USE_FILE,
        _to_csv(pd.DataFrame([asdict(r) for r in report.intended_use])),
    )
    atomic_write_text(
        out_dir / MISCLASSIFIED_FILE,
        _to_csv(
            pd.DataFrame(
                list(misclassified),
                columns=["recording_id", "window_index", "true_category", "mixed", "true_label", "predicted_label", "prob"],
            )
        ),
    )
    atomic_write_text(
        out_dir / FP_BREAKDOWN_FILE,
        _to_csv(pd.DataFrame(list(report.fp_breakdown.items()), columns=["rhythm", "fraction"])),
    )
    logger.info("Wrote evaluation report to [%s]", out_dir)


# ------------------------------------------------------------------------------
# PRIVATE METHODS
# ------------------------------------------------------------------------------


def _defined(value: float) -> Optional[float]:
    return None if value is None or math.isnan(value) else float(value)


def _total(cohort: Sequence[EvaluatedRecording]) -> ConfusionCounts:
    total = ConfusionCounts()
    for r in cohort:
        total = total + r.counts
    return total


def _to_csv(frame: pd.DataFrame) -> str:
    return frame.to_csv(index=False, lineterminator="\n", float_format="%.10g")
