"""
Confusion counts and the precision / recall / accuracy / F1 report

A metric whose denominator is zero is reported as 0 and its name is listed in
`EvalReport.undefined`, so a degenerate classifier still yields a report.
"""

from typing import Iterable, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

METRIC_NAMES = ("precision", "recall", "accuracy", "f1")


class ConfusionCounts(BaseModel):
    model_config = ConfigDict(extra="forbid", frozen=True)

    tp: int = Field(0, ge=0)
    fp: int = Field(0, ge=0)
    fn: int = Field(0, ge=0)
    tn: int = Field(0, ge=0)

    @property
    def total(self) -> int:
        return self.tp + self.fp + self.fn + self.tn

    def swapped(self) -> "ConfusionCounts":
        """Counts seen with the classes exchanged"""
        return ConfusionCounts(tp=self.tn, fp=self.fn, fn=self.fp, tn=self.tp)

    def __add__(self, other: "ConfusionCounts") -> "ConfusionCounts":
        return ConfusionCounts(
            tp=self.tp + other.tp,
            fp=self.fp + other.fp,
            fn=self.fn + other.fn,
            tn=self.tn + other.tn,
        )


class EvalReport(BaseModel):
    model_config = ConfigDict(extra="forbid")

    counts: ConfusionCounts
    precision: float = Field(..., ge=0, le=1)
    recall: float = Field(..., ge=0, le=1)
    accuracy: float = Field(..., ge=0, le=1)
    f1: float = Field(..., ge=0, le=1)
    undefined: list[str] = []
    label: Optional[str] = Field(None, description="Run that produced the report, e.g. pix2pix-z18")

    @model_validator(mode="after")
    def _known_flags(self) -> "EvalReport":
        unknown = set(self.undefined) - set(METRIC_NAMES)
        if unknown:
            raise ValueError(f"Unknown metric names in undefined: {sorted(unknown)}")
        return self

    def as_row(self) -> dict[str, float]:
        return {name: getattr(self, name) for name in METRIC_NAMES}


def _ratio(num: int, den: int, name: str, undefined: list[str]) -> float:
    if den == 0:
        undefined.append(name)
        return 0.0
    return num / den


def f1_score(precision: float, recall: float) -> float:
    """Harmonic mean 2PR / (P + R); 0 when both are 0"""
    if precision + recall == 0:
        return 0.0
    return 2 * precision * recall / (precision + recall)


def metrics(counts: ConfusionCounts, label: Optional[str] = None) -> EvalReport:
    undefined: list[str] = []
    precision = _ratio(counts.tp, counts.tp + counts.fp, "precision", undefined)
    recall = _ratio(counts.tp, counts.tp + counts.fn, "recall", undefined)
    accuracy = _ratio(counts.tp + counts.tn, counts.total, "accuracy", undefined)
    if precision + recall == 0:
        undefined.append("f1")
    return EvalReport(
        counts=counts,
        precision=precision,
        recall=recall,
        accuracy=accuracy,
        f1=f1_score(precision, recall),
        undefined=undefined,
        label=label,
    )


def confusion_from_predictions(
    labels: Iterable[bool], predictions: Iterable[bool]
) -> ConfusionCounts:
    """Tally (truth, prediction) pairs; True means map"""
    tp = fp = fn = tn = 0
    labels, predictions = list(labels), list(predictions)
    if len(labels) != len(predictions):
        raise ValueError(f"{len(labels)} labels but {len(predictions)} predictions")
    for truth, pred in zip(labels, predictions):
        if truth and pred:
            tp += 1
        elif pred:
            fp += 1
        elif truth:
            fn += 1
        else:
            tn += 1
    return ConfusionCounts(tp=tp, fp=fp, fn=fn, tn=tn)
