"""Evaluation harness for the segmentation and annotation stages.

Measures exact-match segmentation accuracy against gold span annotations and
full classification reports (accuracy, weighted precision/recall/F1, 7x7
confusion matrix) for the annotator, in both two-step and one-step modes.
Strategies register in a plug-in table so embedding-based segmenters can be
added without touching the harness.
"""

from __future__ import annotations

import json
import statistics
import time
from dataclasses import dataclass, field
from pathlib import Path
from typing import Callable, Optional, Sequence

import numpy as np

from . import annotator, discoverer
from .facts import ALL_TYPES, InsightType

Span = tuple[int, int]


class EvalInputError(ValueError):
    pass


@dataclass(frozen=True)
class CorpusParagraph:
    key: str
    text: str
    gold_spans: tuple[Span, ...]
    gold_types: tuple[InsightType, ...]


@dataclass(frozen=True)
class AnnotatedCorpus:
    entries: tuple[CorpusParagraph, ...]


def load_corpus(directory: str | Path) -> AnnotatedCorpus:
    """One document per ``.json`` file: paragraphs with character-offset
    gold spans and type labels."""
    entries: list[CorpusParagraph] = []
    files = sorted(Path(directory).glob("*.json"))
    if not files:
        raise EvalInputError(f"no corpus files in {directory}")
    for path in files:
        data = json.loads(path.read_text(encoding="utf-8"))
        for p, para in enumerate(data["paragraphs"]):
            text = para["text"]
            spans = []
            types = []
            for seg in para["segments"]:
                start, end = int(seg["start"]), int(seg["end"])
                if not (0 <= start < end <= len(text)):
                    raise EvalInputError(f"{path.name} paragraph {p}: bad span {start}:{end}")
                spans.append((start, end))
                types.append(InsightType(seg["insightType"]))
            entries.append(CorpusParagraph(f"{path.stem}:{p}", text,
                                           tuple(spans), tuple(types)))
    return AnnotatedCorpus(tuple(entries))


# ---------------------------------------------------------------------------
# Segmentation accuracy


def _normalized_boundaries(text: str, spans: Sequence[Span]) -> frozenset[Span]:
    """Trim spans to their non-whitespace core before comparing."""
    out = set()
    for start, end in spans:
        while start < end and text[start].isspace():
            start += 1
        while end > start and text[end - 1].isspace():
            end -= 1
        if start < end:
            out.add((start, end))
    return frozenset(out)


def segmentation_accuracy(pred: dict[str, Sequence[Span]],
                          gold: dict[str, Sequence[Span]],
                          texts: Optional[dict[str, str]] = None) -> float:
    """Fraction of paragraphs whose full boundary set matches gold exactly.

    Over- and under-segmentation both count as wrong.
    """
    if not gold:
        raise EvalInputError("gold is empty")
    for key in pred:
        if key not in gold:
            raise EvalInputError(f"paragraph {key!r} present in pred but not gold")
    matches = 0
    for key, gold_spans in gold.items():
        if key not in pred:
            raise EvalInputError(f"paragraph {key!r} missing from pred")
        text = (texts or {}).get(key, "")
        if text:
            same = (_normalized_boundaries(text, pred[key])
                    == _normalized_boundaries(text, gold_spans))
        else:
            same = frozenset(map(tuple, pred[key])) == frozenset(map(tuple, gold_spans))
        matches += same
    return matches / len(gold)


# ---------------------------------------------------------------------------
# Classification report


@dataclass(frozen=True)
class ClassificationReport:
    labels: tuple[str, ...]
    confusion: np.ndarray           # rows = actual, columns = predicted
    normalized: np.ndarray          # row-normalized; zero-support rows all 0
    support: np.ndarray
    accuracy: float
    weighted_precision: float
    weighted_recall: float
    weighted_f1: float
    flags: tuple[str, ...] = ()

    def to_json(self) -> dict:
        return {
            "labels": list(self.labels),
            "confusion": self.confusion.astype(int).tolist(),
            "normalized": self.normalized.tolist(),
            "support": self.support.astype(int).tolist(),
            "accuracy": self.accuracy,
            "weightedPrecision": self.weighted_precision,
            "weightedRecall": self.weighted_recall,
            "weightedF1": self.weighted_f1,
            "flags": list(self.flags),
        }


def classification_report(pred: Sequence[InsightType],
                          gold: Sequence[InsightType]) -> ClassificationReport:
    if len(pred) != len(gold):
        raise EvalInputError("pred and gold must have equal length")
    if not gold:
        raise EvalInputError("label lists are empty")
    labels = list(ALL_TYPES)
    index = {t: i for i, t in enumerate(labels)}
    for label in list(pred) + list(gold):
        if label not in index:
            raise EvalInputError(f"label {label!r} outside the seven types")

    n = len(labels)
    confusion = np.zeros((n, n), dtype=float)
    for p, g in zip(pred, gold):
        confusion[index[g], index[p]] += 1

    support = confusion.sum(axis=1)
    predicted = confusion.sum(axis=0)
    total = confusion.sum()
    diag = np.diag(confusion)

    flags: list[str] = []
    precision = np.zeros(n)
    recall = np.zeros(n)
    f1 = np.zeros(n)
    for i in range(n):
        if predicted[i] > 0:
            precision[i] = diag[i] / predicted[i]
        elif support[i] > 0:
            flags.append(f"zero_predictions:{labels[i].value}")
        if support[i] > 0:
            recall[i] = diag[i] / support[i]
        if precision[i] + recall[i] > 0:
            f1[i] = 2 * precision[i] * recall[i] / (precision[i] + recall[i])

    weights = support / total
    normalized = np.zeros_like(confusion)
    nonzero = support > 0
    normalized[nonzero] = confusion[nonzero] / support[nonzero, None]

    return ClassificationReport(
        labels=tuple(t.value for t in labels),
        confusion=confusion,
        normalized=normalized,
        support=support,
        accuracy=float(diag.sum() / total),
        weighted_precision=float((weights * precision).sum()),
        weighted_recall=float((weights * recall).sum()),
        weighted_f1=float((weights * f1).sum()),
        flags=tuple(flags),
    )


# ---------------------------------------------------------------------------
# Strategy plug-ins and evaluation runs


def _regex_strategy(paragraph: str, gateway=None, prompts_dir=None) -> list[Span]:
    return [(s.start, s.end) for s in discoverer.segment_regex_baseline(paragraph)]


def _llm_strategy(paragraph: str, gateway=None, prompts_dir=None) -> list[Span]:
    result = discoverer.segment_llm(paragraph, gateway, prompts_dir)
    return [(s.start, s.end) for s in result.spans]


#: name -> callable(paragraph, gateway, prompts_dir) -> spans. Register new
#: segmenters (e.g. embedding-similarity baselines) here.
SEGMENTATION_STRATEGIES: dict[str, Callable] = {
    "regex": _regex_strategy,
    "llm": _llm_strategy,
}


@dataclass(frozen=True)
class StrategyResult:
    strategy: str
    accuracy: Optional[float]
    mean_latency: float
    sd_latency: float
    failed: bool = False
    error: Optional[str] = None


def run_discoverer_eval(corpus: AnnotatedCorpus, strategies: Sequence[str],
                        gateway=None, prompts_dir=None) -> list[StrategyResult]:
    results = []
    gold = {e.key: e.gold_spans for e in corpus.entries}
    texts = {e.key: e.text for e in corpus.entries}
    for name in strategies:
        if name not in SEGMENTATION_STRATEGIES:
            raise EvalInputError(f"unknown strategy {name!r}")
        fn = SEGMENTATION_STRATEGIES[name]
        pred: dict[str, list[Span]] = {}
        latencies: list[float] = []
        try:
            for entry in corpus.entries:
                started = time.monotonic()
                pred[entry.key] = fn(entry.text, gateway=gateway, prompts_dir=prompts_dir)
                latencies.append(time.monotonic() - started)
            accuracy = segmentation_accuracy(pred, gold, texts)
            results.append(StrategyResult(
                name, accuracy,
                mean_latency=statistics.fmean(latencies),
                sd_latency=statistics.stdev(latencies) if len(latencies) > 1 else 0.0,
            ))
        except Exception as exc:  # a failing backend marks only this row failed
            results.append(StrategyResult(name, None, 0.0, 0.0, failed=True,
                                          error=str(exc)))
    return results


def run_annotator_eval(corpus: AnnotatedCorpus, mode: str, gateway,
                       prompts_dir=None) -> tuple[ClassificationReport, dict]:
    """Feed gold segments directly to the annotator and score the labels."""
    pred: list[InsightType] = []
    gold: list[InsightType] = []
    latencies: list[float] = []
    for entry in corpus.entries:
        for (start, end), gold_type in zip(entry.gold_spans, entry.gold_types):
            segment = entry.text[start:end].strip()
            started = time.monotonic()
            result = annotator.annotate(segment, gateway, mode, prompts_dir)
            latencies.append(time.monotonic() - started)
            pred.append(result.final_type)
            gold.append(gold_type)
    timing = {
        "mean_latency": statistics.fmean(latencies) if latencies else 0.0,
        "sd_latency": statistics.stdev(latencies) if len(latencies) > 1 else 0.0,
        "segments": len(latencies),
    }
    return classification_report(pred, gold), timing


# ---------------------------------------------------------------------------
# Report formatting


def format_discoverer_table(results: Sequence[StrategyResult]) -> str:
    lines = [f"{'Strategy':<12} {'Accuracy':>9} {'Mean (s)':>9} {'SD (s)':>8}"]
    for r in results:
        if r.failed:
            lines.append(f"{r.strategy:<12} {'FAILED':>9}   {r.error or ''}")
        else:
            lines.append(f"{r.strategy:<12} {r.accuracy:>9.3f} "
                         f"{r.mean_latency:>9.3f} {r.sd_latency:>8.3f}")
    return "\n".join(lines)


def format_classification_report(report: ClassificationReport) -> str:
    lines = [
        f"accuracy           {report.accuracy:.3f}",
        f"weighted precision {report.weighted_precision:.3f}",
        f"weighted recall    {report.weighted_recall:.3f}",
        f"weighted F1        {report.weighted_f1:.3f}",
        "",
        "confusion matrix (rows = actual, columns = predicted):",
        " " * 12 + " ".join(f"{l:>11}" for l in report.labels),
    ]
    for i, label in enumerate(report.labels):
        row = " ".join(f"{int(v):>11d}" for v in report.confusion[i])
        lines.append(f"{label:>12} {row}")
    return "\n".join(lines)
