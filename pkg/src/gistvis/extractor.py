"""Per-type data specification extraction (pipeline stage M3).

An LLM call produces an :class:`ExtractionDraft` from a typed segment; the
deterministic coercion step normalizes values through the number parser,
enforces the per-type breakdown-kind constraints, and resolves attribute and
position fields. A draft that yields no usable rows degrades to a fact with
an empty data spec so the visualizer can render the fallback icon.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass, field
from typing import Optional

from .facts import (
    BreakdownKind,
    DataFact,
    DataSpecEntry,
    InsightType,
    SemanticAttribute,
    UnitSegmentSpec,
)
from .gateway import Gateway, GatewayError, PromptRequest, StructuredOutputError
from .numbers import parse_number
from .prompts import load_template

FALLBACK_FLAG = "extraction_fallback"

PROPORTION_SUM_TOLERANCE = 0.01
OTHER_BREAKDOWN = "other"

_ATTRIBUTE_SYNONYMS = {
    SemanticAttribute.INCREASING: {"increasing", "increase", "increased", "up",
                                   "rising", "rise", "rose", "growth", "positive", "grew"},
    SemanticAttribute.DECREASING: {"decreasing", "decrease", "decreased", "down",
                                   "falling", "fall", "fell", "decline", "negative", "dropped"},
    SemanticAttribute.MAXIMUM: {"maximum", "max", "highest", "largest", "biggest",
                                "most", "top", "greatest"},
    SemanticAttribute.MINIMUM: {"minimum", "min", "lowest", "smallest", "least",
                                "fewest", "bottom"},
}

_TEMPORAL_TOKEN = re.compile(
    r"\b(\d{4}|q[1-4]|quarter|jan(uary)?|feb(ruary)?|mar(ch)?|apr(il)?|may|"
    r"jun(e)?|jul(y)?|aug(ust)?|sep(tember)?|oct(ober)?|nov(ember)?|dec(ember)?|"
    r"year|month|week|day|today|yesterday)\b",
    re.IGNORECASE,
)


@dataclass(frozen=True)
class DraftRow:
    space: str
    breakdown: str
    kind_text: str
    feature: str
    value_text: str


@dataclass(frozen=True)
class ExtractionDraft:
    rows: tuple[DraftRow, ...]
    attribute_text: Optional[str] = None
    position_texts: tuple[str, ...] = ()


def normalize_attribute(text: Optional[str],
                        insight_type: InsightType) -> Optional[SemanticAttribute]:
    """Map free-text direction/extremum words onto the closed attribute set."""
    if not text:
        return None
    word = text.strip().lower()
    if insight_type is InsightType.TREND:
        domain = (SemanticAttribute.INCREASING, SemanticAttribute.DECREASING)
    elif insight_type is InsightType.EXTREME:
        domain = (SemanticAttribute.MAXIMUM, SemanticAttribute.MINIMUM)
    else:
        return None
    for attr in domain:
        if word == attr.value or word in _ATTRIBUTE_SYNONYMS[attr]:
            return attr
    return None


def classify_breakdown_kind(kind_text: str, breakdown: str) -> BreakdownKind:
    """Trust a well-formed kind cell; otherwise sniff temporal tokens."""
    cleaned = kind_text.strip().lower()
    if cleaned in ("categorical", "c"):
        return BreakdownKind.CATEGORICAL
    if cleaned in ("temporal", "t"):
        return BreakdownKind.TEMPORAL
    if _TEMPORAL_TOKEN.search(breakdown):
        return BreakdownKind.TEMPORAL
    return BreakdownKind.CATEGORICAL


def _degraded(segment: str, insight_type: InsightType, flags: list[str]) -> DataFact:
    flags = list(dict.fromkeys(flags + [FALLBACK_FLAG]))
    return DataFact(
        unit_segment=UnitSegmentSpec(insight_type, segment),
        data_spec=(),
        flags=tuple(flags),
    )


def coerce_rows(draft: ExtractionDraft, insight_type: InsightType,
                segment: str) -> DataFact:
    """Deterministically turn a draft into a validated (or degraded) fact."""
    if insight_type is InsightType.NONE:
        raise ValueError("coerce_rows takes a data insight type, not none")

    flags: list[str] = []
    attribute = normalize_attribute(draft.attribute_text, insight_type)
    if draft.attribute_text and attribute is None:
        flags.append("attribute_unrecognized")

    rows: list[DataSpecEntry] = []
    for raw in draft.rows:
        if not (raw.space.strip() and raw.breakdown.strip() and raw.feature.strip()):
            flags.append("row_missing_field")
            continue
        kind = classify_breakdown_kind(raw.kind_text, raw.breakdown)
        if insight_type is InsightType.RANK and kind is not BreakdownKind.CATEGORICAL:
            flags.append("row_kind_violation")
            continue
        if insight_type is InsightType.TREND and kind is not BreakdownKind.TEMPORAL:
            flags.append("row_kind_violation")
            continue
        value = parse_number(raw.value_text)
        if math.isnan(value) and attribute is None:
            flags.append("row_nan_without_attribute")
            continue
        rows.append(DataSpecEntry(raw.space.strip(), raw.breakdown.strip(), kind,
                                  raw.feature.strip(), value))

    if insight_type is InsightType.PROPORTION:
        rows, flags = _normalize_proportion(rows, flags)
    elif insight_type is InsightType.RANK:
        rows, flags = _normalize_rank(rows, flags)

    if not rows:
        return _degraded(segment, insight_type, flags)

    numeric = [r for r in rows if not math.isnan(r.value)]
    if insight_type is InsightType.COMPARISON and len(numeric) < 2:
        return _degraded(segment, insight_type, flags + ["arity_violation"])
    if insight_type is InsightType.TREND and len(numeric) < 2 and attribute is None:
        return _degraded(segment, insight_type, flags + ["arity_violation"])

    position = _resolve_position(draft.position_texts, insight_type, segment, flags)

    seg_spec = UnitSegmentSpec(insight_type, segment, attribute=attribute,
                               position=position)
    return DataFact(unit_segment=seg_spec, data_spec=tuple(rows), flags=tuple(flags))


def _resolve_position(texts: tuple[str, ...], insight_type: InsightType,
                      segment: str, flags: list[str]) -> Optional[tuple[str, ...]]:
    if not texts:
        return None
    if insight_type not in (InsightType.EXTREME, InsightType.VALUE):
        flags.append("position_not_applicable")
        return None
    verbatim = []
    for t in texts:
        if t in segment:
            verbatim.append(t)
        else:
            flags.append("position_not_verbatim")
    if not verbatim:
        return None
    if insight_type is InsightType.EXTREME:
        return (verbatim[0],)
    return tuple(verbatim)


def _normalize_proportion(rows: list[DataSpecEntry],
                          flags: list[str]) -> tuple[list[DataSpecEntry], list[str]]:
    kept: list[DataSpecEntry] = []
    for row in rows:
        value = row.value
        if math.isnan(value):
            kept.append(row)
            continue
        if 1 < value <= 100:
            value = value / 100
            flags.append("proportion_rescaled")
        if not 0 <= value <= 1:
            flags.append("proportion_out_of_range")
            continue
        kept.append(DataSpecEntry(row.space, row.breakdown, row.breakdown_kind,
                                  row.feature, value))
    numeric = [r.value for r in kept if not math.isnan(r.value)]
    if numeric:
        total = sum(numeric)
        if total > 1 + PROPORTION_SUM_TOLERANCE:
            flags.append("proportion_sum_overflow")
        elif 1 - total > 1e-9:
            model = kept[0]
            kept.append(DataSpecEntry(model.space, OTHER_BREAKDOWN,
                                      model.breakdown_kind, model.feature,
                                      1 - total))
    return kept, flags


def _normalize_rank(rows: list[DataSpecEntry],
                    flags: list[str]) -> tuple[list[DataSpecEntry], list[str]]:
    kept: list[DataSpecEntry] = []
    for row in rows:
        if math.isnan(row.value):
            kept.append(row)
            continue
        if abs(row.value - round(row.value)) > 1e-9 or row.value < 1:
            flags.append("rank_not_integer")
            continue
        kept.append(DataSpecEntry(row.space, row.breakdown, row.breakdown_kind,
                                  row.feature, float(round(row.value))))
    return kept, flags


def extract(segment: str, insight_type: InsightType, gateway: Gateway,
            prompts_dir=None) -> DataFact:
    """Run the per-type extraction prompt and coerce the draft to a fact."""
    if insight_type is InsightType.NONE:
        raise ValueError("extract takes a data insight type, not none")
    template = load_template(f"extractor_{insight_type.value}", prompts_dir)
    req = PromptRequest(
        system_text=template.system,
        user_text=template.user.format(segment=segment),
        tag=f"extractor_{insight_type.value}",
    )
    try:
        parsed = gateway.complete_structured(req, "extraction_table")
    except (StructuredOutputError, GatewayError):
        return _degraded(segment, insight_type, [])
    draft = ExtractionDraft(
        rows=tuple(DraftRow(*cells) for cells in parsed["rows"]),
        attribute_text=parsed["attribute"],
        position_texts=tuple(parsed["positions"]),
    )
    return coerce_rows(draft, insight_type, segment)
