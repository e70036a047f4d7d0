"""Declarative data-fact schema shared by every pipeline stage.

A document is modeled as paragraphs of unit segments, each wrapped in a
:class:`DataFact` that couples the verbatim text with the reconstructed
tabular rows and, once rendered, the visualization payload. Everything here
is an immutable value; operations are pure.
"""

from __future__ import annotations

import json
import math
from dataclasses import dataclass, field, replace
from enum import Enum
from typing import Any, Iterable, Optional, Sequence

SCHEMA_VERSION = "1"

ARTIFACT_EXTENSION = ".gist.json"


class InsightType(str, Enum):
    VALUE = "value"
    TREND = "trend"
    COMPARISON = "comparison"
    PROPORTION = "proportion"
    EXTREME = "extreme"
    RANK = "rank"
    NONE = "none"


#: The six insight-bearing labels, i.e. everything except plain text.
DATA_INSIGHT_TYPES: tuple[InsightType, ...] = tuple(
    t for t in InsightType if t is not InsightType.NONE
)

#: All seven labels in canonical order (used by evaluation matrices).
ALL_TYPES: tuple[InsightType, ...] = tuple(InsightType)


class SemanticAttribute(str, Enum):
    INCREASING = "increasing"
    DECREASING = "decreasing"
    MAXIMUM = "maximum"
    MINIMUM = "minimum"


#: Which attribute values are legal for which insight type.
ATTRIBUTE_DOMAIN = {
    InsightType.TREND: {SemanticAttribute.INCREASING, SemanticAttribute.DECREASING},
    InsightType.EXTREME: {SemanticAttribute.MAXIMUM, SemanticAttribute.MINIMUM},
}

#: Insight types that may carry a position phrase list.
POSITION_TYPES = {InsightType.EXTREME, InsightType.VALUE}


class BreakdownKind(str, Enum):
    CATEGORICAL = "categorical"
    TEMPORAL = "temporal"


def normalize_whitespace(text: str) -> str:
    """Collapse whitespace runs to single spaces and trim the ends."""
    return " ".join(text.split())


@dataclass(frozen=True)
class UnitSegmentSpec:
    """Type, verbatim text, and auxiliary semantics of one unit segment."""

    insight_type: InsightType
    context: str
    attribute: Optional[SemanticAttribute] = None
    position: Optional[tuple[str, ...]] = None


@dataclass(frozen=True)
class DataSpecEntry:
    """One tabular row: analysis facet, field value, measurement, number."""

    space: str
    breakdown: str
    breakdown_kind: BreakdownKind
    feature: str
    value: float  # NaN marks a purely semantic (non-numeric) insight


@dataclass(frozen=True)
class Mark:
    """One visual element bound to a data row."""

    label: str
    value: float
    color_index: int


@dataclass(frozen=True)
class HighlightSpan:
    """Character range of an entity inside the segment context."""

    start: int
    end: int
    color_index: int


@dataclass(frozen=True)
class VisualizationSpec:
    """Resolved rendering of one fact: variant, geometry inputs, tooltip."""

    variant: str
    marks: tuple[Mark, ...]
    tooltip_lines: tuple[str, ...]
    highlight_spans: tuple[HighlightSpan, ...]
    height: int
    max_width: int
    icon_hint: Optional[str] = None
    svg: Optional[str] = None


@dataclass(frozen=True)
class DataFact:
    """The uniform unit: segment spec plus optional reconstructed rows.

    ``data_spec`` is ``None`` for plain text, a (possibly empty) tuple for
    insight segments; an empty tuple marks a degraded extraction that the
    visualizer renders as the fallback icon.
    """

    unit_segment: UnitSegmentSpec
    data_spec: Optional[tuple[DataSpecEntry, ...]] = None
    visualization: Optional[VisualizationSpec] = None
    flags: tuple[str, ...] = ()

    @property
    def insight_type(self) -> InsightType:
        return self.unit_segment.insight_type

    @property
    def degraded(self) -> bool:
        return self.data_spec is not None and len(self.data_spec) == 0

    def with_visualization(self, spec: VisualizationSpec) -> "DataFact":
        return replace(self, visualization=spec)


@dataclass(frozen=True)
class AugmentedDocument:
    """Ordered paragraphs, each an ordered run of data facts."""

    paragraphs: tuple[tuple[DataFact, ...], ...]
    title: Optional[str] = None


# ---------------------------------------------------------------------------
# Validation


def validate(fact: DataFact) -> list[str]:
    """Return the list of violated invariants (empty means valid)."""
    report: list[str] = []
    seg = fact.unit_segment
    t = seg.insight_type

    if not seg.context:
        report.append("context must be non-empty")

    if seg.attribute is not None:
        domain = ATTRIBUTE_DOMAIN.get(t)
        if domain is None:
            report.append(f"attribute forbidden for type {t.value}")
        elif seg.attribute not in domain:
            report.append(
                f"attribute {seg.attribute.value} not legal for type {t.value}"
            )

    if seg.position is not None:
        if t not in POSITION_TYPES:
            report.append(f"position forbidden for type {t.value}")
        elif t is InsightType.EXTREME and len(seg.position) != 1:
            report.append("position for extreme must have exactly 1 element")
        elif len(seg.position) < 1:
            report.append("position must have at least 1 element")

    if t is InsightType.NONE:
        if fact.data_spec is not None:
            report.append("data_spec forbidden for none")
    else:
        if fact.data_spec is None:
            report.append(f"data_spec required for type {t.value}")

    for i, row in enumerate(fact.data_spec or ()):
        where = f"dataSpec[{i}]"
        for name in ("space", "breakdown", "feature"):
            if not getattr(row, name):
                report.append(f"{where}.{name} must be non-empty")
        if math.isnan(row.value) and seg.attribute is None:
            report.append(f"{where}.value is NaN without a semantic attribute")
        if t is InsightType.RANK and row.breakdown_kind is not BreakdownKind.CATEGORICAL:
            report.append(f"{where}: rank requires a categorical breakdown")
        if t is InsightType.TREND and row.breakdown_kind is not BreakdownKind.TEMPORAL:
            report.append(f"{where}: trend requires a temporal breakdown")

    return report


def context_partition_report(paragraph: str, facts: Sequence[DataFact]) -> list[str]:
    """Check that the facts' contexts tile the paragraph, in order.

    Comparison happens after whitespace normalization; contexts must be
    verbatim, non-overlapping, ordered slices of the source paragraph.
    """
    report: list[str] = []
    cursor = 0
    for i, fact in enumerate(facts):
        ctx = fact.unit_segment.context
        at = paragraph.find(ctx, cursor)
        if at < 0:
            report.append(f"paragraphs fact[{i}]: context is not an in-order slice")
        else:
            cursor = at + len(ctx)
    joined = normalize_whitespace(" ".join(f.unit_segment.context for f in facts))
    if joined != normalize_whitespace(paragraph):
        report.append("contexts do not cover the paragraph")
    return report


def validate_document(doc: AugmentedDocument) -> list[str]:
    report: list[str] = []
    for p, facts in enumerate(doc.paragraphs):
        for i, fact in enumerate(facts):
            for violation in validate(fact):
                report.append(f"paragraphs[{p}][{i}]: {violation}")
    return report


def _numbers_equal(a: float, b: float) -> bool:
    return (math.isnan(a) and math.isnan(b)) or a == b


def facts_equal(a: DataFact, b: DataFact) -> bool:
    """Structural equality where NaN compares equal to NaN."""
    if a.unit_segment != b.unit_segment or a.flags != b.flags:
        return False
    if (a.data_spec is None) != (b.data_spec is None):
        return False
    if a.data_spec is not None:
        assert b.data_spec is not None
        if len(a.data_spec) != len(b.data_spec):
            return False
        for ra, rb in zip(a.data_spec, b.data_spec):
            if (ra.space, ra.breakdown, ra.breakdown_kind, ra.feature) != (
                rb.space, rb.breakdown, rb.breakdown_kind, rb.feature
            ) or not _numbers_equal(ra.value, rb.value):
                return False
    va, vb = a.visualization, b.visualization
    if (va is None) != (vb is None):
        return False
    if va is not None:
        assert vb is not None
        if (va.variant, va.tooltip_lines, va.highlight_spans, va.height,
                va.max_width, va.icon_hint, va.svg) != (
                vb.variant, vb.tooltip_lines, vb.highlight_spans, vb.height,
                vb.max_width, vb.icon_hint, vb.svg):
            return False
        if len(va.marks) != len(vb.marks):
            return False
        for ma, mb in zip(va.marks, vb.marks):
            if (ma.label, ma.color_index) != (mb.label, mb.color_index):
                return False
            if not _numbers_equal(ma.value, mb.value):
                return False
    return True


def documents_equal(a: AugmentedDocument, b: AugmentedDocument) -> bool:
    if a.title != b.title or len(a.paragraphs) != len(b.paragraphs):
        return False
    for pa, pb in zip(a.paragraphs, b.paragraphs):
        if len(pa) != len(pb):
            return False
        if not all(facts_equal(fa, fb) for fa, fb in zip(pa, pb)):
            return False
    return True


# ---------------------------------------------------------------------------
# Interchange (.gist.json)


class InterchangeError(ValueError):
    """Malformed artifact; ``path`` names the offending location."""

    def __init__(self, path: str, message: str):
        self.path = path
        super().__init__(f"{path}: {message}")


def _value_to_json(v: float) -> Any:
    # JSON has no NaN literal; the schema encodes it as the string "NaN".
    if math.isnan(v):
        return "NaN"
    if isinstance(v, float) and v.is_integer() and abs(v) < 2**53:
        return int(v)
    return v


def _value_from_json(v: Any, path: str) -> float:
    if v == "NaN":
        return math.nan
    if isinstance(v, bool) or not isinstance(v, (int, float)):
        raise InterchangeError(path, "value must be a number or the string 'NaN'")
    return float(v)


def _vis_to_json(vis: VisualizationSpec) -> dict:
    out: dict[str, Any] = {
        "variant": vis.variant,
        "marks": [
            {"label": m.label, "value": _value_to_json(m.value), "colorIndex": m.color_index}
            for m in vis.marks
        ],
        "tooltipLines": list(vis.tooltip_lines),
        "highlightSpans": [
            {"start": s.start, "end": s.end, "colorIndex": s.color_index}
            for s in vis.highlight_spans
        ],
        "height": vis.height,
        "maxWidth": vis.max_width,
    }
    if vis.icon_hint is not None:
        out["iconHint"] = vis.icon_hint
    if vis.svg is not None:
        out["svg"] = vis.svg
    return out


def _fact_to_json(fact: DataFact) -> dict:
    seg = fact.unit_segment
    out: dict[str, Any] = {
        "insightType": seg.insight_type.value,
        "context": seg.context,
    }
    if seg.attribute is not None:
        out["attribute"] = seg.attribute.value
    if seg.position is not None:
        out["position"] = list(seg.position)
    if fact.data_spec is not None:
        out["dataSpec"] = [
            {
                "space": r.space,
                "breakdown": r.breakdown,
                "breakdownKind": r.breakdown_kind.value,
                "feature": r.feature,
                "value": _value_to_json(r.value),
            }
            for r in fact.data_spec
        ]
    if fact.flags:
        out["flags"] = list(fact.flags)
    if fact.visualization is not None:
        out["visualization"] = _vis_to_json(fact.visualization)
    return out


def to_interchange(doc: AugmentedDocument) -> str:
    """Serialize a valid document to the canonical `.gist.json` text."""
    violations = validate_document(doc)
    if violations:
        raise ValueError("document is not valid: " + "; ".join(violations))
    payload: dict[str, Any] = {"schema_version": SCHEMA_VERSION}
    if doc.title is not None:
        payload["title"] = doc.title
    payload["paragraphs"] = [
        [_fact_to_json(f) for f in paragraph] for paragraph in doc.paragraphs
    ]
    return json.dumps(payload, indent=2, ensure_ascii=False, allow_nan=False) + "\n"


def _require_keys(obj: dict, path: str, allowed: Iterable[str], required: Iterable[str]) -> None:
    allowed_set = set(allowed)
    for key in obj:
        if key not in allowed_set:
            raise InterchangeError(f"{path}.{key}", "unknown field")
    for key in required:
        if key not in obj:
            raise InterchangeError(f"{path}.{key}", "missing required field")


def _str_field(obj: dict, path: str, key: str) -> str:
    v = obj[key]
    if not isinstance(v, str):
        raise InterchangeError(f"{path}.{key}", "must be a string")
    return v


def _int_field(obj: dict, path: str, key: str) -> int:
    v = obj[key]
    if isinstance(v, bool) or not isinstance(v, int):
        raise InterchangeError(f"{path}.{key}", "must be an integer")
    return v


def _vis_from_json(obj: Any, path: str) -> VisualizationSpec:
    if not isinstance(obj, dict):
        raise InterchangeError(path, "visualization must be an object")
    _require_keys(
        obj,
        path,
        allowed=("variant", "marks", "tooltipLines", "highlightSpans", "height",
                 "maxWidth", "iconHint", "svg"),
        required=("variant", "marks", "tooltipLines", "highlightSpans", "height", "maxWidth"),
    )
    marks = []
    for i, m in enumerate(obj["marks"]):
        mpath = f"{path}.marks[{i}]"
        if not isinstance(m, dict):
            raise InterchangeError(mpath, "must be an object")
        _require_keys(m, mpath, ("label", "value", "colorIndex"), ("label", "value", "colorIndex"))
        marks.append(Mark(_str_field(m, mpath, "label"),
                          _value_from_json(m["value"], f"{mpath}.value"),
                          _int_field(m, mpath, "colorIndex")))
    spans = []
    for i, s in enumerate(obj["highlightSpans"]):
        spath = f"{path}.highlightSpans[{i}]"
        if not isinstance(s, dict):
            raise InterchangeError(spath, "must be an object")
        _require_keys(s, spath, ("start", "end", "colorIndex"), ("start", "end", "colorIndex"))
        spans.append(HighlightSpan(_int_field(s, spath, "start"),
                                   _int_field(s, spath, "end"),
                                   _int_field(s, spath, "colorIndex")))
    lines = obj["tooltipLines"]
    if not isinstance(lines, list) or not all(isinstance(x, str) for x in lines):
        raise InterchangeError(f"{path}.tooltipLines", "must be a list of strings")
    return VisualizationSpec(
        variant=_str_field(obj, path, "variant"),
        marks=tuple(marks),
        tooltip_lines=tuple(lines),
        highlight_spans=tuple(spans),
        height=_int_field(obj, path, "height"),
        max_width=_int_field(obj, path, "maxWidth"),
        icon_hint=_str_field(obj, path, "iconHint") if "iconHint" in obj else None,
        svg=_str_field(obj, path, "svg") if "svg" in obj else None,
    )


def _fact_from_json(obj: Any, path: str) -> DataFact:
    if not isinstance(obj, dict):
        raise InterchangeError(path, "fact must be an object")
    _require_keys(
        obj,
        path,
        allowed=("insightType", "context", "attribute", "position", "dataSpec",
                 "flags", "visualization"),
        required=("insightType", "context"),
    )
    type_text = _str_field(obj, path, "insightType")
    try:
        insight_type = InsightType(type_text)
    except ValueError:
        raise InterchangeError(f"{path}.insightType", f"unknown insight type {type_text!r}")

    attribute = None
    if "attribute" in obj:
        attr_text = _str_field(obj, path, "attribute")
        try:
            attribute = SemanticAttribute(attr_text)
        except ValueError:
            raise InterchangeError(f"{path}.attribute", f"unknown attribute {attr_text!r}")

    position = None
    if "position" in obj:
        raw = obj["position"]
        if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
            raise InterchangeError(f"{path}.position", "must be a list of strings")
        position = tuple(raw)

    data_spec = None
    if "dataSpec" in obj:
        raw = obj["dataSpec"]
        if not isinstance(raw, list):
            raise InterchangeError(f"{path}.dataSpec", "must be a list")
        rows = []
        for i, r in enumerate(raw):
            rpath = f"{path}.dataSpec[{i}]"
            if not isinstance(r, dict):
                raise InterchangeError(rpath, "must be an object")
            _require_keys(r, rpath,
                          ("space", "breakdown", "breakdownKind", "feature", "value"),
                          ("space", "breakdown", "breakdownKind", "feature", "value"))
            kind_text = _str_field(r, rpath, "breakdownKind")
            try:
                kind = BreakdownKind(kind_text)
            except ValueError:
                raise InterchangeError(f"{rpath}.breakdownKind", f"unknown kind {kind_text!r}")
            rows.append(DataSpecEntry(
                space=_str_field(r, rpath, "space"),
                breakdown=_str_field(r, rpath, "breakdown"),
                breakdown_kind=kind,
                feature=_str_field(r, rpath, "feature"),
                value=_value_from_json(r["value"], f"{rpath}.value"),
            ))
        data_spec = tuple(rows)

    flags: tuple[str, ...] = ()
    if "flags" in obj:
        raw = obj["flags"]
        if not isinstance(raw, list) or not all(isinstance(x, str) for x in raw):
            raise InterchangeError(f"{path}.flags", "must be a list of strings")
        flags = tuple(raw)

    visualization = None
    if "visualization" in obj:
        visualization = _vis_from_json(obj["visualization"], f"{path}.visualization")

    return DataFact(
        unit_segment=UnitSegmentSpec(insight_type, _str_field(obj, path, "context"),
                                     attribute, position),
        data_spec=data_spec,
        visualization=visualization,
        flags=flags,
    )


def from_interchange(text: str) -> AugmentedDocument:
    """Parse `.gist.json` text, rejecting unknown fields."""
    try:
        payload = json.loads(text)
    except json.JSONDecodeError as exc:
        raise InterchangeError("$", f"not valid JSON: {exc}") from exc
    if not isinstance(payload, dict):
        raise InterchangeError("$", "top level must be an object")
    _require_keys(payload, "$", ("schema_version", "title", "paragraphs"),
                  ("schema_version", "paragraphs"))
    version = payload["schema_version"]
    if version != SCHEMA_VERSION:
        raise InterchangeError("$.schema_version", f"unsupported version {version!r}")
    title = None
    if "title" in payload:
        title = _str_field(payload, "$", "title")
    raw_paragraphs = payload["paragraphs"]
    if not isinstance(raw_paragraphs, list):
        raise InterchangeError("$.paragraphs", "must be a list")
    paragraphs = []
    for p, raw in enumerate(raw_paragraphs):
        if not isinstance(raw, list):
            raise InterchangeError(f"$.paragraphs[{p}]", "must be a list")
        paragraphs.append(tuple(
            _fact_from_json(f, f"$.paragraphs[{p}][{i}]") for i, f in enumerate(raw)
        ))
    return AugmentedDocument(paragraphs=tuple(paragraphs), title=title)
