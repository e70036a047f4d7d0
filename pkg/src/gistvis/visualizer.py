"""Knowledge-driven mapping from data facts to word-scale SVG (stage M4).

Everything here is pure and deterministic: variant selection by fixed rules,
byte-exact tooltip templates, word-boundary entity spans, and SVG output with
stable element and attribute order. The fallback question-mark icon is the
error rendering; no operation raises on degraded input.
"""

from __future__ import annotations

import math
import re
from dataclasses import dataclass
from enum import Enum
from typing import Optional
from xml.sax.saxutils import escape

from .facts import (
    BreakdownKind,
    DataFact,
    DataSpecEntry,
    HighlightSpan,
    InsightType,
    Mark,
    SemanticAttribute,
    VisualizationSpec,
)


class VariantId(str, Enum):
    PROPORTION_HBAR_STACKED = "proportion.hbar_stacked"
    PROPORTION_ICON_UNIT = "proportion.icon_unit"
    VALUE_BADGE = "value.badge"
    VALUE_ICON_NUMERIC = "value.icon_numeric"
    VALUE_HBAR_SINGLE = "value.hbar_single"
    COMPARISON_VBAR_GROUP = "comparison.vbar_group"
    COMPARISON_HBAR_PAIR = "comparison.hbar_pair"
    COMPARISON_ICON_VS = "comparison.icon_vs"
    TREND_LINE = "trend.line"
    TREND_LINE_AREA = "trend.line_area"
    TREND_ICON_ARROW_UP = "trend.icon_arrow_up"
    TREND_ICON_ARROW_DOWN = "trend.icon_arrow_down"
    EXTREME_VBAR_HIGHLIGHT = "extreme.vbar_highlight"
    EXTREME_ICON_EXTREMUM = "extreme.icon_extremum"
    RANK_VBAR_ORDERED = "rank.vbar_ordered"
    FALLBACK_ICON = "fallback_icon"


#: 10-color categorical palette (assigned by row order within one fact).
DEFAULT_PALETTE = (
    "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd",
    "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf",
)


@dataclass(frozen=True)
class RenderConfig:
    glyph_height: int = 14
    mark_width: int = 12
    max_width: int = 80
    palette: tuple[str, ...] = DEFAULT_PALETTE
    max_rank: int = 10


def _numeric_rows(fact: DataFact) -> list[DataSpecEntry]:
    return [r for r in (fact.data_spec or ()) if not math.isnan(r.value)]


def select_visualization(fact: DataFact, cfg: RenderConfig = RenderConfig()) -> VariantId:
    """Total, deterministic variant choice for a valid-or-degraded fact."""
    rows = fact.data_spec or ()
    numeric = _numeric_rows(fact)
    t = fact.insight_type
    attribute = fact.unit_segment.attribute

    if t is InsightType.NONE or not rows:
        return VariantId.FALLBACK_ICON

    if t is InsightType.PROPORTION:
        return VariantId.PROPORTION_HBAR_STACKED if numeric else VariantId.FALLBACK_ICON

    if t is InsightType.TREND:
        if not numeric or len(numeric) == 1:
            if attribute is SemanticAttribute.INCREASING:
                return VariantId.TREND_ICON_ARROW_UP
            if attribute is SemanticAttribute.DECREASING:
                return VariantId.TREND_ICON_ARROW_DOWN
            return VariantId.FALLBACK_ICON
        return VariantId.TREND_LINE if len(numeric) <= 3 else VariantId.TREND_LINE_AREA

    if t is InsightType.COMPARISON:
        if len(numeric) < 2:
            return VariantId.FALLBACK_ICON
        return (VariantId.COMPARISON_HBAR_PAIR if len(numeric) == 2
                else VariantId.COMPARISON_VBAR_GROUP)

    if t is InsightType.EXTREME:
        if not numeric:
            return VariantId.FALLBACK_ICON
        return (VariantId.EXTREME_VBAR_HIGHLIGHT if len(numeric) >= 2
                else VariantId.EXTREME_ICON_EXTREMUM)

    if t is InsightType.RANK:
        if not numeric:
            return VariantId.FALLBACK_ICON
        if max(r.value for r in numeric) > cfg.max_rank:
            return VariantId.FALLBACK_ICON
        return VariantId.RANK_VBAR_ORDERED

    # value
    if not numeric:
        return VariantId.FALLBACK_ICON
    return VariantId.VALUE_BADGE if len(numeric) == 1 else VariantId.VALUE_HBAR_SINGLE


# ---------------------------------------------------------------------------
# Tooltips


def format_value(v: float) -> str:
    """Echo stored numbers: no thousands separators, no trailing zeros."""
    if math.isnan(v):
        return "NaN"
    if float(v).is_integer():
        return str(int(v))
    return str(v)


def _trend_direction(fact: DataFact) -> str:
    if fact.unit_segment.attribute is not None:
        return fact.unit_segment.attribute.value
    numeric = _numeric_rows(fact)
    if len(numeric) >= 2:
        return "increasing" if numeric[-1].value >= numeric[0].value else "decreasing"
    return "trend"


def build_tooltip(fact: DataFact) -> list[str]:
    """Instantiate the per-type tooltip templates, one fact in, lines out."""
    rows = fact.data_spec or ()
    numeric = _numeric_rows(fact)
    t = fact.insight_type

    fallback = [f"May contain data insight of {t.value}."]
    if t is InsightType.NONE or not rows:
        return fallback

    if t is InsightType.PROPORTION:
        return [f"The proportion of {r.breakdown} is {format_value(r.value)}."
                for r in rows] or fallback

    if t is InsightType.VALUE:
        return [f"The value of {r.breakdown} is {format_value(r.value)}."
                for r in rows] or fallback

    if t is InsightType.EXTREME:
        attr = fact.unit_segment.attribute
        if attr is None:
            return fallback
        return [f"The {attr.value} of {rows[0].breakdown}."]

    if t is InsightType.COMPARISON:
        lines = []
        for i in range(len(numeric)):
            for j in range(i + 1, len(numeric)):
                a, b = numeric[i], numeric[j]
                diff = format_value(abs(a.value - b.value))
                lines.append(
                    f"The difference between {a.breakdown} and {b.breakdown} is {diff}."
                )
        return lines or fallback

    if t is InsightType.RANK:
        return [f"Rank {format_value(r.value)}: {r.breakdown}"
                for r in numeric] or fallback

    # trend
    direction = _trend_direction(fact)
    lines = [direction]
    lines.extend(f"{r.feature} of {r.breakdown} is {format_value(r.value)}."
                 for r in rows)
    if len(numeric) >= 2:
        delta = format_value(abs(numeric[-1].value - numeric[0].value))
        lines.append(f"The {direction} is {delta}")
    return lines


# ---------------------------------------------------------------------------
# Entity highlighting


def _find_word_boundary(context: str, phrase: str) -> Optional[tuple[int, int]]:
    pattern = re.compile(rf"(?<!\w){re.escape(phrase)}(?!\w)", re.IGNORECASE)
    m = pattern.search(context)
    return (m.start(), m.end()) if m else None


def compute_entity_spans(fact: DataFact) -> tuple[list[HighlightSpan], list[str]]:
    """First word-boundary occurrence of each breakdown (or the position
    phrase for extreme facts); overlaps resolved longest-first, earliest-first.
    """
    context = fact.unit_segment.context
    flags: list[str] = []
    candidates: list[HighlightSpan] = []

    position = fact.unit_segment.position
    if fact.insight_type is InsightType.EXTREME and position:
        found = _find_word_boundary(context, position[0])
        if found:
            return [HighlightSpan(found[0], found[1], 0)], flags
        flags.append("position_not_found")
        return [], flags

    for i, row in enumerate(fact.data_spec or ()):
        found = _find_word_boundary(context, row.breakdown)
        if found:
            candidates.append(HighlightSpan(found[0], found[1], i))
        else:
            flags.append(f"breakdown_not_found:{row.breakdown}")

    kept: list[HighlightSpan] = []
    for span in sorted(candidates, key=lambda s: (-(s.end - s.start), s.start)):
        if all(span.end <= k.start or span.start >= k.end for k in kept):
            kept.append(span)
    kept.sort(key=lambda s: s.start)
    return kept, flags


# ---------------------------------------------------------------------------
# SVG rendering


def _fmt(x: float) -> str:
    return f"{x:.2f}".rstrip("0").rstrip(".")


def _rect(x: float, y: float, w: float, h: float, fill: str,
          mark_id: Optional[str] = None, rx: Optional[float] = None) -> str:
    parts = [f'<rect x="{_fmt(x)}" y="{_fmt(y)}" width="{_fmt(w)}" height="{_fmt(h)}"']
    if rx is not None:
        parts.append(f' rx="{_fmt(rx)}"')
    parts.append(f' fill="{fill}"')
    if mark_id:
        parts.append(f' id="{mark_id}"')
    parts.append("/>")
    return "".join(parts)


def _text(x: float, y: float, content: str, size: float, fill: str = "#333333") -> str:
    return (f'<text x="{_fmt(x)}" y="{_fmt(y)}" font-size="{_fmt(size)}" '
            f'font-family="sans-serif" fill="{fill}">{escape(content)}</text>')


def _svg(width: float, height: float, body: list[str]) -> str:
    inner = "".join(body)
    return (f'<svg xmlns="http://www.w3.org/2000/svg" width="{_fmt(width)}" '
            f'height="{_fmt(height)}" viewBox="0 0 {_fmt(width)} {_fmt(height)}">'
            f"{inner}</svg>")


def _color(cfg: RenderConfig, index: int) -> str:
    return cfg.palette[index % len(cfg.palette)]


def render_svg(spec: VisualizationSpec, cfg: RenderConfig = RenderConfig(),
               fact_index: int = 0) -> str:
    """Deterministic SVG for one visualization spec.

    Data-bound elements carry ids ``mark-<factIndex>-<rowIndex>`` so the
    viewer can bind entity highlighting to them.
    """
    h = float(cfg.glyph_height)
    marks = spec.marks
    variant = spec.variant

    def mid(i: int) -> str:
        return f"mark-{fact_index}-{i}"

    if variant == VariantId.FALLBACK_ICON.value or not marks:
        body = [
            _rect(0, 0, h, h, "#e8e8e8", rx=2),
            _text(h * 0.28, h * 0.82, "?", h * 0.86, "#666666"),
        ]
        return _svg(h, h, body)

    numeric = [m for m in marks if not math.isnan(m.value)]

    if variant == VariantId.PROPORTION_HBAR_STACKED.value:
        total = sum(m.value for m in numeric) or 1.0
        width = float(spec.max_width)
        body = []
        x = 0.0
        for i, m in enumerate(marks):
            if math.isnan(m.value):
                continue
            w = m.value / total * width
            body.append(_rect(x, 2, w, h - 4, _color(cfg, m.color_index), mid(i)))
            x += w
        return _svg(width, h, body)

    if variant == VariantId.PROPORTION_ICON_UNIT.value:
        # One 10-cell unit row; filled cells approximate the first share.
        share = max(0.0, min(1.0, numeric[0].value if numeric else 0.0))
        filled = round(share * 10)
        cell = h / 2
        body = []
        for i in range(10):
            fill = _color(cfg, marks[0].color_index) if i < filled else "#e0e0e0"
            body.append(_rect(i * (cell + 1), h / 4, cell, cell, fill,
                              mid(0) if i == 0 else None))
        return _svg(10 * (cell + 1), h, body)

    if variant in (VariantId.VALUE_BADGE.value, VariantId.VALUE_ICON_NUMERIC.value):
        label = format_value(numeric[0].value) if numeric else "?"
        width = max(h, len(label) * h * 0.55 + 6)
        body = [
            _rect(0, 1, width, h - 2, "#eef3fa", mid(0), rx=3),
            _text(3, h * 0.78, label, h * 0.7, _color(cfg, marks[0].color_index)),
        ]
        return _svg(width, h, body)

    if variant in (VariantId.VALUE_HBAR_SINGLE.value,
                   VariantId.COMPARISON_HBAR_PAIR.value):
        width = float(spec.max_width)
        peak = max((abs(m.value) for m in numeric), default=1.0) or 1.0
        n = len(marks)
        bar_h = (h - (n - 1)) / n if n else h
        body = []
        for i, m in enumerate(marks):
            if math.isnan(m.value):
                continue
            w = abs(m.value) / peak * width
            body.append(_rect(0, i * (bar_h + 1), w, bar_h,
                              _color(cfg, m.color_index), mid(i)))
        return _svg(width, h, body)

    if variant in (VariantId.COMPARISON_VBAR_GROUP.value,
                   VariantId.EXTREME_VBAR_HIGHLIGHT.value,
                   VariantId.RANK_VBAR_ORDERED.value):
        peak = max((abs(m.value) for m in numeric), default=1.0) or 1.0
        bw = float(cfg.mark_width) / 2
        body = []
        x = 0.0
        for i, m in enumerate(marks):
            if math.isnan(m.value):
                continue
            if variant == VariantId.RANK_VBAR_ORDERED.value:
                # Rank 1 renders tallest; heights fall monotonically.
                bh = (peak - m.value + 1) / peak * h
            else:
                bh = abs(m.value) / peak * h
            body.append(_rect(x, h - bh, bw, bh, _color(cfg, m.color_index), mid(i)))
            x += bw + 1
        return _svg(max(x - 1, bw), h, body)

    if variant == VariantId.COMPARISON_ICON_VS.value:
        body = [
            _rect(0, 2, h / 2 - 1, h - 4, _color(cfg, marks[0].color_index), mid(0)),
            _rect(h / 2 + 1, 2, h / 2 - 1, h - 4,
                  _color(cfg, marks[min(1, len(marks) - 1)].color_index),
                  mid(min(1, len(marks) - 1))),
        ]
        return _svg(h, h, body)

    if variant in (VariantId.TREND_LINE.value, VariantId.TREND_LINE_AREA.value):
        width = float(spec.max_width)
        values = [m.value for m in numeric]
        lo, hi = min(values), max(values)
        spread = (hi - lo) or 1.0
        n = len(numeric)
        step = width / (n - 1) if n > 1 else 0.0
        pts = []
        for k, v in enumerate(values):
            x = k * step
            y = (h - 2) - (v - lo) / spread * (h - 4)
            pts.append((x, y))
        points_attr = " ".join(f"{_fmt(x)},{_fmt(y)}" for x, y in pts)
        color = _color(cfg, marks[0].color_index)
        body = []
        if variant == VariantId.TREND_LINE_AREA.value:
            area = points_attr + f" {_fmt(pts[-1][0])},{_fmt(h)} 0,{_fmt(h)}"
            body.append(f'<polygon points="{area}" fill="{color}" opacity="0.25"/>')
        body.append(f'<polyline points="{points_attr}" fill="none" '
                    f'stroke="{color}" stroke-width="1.5"/>')
        k = 0
        for i, m in enumerate(marks):
            if math.isnan(m.value):
                continue
            x, y = pts[k]
            k += 1
            body.append(f'<circle cx="{_fmt(x)}" cy="{_fmt(y)}" r="1.5" '
                        f'fill="{_color(cfg, m.color_index)}" id="{mid(i)}"/>')
        return _svg(width, h, body)

    if variant in (VariantId.TREND_ICON_ARROW_UP.value,
                   VariantId.TREND_ICON_ARROW_DOWN.value):
        up = variant == VariantId.TREND_ICON_ARROW_UP.value
        color = "#2ca02c" if up else "#d62728"
        if up:
            head = f"M {_fmt(h/2)} 1 L {_fmt(h-2)} {_fmt(h/2)} L 2 {_fmt(h/2)} Z"
            stem = _rect(h / 2 - 1.5, h / 2, 3, h / 2 - 1, color)
        else:
            head = f"M {_fmt(h/2)} {_fmt(h-1)} L {_fmt(h-2)} {_fmt(h/2)} L 2 {_fmt(h/2)} Z"
            stem = _rect(h / 2 - 1.5, 1, 3, h / 2 - 1, color)
        body = [f'<path d="{head}" fill="{color}" id="{mid(0)}"/>', stem]
        return _svg(h, h, body)

    if variant == VariantId.EXTREME_ICON_EXTREMUM.value:
        is_min = spec.icon_hint == "minimum"
        color = _color(cfg, marks[0].color_index)
        if is_min:
            tri = f"M 2 2 L {_fmt(h-2)} 2 L {_fmt(h/2)} {_fmt(h-2)} Z"
        else:
            tri = f"M 2 {_fmt(h-2)} L {_fmt(h-2)} {_fmt(h-2)} L {_fmt(h/2)} 2 Z"
        body = [f'<path d="{tri}" fill="{color}" id="{mid(0)}"/>']
        return _svg(h, h, body)

    # Unknown variant text never reaches here via build_visualization; render
    # the fallback glyph rather than raising.
    return _svg(h, h, [_rect(0, 0, h, h, "#e8e8e8", rx=2),
                       _text(h * 0.28, h * 0.82, "?", h * 0.86, "#666666")])


# ---------------------------------------------------------------------------
# Assembly


def build_visualization(fact: DataFact, cfg: RenderConfig = RenderConfig(),
                        fact_index: int = 0) -> VisualizationSpec:
    """Select, annotate, and render one fact into a full visualization spec."""
    variant = select_visualization(fact, cfg)
    rows = fact.data_spec or ()
    if variant is VariantId.RANK_VBAR_ORDERED:
        order = sorted(range(len(rows)), key=lambda i: rows[i].value)
        marks = tuple(Mark(rows[i].breakdown, rows[i].value, i) for i in order)
    else:
        marks = tuple(Mark(r.breakdown, r.value, i) for i, r in enumerate(rows))
    if variant is VariantId.FALLBACK_ICON:
        marks = ()
    tooltip_lines = tuple(build_tooltip(fact))
    spans, _span_flags = compute_entity_spans(fact)

    icon_hint = None
    if variant is VariantId.EXTREME_ICON_EXTREMUM and fact.unit_segment.attribute:
        icon_hint = fact.unit_segment.attribute.value

    spec = VisualizationSpec(
        variant=variant.value,
        marks=marks,
        tooltip_lines=tooltip_lines,
        highlight_spans=tuple(spans),
        height=cfg.glyph_height,
        max_width=cfg.max_width,
        icon_hint=icon_hint,
    )
    svg = render_svg(spec, cfg, fact_index)
    return VisualizationSpec(
        variant=spec.variant,
        marks=spec.marks,
        tooltip_lines=spec.tooltip_lines,
        highlight_spans=spec.highlight_spans,
        height=spec.height,
        max_width=spec.max_width,
        icon_hint=spec.icon_hint,
        svg=svg,
    )
