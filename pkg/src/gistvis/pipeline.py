"""End-to-end orchestration: document text in, artifact and HTML out.

Paragraphs flow through the four stages sequentially (segment, annotate,
extract, visualize); paragraphs themselves may run in parallel. Any stage
failure degrades the affected fact to the fallback rendering instead of
aborting the document.
"""

from __future__ import annotations

import html
import re
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field, replace
from pathlib import Path
from typing import Optional

from . import annotator, discoverer, extractor
from .facts import (
    AugmentedDocument,
    DataFact,
    InsightType,
    UnitSegmentSpec,
)
from .gateway import Gateway, GatewayError, ScriptMissError
from .visualizer import RenderConfig, build_visualization


@dataclass
class PipelineConfig:
    gateway: Gateway
    render: RenderConfig = field(default_factory=RenderConfig)
    prompts_dir: Optional[Path] = None
    concurrency: int = 1
    annotation_mode: str = "two_step"

    def __post_init__(self) -> None:
        if self.concurrency < 1:
            raise ValueError("concurrency must be >= 1")


@dataclass(frozen=True)
class ParagraphBlock:
    text: str
    augment: bool = True  # headings/code in markdown pass through untouched


_MD_HEADING = re.compile(r"^(#{1,6}\s|```)")


def split_paragraphs(text: str, fmt: str = "txt") -> list[ParagraphBlock]:
    """Blank-line-separated blocks; markdown headings and fenced code blocks
    become pass-through paragraphs."""
    blocks: list[ParagraphBlock] = []
    if fmt == "md":
        lines = text.splitlines()
        i = 0
        current: list[str] = []

        def flush() -> None:
            if current:
                blocks.append(ParagraphBlock("\n".join(current).strip()))
                current.clear()

        while i < len(lines):
            line = lines[i]
            if line.strip().startswith("```"):
                flush()
                fence = [line]
                i += 1
                while i < len(lines):
                    fence.append(lines[i])
                    if lines[i].strip().startswith("```"):
                        break
                    i += 1
                blocks.append(ParagraphBlock("\n".join(fence), augment=False))
            elif _MD_HEADING.match(line.strip()) and line.strip().startswith("#"):
                flush()
                blocks.append(ParagraphBlock(line.strip(), augment=False))
            elif not line.strip():
                flush()
            else:
                current.append(line)
            i += 1
        flush()
    else:
        for chunk in re.split(r"\n\s*\n", text):
            if chunk.strip():
                blocks.append(ParagraphBlock(" ".join(chunk.split())))
    return blocks


def _plain_fact(text: str, flags: tuple[str, ...] = ()) -> DataFact:
    return DataFact(UnitSegmentSpec(InsightType.NONE, text), flags=flags)


def _process_segment(text: str, cfg: PipelineConfig) -> DataFact:
    try:
        annotation = annotator.annotate(text, cfg.gateway, cfg.annotation_mode,
                                        cfg.prompts_dir)
    except ScriptMissError:
        raise
    except GatewayError:
        return _plain_fact(text, flags=("stage_error:annotator",))
    if annotation.final_type is InsightType.NONE:
        return _plain_fact(text, flags=annotation.flags)
    try:
        fact = extractor.extract(text, annotation.final_type, cfg.gateway,
                                 cfg.prompts_dir)
    except ScriptMissError:
        raise
    except GatewayError:
        fact = DataFact(UnitSegmentSpec(annotation.final_type, text),
                        data_spec=(), flags=("stage_error:extractor",))
    if annotation.flags:
        fact = replace(fact, flags=tuple(dict.fromkeys(fact.flags + annotation.flags)))
    return fact


def _process_paragraph(block: ParagraphBlock, cfg: PipelineConfig) -> list[DataFact]:
    if not block.augment:
        return [_plain_fact(block.text)]
    try:
        result = discoverer.segment_llm(block.text, cfg.gateway, cfg.prompts_dir)
        spans = result.spans
        seg_flags: tuple[str, ...] = ("discoverer_flagged",) if result.flagged else ()
    except ScriptMissError:
        raise
    except GatewayError:
        spans = tuple(discoverer.split_sentences(block.text))
        seg_flags = ("stage_error:discoverer",)

    facts = []
    for span in spans:
        fact = _process_segment(span.text, cfg)
        if seg_flags:
            fact = replace(fact, flags=tuple(dict.fromkeys(fact.flags + seg_flags)))
        facts.append(fact)
    return facts


def _attach_visualizations(paragraphs: list[list[DataFact]],
                           cfg: PipelineConfig) -> tuple[tuple[DataFact, ...], ...]:
    out = []
    fact_index = 0
    for facts in paragraphs:
        rendered = []
        for fact in facts:
            if fact.insight_type is InsightType.NONE:
                rendered.append(fact)
            else:
                try:
                    vis = build_visualization(fact, cfg.render, fact_index)
                except Exception:  # pure code; any defect degrades, never aborts
                    degraded = replace(fact, data_spec=(),
                                       flags=fact.flags + ("stage_error:visualizer",))
                    vis = build_visualization(degraded, cfg.render, fact_index)
                    fact = degraded
                rendered.append(fact.with_visualization(vis))
            fact_index += 1
        out.append(tuple(rendered))
    return tuple(out)


def augment(text: str, cfg: PipelineConfig, fmt: str = "txt",
            title: Optional[str] = None) -> AugmentedDocument:
    """Run the full pipeline over a document."""
    blocks = split_paragraphs(text, fmt)
    if cfg.concurrency > 1 and len(blocks) > 1:
        with ThreadPoolExecutor(max_workers=cfg.concurrency) as pool:
            paragraphs = list(pool.map(lambda b: _process_paragraph(b, cfg), blocks))
    else:
        paragraphs = [_process_paragraph(b, cfg) for b in blocks]
    return AugmentedDocument(_attach_visualizations(paragraphs, cfg), title=title)


# ---------------------------------------------------------------------------
# HTML emission


_HTML_HEAD = """<!DOCTYPE html>
<html lang="en">
<head>
<meta charset="utf-8">
<title>{title}</title>
<style>
body {{ font-family: Georgia, serif; max-width: 46em; margin: 2em auto; line-height: 1.6; }}
svg.wsv {{ vertical-align: text-bottom; margin: 0 0.15em; }}
span.entity {{ border-radius: 2px; }}
</style>
</head>
<body>
"""


def _segment_html(fact: DataFact, palette: tuple[str, ...]) -> str:
    context = fact.unit_segment.context
    spans = []
    if fact.visualization is not None:
        spans = sorted(fact.visualization.highlight_spans, key=lambda s: s.start)
    pieces = []
    cursor = 0
    for span in spans:
        if span.start < cursor or span.end > len(context):
            continue
        pieces.append(html.escape(context[cursor:span.start]))
        color = palette[span.color_index % len(palette)]
        pieces.append(
            f'<span class="entity" style="background:{color}33">'
            f"{html.escape(context[span.start:span.end])}</span>"
        )
        cursor = span.end
    pieces.append(html.escape(context[cursor:]))
    text_html = "".join(pieces)
    if fact.visualization is not None and fact.visualization.svg:
        svg = fact.visualization.svg.replace("<svg ", '<svg class="wsv" ', 1)
        return f"{text_html} {svg}"
    return text_html


def emit_html(doc: AugmentedDocument, cfg: PipelineConfig) -> str:
    """Standalone HTML with each segment's SVG inline after its text."""
    title = doc.title or "GistVis document"
    parts = [_HTML_HEAD.format(title=html.escape(title))]
    if doc.title:
        parts.append(f"<h1>{html.escape(doc.title)}</h1>\n")
    for facts in doc.paragraphs:
        parts.append("<p>")
        parts.append(" ".join(_segment_html(f, cfg.render.palette) for f in facts))
        parts.append("</p>\n")
    parts.append("</body>\n</html>\n")
    return "".join(parts)
