"""Paragraph segmentation into unit segments (pipeline stage M1).

The LLM segmenter asks the model for the shortest insight-coherent sentence
runs and then re-anchors whatever comes back onto the original paragraph, so
spans are always verbatim slices of the source. A rule-based sentence
tokenizer doubles as the evaluation regex baseline (a sentence is a unit
segment, tagged by whether it contains a digit).
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from difflib import SequenceMatcher
from typing import Optional, Sequence

from .prompts import load_template

#: Minimum fraction of paragraph characters the anchors must cover before
#: we trust the model's segmentation at all.
ALIGNMENT_COVERAGE_THRESHOLD = 0.6

#: Common English abbreviations that do not end a sentence.
ABBREVIATIONS = {
    "mr", "mrs", "ms", "dr", "prof", "sr", "jr", "st", "vs", "etc", "inc",
    "ltd", "co", "corp", "gen", "gov", "sen", "rep", "rev", "hon", "mt",
    "capt", "sgt", "col", "approx", "dept", "est", "fig", "no", "jan", "feb",
    "mar", "apr", "jun", "jul", "aug", "sep", "sept", "oct", "nov", "dec",
    "e.g", "i.e", "u.s", "u.k",
}


class AlignmentError(ValueError):
    """Model output shared too little text with the paragraph to anchor."""


@dataclass(frozen=True)
class SegmentSpan:
    start: int
    end: int
    text: str
    has_number: bool = False


@dataclass(frozen=True)
class SegmentationResult:
    spans: tuple[SegmentSpan, ...]
    flagged: bool = False


def _make_span(paragraph: str, start: int, end: int) -> Optional[SegmentSpan]:
    """Trim whitespace off both edges; None if nothing is left."""
    while start < end and paragraph[start].isspace():
        start += 1
    while end > start and paragraph[end - 1].isspace():
        end -= 1
    if start >= end:
        return None
    text = paragraph[start:end]
    return SegmentSpan(start, end, text, has_number=any(c.isdigit() for c in text))


_TERMINATOR = re.compile(r"[.!?]+")


def sentence_boundaries(paragraph: str) -> list[int]:
    """Start offsets of each sentence after the first.

    A boundary sits after a run of ``.!?`` followed by whitespace and an
    uppercase letter, unless the preceding token is a known abbreviation or
    a single initial.
    """
    boundaries: list[int] = []
    for m in _TERMINATOR.finditer(paragraph):
        end = m.end()
        j = end
        while j < len(paragraph) and paragraph[j].isspace():
            j += 1
        if j == end or j >= len(paragraph) or not paragraph[j].isupper():
            continue
        word_match = re.search(r"([\w.]+)$", paragraph[:m.start()])
        if word_match:
            word = word_match.group(1).lower().rstrip(".")
            if word in ABBREVIATIONS or re.fullmatch(r"[a-z]", word):
                continue
        boundaries.append(j)
    return boundaries


def split_sentences(paragraph: str) -> list[SegmentSpan]:
    cuts = [0] + sentence_boundaries(paragraph) + [len(paragraph)]
    spans = []
    for a, b in zip(cuts, cuts[1:]):
        span = _make_span(paragraph, a, b)
        if span is not None:
            spans.append(span)
    return spans


def segment_regex_baseline(paragraph: str) -> list[SegmentSpan]:
    """One span per sentence, tagged with digit presence."""
    return split_sentences(paragraph)


def align_segments(paragraph: str, candidate_segments: Sequence[str]) -> list[SegmentSpan]:
    """Re-anchor candidate texts onto the original paragraph.

    Greedy left-to-right: each candidate is matched against the remaining
    paragraph by exact search, then longest-common-substring anchoring.
    Internal span boundaries snap to the nearest sentence boundary and any
    unmatched tail joins the final span.
    """
    if not candidate_segments:
        raise ValueError("candidate list must be non-empty")

    anchors: list[tuple[int, int]] = []
    starts: list[int] = []  # estimated candidate starts in the paragraph
    covered = 0
    pos = 0
    for cand in candidate_segments:
        rest = paragraph[pos:]
        at = rest.find(cand)
        if at >= 0:
            a, size, offset_in_cand = pos + at, len(cand), 0
        else:
            m = SequenceMatcher(None, rest, cand, autojunk=False).find_longest_match(
                0, len(rest), 0, len(cand))
            if m.size == 0:
                continue
            a, size, offset_in_cand = pos + m.a, m.size, m.b
        anchors.append((a, a + size))
        starts.append(max(pos, a - offset_in_cand))
        covered += size
        pos = a + size

    if covered < ALIGNMENT_COVERAGE_THRESHOLD * len(paragraph):
        raise AlignmentError(
            f"anchors cover {covered}/{len(paragraph)} characters "
            f"(< {ALIGNMENT_COVERAGE_THRESHOLD:.0%})"
        )

    boundaries = sentence_boundaries(paragraph)

    def snap(offset: int) -> int:
        if not boundaries:
            return offset
        return min(boundaries, key=lambda b: (abs(b - offset), b))

    cuts = sorted({snap(start) for start in starts[1:]})
    cuts = [c for c in cuts if 0 < c < len(paragraph)]
    spans = []
    edges = [0] + cuts + [len(paragraph)]
    for a, b in zip(edges, edges[1:]):
        span = _make_span(paragraph, a, b)
        if span is not None:
            spans.append(span)
    return spans


def segment_llm(paragraph: str, gateway, prompts_dir=None) -> SegmentationResult:
    """Ask the model for unit segments, then align them to the source.

    Falls back to one span per sentence (flagged) when the response cannot
    be aligned or parsed.
    """
    if not paragraph.strip():
        raise ValueError("paragraph must be non-empty")
    from .gateway import PromptRequest, StructuredOutputError

    template = load_template("discoverer", prompts_dir)
    req = PromptRequest(
        system_text=template.system,
        user_text=template.user.format(paragraph=paragraph),
        tag="discoverer",
    )
    try:
        candidates = gateway.complete_structured(req, "segment_list")
        spans = align_segments(paragraph, candidates)
        flagged = len(spans) != len(candidates)
        return SegmentationResult(tuple(spans), flagged=flagged)
    except (AlignmentError, StructuredOutputError):
        return SegmentationResult(tuple(split_sentences(paragraph)), flagged=True)
