"""Insight-type labeling of unit segments (pipeline stage M2).

Two-step protocol: six parallel per-type true/false checkers, then a
multiple-choice moderator over the positive candidates. All checkers false
means plain text. The one-step ablation asks a single multiple-choice
question over all seven labels.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Optional, Sequence

from .facts import DATA_INSIGHT_TYPES, InsightType
from .gateway import Gateway, PromptRequest, StructuredOutputError
from .prompts import load_template

#: Plain-language definitions reiterated to the moderator.
TYPE_DEFINITIONS = {
    InsightType.VALUE: "one or more specific numeric quantities reported under some criterion",
    InsightType.TREND: "the general direction of change of a quantity over time",
    InsightType.COMPARISON: "a contrast between the values of two or more entities over a shared breakdown",
    InsightType.PROPORTION: "how much one or more parts make up of a whole",
    InsightType.EXTREME: "the largest or smallest instance of one specific quantity",
    InsightType.RANK: "an ordered position of entities within a sorted sequence",
}

#: Used when moderation fails outright: prefer the most visually specific
#: type a checker asserted over the least informative (value) rendering.
FALLBACK_PRIORITY = (
    InsightType.PROPORTION,
    InsightType.TREND,
    InsightType.COMPARISON,
    InsightType.RANK,
    InsightType.EXTREME,
    InsightType.VALUE,
)

ONE_STEP_NONE_LABEL = "no type"


@dataclass(frozen=True)
class CheckerVerdict:
    insight_type: InsightType
    verdict: bool
    raw_response: str
    flagged: bool = False


@dataclass(frozen=True)
class AnnotationResult:
    final_type: InsightType
    candidates: tuple[InsightType, ...]
    mode: str
    flags: tuple[str, ...] = ()


def check_type(segment: str, insight_type: InsightType, gateway: Gateway,
               prompts_dir=None) -> CheckerVerdict:
    """Binary judgment: does the segment express this insight type?

    A structured-output failure conservatively resolves to false so the
    pipeline never fabricates insights.
    """
    if insight_type is InsightType.NONE:
        raise ValueError("check_type takes a data insight type, not none")
    if not segment:
        raise ValueError("segment must be non-empty")
    template = load_template(f"checker_{insight_type.value}", prompts_dir)
    req = PromptRequest(
        system_text=template.system,
        user_text=template.user.format(segment=segment),
        tag=f"checker_{insight_type.value}",
    )
    try:
        verdict = gateway.complete_structured(req, "boolean_verdict")
        return CheckerVerdict(insight_type, verdict, raw_response=str(verdict).lower())
    except StructuredOutputError:
        return CheckerVerdict(insight_type, False, raw_response="", flagged=True)


def _definitions_block(types: Sequence[InsightType]) -> str:
    return "\n".join(f"- {t.value}: {TYPE_DEFINITIONS[t]}." for t in types)


def moderate(segment: str, candidates: Sequence[InsightType], gateway: Gateway,
             prompts_dir=None) -> InsightType:
    """Pick the single best type among candidates; singletons skip the LLM."""
    if not candidates:
        raise ValueError("candidates must be non-empty")
    if len(candidates) == 1:
        return candidates[0]
    template = load_template("moderator", prompts_dir)
    options = [t.value for t in candidates]
    req = PromptRequest(
        system_text=template.system,
        user_text=template.user.format(
            definitions=_definitions_block(candidates),
            options=", ".join(options),
            segment=segment,
        ),
        tag="moderator",
    )
    answer = gateway.complete_structured(req, "single_choice", options=options)
    return InsightType(answer)


def annotate(segment: str, gateway: Gateway, mode: str = "two_step",
             prompts_dir=None) -> AnnotationResult:
    if not segment:
        raise ValueError("segment must be non-empty")
    if mode == "one_step":
        return _annotate_one_step(segment, gateway, prompts_dir)
    if mode != "two_step":
        raise ValueError(f"unknown annotation mode {mode!r}")

    flags: list[str] = []
    candidates: list[InsightType] = []
    for t in DATA_INSIGHT_TYPES:
        verdict = check_type(segment, t, gateway, prompts_dir)
        if verdict.flagged:
            flags.append(f"checker_{t.value}_failed")
        if verdict.verdict:
            candidates.append(t)

    if not candidates:
        return AnnotationResult(InsightType.NONE, (), "two_step", tuple(flags))
    try:
        final = moderate(segment, candidates, gateway, prompts_dir)
    except StructuredOutputError:
        final = next(t for t in FALLBACK_PRIORITY if t in candidates)
        flags.append("moderator_failed")
    return AnnotationResult(final, tuple(candidates), "two_step", tuple(flags))


def _annotate_one_step(segment: str, gateway: Gateway, prompts_dir=None) -> AnnotationResult:
    template = load_template("moderator_onestep", prompts_dir)
    options = [t.value for t in DATA_INSIGHT_TYPES] + [ONE_STEP_NONE_LABEL]
    req = PromptRequest(
        system_text=template.system,
        user_text=template.user.format(
            definitions=_definitions_block(DATA_INSIGHT_TYPES),
            options=", ".join(options),
            segment=segment,
        ),
        tag="moderator_onestep",
    )
    try:
        answer = gateway.complete_structured(req, "single_choice", options=options)
    except StructuredOutputError:
        return AnnotationResult(InsightType.NONE, (), "one_step", ("onestep_failed",))
    final = InsightType.NONE if answer == ONE_STEP_NONE_LABEL else InsightType(answer)
    return AnnotationResult(final, tuple(DATA_INSIGHT_TYPES), "one_step")
