"""GistVis: augment data-rich text with inline word-scale visualizations."""

from .facts import (
    AugmentedDocument,
    BreakdownKind,
    DataFact,
    DataSpecEntry,
    InsightType,
    SemanticAttribute,
    UnitSegmentSpec,
    VisualizationSpec,
    from_interchange,
    to_interchange,
    validate,
)
from .gateway import Gateway, LiveHttpBackend, PromptRequest, ScriptedBackend
from .pipeline import PipelineConfig, augment, emit_html
from .visualizer import RenderConfig, VariantId, build_visualization

__all__ = [
    "AugmentedDocument",
    "BreakdownKind",
    "DataFact",
    "DataSpecEntry",
    "Gateway",
    "InsightType",
    "LiveHttpBackend",
    "PipelineConfig",
    "PromptRequest",
    "RenderConfig",
    "ScriptedBackend",
    "SemanticAttribute",
    "UnitSegmentSpec",
    "VariantId",
    "VisualizationSpec",
    "augment",
    "build_visualization",
    "emit_html",
    "from_interchange",
    "to_interchange",
    "validate",
]

__version__ = "0.1.0"
