"""
From data facts to inline SVG charts
====================================

The visualizer is pure and needs no model: build facts by hand, let the
selection rules pick a chart variant, and read off the tooltip lines and the
rendered SVG string.
"""

import math

from gistvis.facts import (
    BreakdownKind,
    DataFact,
    DataSpecEntry,
    InsightType,
    SemanticAttribute,
    UnitSegmentSpec,
)
from gistvis.visualizer import build_visualization


def entry(breakdown, value, kind=BreakdownKind.CATEGORICAL):
    return DataSpecEntry("demo", breakdown, kind, "amount", value)


samples = [
    # two shares stack into a horizontal bar
    DataFact(UnitSegmentSpec(InsightType.PROPORTION,
                             "Brand A holds 60% and Brand B the rest."),
             data_spec=(entry("Brand A", 0.6), entry("Brand B", 0.4))),
    # four points along time draw a filled line
    DataFact(UnitSegmentSpec(InsightType.TREND,
                             "Output grew from 2020 through 2023."),
             data_spec=tuple(entry(str(2020 + i), float(10 + 3 * i),
                                   BreakdownKind.TEMPORAL) for i in range(4))),
    # a trend with no numbers still gets a directional arrow
    DataFact(UnitSegmentSpec(InsightType.TREND, "Prices kept falling lately.",
                             attribute=SemanticAttribute.DECREASING),
             data_spec=(entry("lately", math.nan, BreakdownKind.TEMPORAL),)),
    # ranks above 10 are too busy for a word-scale chart
    DataFact(UnitSegmentSpec(InsightType.RANK, "The stall placed 11th."),
             data_spec=(entry("the stall", 11.0),)),
]

for fact in samples:
    spec = build_visualization(fact)
    print(f"{fact.insight_type.value:<11} -> {spec.variant}")
    for line in spec.tooltip_lines:
        print("   tooltip:", line)
    print("   svg bytes:", len(spec.svg))
