import math
import random
from pathlib import Path

import pytest

from gistvis.facts import (
    AugmentedDocument,
    BreakdownKind,
    DataFact,
    DataSpecEntry,
    InsightType,
    SemanticAttribute,
    UnitSegmentSpec,
)

FIXTURES = Path(__file__).parent / "fixtures"

WORDS = [
    "alpha", "beta", "gamma", "delta", "market", "sales", "growth", "region",
    "north", "south", "output", "profit", "share", "index", "rate", "volume",
]


def fact(insight_type, context="The figure rose to 42 units.", rows=None,
         attribute=None, position=None, flags=()):
    """Shorthand DataFact builder for tests."""
    return DataFact(
        unit_segment=UnitSegmentSpec(insight_type, context, attribute, position),
        data_spec=rows,
        flags=tuple(flags),
    )


def row(breakdown="Brand A", value=0.5, space="car manufacture",
        feature="sales percentage", kind=BreakdownKind.CATEGORICAL):
    return DataSpecEntry(space, breakdown, kind, feature, value)


def random_valid_fact(rng: random.Random) -> DataFact:
    """A fact satisfying every schema invariant, for round-trip properties."""
    t = rng.choice(list(InsightType))
    context = " ".join(rng.choices(WORDS, k=rng.randint(3, 10))).capitalize() + "."
    if t is InsightType.NONE:
        return fact(t, context, rows=None)

    attribute = None
    position = None
    if t is InsightType.TREND:
        kind = BreakdownKind.TEMPORAL
        attribute = rng.choice([None, SemanticAttribute.INCREASING,
                                SemanticAttribute.DECREASING])
    elif t is InsightType.RANK:
        kind = BreakdownKind.CATEGORICAL
    else:
        kind = rng.choice(list(BreakdownKind))
    if t is InsightType.EXTREME:
        attribute = rng.choice([SemanticAttribute.MAXIMUM, SemanticAttribute.MINIMUM])
        if rng.random() < 0.5:
            position = (context[: rng.randint(4, len(context))],)
    if t is InsightType.VALUE and rng.random() < 0.4:
        position = tuple(rng.choices(WORDS, k=rng.randint(1, 3)))

    rows = []
    for i in range(rng.randint(0, 4)):
        if t is InsightType.RANK:
            value = float(rng.randint(1, 12))
        elif attribute is not None and rng.random() < 0.3:
            value = math.nan
        elif t is InsightType.PROPORTION:
            value = rng.random()
        else:
            value = rng.choice([float(rng.randint(-10_000, 10_000)),
                                round(rng.uniform(-5, 5), 3)])
        rows.append(DataSpecEntry(
            space=rng.choice(WORDS),
            breakdown=f"{rng.choice(WORDS)} {i}",
            breakdown_kind=kind,
            feature=rng.choice(WORDS),
            value=value,
        ))
    return fact(t, context, rows=tuple(rows), attribute=attribute, position=position)


def random_document(rng: random.Random) -> AugmentedDocument:
    paragraphs = tuple(
        tuple(random_valid_fact(rng) for _ in range(rng.randint(1, 4)))
        for _ in range(rng.randint(0, 3))
    )
    title = rng.choice([None, " ".join(rng.choices(WORDS, k=3))])
    return AugmentedDocument(paragraphs=paragraphs, title=title)


@pytest.fixture
def fixtures_dir():
    return FIXTURES
