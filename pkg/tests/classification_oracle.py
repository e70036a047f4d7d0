"""Hand-scored 20-item label sample with its full report worked out on paper.

Per-class tallies (support, correct, predicted count) were counted by hand
from the pair list, then precision, recall, F1, and the support-weighted
aggregates were computed with plain fractions and frozen here.
"""

# (gold, predicted)
PAIRS = [
    ("value", "value"),
    ("value", "value"),
    ("value", "comparison"),
    ("trend", "trend"),
    ("trend", "trend"),
    ("trend", "none"),
    ("comparison", "comparison"),
    ("comparison", "value"),
    ("proportion", "proportion"),
    ("proportion", "proportion"),
    ("proportion", "proportion"),
    ("extreme", "extreme"),
    ("extreme", "value"),
    ("rank", "rank"),
    ("rank", "rank"),
    ("none", "none"),
    ("none", "none"),
    ("none", "none"),
    ("none", "value"),
    ("none", "trend"),
]

ACCURACY = 14 / 20                      # 14 matching pairs
WEIGHTED_PRECISION = 0.7475             # sum(support_i/20 * precision_i)
WEIGHTED_RECALL = 0.70                  # equals accuracy by construction
WEIGHTED_F1 = 17 / 24                   # 0.7083...

SUPPORT = [3, 3, 2, 3, 2, 2, 5]         # value, trend, comparison, proportion,
                                        # extreme, rank, none

# rows = actual, columns = predicted, both in the canonical label order
CONFUSION = [
    [2, 0, 1, 0, 0, 0, 0],
    [0, 2, 0, 0, 0, 0, 1],
    [1, 0, 1, 0, 0, 0, 0],
    [0, 0, 0, 3, 0, 0, 0],
    [1, 0, 0, 0, 1, 0, 0],
    [0, 0, 0, 0, 0, 2, 0],
    [1, 1, 0, 0, 0, 0, 3],
]

PER_CLASS_PRECISION = [2 / 5, 2 / 3, 1 / 2, 1.0, 1.0, 1.0, 3 / 4]
PER_CLASS_RECALL = [2 / 3, 2 / 3, 1 / 2, 1.0, 1 / 2, 1.0, 3 / 5]
