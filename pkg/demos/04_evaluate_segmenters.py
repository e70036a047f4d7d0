"""
Scoring segmenters and annotators
=================================

The evaluation harness measures exact-match segmentation accuracy against a
gold-annotated corpus and produces full classification reports. Here the
rule-based sentence splitter runs over the corpus bundled with the test
suite; it misses exactly the paragraphs whose unit segments span two
sentences.
"""

from pathlib import Path

from gistvis.evaluation import (
    classification_report,
    format_classification_report,
    format_discoverer_table,
    load_corpus,
    run_discoverer_eval,
)
from gistvis.facts import InsightType

corpus_dir = Path(__file__).resolve().parent.parent / "tests" / "fixtures" / "minicorpus"
corpus = load_corpus(corpus_dir)
print(f"{len(corpus.entries)} paragraphs loaded")

results = run_discoverer_eval(corpus, ["regex"])
print(format_discoverer_table(results))
print()

# Classification reports work on plain label lists, so they compose with any
# annotator (or with recorded predictions).
gold = [t for e in corpus.entries for t in e.gold_types]
pred = list(gold)
pred[0] = InsightType.VALUE  # pretend the annotator missed one
print(format_classification_report(classification_report(pred, gold)))
