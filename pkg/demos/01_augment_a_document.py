"""
Augmenting a paragraph with word-scale visualizations
=====================================================

Runs the full four-stage pipeline over a small document using the scripted
backend, so everything here is deterministic and offline. Swap in
LiveHttpBackend (and a GISTVIS_API_KEY) to run against a real model.
"""

from pathlib import Path

from gistvis.gateway import Gateway, ScriptRule, ScriptedBackend
from gistvis.pipeline import PipelineConfig, augment, emit_html
from gistvis.facts import to_interchange

TEXT = "Harbor Freight moved 64% of the island's cargo last year. Dockside cafes enjoyed the traffic."

# The scripted backend answers by prompt tag and substring, standing in for
# the model. One rule per decision the pipeline asks for.
backend = ScriptedBackend(rules=[
    ScriptRule(tag="discoverer",
               response="Harbor Freight moved 64% of the island's cargo last year.\n"
                        "Dockside cafes enjoyed the traffic."),
    ScriptRule(tag="checker_proportion", user_contains="Harbor Freight",
               response="true"),
    ScriptRule(tag="extractor_proportion", user_contains="Harbor Freight",
               response="```\nisland cargo | Harbor Freight | categorical | cargo share | 64%\n```"),
    # everything else is plain text
    ScriptRule(tag="checker_value", response="false"),
    ScriptRule(tag="checker_trend", response="false"),
    ScriptRule(tag="checker_comparison", response="false"),
    ScriptRule(tag="checker_proportion", response="false"),
    ScriptRule(tag="checker_extreme", response="false"),
    ScriptRule(tag="checker_rank", response="false"),
])

cfg = PipelineConfig(gateway=Gateway(backend, backoff_base=0))
doc = augment(TEXT, cfg, title="Harbor notes")

# The first segment became a proportion fact with a complementary "other"
# row, the second stayed plain text.
for facts in doc.paragraphs:
    for fact in facts:
        rows = [(r.breakdown, r.value) for r in (fact.data_spec or ())]
        print(fact.insight_type.value, rows)

out = Path("demo_output")
out.mkdir(exist_ok=True)
(out / "harbor.gist.json").write_text(to_interchange(doc), encoding="utf-8")
(out / "harbor.html").write_text(emit_html(doc, cfg), encoding="utf-8")
print("wrote", out / "harbor.gist.json", "and", out / "harbor.html")
