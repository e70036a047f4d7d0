"""Command-line surface: augment documents, debug single stages, re-render
artifacts, and run the evaluation harness.

Exit codes: 0 success, 1 I/O or configuration error, 2 backend exhaustion.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path
from typing import Optional

from . import evaluation, facts
from .annotator import annotate
from .discoverer import segment_llm, segment_regex_baseline
from .extractor import extract
from .facts import InsightType, from_interchange, to_interchange
from .gateway import (
    Gateway,
    GatewayError,
    LiveHttpBackend,
    ScriptMissError,
    ScriptedBackend,
)
from .pipeline import PipelineConfig, augment, emit_html

EXIT_OK = 0
EXIT_CONFIG = 1
EXIT_BACKEND = 2


def _add_backend_args(parser: argparse.ArgumentParser) -> None:
    parser.add_argument("--backend", choices=["live", "scripted"], default="scripted")
    parser.add_argument("--script", type=Path, help="scripted backend response file")
    parser.add_argument("--endpoint", default="https://api.deepseek.com/chat/completions")
    parser.add_argument("--model", default="deepseek-chat")
    parser.add_argument("--cache-dir", type=Path)
    parser.add_argument("--prompts-dir", type=Path)
    parser.add_argument("--rate-limit", type=float,
                        help="max requests per second (live backend)")


def _build_gateway(args: argparse.Namespace) -> Gateway:
    if args.backend == "scripted":
        if not args.script:
            raise SystemExit("--backend scripted requires --script <file>")
        backend = ScriptedBackend.from_file(args.script)
        return Gateway(backend, cache_dir=args.cache_dir, backoff_base=0.0)
    from .gateway import TokenBucketLimiter

    limiter = TokenBucketLimiter(args.rate_limit) if args.rate_limit else None
    backend = LiveHttpBackend(args.endpoint, args.model)
    return Gateway(backend, cache_dir=args.cache_dir, limiter=limiter)


def _cmd_augment(args: argparse.Namespace) -> int:
    text = args.input.read_text(encoding="utf-8")
    gateway = _build_gateway(args)
    cfg = PipelineConfig(
        gateway=gateway,
        prompts_dir=args.prompts_dir,
        concurrency=args.concurrency,
        annotation_mode="one_step" if args.one_step else "two_step",
    )
    fmt = "md" if args.input.suffix.lower() in (".md", ".markdown") else "txt"
    doc = augment(text, cfg, fmt=fmt, title=args.title)
    args.out.mkdir(parents=True, exist_ok=True)
    stem = args.input.stem
    artifact_path = args.out / f"{stem}{facts.ARTIFACT_EXTENSION}"
    artifact_path.write_text(to_interchange(doc), encoding="utf-8", newline="\n")
    html_path = args.out / f"{stem}.html"
    html_path.write_text(emit_html(doc, cfg), encoding="utf-8", newline="\n")
    print(artifact_path)
    print(html_path)
    return EXIT_OK


def _cmd_segment(args: argparse.Namespace) -> int:
    paragraph = args.input.read_text(encoding="utf-8").strip()
    if args.strategy == "regex":
        spans = segment_regex_baseline(paragraph)
        payload = [{"start": s.start, "end": s.end, "text": s.text,
                    "hasNumber": s.has_number} for s in spans]
    else:
        gateway = _build_gateway(args)
        result = segment_llm(paragraph, gateway, args.prompts_dir)
        payload = [{"start": s.start, "end": s.end, "text": s.text}
                   for s in result.spans]
    print(json.dumps(payload, indent=2, ensure_ascii=False))
    return EXIT_OK


def _cmd_annotate(args: argparse.Namespace) -> int:
    gateway = _build_gateway(args)
    mode = "one_step" if args.one_step else "two_step"
    result = annotate(args.segment, gateway, mode, args.prompts_dir)
    print(json.dumps({
        "finalType": result.final_type.value,
        "candidates": [t.value for t in result.candidates],
        "mode": result.mode,
        "flags": list(result.flags),
    }, indent=2))
    return EXIT_OK


def _cmd_extract(args: argparse.Namespace) -> int:
    gateway = _build_gateway(args)
    fact = extract(args.segment, InsightType(args.type), gateway, args.prompts_dir)
    doc = facts.AugmentedDocument(paragraphs=((fact,),))
    print(to_interchange(doc))
    return EXIT_OK


def _cmd_render(args: argparse.Namespace) -> int:
    doc = from_interchange(args.artifact.read_text(encoding="utf-8"))
    # Rendering is LLM-free: reuse the artifact's embedded visualizations.
    cfg = PipelineConfig(gateway=Gateway(ScriptedBackend()))
    args.out.mkdir(parents=True, exist_ok=True)
    stem = args.artifact.name
    if stem.endswith(facts.ARTIFACT_EXTENSION):
        stem = stem[: -len(facts.ARTIFACT_EXTENSION)]
    html_path = args.out / f"{stem}.html"
    html_path.write_text(emit_html(doc, cfg), encoding="utf-8", newline="\n")
    print(html_path)
    return EXIT_OK


def _cmd_eval(args: argparse.Namespace) -> int:
    corpus = evaluation.load_corpus(args.corpus)
    report_payload: dict
    if args.stage == "discoverer":
        gateway = None
        if "llm" in args.strategy:
            gateway = _build_gateway(args)
        results = evaluation.run_discoverer_eval(corpus, args.strategy, gateway,
                                                 args.prompts_dir)
        table = evaluation.format_discoverer_table(results)
        report_payload = {
            "stage": "discoverer",
            "results": [
                {"strategy": r.strategy, "accuracy": r.accuracy,
                 "meanLatency": r.mean_latency, "sdLatency": r.sd_latency,
                 "failed": r.failed, "error": r.error}
                for r in results
            ],
        }
    else:
        gateway = _build_gateway(args)
        report, timing = evaluation.run_annotator_eval(corpus, args.mode, gateway,
                                                       args.prompts_dir)
        table = evaluation.format_classification_report(report)
        report_payload = {"stage": "annotator", "mode": args.mode,
                          "report": report.to_json(), "timing": timing}
    print(table)
    if args.report:
        args.report.parent.mkdir(parents=True, exist_ok=True)
        args.report.write_text(json.dumps(report_payload, indent=2) + "\n",
                               encoding="utf-8")
    return EXIT_OK


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="gistvis",
        description="Augment data-rich text with inline word-scale visualizations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("augment", help="run the full pipeline over a document")
    p.add_argument("input", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.add_argument("--one-step", action="store_true")
    p.add_argument("--concurrency", type=int, default=1)
    p.add_argument("--title")
    _add_backend_args(p)
    p.set_defaults(func=_cmd_augment)

    p = sub.add_parser("segment", help="segment one paragraph (debug)")
    p.add_argument("input", type=Path)
    p.add_argument("--strategy", choices=["llm", "regex"], default="llm")
    _add_backend_args(p)
    p.set_defaults(func=_cmd_segment)

    p = sub.add_parser("annotate", help="annotate one segment (debug)")
    p.add_argument("segment")
    p.add_argument("--one-step", action="store_true")
    _add_backend_args(p)
    p.set_defaults(func=_cmd_annotate)

    p = sub.add_parser("extract", help="extract one typed segment (debug)")
    p.add_argument("segment")
    p.add_argument("--type", required=True,
                   choices=[t.value for t in InsightType if t is not InsightType.NONE])
    _add_backend_args(p)
    p.set_defaults(func=_cmd_extract)

    p = sub.add_parser("render", help="re-emit HTML from an artifact, no LLM calls")
    p.add_argument("artifact", type=Path)
    p.add_argument("--out", type=Path, required=True)
    p.set_defaults(func=_cmd_render)

    p = sub.add_parser("eval", help="run the evaluation harness")
    p.add_argument("stage", choices=["discoverer", "annotator"])
    p.add_argument("--corpus", type=Path, required=True)
    p.add_argument("--strategy", nargs="+", default=["regex"],
                   choices=sorted(evaluation.SEGMENTATION_STRATEGIES))
    p.add_argument("--mode", choices=["two_step", "one_step"], default="two_step")
    p.add_argument("--report", type=Path)
    _add_backend_args(p)
    p.set_defaults(func=_cmd_eval)

    return parser


def main(argv: Optional[list[str]] = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except GatewayError as exc:
        print(f"backend exhausted: {exc}", file=sys.stderr)
        return EXIT_BACKEND
    except (OSError, ValueError, ScriptMissError, SystemExit) as exc:
        if isinstance(exc, SystemExit):
            if exc.code in (0, None):
                return EXIT_OK
            print(str(exc), file=sys.stderr)
            return EXIT_CONFIG
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG


if __name__ == "__main__":
    sys.exit(main())
