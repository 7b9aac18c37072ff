"""Command-line interface.

Every subcommand accepts --seed, --config and --json; exit status is 0 on
success and 1 with a structured error otherwise. The whole pipeline is
operable here without the HTTP service running.
"""

from __future__ import annotations

import argparse
import json
import sys
from pathlib import Path

from . import __version__
from .config import load_config
from .corpus import corpus_stats
from .criteria import CriteriaEngine, load_lexicon
from .dataset import (
    SplitSpec,
    balanced_select,
    export_csv,
    import_csv,
    split as split_dataset,
    validate_against_reference,
)
from .errors import ForgeError
from .harvest import (
    Harvester,
    HttpGraphQLTransport,
    RateBudget,
    RecordKind,
    RepoRef,
    resolve_token,
)
from .metrics import binary_collapse, build_confusion, metrics
from .models import ALGORITHMS, ModelSpec
from .pipeline import run_training
from .vectorize import load_vocab
from .workspace import Workspace


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="assumption-forge",
        description="Harvest repository text, label assumption sentences, train and score classifiers.",
    )
    parser.add_argument("--version", action="version", version=__version__)
    sub = parser.add_subparsers(dest="command", required=True)

    def common(p: argparse.ArgumentParser) -> argparse.ArgumentParser:
        p.add_argument("--seed", type=int, default=0, help="deterministic seed")
        p.add_argument("--config", type=Path, default=None, help="key=value config file")
        p.add_argument("--json", action="store_true", help="machine-readable output")
        p.add_argument("--workspace", type=Path, default=Path("forge-workspace"))
        return p

    p = common(sub.add_parser("harvest", help="collect commit/PR/issue text from a repository"))
    p.add_argument("--owner", required=True)
    p.add_argument("--name", required=True)
    p.add_argument("--cutoff", type=float, required=True, help="unix timestamp upper bound")
    p.add_argument("--kinds", nargs="*", default=[k.value for k in RecordKind])
    p.add_argument("--page-size", type=int, default=50)
    p.add_argument("--verify", action="store_true", help="compare local and remote counts after")

    p = common(sub.add_parser("extract", help="split harvested records into sentences"))
    p.add_argument("--repo", default=None, help="owner/name filter")

    p = common(sub.add_parser("suggest", help="run the rule engine over a sentence or file"))
    p.add_argument("--text", default=None)
    p.add_argument("--file", type=Path, default=None, help="one sentence per line")

    p = common(sub.add_parser("annotate-import", help="bulk-import labels from a text,label CSV"))
    p.add_argument("csv", type=Path)
    p.add_argument("--annotator", default="import")
    p.add_argument("--kind", default=None, help="provenance kind to attach to new sentences")

    p = common(sub.add_parser("dataset", help="assemble the balanced dataset and export CSV"))
    p.add_argument("--out", type=Path, default=None, help="also export to this CSV path")
    p.add_argument("--validate", action="store_true", help="compare against the reference counts")

    p = common(sub.add_parser("split", help="split a dataset CSV into train/test CSVs"))
    p.add_argument("csv", type=Path)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--no-stratify", action="store_true")
    p.add_argument("--train-out", type=Path, required=True)
    p.add_argument("--test-out", type=Path, required=True)

    p = common(sub.add_parser("train", help="train models on a dataset CSV and evaluate"))
    p.add_argument("--dataset", type=Path, required=True, help="text,label CSV")
    p.add_argument("--model", nargs="*", default=["CART"], choices=list(ALGORITHMS) + [a.lower() for a in ALGORITHMS])
    p.add_argument("--vocab", type=Path, default=None)
    p.add_argument("--train-fraction", type=float, default=0.8)
    p.add_argument("--feature-cap", type=int, default=5000)
    p.add_argument("--out", type=Path, default=None, help="run output directory")

    p = common(sub.add_parser("eval", help="report metrics for a finished run"))
    p.add_argument("--run", type=Path, required=True, help="run output directory")
    p.add_argument("--binary", action="store_true", help="add the two-class collapse table")

    p = common(sub.add_parser("llm-classify", help="classify test sentences through a chat model"))
    p.add_argument("--dataset", type=Path, required=True, help="text,label CSV of sentences")
    p.add_argument("--model-name", default="offline-model")
    p.add_argument("--fixture", type=Path, default=None, help="replay fixture JSONL")
    p.add_argument("--url", default=None, help="live chat endpoint URL")
    p.add_argument("--cache", type=Path, default=None)
    p.add_argument("--limit", type=int, default=None)
    p.add_argument("--binary", action="store_true",
                   help="collapse SCA and PA into a single assumption label")

    p = common(sub.add_parser("serve", help="run the HTTP service"))
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--port", type=int, default=8337)
    p.add_argument("--vocab", type=Path, default=None)
    p.add_argument("--ui-dist", type=Path, default=None)

    p = common(sub.add_parser("report", help="print the metrics table for a run directory"))
    p.add_argument("--run", type=Path, required=True)

    return parser


def _emit(args, payload: dict, text: str | None = None) -> None:
    if args.json:
        print(json.dumps(payload, indent=2, sort_keys=True))
    else:
        print(text if text is not None else json.dumps(payload, indent=2, sort_keys=True))


def _config(args) -> dict:
    return load_config(args.config) if args.config else {}


def _engine(cfg: dict) -> CriteriaEngine:
    if cfg.get("lexicon"):
        return CriteriaEngine(cues=load_lexicon(cfg["lexicon"]))
    return CriteriaEngine()


def cmd_harvest(args) -> dict:
    cfg = _config(args)
    token = resolve_token(config=cfg)
    transport = HttpGraphQLTransport(token, endpoint=cfg.get("api_endpoint", "https://api.github.com/graphql"))
    budget = RateBudget(points_per_hour=int(cfg.get("points_per_hour", 5000)))
    ws = Workspace(args.workspace, lexicon_path=cfg.get("lexicon"))
    harvester = Harvester(transport=transport, budget=budget)
    ref = RepoRef(owner=args.owner, name=args.name)
    report = harvester.harvest(
        ref,
        [RecordKind(k) for k in args.kinds],
        cutoff=args.cutoff,
        store=ws.records,
        page_size=args.page_size,
    )
    payload = report.to_dict()
    if args.verify:
        payload["verification"] = harvester.verify_counts(ref, ws.records).to_dict()
    return payload


def cmd_extract(args) -> dict:
    cfg = _config(args)
    ws = Workspace(args.workspace, lexicon_path=cfg.get("lexicon"))
    added = ws.extract_from_records(repo=args.repo)
    return {"sentences_added": added, "sentences_total": len(ws.store.sentences())}


def cmd_suggest(args) -> dict:
    cfg = _config(args)
    engine = _engine(cfg)
    texts: list[str] = []
    if args.text:
        texts.append(args.text)
    if args.file:
        texts.extend(l.rstrip("\n") for l in args.file.read_text("utf-8").splitlines() if l.strip())
    if not texts:
        raise ForgeError("provide --text or --file")
    return {"verdicts": [dict(text=t, **engine.classify(t).to_dict()) for t in texts]}


def cmd_annotate_import(args) -> dict:
    from .corpus import Sentence
    import hashlib

    cfg = _config(args)
    ws = Workspace(args.workspace, lexicon_path=cfg.get("lexicon"))
    dataset = import_csv(args.csv, ws.store.registry)
    sentences = []
    for i, text in enumerate(dataset.texts):
        sid = hashlib.sha256(f"import\x00{text}".encode("utf-8")).hexdigest()[:16]
        sentences.append(
            Sentence(id=sid, record_id="import", index_in_record=i, raw_text=text, kind=args.kind)
        )
    ws.add_sentences(sentences)
    for sentence, value in zip(sentences, dataset.labels):
        ws.annotate(sentence.id, value, annotator=args.annotator)
    return {"imported": len(sentences)}


def cmd_dataset(args) -> dict:
    cfg = _config(args)
    ws = Workspace(args.workspace, lexicon_path=cfg.get("lexicon"))
    dataset = balanced_select(ws.store, seed=args.seed)
    dataset_id = ws.save_dataset(dataset, seed=args.seed)
    if args.out:
        export_csv(dataset, args.out)
    payload = {
        "id": dataset_id,
        "rows": len(dataset),
        "hash": dataset.content_hash(),
        "csv": str(ws.dataset_csv_path(dataset_id)),
    }
    if args.validate:
        payload["validation"] = validate_against_reference(dataset).to_dict()
    labeled = ws.store.labeled()
    payload["word_histograms"] = {
        name: hist.to_dict() for name, hist in corpus_stats(labeled).items()
    }
    return payload


def cmd_split(args) -> dict:
    dataset = import_csv(args.csv)
    spec = SplitSpec(
        train_fraction=args.train_fraction, seed=args.seed, stratified=not args.no_stratify
    )
    train, test = split_dataset(dataset, spec)
    export_csv(train, args.train_out)
    export_csv(test, args.test_out)
    return {"train_rows": len(train), "test_rows": len(test)}


def cmd_train(args) -> dict:
    cfg = _config(args)
    vocab_path = args.vocab or cfg.get("vocab")
    if not vocab_path:
        raise ForgeError("no vocabulary: pass --vocab or set the 'vocab' config key")
    vocab = load_vocab(vocab_path)
    dataset = import_csv(args.dataset)
    specs = [ModelSpec(m) for m in args.model]
    out_dir = args.out or (Path(args.workspace) / "runs" / "cli")
    result = run_training(
        dataset,
        SplitSpec(train_fraction=args.train_fraction, seed=args.seed),
        specs,
        vocab,
        seed=args.seed,
        feature_cap=args.feature_cap,
        out_dir=out_dir,
    )
    return {
        "run_dir": str(out_dir),
        "manifest": result.manifest.to_dict(),
        "table": result.report_table(),
        "report": result.report_dict(),
    }


def cmd_eval(args) -> dict:
    report_path = Path(args.run) / "report.json"
    if not report_path.exists():
        raise ForgeError(f"no report.json under {args.run}")
    report = json.loads(report_path.read_text("utf-8"))
    payload = {"report": report}
    if args.binary:
        payload["binary"] = {
            name: entry["binary"] for name, entry in report["models"].items()
        }
    return payload


def cmd_llm_classify(args) -> dict:
    from .llm import ChatProtocolConfig, HttpChatTransport, ReplayTransport, run_batch, sentence_hash
    from .metrics import build_binary_confusion

    dataset = import_csv(args.dataset)
    texts = dataset.texts[: args.limit] if args.limit else dataset.texts
    truths = dataset.labels[: args.limit] if args.limit else dataset.labels
    config = ChatProtocolConfig(model_name=args.model_name, binary=args.binary)
    if args.fixture:
        transport = ReplayTransport(
            args.fixture, live=HttpChatTransport(args.url) if args.url else None
        )
    elif args.url:
        transport = HttpChatTransport(args.url)
    else:
        raise ForgeError("provide --fixture for replay or --url for a live endpoint")
    results, failures = run_batch(transport, config, texts, cache_path=args.cache)
    by_text = {r.sentence_id: r.label for r in results}
    payload: dict = {
        "classified": len(results),
        "failures": failures,
        "results": [r.to_dict() for r in results],
    }
    if args.binary:
        pairs = [
            (1 if truth in (1, 2) else 0, 1 if by_text[sentence_hash(text)] == "ASSUMPTION" else 0)
            for text, truth in zip(texts, truths)
            if sentence_hash(text) in by_text
        ]
        if pairs:
            report = build_binary_confusion([t for t, _ in pairs], [p for _, p in pairs])
            payload["binary"] = report.to_dict()
        return payload
    name_to_value = {"NA": 0, "PA": 1, "SCA": 2}
    pairs = [
        (truth, name_to_value[by_text[sentence_hash(text)]])
        for text, truth in zip(texts, truths)
        if sentence_hash(text) in by_text
    ]
    if pairs:
        cm = build_confusion([t for t, _ in pairs], [p for _, p in pairs])
        payload["confusion"] = cm.to_lists()
        payload["metrics"] = metrics(cm).to_dict()
        payload["binary"] = binary_collapse(cm).to_dict()
    return payload


def cmd_serve(args) -> dict:
    import uvicorn

    from .service import create_app

    cfg = _config(args)
    ws = Workspace(args.workspace, lexicon_path=cfg.get("lexicon"))
    vocab_path = args.vocab or cfg.get("vocab")
    app = create_app(ws, vocab_path=vocab_path, ui_dist=args.ui_dist)
    uvicorn.run(app, host=cfg.get("host", args.host), port=int(cfg.get("port", args.port)))
    return {"stopped": True}


def cmd_report(args) -> dict:
    table_path = Path(args.run) / "report.txt"
    if not table_path.exists():
        raise ForgeError(f"no report.txt under {args.run}")
    return {"table": table_path.read_text("utf-8")}


_COMMANDS = {
    "harvest": cmd_harvest,
    "extract": cmd_extract,
    "suggest": cmd_suggest,
    "annotate-import": cmd_annotate_import,
    "dataset": cmd_dataset,
    "split": cmd_split,
    "train": cmd_train,
    "eval": cmd_eval,
    "llm-classify": cmd_llm_classify,
    "serve": cmd_serve,
    "report": cmd_report,
}


def main(argv=None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        payload = _COMMANDS[args.command](args)
    except ForgeError as exc:
        print(json.dumps({"error": exc.payload()}, indent=2), file=sys.stderr)
        return 1
    _emit(args, payload, text=payload.get("table"))
    return 0


if __name__ == "__main__":
    sys.exit(main())
