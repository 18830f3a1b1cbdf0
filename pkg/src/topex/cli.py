"""Command-line interface.

Subcommands: train, summarize, aspect, evaluate, analyze, export-reps.
Settings resolve in three layers: profile defaults, then a key=value config
file, then explicit flags. Every JSON artifact embeds the resolved run
configuration and SHA-256 hashes of its input files, so identical inputs
reproduce identical artifacts byte for byte.

Exit codes: 0 ok; 2 configuration/argument error; 3 malformed or invalid
data file; 4 I/O failure; 5 unknown entity/aspect or missing reference;
1 unexpected error.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import math
import sys
from pathlib import Path

from . import analysis as analysis_mod
from . import corpus as corpus_mod
from . import dict_learning as dl
from . import embeddings as emb
from . import representations as reps_mod
from . import rouge as rouge_mod
from . import selection as sel
from .errors import (
    ConfigError,
    DegenerateSentenceError,
    DuplicateReviewError,
    FormatError,
    ParseError,
    TopexError,
    TrainingError,
    TruncatedFileError,
    ValidationError,
)

PROFILES = {
    "paper": {
        "dict_size": 8192,
        "n_layers": 6,
        "embed_dim": 768,
        "lr": 1e-5,
        "batch_size": 256,
        "steps": 15000,
    },
    "desk": {
        "dict_size": 512,
        "n_layers": 2,
        "lr": 1e-3,
        "batch_size": 64,
        "steps": 2000,
    },
}

EXIT_CONFIG = 2
EXIT_DATA = 3
EXIT_IO = 4
EXIT_LOOKUP = 5


def sha256_file(path: str | Path) -> str:
    digest = hashlib.sha256()
    with open(path, "rb") as fh:
        for chunk in iter(lambda: fh.read(1 << 20), b""):
            digest.update(chunk)
    return digest.hexdigest()


def parse_config_file(path: str | Path) -> dict:
    """key=value lines; '#' comments; values coerced to int/float/bool if possible."""
    settings: dict = {}
    with open(path, encoding="utf-8") as fh:
        for lineno, raw in enumerate(fh, start=1):
            line = raw.split("#", 1)[0].strip()
            if not line:
                continue
            if "=" not in line:
                raise ConfigError(f"{path}:{lineno}: expected key=value, got {raw!r}")
            key, value = (part.strip() for part in line.split("=", 1))
            key = key.replace("-", "_")
            if value.lower() in ("true", "false"):
                settings[key] = value.lower() == "true"
                continue
            for cast in (int, float):
                try:
                    settings[key] = cast(value)
                    break
                except ValueError:
                    continue
            else:
                settings[key] = value.strip("\"'")
    return settings


def _resolve(args: argparse.Namespace, names: dict[str, object]) -> dict:
    """Layer profile defaults, config file, then explicit flags."""
    resolved = dict(names)
    if getattr(args, "profile", None):
        for key, value in PROFILES[args.profile].items():
            if key in resolved:
                resolved[key] = value
    if getattr(args, "config", None):
        for key, value in parse_config_file(args.config).items():
            if key in resolved:
                resolved[key] = value
    for key in resolved:
        flag_value = getattr(args, key, None)
        if flag_value is not None:
            resolved[key] = flag_value
    return resolved


def _json_float(x: float):
    return None if x is None or math.isinf(x) or math.isnan(x) else float(x)


def _write_json(payload: dict, path: str | Path) -> None:
    with open(path, "w", encoding="utf-8") as fh:
        json.dump(payload, fh, sort_keys=True, indent=2)
        fh.write("\n")


def _provenance(config: dict, inputs: dict[str, str | None]) -> dict:
    return {
        "config": {k: v for k, v in sorted(config.items())},
        "inputs": {
            name: sha256_file(path) for name, path in sorted(inputs.items()) if path
        },
    }


def _load_reps(args, corpus) -> dict[str, list[reps_mod.TopicalRep]]:
    if getattr(args, "reps", None):
        store = emb.read_rep_file(args.reps)
        by_entity = reps_mod.store_to_reps(store)
        missing = [e for e in corpus.entity_ids() if e not in by_entity]
        if missing:
            raise KeyError(f"representation dump lacks entities {missing}")
        return by_entity
    if not (getattr(args, "checkpoint", None) and getattr(args, "embeddings", None)):
        raise ConfigError("need either --reps or both --checkpoint and --embeddings")
    state = dl.load_checkpoint(args.checkpoint)
    store = emb.read_embedding_file(args.embeddings)
    if store.dim != state.config.embed_dim:
        raise ConfigError(
            f"embedding dim {store.dim} != checkpoint embed_dim {state.config.embed_dim}"
        )
    return reps_mod.corpus_representations(state, corpus, store)


def cmd_train(args) -> int:
    store = emb.read_embedding_file(args.embeddings)
    settings = _resolve(
        args,
        {
            "dict_size": 8192,
            "n_layers": 6,
            "embed_dim": None,
            "hidden_dim": None,
            "lr": 1e-5,
            "batch_size": 256,
            "steps": 15000,
            "l1_weight": 1.0,
        },
    )
    if settings["embed_dim"] is None:
        settings["embed_dim"] = store.dim
    config = dl.TrainConfig(seed=args.seed, **settings)
    if args.corpus:
        corpus = corpus_mod.load_corpus(args.corpus)
        corpus_keys = set(corpus.sent_keys())
        store_keys = set(store.sentences)
        if corpus_keys != store_keys:
            raise ConfigError(
                f"corpus and embeddings disagree on sentence keys "
                f"({len(corpus_keys - store_keys)} missing from embeddings, "
                f"{len(store_keys - corpus_keys)} unknown to corpus)"
            )
    inputs = {"embeddings": args.embeddings}
    if args.corpus:
        inputs["corpus"] = args.corpus
    extra = _provenance(dict(settings, seed=args.seed), inputs)

    print("step\trecon_kernel\trecon_dict\tsparsity\ttotal", file=sys.stderr)
    last_total = [None]

    def on_step(step: int, breakdown: dl.LossBreakdown) -> None:
        last_total[0] = breakdown.total
        if step % 100 == 0 or step == config.steps:
            print(
                f"{step}\t{breakdown.recon_kernel:.6g}\t{breakdown.recon_dict:.6g}"
                f"\t{breakdown.sparsity:.6g}\t{breakdown.total:.6g}",
                file=sys.stderr,
            )

    dl.train(config, store, args.checkpoint_dir, on_step=on_step, checkpoint_extra=extra)
    final = Path(args.checkpoint_dir) / "final.gsck"
    loss_note = f"final total loss {last_total[0]:.6g}" if last_total[0] is not None else "no steps run"
    print(f"trained {config.steps} steps; {loss_note}; checkpoint {final}")
    return 0


def _entity_texts(corpus, entity_id) -> dict[int, str]:
    return {s.sent_id: s.text for s in corpus.entity(entity_id).sentences()}


def cmd_summarize(args) -> int:
    corpus = corpus_mod.load_corpus(args.corpus)
    by_entity = _load_reps(args, corpus)
    entities_out = []
    for entity_id in corpus.entity_ids():
        reps = by_entity[entity_id]
        texts = _entity_texts(corpus, entity_id)
        q = min(args.q, len(reps)) if args.clip_budget else args.q
        if args.scorer == "euclidean":
            scores = sel.euclidean_importance(reps)
            ids = sel.top_q_by_score(scores, q)
            distances = {sid: -scores[sid] for sid in scores}
        else:
            result = sel.importance_scores(reps, args.k, reverse_edges=args.reverse_edges)
            ids = sel.top_q_by_score(result.scores, q)
            stray = [sid for sid in ids if sid in result.unreachable]
            if stray:
                print(
                    f"warning: {entity_id}: budget exceeds reachable sentences; "
                    f"filled with {stray}",
                    file=sys.stderr,
                )
            scores, distances = result.scores, result.distances
        entities_out.append(
            {
                "entity_id": entity_id,
                "mode": "general",
                "aspect": None,
                "k": args.k,
                "q": q,
                "gamma": None,
                "scorer": args.scorer,
                "selected": [
                    {
                        "sent_id": sid,
                        "score": _json_float(scores[sid]),
                        "distance": _json_float(distances[sid]),
                        "text": texts[sid],
                    }
                    for sid in ids
                ],
            }
        )
    config = {
        "command": "summarize",
        "k": args.k,
        "q": args.q,
        "scorer": args.scorer,
        "reverse_edges": args.reverse_edges,
    }
    inputs = {
        "corpus": args.corpus,
        "checkpoint": args.checkpoint,
        "embeddings": args.embeddings,
        "reps": args.reps,
    }
    _write_json(
        {"provenance": _provenance(config, inputs), "entities": entities_out}, args.out
    )
    return 0


def cmd_aspect(args) -> int:
    corpus = corpus_mod.load_corpus(args.corpus)
    lexicons = corpus_mod.load_aspect_lexicons(args.lexicon)
    if args.aspect not in lexicons:
        raise KeyError(
            f"unknown aspect {args.aspect!r}; available: {sorted(lexicons)}"
        )
    lexicon = lexicons[args.aspect]
    by_entity = _load_reps(args, corpus)
    entities_out = []
    for entity_id in corpus.entity_ids():
        reps = by_entity[entity_id]
        texts = _entity_texts(corpus, entity_id)
        aspect_ids = corpus_mod.match_aspect_sentences(
            corpus, entity_id, lexicon, fold_plurals=not args.no_plural_fold
        )
        if not aspect_ids:
            print(
                f"warning: {entity_id}: no sentences match aspect "
                f"{args.aspect!r}; entity skipped",
                file=sys.stderr,
            )
            continue
        q = min(args.q, len(reps)) if args.clip_budget else args.q
        combined, aspect_result = sel.aspect_scores(
            reps, aspect_ids, args.gamma, args.k, reverse_edges=args.reverse_edges
        )
        ids = sel.top_q_by_score(combined, q)
        entities_out.append(
            {
                "entity_id": entity_id,
                "mode": "aspect",
                "aspect": args.aspect,
                "k": args.k,
                "q": q,
                "gamma": args.gamma,
                "scorer": "geodesic",
                "selected": [
                    {
                        "sent_id": sid,
                        "score": _json_float(combined[sid]),
                        "distance": _json_float(aspect_result.distances[sid]),
                        "text": texts[sid],
                    }
                    for sid in ids
                ],
            }
        )
    config = {
        "command": "aspect",
        "aspect": args.aspect,
        "gamma": args.gamma,
        "k": args.k,
        "q": args.q,
        "reverse_edges": args.reverse_edges,
        "plural_fold": not args.no_plural_fold,
    }
    inputs = {
        "corpus": args.corpus,
        "checkpoint": args.checkpoint,
        "embeddings": args.embeddings,
        "reps": args.reps,
        "lexicon": args.lexicon,
    }
    _write_json(
        {"provenance": _provenance(config, inputs), "entities": entities_out}, args.out
    )
    return 0


def cmd_evaluate(args) -> int:
    with open(args.summaries, encoding="utf-8") as fh:
        summary_payload = json.load(fh)
    with open(args.gold, encoding="utf-8") as fh:
        gold = json.load(fh)
    summaries = {
        entry["entity_id"]: [item["text"] for item in entry["selected"]]
        for entry in summary_payload["entities"]
    }
    stopwords = None
    if args.stopwords:
        with open(args.stopwords, encoding="utf-8") as fh:
            stopwords = frozenset(w.strip().lower() for w in fh if w.strip())
    report = rouge_mod.evaluate_run(
        summaries,
        gold,
        aggregate=args.aggregate,
        stemming=args.stemming,
        stopwords=stopwords,
    )
    config = {"command": "evaluate", "aggregate": args.aggregate, "stemming": args.stemming}
    inputs = {"summaries": args.summaries, "gold": args.gold, "stopwords": args.stopwords}
    report["provenance"] = _provenance(config, inputs)
    _write_json(report, args.out)
    means = report["mean"]
    print(
        f"ROUGE-F means: r1 {means['r1']:.4f}  r2 {means['r2']:.4f}  rl {means['rl']:.4f}"
    )
    return 0


def cmd_analyze(args) -> int:
    corpus = corpus_mod.load_corpus(args.corpus)
    by_entity = _load_reps(args, corpus)
    config = {
        "command": "analyze",
        "clusters": args.clusters,
        "metric": args.metric,
        "k": args.k,
        "q": args.q,
    }
    inputs = {
        "corpus": args.corpus,
        "checkpoint": args.checkpoint,
        "embeddings": args.embeddings,
        "reps": args.reps,
    }
    did_something = False
    if args.sparsity:
        all_reps = [r for reps in by_entity.values() for r in reps]
        means, stds = reps_mod.sparsity_profile(all_reps)
        with open(args.sparsity, "w", newline="", encoding="utf-8") as fh:
            writer = csv.writer(fh)
            writer.writerow(["rank", "mean", "std"])
            for rank, (mu, sigma) in enumerate(zip(means, stds)):
                writer.writerow([rank, repr(float(mu)), repr(float(sigma))])
        print(f"sparsity curve over {len(all_reps)} representations -> {args.sparsity}")
        did_something = True
    if args.clusters:
        report_entities = {}
        for entity_id in corpus.entity_ids():
            reps = by_entity[entity_id]
            texts = _entity_texts(corpus, entity_id)
            n_clusters = min(args.clusters, len(reps))
            assignment = analysis_mod.ward_clustering(reps, n_clusters, metric=args.metric)
            clusters: dict[str, list[str]] = {}
            for sid in sorted(assignment.labels):
                clusters.setdefault(str(assignment.labels[sid]), []).append(texts[sid])
            report_entities[entity_id] = {"clusters": clusters}
        payload = {
            "provenance": _provenance(config, inputs),
            "entities": report_entities,
        }
        _write_json(payload, args.out)
        print(f"cluster report -> {args.out}")
        did_something = True
    if args.compare_scorers:
        comparison = {}
        for entity_id in corpus.entity_ids():
            reps = by_entity[entity_id]
            q = min(args.q, len(reps))
            comparison[entity_id] = analysis_mod.compare_scorers(reps, q, args.k)
        payload = {"provenance": _provenance(config, inputs), "entities": comparison}
        _write_json(payload, args.compare_scorers)
        print(f"scorer comparison -> {args.compare_scorers}")
        did_something = True
    if not did_something:
        raise ConfigError("analyze needs --sparsity, --clusters, or --compare-scorers")
    return 0


def cmd_export_reps(args) -> int:
    corpus = corpus_mod.load_corpus(args.corpus)
    state = dl.load_checkpoint(args.checkpoint)
    store = emb.read_embedding_file(args.embeddings)
    if store.dim != state.config.embed_dim:
        raise ConfigError(
            f"embedding dim {store.dim} != checkpoint embed_dim {state.config.embed_dim}"
        )
    by_entity = reps_mod.corpus_representations(state, corpus, store)
    rep_store = reps_mod.reps_to_store(by_entity)
    emb.write_rep_file(rep_store, args.out)
    print(f"wrote {len(rep_store.vectors)} representations -> {args.out}")
    return 0


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="topex",
        description="Extractive opinion summarization over topical representations.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    train = sub.add_parser("train", help="learn dictionary layers from embeddings")
    train.add_argument("--embeddings", required=True)
    train.add_argument("--corpus", help="optional; validates sentence keys against embeddings")
    train.add_argument("--checkpoint-dir", required=True)
    train.add_argument("--seed", type=int, required=True)
    train.add_argument("--profile", choices=sorted(PROFILES))
    train.add_argument("--config", help="key=value config file")
    train.add_argument("--dict-size", "--m", dest="dict_size", type=int)
    train.add_argument("--layers", dest="n_layers", type=int)
    train.add_argument("--embed-dim", dest="embed_dim", type=int)
    train.add_argument("--hidden-dim", dest="hidden_dim", type=int)
    train.add_argument("--lr", type=float)
    train.add_argument("--batch-size", dest="batch_size", type=int)
    train.add_argument("--steps", type=int)
    train.add_argument("--l1-weight", dest="l1_weight", type=float)
    train.set_defaults(func=cmd_train)

    def add_rep_source(p):
        p.add_argument("--corpus", required=True)
        p.add_argument("--checkpoint")
        p.add_argument("--embeddings")
        p.add_argument("--reps", help="GSRP dump; bypasses checkpoint and embeddings")

    summarize = sub.add_parser("summarize", help="general extractive summaries")
    add_rep_source(summarize)
    summarize.add_argument("--out", required=True)
    summarize.add_argument("--k", type=int, default=10)
    summarize.add_argument("--q", type=int, default=10)
    summarize.add_argument("--scorer", choices=("geodesic", "euclidean"), default="geodesic")
    summarize.add_argument("--reverse-edges", action="store_true")
    summarize.add_argument(
        "--clip-budget",
        action="store_true",
        help="shrink q to the entity sentence count instead of erroring",
    )
    summarize.set_defaults(func=cmd_summarize)

    aspect = sub.add_parser("aspect", help="aspect-specific extractive summaries")
    add_rep_source(aspect)
    aspect.add_argument("--lexicon", required=True)
    aspect.add_argument("--aspect", required=True)
    aspect.add_argument("--out", required=True)
    aspect.add_argument("--gamma", type=float, default=0.5)
    aspect.add_argument("--k", type=int, default=10)
    aspect.add_argument("--q", type=int, default=10)
    aspect.add_argument("--reverse-edges", action="store_true")
    aspect.add_argument("--clip-budget", action="store_true")
    aspect.add_argument("--no-plural-fold", action="store_true")
    aspect.set_defaults(func=cmd_aspect)

    evaluate = sub.add_parser("evaluate", help="ROUGE against gold references")
    evaluate.add_argument("--summaries", required=True)
    evaluate.add_argument("--gold", required=True)
    evaluate.add_argument("--out", required=True)
    evaluate.add_argument("--aggregate", choices=("max", "mean"), default="max")
    evaluate.add_argument("--stemming", action="store_true")
    evaluate.add_argument("--stopwords", help="file with one stopword per line")
    evaluate.set_defaults(func=cmd_evaluate)

    analyze = sub.add_parser("analyze", help="sparsity curves, clustering, ablations")
    add_rep_source(analyze)
    analyze.add_argument("--sparsity", help="write the sorted-magnitude curve CSV here")
    analyze.add_argument("--clusters", type=int)
    analyze.add_argument("--out", help="cluster report path (with --clusters)")
    analyze.add_argument("--compare-scorers", help="write geodesic-vs-euclidean JSON here")
    analyze.add_argument("--metric", choices=("euclidean", "cosine"), default="euclidean")
    analyze.add_argument("--k", type=int, default=10)
    analyze.add_argument("--q", type=int, default=10)
    analyze.set_defaults(func=cmd_analyze)

    export = sub.add_parser("export-reps", help="cache representations as a GSRP dump")
    export.add_argument("--corpus", required=True)
    export.add_argument("--checkpoint", required=True)
    export.add_argument("--embeddings", required=True)
    export.add_argument("--out", required=True)
    export.set_defaults(func=cmd_export_reps)
    return parser


def main(argv: list[str] | None = None) -> int:
    parser = build_parser()
    args = parser.parse_args(argv)
    try:
        return args.func(args)
    except (ConfigError, ValueError, TrainingError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_CONFIG
    except (ParseError, FormatError, ValidationError, DuplicateReviewError,
            DegenerateSentenceError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_DATA
    except (TruncatedFileError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return EXIT_IO
    except KeyError as exc:
        message = exc.args[0] if exc.args else exc
        print(f"error: {message}", file=sys.stderr)
        return EXIT_LOOKUP
    except TopexError as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
