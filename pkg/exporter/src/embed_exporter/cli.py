"""Command-line entry points: export and export-synthetic."""

from __future__ import annotations

import argparse
import sys

from .export import export, export_synthetic


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-exporter",
        description="Extract frozen per-token embeddings into GSEM files.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    real = sub.add_parser("export", help="run a pretrained encoder over the corpus")
    real.add_argument("--corpus", required=True)
    real.add_argument("--encoder", required=True, help="model name or local directory")
    real.add_argument("--out", required=True)
    real.add_argument("--max-len", type=int, default=128)

    synth = sub.add_parser("export-synthetic", help="hash-seeded embeddings, no ML stack")
    synth.add_argument("--corpus", required=True)
    synth.add_argument("--dim", type=int, required=True)
    synth.add_argument("--seed", type=int, required=True)
    synth.add_argument("--out", required=True)
    synth.add_argument("--max-len", type=int, default=128)
    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    try:
        if args.command == "export":
            manifest = export(args.corpus, args.encoder, args.out, max_len=args.max_len)
        else:
            manifest = export_synthetic(
                args.corpus, args.dim, args.seed, args.out, max_len=args.max_len
            )
    except (ValueError, OSError, KeyError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 2
    print(
        f"wrote {manifest.sentence_count} sentences (dim {manifest.dim}, "
        f"{len(manifest.skipped)} skipped) -> {args.out}"
    )
    return 0


if __name__ == "__main__":
    sys.exit(main())
