"""Command-line interface: `export` writes an interchange file, `serve`
runs the /embed HTTP service."""

from __future__ import annotations

import argparse
import sys

from .export import ExportJob, export
from .service import serve


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="embed-exporter",
        description="Batch sentence embeddings and the /embed service",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("export", help="embed a sentence list to JSONL")
    p.add_argument("--input", required=True, help="one sentence per line")
    p.add_argument("--model", required=True)
    p.add_argument("--out", required=True)
    p.add_argument("--pooling", choices=["mean", "cls"], default="mean")
    p.add_argument("--batch-size", type=int, default=32)
    p.add_argument("--device", default="cpu")

    p = sub.add_parser("serve", help="run the /embed HTTP service")
    p.add_argument("--model", required=True)
    p.add_argument("--pooling", choices=["mean", "cls"], default="mean")
    p.add_argument("--port", type=int, default=8000)
    p.add_argument("--host", default="127.0.0.1")
    p.add_argument("--device", default="cpu")

    return parser


def main(argv: list[str] | None = None) -> int:
    args = build_parser().parse_args(argv)
    if args.command == "export":
        job = ExportJob(input_path=args.input, model_name=args.model,
                        output_path=args.out, pooling=args.pooling,
                        batch_size=args.batch_size, device=args.device)
        try:
            count = export(job)
        except Exception as exc:
            print(f"error: export failed: {exc}", file=sys.stderr)
            return 1
        print(f"wrote {count} records to {args.out}")
        return 0
    serve(args.model, pooling=args.pooling, port=args.port,
          host=args.host, device=args.device)
    return 0


if __name__ == "__main__":
    sys.exit(main())
