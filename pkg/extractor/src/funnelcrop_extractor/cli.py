"""CLI: extract a dump from a model, or validate an existing dump file."""

import argparse
import sys

from .errors import ExtractionError
from .extractor import ExtractionJob, extract
from .validate import validate_dump


def cmd_extract(args):
    try:
        job = ExtractionJob(model_id=args.model, image_path=args.image,
                            question=args.question, out_path=args.out,
                            device=args.device)
        extract(job)
    except (ExtractionError, ValueError) as exc:
        sys.stderr.write(f"{type(exc).__name__}: {exc}\n")
        return 1
    return 0


def cmd_validate(args):
    report = validate_dump(args.dump)
    print(report.summary())
    return 0 if report.ok else 1


def main(argv=None):
    parser = argparse.ArgumentParser(
        prog="funnelcrop-extract",
        description="Capture localization attention from a multimodal model "
                    "as a funnelcrop attention dump.")
    sub = parser.add_subparsers(dest="command", required=True)

    ext = sub.add_parser("extract", help="run the localization pass")
    ext.add_argument("--model", required=True, help="model identifier")
    ext.add_argument("--image", required=True)
    ext.add_argument("--question", required=True)
    ext.add_argument("--out", required=True, help="output dump JSON path")
    ext.add_argument("--device", default="cpu")
    ext.set_defaults(func=cmd_extract)

    val = sub.add_parser("validate", help="check a dump against the schema")
    val.add_argument("dump")
    val.set_defaults(func=cmd_validate)

    args = parser.parse_args(argv)
    return args.func(args)


if __name__ == "__main__":
    sys.exit(main())
