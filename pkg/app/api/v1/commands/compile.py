# app/api/v1/commands/compile.py
import argparse
import logging

from app.api.deps import emit, protocol_repo, write_artifact
from app.domain.errors import MalformedSource
from app.domain.services.compiler_svc import compile_protocol
from app.utils.textfmt import format_protocol

logger = logging.getLogger(__name__)


def register(subparsers) -> None:
    p = subparsers.add_parser("compile", help="compile a PP/MPP protocol into an IOMPP")
    p.add_argument("input", help="source protocol file (or library name)")
    p.add_argument("output", help="compiled protocol file, '-' for stdout")
    p.add_argument("--model", choices=("pp", "mpp"), help="expected source model")
    p.add_argument("--use-t6", action="store_true", help="shortcut transitions that keep their initiator")
    p.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    source = protocol_repo().load_source(args.input)
    if args.model and args.model != source.model:
        raise MalformedSource(f"{args.input} is a {source.model} protocol, not {args.model}")
    compiled = compile_protocol(source, use_shortcut=args.use_t6)
    write_artifact(args.output, format_protocol(compiled))
    if args.output != "-":
        counts = " ".join(f"{f}={c}" for f, c in compiled.family_counts().items())
        emit(f"{args.output}: {len(compiled.spec.transitions)} transitions ({counts} merged={compiled.merged_count})")
    return 0
