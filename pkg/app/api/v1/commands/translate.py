# app/api/v1/commands/translate.py
import argparse

from app.api.deps import emit, protocol_repo, read_text_arg
from app.domain.services.compiler_svc import compile_protocol
from app.domain.services.semantics_svc import check_configuration
from app.domain.services.translation_svc import translate
from app.utils.textfmt import format_configuration, parse_configuration


def register(subparsers) -> None:
    p = subparsers.add_parser("translate", help="print the compiled image of a source configuration")
    p.add_argument("--protocol", required=True, help="source protocol file (or library name)")
    p.add_argument("--config", required=True, help="configuration text (rows split by ';') or a file")
    p.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    source = protocol_repo().load_source(args.protocol)
    config = parse_configuration(read_text_arg(args.config), source)
    check_configuration(source, config)
    emit(format_configuration(translate(config, compile_protocol(source))))
    return 0
