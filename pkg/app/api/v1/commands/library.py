# app/api/v1/commands/library.py
import argparse

from app.api.deps import emit
from app.domain.models.report import Verdict
from app.domain.services import library_svc
from app.utils.textfmt import format_protocol, format_reports


def register(subparsers) -> None:
    p = subparsers.add_parser("library", help="list, print or self-test the shipped protocols")
    p.add_argument("name", nargs="?", help="print this entry in the text format")
    p.add_argument("--self-test", action="store_true", help="check entries against their predicates")
    p.add_argument("--max-n", type=int, default=None, help="self-test bound (default: per entry)")
    p.add_argument("--node-limit", type=int, default=None)
    p.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    entries = [library_svc.get_entry(args.name)] if args.name else library_svc.entries()
    if args.self_test:
        reports = [library_svc.self_test(e, max_n=args.max_n, node_limit=args.node_limit) for e in entries]
        emit(format_reports(reports))
        return 0 if all(r.verdict is Verdict.PASS for r in reports) else 1
    if args.name:
        entry = entries[0]
        header = f"# {entry.description}\n"
        if entry.notes:
            header += f"# {entry.notes}\n"
        emit(header + format_protocol(entry.spec))
    else:
        emit("".join(f"{e.name}: {e.description}\n" for e in entries))
    return 0
