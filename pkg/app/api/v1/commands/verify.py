# app/api/v1/commands/verify.py
import argparse
import logging

from app.api.deps import emit, protocol_repo
from app.core.config import get_settings
from app.domain.models.report import Verdict
from app.domain.services.constants import ALL_CHECKS, DEFAULT_CHECKS
from app.domain.services.verifier_svc import verify_all
from app.utils import jsonx
from app.utils.textfmt import format_reports

logger = logging.getLogger(__name__)

EXIT_FAIL = 1
EXIT_INCONCLUSIVE = 4


def register(subparsers) -> None:
    settings = get_settings()
    p = subparsers.add_parser("verify", help="check a compiled protocol against its source")
    p.add_argument("--source", required=True, help="source protocol file (or library name)")
    p.add_argument("--target", required=True, help="compiled protocol file")
    p.add_argument(
        "--checks", default=",".join(DEFAULT_CHECKS),
        help=f"comma-separated subset of {','.join(ALL_CHECKS)}",
    )
    p.add_argument("--max-n", type=int, default=settings.DEFAULT_MAX_N)
    p.add_argument("--node-limit", type=int, default=None)
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    p.add_argument("--runs", type=int, default=0, help="random runs for trace projection and smoke")
    p.add_argument("--format", choices=("text", "json"), default=settings.REPORT_FORMAT)
    p.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    repo = protocol_repo()
    source = repo.load_source(args.source)
    compiled = repo.load_compiled(args.target)
    checks = [c.strip() for c in args.checks.split(",") if c.strip()]
    reports = verify_all(
        source, compiled, checks=checks, max_n=args.max_n,
        node_limit=args.node_limit, seed=args.seed, runs=args.runs,
    )
    if args.format == "json":
        emit(jsonx.dumps([r.model_dump(mode="json") for r in reports]))
    else:
        emit(format_reports(reports))

    verdicts = {r.verdict for r in reports}
    if Verdict.FAIL in verdicts:
        return EXIT_FAIL
    if Verdict.INCONCLUSIVE in verdicts:
        return EXIT_INCONCLUSIVE
    return 0
