# app/api/v1/commands/predicate.py
import argparse
import logging

from app.api.deps import emit, protocol_repo
from app.core.config import get_settings
from app.domain.errors import InvalidParameter
from app.domain.models.protocol import Outcome
from app.domain.services.constants import MIN_POPULATION
from app.domain.services.execution_svc import predicate_value
from app.domain.services.verifier_svc import input_vectors
from app.utils.textfmt import format_predicate_table

logger = logging.getLogger(__name__)

EXIT_NOT_WELL_SPECIFIED = 3


def register(subparsers) -> None:
    p = subparsers.add_parser("predicate", help="tabulate the computed predicate for all small inputs")
    p.add_argument("protocol", help="protocol file (or library name)")
    p.add_argument("--max-n", type=int, default=get_settings().DEFAULT_MAX_N)
    p.add_argument("--node-limit", type=int, default=None)
    p.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    if args.max_n < MIN_POPULATION:
        raise InvalidParameter(f"--max-n must be at least {MIN_POPULATION}")
    spec = protocol_repo().load_source(args.protocol)
    rows = [
        (inp, predicate_value(spec, inp, node_limit=args.node_limit))
        for inp in input_vectors(spec.alphabet, MIN_POPULATION, args.max_n)
    ]
    emit(format_predicate_table(rows))
    nws = sum(1 for _, v in rows if v is Outcome.NOT_WELL_SPECIFIED)
    if nws:
        logger.warning("%d of %d input vectors are not well specified", nws, len(rows))
        return EXIT_NOT_WELL_SPECIFIED
    return 0
