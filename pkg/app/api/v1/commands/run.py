# app/api/v1/commands/run.py
import argparse

from app.api.deps import emit, parse_input_csv, protocol_repo, write_artifact
from app.core.config import get_settings
from app.domain.services.execution_svc import export_graph, export_trace, reachable, run_random
from app.domain.services.semantics_svc import global_input, global_output
from app.utils.textfmt import format_configuration, format_value


def register(subparsers) -> None:
    settings = get_settings()
    p = subparsers.add_parser("run", help="seeded random run from an input vector")
    p.add_argument("protocol", help="protocol file (or library name)")
    p.add_argument("--input", dest="vector", required=True, help="comma-separated input symbols")
    p.add_argument("--seed", type=int, default=settings.DEFAULT_SEED)
    p.add_argument("--max-steps", type=int, default=settings.RANDOM_MAX_STEPS)
    p.add_argument("--trace", help="write the trace to this file")
    p.add_argument("--graph", help="write the reachability graph of the initial configuration")
    p.add_argument("--node-limit", type=int, default=None)
    p.set_defaults(handler=handle)


def handle(args: argparse.Namespace) -> int:
    spec = protocol_repo().load_source(args.protocol)
    start = global_input(spec, parse_input_csv(args.vector))
    trace = run_random(spec, start, seed=args.seed, max_steps=args.max_steps)
    if args.trace:
        write_artifact(args.trace, export_trace(trace))
    if args.graph:
        write_artifact(args.graph, export_graph(reachable(spec, start, node_limit=args.node_limit)))
    emit(
        f"steps: {len(trace.steps)}\n"
        f"final: {format_configuration(trace.final, inline=True)}\n"
        f"output: {format_value(global_output(spec, trace.final))}"
    )
    return 0
