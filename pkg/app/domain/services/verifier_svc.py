# app/domain/services/verifier_svc.py
"""
Bounded machine checks relating a source protocol to its compilation.

Every check explores the configurations reachable from the initial
configurations of the given input vectors and returns a VerificationReport.
A failing report carries a Witness that replays from its `start`
configuration (see `replay_witness`).
"""
import itertools
import logging
import time
from typing import Callable, Dict, Iterable, Iterator, List, Optional, Sequence, Sized, Tuple

import numpy as np

from app.core.config import get_settings
from app.domain.errors import InvalidParameter, NotCleanable, StateSpaceExceeded, StepNotEnabled
from app.domain.models.configuration import AnyConfiguration, MediatedConfiguration
from app.domain.models.protocol import Outcome, ProtocolSpec, StepLabel
from app.domain.models.report import Verdict, VerificationReport, Witness
from app.domain.models.simulation import CompiledProtocol, Family, SideKind
from app.domain.services.compiler_svc import generated_from
from app.domain.services.constants import (
    ALL_CHECKS,
    CHECK_COMPLETENESS,
    CHECK_DEADLOCKS,
    CHECK_IO,
    CHECK_OBSERVATIONS,
    CHECK_PREDICATE,
    CHECK_SMOKE,
    CHECK_SOUNDNESS,
    CHECK_STABILITY,
    DEFAULT_CHECKS,
    MIN_POPULATION,
    PROJECTION_MAX_STEPS,
    SMOKE_POPULATION,
    SMOKE_RUNS,
)
from app.domain.services.execution_svc import (
    ReachabilityGraph,
    output_stable,
    predicate_value,
    reachable,
    run_random,
    stable_outputs,
    terminal_scc_ids,
)
from app.domain.services.semantics_svc import apply_step, enabled_steps, global_input, global_output, is_enabled
from app.domain.services.translation_svc import (
    cleanup_schedule,
    normalize,
    project_trace,
    step_of_family,
    translate,
)
from app.utils.textfmt import format_configuration, format_step, format_value, parse_configuration, parse_step

logger = logging.getLogger(__name__)


class _Failed(Exception):
    """Internal short-circuit carrying the first witness of a check."""

    def __init__(self, witness: Witness):
        self.witness = witness


def input_vectors(alphabet: Sequence[str], min_n: int, max_n: int) -> Iterator[Tuple[str, ...]]:
    """All vectors over `alphabet` with min_n <= length <= max_n, by length then lexicographically."""
    for n in range(min_n, max_n + 1):
        yield from itertools.product(alphabet, repeat=n)


def input_count(alphabet: Sequence[str], min_n: int, max_n: int) -> int:
    return sum(len(alphabet) ** n for n in range(min_n, max_n + 1))


class InputRange:
    """
    Input vectors of length min_n..max_n, generated lazily on every iteration.
    `count` comes from the alphabet size and the bounds.
    """
    __slots__ = ("alphabet", "min_n", "max_n")

    def __init__(self, alphabet: Sequence[str], min_n: int, max_n: int):
        self.alphabet = tuple(alphabet)
        self.min_n = min_n
        self.max_n = max_n

    def __iter__(self) -> Iterator[Tuple[str, ...]]:
        return input_vectors(self.alphabet, self.min_n, self.max_n)

    @property
    def count(self) -> int:
        return input_count(self.alphabet, self.min_n, self.max_n)


def _cfg(config: AnyConfiguration) -> str:
    return format_configuration(config, inline=True)


def _steps(labels: Iterable[StepLabel]) -> Tuple[str, ...]:
    return tuple(format_step(label) for label in labels)


def _run_check(
    check: str,
    params: Dict[str, str],
    body: Callable[[List[int]], Optional[str]],
) -> VerificationReport:
    """
    Run `body` (which bumps counter[0] per examined item and may raise _Failed)
    and turn its outcome into a report. StateSpaceExceeded -> inconclusive,
    NotCleanable -> fail.
    """
    counter = [0]
    t0 = time.perf_counter()
    try:
        note = body(counter)
        report = VerificationReport(check=check, params=params, verdict=Verdict.PASS, checked=counter[0], note=note)
    except _Failed as f:
        report = VerificationReport(check=check, params=params, verdict=Verdict.FAIL, checked=counter[0], witness=f.witness)
    except StateSpaceExceeded as e:
        report = VerificationReport(
            check=check, params=params, verdict=Verdict.INCONCLUSIVE, checked=counter[0],
            note=f"state space exceeded node_limit={e.node_limit}",
        )
    logger.info(
        "check=%s verdict=%s checked=%d time=%.3fs",
        check, report.verdict.value, report.checked, time.perf_counter() - t0,
    )
    return report


def _params(source: ProtocolSpec, compiled: Optional[CompiledProtocol], inputs, node_limit, **extra) -> Dict[str, str]:
    params = {
        "source": source.name or source.model if source is not None else "-",
        "node_limit": str(node_limit if node_limit is not None else get_settings().NODE_LIMIT),
    }
    if compiled is not None:
        params["target"] = compiled.spec.name or "compiled"
        params["simulation"] = compiled.source_model
    if isinstance(inputs, InputRange):
        params["inputs"] = str(inputs.count)
        params["n"] = f"{inputs.min_n}..{inputs.max_n}"
    elif isinstance(inputs, Sized):
        params["inputs"] = str(len(inputs))
        if inputs:
            params["n"] = f"{min(len(v) for v in inputs)}..{max(len(v) for v in inputs)}"
    params.update({k: str(v) for k, v in extra.items()})
    return params


def _source_graph(source: ProtocolSpec, inp, node_limit) -> ReachabilityGraph:
    return reachable(source, global_input(source, inp), node_limit=node_limit, symmetry_reduction=False)


# ---- operational correspondence -----------------------------------------------

_SIMULATION_ORDER = ((Family.T1, False), (Family.T2, True), (Family.T3, False), (Family.T4, True))


def _simulate_step(
    compiled: CompiledProtocol, before: AnyConfiguration, label: StepLabel, after: AnyConfiguration,
) -> Optional[Witness]:
    """Replay the four-step witness (or the t6 shortcut) of one source step from the translated configuration."""
    spec = compiled.spec
    a, b = label.initiator, label.responder
    current = translate(before, compiled)
    start = _cfg(current)
    target = translate(after, compiled)
    done: List[StepLabel] = []
    order = _SIMULATION_ORDER
    shortcut = generated_from(compiled, Family.T6, label.transition)
    if shortcut:
        order = ((Family.T6, False),)

    for family, swapped in order:
        i, j = (b, a) if swapped else (a, b)
        step = next(
            (StepLabel(k, i, j) for k in generated_from(compiled, family, label.transition)
             if is_enabled(spec, current, StepLabel(k, i, j))),
            None,
        )
        if step is None:
            return Witness(
                description=(
                    f"source step {format_step(label)}: no enabled {family.value} "
                    f"instance for initiator={i} responder={j}"
                ),
                start=start,
                steps=_steps(done),
                expected=_cfg(target),
                found=_cfg(current),
            )
        done.append(step)
        current = apply_step(spec, current, step)

    if current != target:
        return Witness(
            description=f"source step {format_step(label)}: simulation ends outside the translated successor",
            start=start, steps=_steps(done), expected=_cfg(target), found=_cfg(current),
        )
    return None


def check_completeness(
    source: ProtocolSpec, compiled: CompiledProtocol, inputs: Iterable[Tuple[str, ...]],
    node_limit: Optional[int] = None,
) -> VerificationReport:
    """Every source step C -> C' is matched by t1 t2 t3 t4 (or t6) from [C] to [C']."""
    def body(counter):
        for inp in inputs:
            graph = _source_graph(source, inp, node_limit)
            for src, label, dst in graph.iter_edges():
                counter[0] += 1
                witness = _simulate_step(compiled, graph.nodes[src], label, graph.nodes[dst])
                if witness is not None:
                    raise _Failed(witness.model_copy(update={"input": inp}))
        return None

    return _run_check(CHECK_COMPLETENESS, _params(source, compiled, inputs, node_limit), body)


def check_soundness(
    source: ProtocolSpec, compiled: CompiledProtocol, inputs: Iterable[Tuple[str, ...]],
    node_limit: Optional[int] = None,
    project_traces: bool = False,
    seed: Optional[int] = None,
    runs: int = 0,
    max_steps: int = PROJECTION_MAX_STEPS,
) -> VerificationReport:
    """
    Every compiled configuration D reachable from a translated input cleans up
    to [normalize(D)], and normalize(D) is reachable in the source. With
    `project_traces`, `runs` seeded random compiled runs per input are also
    projected onto source paths.
    """
    seed = get_settings().DEFAULT_SEED if seed is None else seed

    def body(counter):
        for inp in inputs:
            src_graph = _source_graph(source, inp, node_limit)
            root = translate(src_graph.root, compiled)
            graph = reachable(compiled.spec, root, node_limit=node_limit, symmetry_reduction=False)
            for node, config in enumerate(graph.nodes):
                counter[0] += 1
                path = graph.path_to(node)
                try:
                    schedule = cleanup_schedule(config, compiled)
                except NotCleanable as e:
                    raise _Failed(Witness(
                        description=f"cleanup blocked: {e}",
                        input=inp, start=_cfg(root), steps=_steps(path + list(e.steps)),
                        found=_cfg(e.configuration),
                    ))
                image = normalize(config, compiled)
                expected = translate(image, compiled)
                if schedule.endpoint != expected:
                    raise _Failed(Witness(
                        description="cleanup ends outside the translation of the normalized configuration",
                        input=inp, start=_cfg(root), steps=_steps(path + list(schedule.steps)),
                        expected=_cfg(expected), found=_cfg(schedule.endpoint),
                    ))
                if image not in src_graph:
                    raise _Failed(Witness(
                        description="normalized configuration is not reachable in the source",
                        input=inp, start=_cfg(root), steps=_steps(path),
                        found=_cfg(image),
                    ))

            if project_traces:
                for r in range(runs):
                    trace = run_random(compiled.spec, root, seed=seed + r, max_steps=max_steps)
                    counter[0] += 1
                    try:
                        project_trace(source, compiled, trace)
                    except StepNotEnabled as e:
                        raise _Failed(Witness(
                            description=f"trace projection (seed={seed + r}) failed: {e}",
                            input=inp, start=_cfg(root), steps=_steps(label for label, _ in trace.steps),
                        ))
        return f"projected {runs} random runs per input" if project_traces else None

    params = _params(source, compiled, inputs, node_limit)
    if project_traces:
        params.update(seed=str(seed), runs=str(runs))
    return _run_check(CHECK_SOUNDNESS, params, body)


# ---- input / output and stability ----------------------------------------------

def check_io(
    source: ProtocolSpec, compiled: CompiledProtocol, inputs: Iterable[Tuple[str, ...]],
    node_limit: Optional[int] = None,
) -> VerificationReport:
    """[global_input(inp)] is the compiled initial configuration; outputs agree on every reachable C."""
    target = compiled.spec

    def body(counter):
        for inp in inputs:
            initial = global_input(source, inp)
            counter[0] += 1
            if translate(initial, compiled) != global_input(target, inp):
                raise _Failed(Witness(
                    description="translated initial configuration differs from the compiled one",
                    input=inp, protocol="source", start=_cfg(initial),
                    expected=_cfg(global_input(target, inp)), found=_cfg(translate(initial, compiled)),
                ))
            graph = _source_graph(source, inp, node_limit)
            for node, config in enumerate(graph.nodes):
                counter[0] += 1
                mine = global_output(source, config)
                theirs = global_output(target, translate(config, compiled))
                if mine != theirs:
                    raise _Failed(Witness(
                        description="output of a configuration and of its translation differ",
                        input=inp, protocol="source", start=_cfg(initial), steps=_steps(graph.path_to(node)),
                        expected=format_value(mine), found=format_value(theirs),
                    ))
        return None

    return _run_check(CHECK_IO, _params(source, compiled, inputs, node_limit), body)


def check_stability_preservation(
    source: ProtocolSpec, compiled: CompiledProtocol, inputs: Iterable[Tuple[str, ...]],
    node_limit: Optional[int] = None,
) -> VerificationReport:
    """C is output stable with value x iff [C] is output stable with value x."""
    target = compiled.spec

    def body(counter):
        for inp in inputs:
            src_graph = _source_graph(source, inp, node_limit)
            root = translate(src_graph.root, compiled)
            tgt_graph = reachable(target, root, node_limit=node_limit, symmetry_reduction=False)
            src_stable = stable_outputs(src_graph)
            tgt_stable = stable_outputs(tgt_graph)
            for node, config in enumerate(src_graph.nodes):
                counter[0] += 1
                image = translate(config, compiled)
                k = tgt_graph.id_of(image)
                theirs = tgt_stable[k] if k is not None else output_stable(target, image, node_limit=node_limit)
                mine = src_stable[node]
                if mine != theirs:
                    raise _Failed(Witness(
                        description="output stability of a configuration and of its translation differ",
                        input=inp, protocol="source", start=_cfg(src_graph.root),
                        steps=_steps(src_graph.path_to(node)),
                        expected=format_value(mine), found=format_value(theirs),
                    ))
        return None

    return _run_check(CHECK_STABILITY, _params(source, compiled, inputs, node_limit), body)


def check_predicate_equality(
    source: ProtocolSpec, compiled: CompiledProtocol, max_n: int,
    node_limit: Optional[int] = None,
) -> VerificationReport:
    """Same predicate value (NWS included) on every input vector of length 2..max_n."""
    if max_n < MIN_POPULATION:
        raise InvalidParameter(f"max_n must be at least {MIN_POPULATION}")
    inputs = InputRange(source.alphabet, MIN_POPULATION, max_n)

    def body(counter):
        nws = 0
        for inp in inputs:
            counter[0] += 1
            mine = predicate_value(source, inp, node_limit=node_limit)
            theirs = predicate_value(compiled.spec, inp, node_limit=node_limit)
            if mine != theirs:
                raise _Failed(Witness(
                    description="source and compiled protocol compute different values",
                    input=inp, start=_cfg(global_input(compiled.spec, inp)),
                    expected=format_value(mine), found=format_value(theirs),
                ))
            nws += mine is Outcome.NOT_WELL_SPECIFIED
        return f"{nws} input vectors not well specified on both sides" if nws else None

    return _run_check(CHECK_PREDICATE, _params(source, compiled, inputs, node_limit, max_n=max_n), body)


# ---- structural observations ----------------------------------------------------

def _lock_violation(config: MediatedConfiguration) -> Optional[str]:
    """An agent is locked iff exactly one side is Backup/Responded; unlocked agents have only Init sides."""
    n = config.size
    for i in range(1, n + 1):
        open_sides = sum(
            config.side(i, j).kind is not SideKind.INIT for j in range(1, n + 1) if j != i
        )
        agent = config.agent(i)
        if agent.locked and open_sides != 1:
            return f"agent {i} is locked with {open_sides} open sides"
        if not agent.locked and open_sides:
            return f"agent {i} is unlocked with {open_sides} open sides"
    return None


def _committed_pairs(config: MediatedConfiguration) -> List[Tuple[int, int]]:
    """(holder, acknowledger): holder's side is a backup, the opposite side is Responded."""
    return [
        (i, j) for i, j, s in config.off_diagonal()
        if s.kind is SideKind.BACKUP and config.side(j, i).kind is SideKind.RESPONDED
    ]


def _resolution_violation(compiled: CompiledProtocol, config: MediatedConfiguration) -> Optional[str]:
    for holder, ack in _committed_pairs(config):
        t3 = step_of_family(compiled, config, Family.T3, ack, holder)
        if t3 is None:
            return f"committed pair ({holder},{ack}) has no enabled t3"
        after = apply_step(compiled.spec, config, t3)
        if step_of_family(compiled, after, Family.T4, holder, ack) is None:
            return f"committed pair ({holder},{ack}) has no enabled t4 after t3"
    return None


def _output_change_violation(compiled: CompiledProtocol, before, label: StepLabel, after) -> Optional[str]:
    spec = compiled.spec
    family = compiled.family_of(label.transition)
    for m in range(1, before.size + 1):
        if spec.output_map[before.agent(m)] == spec.output_map[after.agent(m)]:
            continue
        if m != label.responder or family not in (Family.T1, Family.T2, Family.T5, Family.T6):
            return f"agent {m} changes output in a {family.value} step {format_step(label)}"
    return None


def check_observations(
    compiled: CompiledProtocol, inputs: Iterable[Tuple[str, ...]],
    configurations: Sequence[MediatedConfiguration] = (),
    node_limit: Optional[int] = None,
) -> VerificationReport:
    """
    Structural invariants of compiled runs: outputs only change at the observer
    of a t1/t2/t5 (or t6) step; lock status matches the open edge sides; no
    terminal SCC holds a committed pair and every committed pair resolves with
    t3 then t4. Extra `configurations` are checked for the local invariants
    only.
    """
    spec = compiled.spec

    def fail(description, start, steps=(), inp=None):
        raise _Failed(Witness(description=description, input=inp, start=_cfg(start), steps=_steps(steps)))

    def body(counter):
        for config in configurations:
            counter[0] += 1
            problem = _lock_violation(config) or _resolution_violation(compiled, config)
            if problem:
                fail(problem, config)

        for inp in inputs:
            graph = reachable(spec, global_input(spec, inp), node_limit=node_limit, symmetry_reduction=False)
            for node, config in enumerate(graph.nodes):
                counter[0] += 1
                problem = _lock_violation(config) or _resolution_violation(compiled, config)
                if problem:
                    fail(problem, graph.root, graph.path_to(node), inp)
            for src, label, dst in graph.iter_edges():
                problem = _output_change_violation(compiled, graph.nodes[src], label, graph.nodes[dst])
                if problem:
                    fail(problem, graph.root, graph.path_to(src) + [label], inp)
            for scc in terminal_scc_ids(graph):
                for node in sorted(scc):
                    if _committed_pairs(graph.nodes[node]):
                        fail("terminal SCC holds an unresolved committed pair", graph.root, graph.path_to(node), inp)
        return None

    params = _params(None, compiled, inputs, node_limit, configurations=len(configurations))
    return _run_check(CHECK_OBSERVATIONS, params, body)


# ---- supplementary checks -----------------------------------------------------

def check_deadlocks(
    source: ProtocolSpec, compiled: CompiledProtocol, inputs: Iterable[Tuple[str, ...]],
    node_limit: Optional[int] = None,
) -> VerificationReport:
    """A reachable source configuration is terminal iff its translation is."""
    def body(counter):
        for inp in inputs:
            graph = _source_graph(source, inp, node_limit)
            for node, config in enumerate(graph.nodes):
                counter[0] += 1
                mine = not graph.edges[node]
                theirs = not enabled_steps(compiled.spec, translate(config, compiled))
                if mine != theirs:
                    raise _Failed(Witness(
                        description="terminal status of a configuration and of its translation differ",
                        input=inp, protocol="source", start=_cfg(graph.root), steps=_steps(graph.path_to(node)),
                        expected="terminal" if mine else "live", found="terminal" if theirs else "live",
                    ))
        return None

    return _run_check(CHECK_DEADLOCKS, _params(source, compiled, inputs, node_limit), body)


def check_smoke(
    source: ProtocolSpec, compiled: CompiledProtocol,
    runs: int = SMOKE_RUNS,
    population: int = SMOKE_POPULATION,
    seed: Optional[int] = None,
    max_steps: Optional[int] = None,
    node_limit: Optional[int] = None,
) -> VerificationReport:
    """
    Seeded random runs of the compiled protocol on random inputs of size
    `population` must reach a consensus on the source's predicate value.
    Inputs whose source value is not well specified are skipped.
    """
    settings = get_settings()
    seed = settings.DEFAULT_SEED if seed is None else seed
    max_steps = settings.RANDOM_MAX_STEPS if max_steps is None else max_steps
    target = compiled.spec

    def body(counter):
        rng = np.random.default_rng(seed)
        skipped = 0
        for r in range(runs):
            inp = tuple(source.alphabet[int(k)] for k in rng.integers(len(source.alphabet), size=population))
            expected = predicate_value(source, inp, node_limit=node_limit)
            if expected is Outcome.NOT_WELL_SPECIFIED:
                skipped += 1
                continue
            counter[0] += 1
            start = global_input(target, inp)
            trace = run_random(
                target, start, seed=seed + r, max_steps=max_steps,
                until=lambda c: global_output(target, c) == expected,
            )
            if global_output(target, trace.final) != expected:
                raise _Failed(Witness(
                    description=f"random run (seed={seed + r}) did not reach the expected consensus",
                    input=inp, start=_cfg(start), steps=_steps(label for label, _ in trace.steps),
                    expected=format_value(expected), found=format_value(global_output(target, trace.final)),
                ))
        return f"{skipped} runs skipped (input not well specified)" if skipped else None

    params = {
        "source": source.name or source.model, "target": target.name or "compiled",
        "runs": str(runs), "population": str(population), "seed": str(seed), "max_steps": str(max_steps),
    }
    return _run_check(CHECK_SMOKE, params, body)


# ---- orchestration ------------------------------------------------------------

def verify_all(
    source: ProtocolSpec,
    compiled: CompiledProtocol,
    checks: Sequence[str] = DEFAULT_CHECKS,
    max_n: Optional[int] = None,
    node_limit: Optional[int] = None,
    seed: Optional[int] = None,
    runs: int = 0,
) -> List[VerificationReport]:
    """
    Run the requested checks in their canonical order over inputs of length
    2..max_n. `runs` > 0 adds trace projection to soundness and sets the
    number of smoke runs.
    """
    max_n = get_settings().DEFAULT_MAX_N if max_n is None else max_n
    unknown = [c for c in checks if c not in ALL_CHECKS]
    if unknown:
        raise InvalidParameter(f"unknown checks {unknown}; known: {', '.join(ALL_CHECKS)}")
    if max_n < MIN_POPULATION:
        raise InvalidParameter(f"max_n must be at least {MIN_POPULATION}")
    if compiled.source_model != source.model:
        raise InvalidParameter(
            f"target simulates a {compiled.source_model} protocol but the source is {source.model}"
        )

    inputs = InputRange(source.alphabet, MIN_POPULATION, max_n)
    runners = {
        CHECK_COMPLETENESS: lambda: check_completeness(source, compiled, inputs, node_limit),
        CHECK_SOUNDNESS: lambda: check_soundness(
            source, compiled, inputs, node_limit, project_traces=runs > 0, seed=seed, runs=runs,
        ),
        CHECK_IO: lambda: check_io(source, compiled, inputs, node_limit),
        CHECK_STABILITY: lambda: check_stability_preservation(source, compiled, inputs, node_limit),
        CHECK_OBSERVATIONS: lambda: check_observations(compiled, inputs, node_limit=node_limit),
        CHECK_PREDICATE: lambda: check_predicate_equality(source, compiled, max_n, node_limit),
        CHECK_DEADLOCKS: lambda: check_deadlocks(source, compiled, inputs, node_limit),
        CHECK_SMOKE: lambda: check_smoke(
            source, compiled, runs=runs or SMOKE_RUNS, seed=seed, node_limit=node_limit,
        ),
    }
    return [runners[c]() for c in ALL_CHECKS if c in checks]


def replay_witness(source: ProtocolSpec, compiled: CompiledProtocol, witness: Witness) -> AnyConfiguration:
    """Re-execute a witness from its start configuration; raises StepNotEnabled if a step does not apply."""
    spec = source if witness.protocol == "source" else compiled.spec
    if witness.start is None:
        raise InvalidParameter("witness has no start configuration")
    current = parse_configuration(witness.start, spec)
    for text in witness.steps:
        current = apply_step(spec, current, parse_step(text))
    return current
