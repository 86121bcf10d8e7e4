# app/domain/services/execution_svc.py
"""
Exhaustive exploration of the configuration graph and the fairness-based
notions built on it (terminal SCCs, output stability, predicate value), plus
seeded random runs.
"""
import logging
import time
from collections import deque
from typing import Callable, Dict, FrozenSet, Hashable, List, Optional, Sequence, Set, Tuple, Union

import networkx as nx
import numpy as np
from pydantic import BaseModel

from app.core.config import get_settings
from app.domain.errors import InvalidParameter, PartialGraph, StateSpaceExceeded
from app.domain.models.configuration import AnyConfiguration, Configuration, MediatedConfiguration
from app.domain.models.protocol import Outcome, ProtocolSpec, StepLabel
from app.domain.services.constants import MIN_POPULATION, PROGRESS_EVERY
from app.domain.services.semantics_svc import (
    OutputValue,
    enabled_steps,
    fire,
    global_input,
    global_output,
    successors,
)
from app.utils.textfmt import format_graph, format_trace

logger = logging.getLogger(__name__)

StableValue = Union[int, Outcome]


class ReachabilityGraph:
    """
    Configurations reachable from `root`, numbered in breadth-first order, with
    labeled step edges. `complete` is False when exploration stopped at the
    node limit.
    """

    def __init__(self, spec: ProtocolSpec, root: AnyConfiguration):
        self.spec = spec
        self.root = root
        self.nodes: List[AnyConfiguration] = []
        self.index: Dict[Hashable, int] = {}
        self.edges: List[List[Tuple[StepLabel, int]]] = []
        self.parent: List[Optional[Tuple[int, StepLabel]]] = []
        self.complete = False

    def __len__(self) -> int:
        return len(self.nodes)

    def __contains__(self, config: AnyConfiguration) -> bool:
        return config in self.index

    def add(self, config: AnyConfiguration, parent: Optional[Tuple[int, StepLabel]] = None) -> int:
        self.index[config] = len(self.nodes)
        self.nodes.append(config)
        self.edges.append([])
        self.parent.append(parent)
        return self.index[config]

    def id_of(self, config: AnyConfiguration) -> Optional[int]:
        return self.index.get(config)

    def path_to(self, node: int) -> List[StepLabel]:
        """Step labels of the breadth-first tree path from the root to `node`."""
        labels: List[StepLabel] = []
        while self.parent[node] is not None:
            node, label = self.parent[node]
            labels.append(label)
        labels.reverse()
        return labels

    @property
    def edge_count(self) -> int:
        return sum(len(out) for out in self.edges)

    def iter_edges(self):
        for src, out in enumerate(self.edges):
            for label, dst in out:
                yield src, label, dst

    def to_networkx(self) -> nx.DiGraph:
        g = nx.DiGraph()
        g.add_nodes_from(range(len(self.nodes)))
        g.add_edges_from((src, dst) for src, _, dst in self.iter_edges())
        return g


def _key(config: AnyConfiguration, symmetry_reduction: bool) -> AnyConfiguration:
    if symmetry_reduction and isinstance(config, Configuration):
        return config.canonical()
    return config


def reachable(
    spec: ProtocolSpec,
    root: AnyConfiguration,
    node_limit: Optional[int] = None,
    symmetry_reduction: Optional[bool] = None,
) -> ReachabilityGraph:
    """
    Breadth-first closure of the step relation from `root`. Raises
    StateSpaceExceeded (carrying the partial graph) past `node_limit` nodes.
    """
    settings = get_settings()
    node_limit = settings.NODE_LIMIT if node_limit is None else node_limit
    symmetry_reduction = settings.SYMMETRY_REDUCTION if symmetry_reduction is None else symmetry_reduction
    if node_limit < 1:
        raise InvalidParameter("node_limit must be at least 1")

    t0 = time.perf_counter()
    graph = ReachabilityGraph(spec, _key(root, symmetry_reduction))
    graph.add(graph.root)
    queue = deque([0])

    while queue:
        src = queue.popleft()
        for label, succ in successors(spec, graph.nodes[src]):
            succ = _key(succ, symmetry_reduction)
            dst = graph.id_of(succ)
            if dst is None:
                if len(graph) >= node_limit:
                    logger.warning("reachable stopped: node_limit=%d reached", node_limit)
                    raise StateSpaceExceeded(node_limit, graph)
                dst = graph.add(succ, parent=(src, label))
                queue.append(dst)
                if len(graph) % PROGRESS_EVERY == 0:
                    logger.info("reachable progress nodes=%d frontier=%d", len(graph), len(queue))
            graph.edges[src].append((label, dst))

    graph.complete = True
    logger.debug(
        "reachable protocol=%s nodes=%d edges=%d time=%.3fs",
        spec.name or spec.model, len(graph), graph.edge_count, time.perf_counter() - t0,
    )
    return graph


def _condensation(graph: ReachabilityGraph) -> nx.DiGraph:
    if not graph.complete:
        raise PartialGraph("terminal SCCs need a closed reachability graph")
    return nx.condensation(graph.to_networkx())


def terminal_scc_ids(graph: ReachabilityGraph) -> List[FrozenSet[int]]:
    """Terminal SCCs as sets of node ids, ordered by their first-discovered node."""
    dag = _condensation(graph)
    sccs = [frozenset(dag.nodes[c]["members"]) for c in dag.nodes if dag.out_degree(c) == 0]
    return sorted(sccs, key=min)


def terminal_sccs(graph: ReachabilityGraph) -> List[FrozenSet[AnyConfiguration]]:
    return [frozenset(graph.nodes[k] for k in scc) for scc in terminal_scc_ids(graph)]


def stable_outputs(graph: ReachabilityGraph) -> Dict[int, StableValue]:
    """
    Output stability of every node of a closed graph: 0/1 when every reachable
    configuration has that output, Outcome.NOT_STABLE otherwise.
    """
    dag = _condensation(graph)
    spec = graph.spec
    reach: Dict[int, Set[OutputValue]] = {}
    for c in reversed(list(nx.topological_sort(dag))):
        outs = {global_output(spec, graph.nodes[k]) for k in dag.nodes[c]["members"]}
        for succ in dag.successors(c):
            outs |= reach[succ]
        reach[c] = outs
    mapping = dag.graph["mapping"]
    result: Dict[int, StableValue] = {}
    for node, c in mapping.items():
        outs = reach[c]
        if len(outs) == 1 and next(iter(outs)) in (0, 1):
            result[node] = next(iter(outs))
        else:
            result[node] = Outcome.NOT_STABLE
    return result


def output_stable(spec: ProtocolSpec, config: AnyConfiguration, node_limit: Optional[int] = None) -> StableValue:
    """x when every configuration reachable from `config` has output x, else NOT_STABLE."""
    expected = global_output(spec, config)
    if expected is Outcome.BOTTOM:
        return Outcome.NOT_STABLE
    graph = reachable(spec, config, node_limit=node_limit)
    for node in graph.nodes:
        if global_output(spec, node) != expected:
            return Outcome.NOT_STABLE
    return expected


def predicate_from_graph(graph: ReachabilityGraph) -> StableValue:
    """x when every terminal SCC is an output-x consensus, else NOT_WELL_SPECIFIED."""
    values = set()
    for scc in terminal_scc_ids(graph):
        values |= {global_output(graph.spec, graph.nodes[k]) for k in scc}
    if len(values) == 1 and next(iter(values)) in (0, 1):
        return next(iter(values))
    return Outcome.NOT_WELL_SPECIFIED


def predicate_value(spec: ProtocolSpec, inp: Sequence[str], node_limit: Optional[int] = None) -> StableValue:
    if len(inp) < MIN_POPULATION:
        raise InvalidParameter(f"predicate needs at least {MIN_POPULATION} agents, got {len(inp)}")
    graph = reachable(spec, global_input(spec, inp), node_limit=node_limit)
    return predicate_from_graph(graph)


# ---- random runs ----------------------------------------------------------------

class Trace(BaseModel):
    start: Union[Configuration, MediatedConfiguration]
    steps: Tuple[Tuple[StepLabel, Union[Configuration, MediatedConfiguration]], ...] = ()
    seed: int

    model_config = {"frozen": True}  # immutable = safe

    @property
    def final(self) -> AnyConfiguration:
        return self.steps[-1][1] if self.steps else self.start


def run_random(
    spec: ProtocolSpec,
    start: AnyConfiguration,
    seed: Optional[int] = None,
    max_steps: Optional[int] = None,
    until: Optional[Callable[[AnyConfiguration], bool]] = None,
) -> Trace:
    """
    Uniform choice among enabled (t, i, j) at every step, driven by a numpy
    generator seeded with `seed`. Stops after `max_steps` or when nothing is
    enabled, or as soon as `until` holds. A smoke test only: never evidence of
    stability.
    """
    settings = get_settings()
    seed = settings.DEFAULT_SEED if seed is None else seed
    max_steps = settings.RANDOM_MAX_STEPS if max_steps is None else max_steps
    if max_steps < 0:
        raise InvalidParameter("max_steps must be non-negative")

    rng = np.random.default_rng(seed)
    current = start
    steps = []
    for _ in range(max_steps):
        if until is not None and until(current):
            break
        enabled = enabled_steps(spec, current)
        if not enabled:
            break
        label = enabled[int(rng.integers(len(enabled)))]
        current = fire(spec, current, label)
        steps.append((label, current))
    logger.debug("run_random seed=%d steps=%d", seed, len(steps))
    return Trace.model_construct(start=start, steps=tuple(steps), seed=seed)



# ---- export ---------------------------------------------------------------------

def export_trace(trace: Trace) -> str:
    return format_trace(trace.start, trace.steps, trace.seed)


def export_graph(graph: ReachabilityGraph) -> str:
    """Node list in breadth-first order, then `src dst i j transition-index` edges."""
    return format_graph(graph.nodes, graph.iter_edges(), complete=graph.complete)
