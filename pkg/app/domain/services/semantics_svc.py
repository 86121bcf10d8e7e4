# app/domain/services/semantics_svc.py
"""
Global semantics shared by the plain and mediated models: input, output and
the step relation over configurations.
"""
import logging
from typing import Hashable, Iterator, List, Sequence, Tuple, Union

from app.domain.errors import InvalidParameter, StateNotInSource, StepNotEnabled, UnknownInputSymbol
from app.domain.models.configuration import AnyConfiguration, Configuration, MediatedConfiguration
from app.domain.models.protocol import Outcome, ProtocolSpec, StepLabel

logger = logging.getLogger(__name__)

OutputValue = Union[int, Outcome]


def global_input(spec: ProtocolSpec, inp: Sequence[str]) -> AnyConfiguration:
    """Initial configuration for an input vector; mediated edges all start at s0."""
    if len(inp) < 1:
        raise InvalidParameter("input vector must hold at least one symbol")
    agents = []
    for sym in inp:
        if sym not in spec.input_map:
            raise UnknownInputSymbol(sym)
        agents.append(spec.input_map[sym])
    if spec.mediated:
        s0 = spec.initial_edge
        return MediatedConfiguration.build(agents, lambda i, j: s0)
    return Configuration.model_construct(agents=tuple(agents))


def global_output(spec: ProtocolSpec, config: AnyConfiguration) -> OutputValue:
    outputs = {spec.output_map[q] for q in config.diagonal()}
    if len(outputs) == 1:
        return outputs.pop()
    return Outcome.BOTTOM


def check_configuration(spec: ProtocolSpec, config: AnyConfiguration) -> None:
    """Raise StateNotInSource unless `config` is a well-formed configuration of `spec`."""
    if spec.mediated != isinstance(config, MediatedConfiguration):
        raise StateNotInSource(f"configuration kind does not match model={spec.model}")
    for q in config.diagonal():
        if not spec.has_state(q):
            raise StateNotInSource(f"agent state {q!r} is not in Q")
    if spec.mediated:
        for i, j, s in config.off_diagonal():
            if not spec.has_edge_state(s):
                raise StateNotInSource(f"edge state {s!r} at ({i},{j}) is not in S")


def left_side(spec: ProtocolSpec, config: AnyConfiguration, i: int, j: int) -> Tuple[Hashable, ...]:
    if spec.mediated:
        cells = config.cells
        return cells[i - 1][i - 1], cells[i - 1][j - 1], cells[j - 1][j - 1], cells[j - 1][i - 1]
    agents = config.agents
    return agents[i - 1], agents[j - 1]


def fire(spec: ProtocolSpec, config: AnyConfiguration, label: StepLabel) -> AnyConfiguration:
    rhs = spec.transitions[label.transition].rhs
    i, j = label.initiator, label.responder
    if spec.mediated:
        return config.replace({(i, i): rhs[0], (i, j): rhs[1], (j, j): rhs[2], (j, i): rhs[3]})
    return config.replace({i: rhs[0], j: rhs[1]})


def enabled_steps(spec: ProtocolSpec, config: AnyConfiguration) -> List[StepLabel]:
    """
    Every (t, i, j) with i != j whose left-hand side matches, ordered by
    initiator, responder, transition index.
    """
    n = config.size
    steps: List[StepLabel] = []
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            for k in spec.matching(left_side(spec, config, i, j)):
                steps.append(StepLabel(k, i, j))
    return steps


def successors(spec: ProtocolSpec, config: AnyConfiguration) -> Iterator[Tuple[StepLabel, AnyConfiguration]]:
    for label in enabled_steps(spec, config):
        yield label, fire(spec, config, label)


def is_enabled(spec: ProtocolSpec, config: AnyConfiguration, label: StepLabel) -> bool:
    n = config.size
    i, j = label.initiator, label.responder
    if i == j or not (1 <= i <= n and 1 <= j <= n):
        return False
    if not 0 <= label.transition < len(spec.transitions):
        return False
    return spec.transitions[label.transition].lhs == left_side(spec, config, i, j)


def apply_step(spec: ProtocolSpec, config: AnyConfiguration, label: StepLabel) -> AnyConfiguration:
    """Fire `label`; only the transition's own entries change."""
    if not is_enabled(spec, config, label):
        raise StepNotEnabled(
            f"t{label.transition + 1}_({label.initiator},{label.responder}) is not enabled"
        )
    return fire(spec, config, label)


def is_immediate_observation(spec: ProtocolSpec) -> bool:
    return spec.io_flag
