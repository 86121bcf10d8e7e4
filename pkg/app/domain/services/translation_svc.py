# app/domain/services/translation_svc.py
"""
Translation of source configurations into compiled ones, and the way back:
`normalize` picks the source configuration a compiled configuration stands for,
`cleanup_schedule` drives the compiled configuration to its translated form.
"""
import logging
from typing import Dict, Hashable, List, Optional, Tuple

from pydantic import BaseModel

from app.domain.errors import NotCleanable, StateNotInSource, StepNotEnabled
from app.domain.models.configuration import AnyConfiguration, Configuration, MediatedConfiguration
from app.domain.models.protocol import ProtocolSpec, StepLabel
from app.domain.models.simulation import INIT, CompiledProtocol, Family, SideKind, paired, unlocked
from app.domain.services.execution_svc import Trace
from app.domain.services.semantics_svc import fire, is_enabled, left_side

logger = logging.getLogger(__name__)


class CleanupSchedule(BaseModel):
    steps: Tuple[StepLabel, ...] = ()
    endpoint: MediatedConfiguration

    model_config = {"frozen": True}  # immutable = safe

    def __len__(self) -> int:
        return len(self.steps)


# ---- translation --------------------------------------------------------------

def translate(config: AnyConfiguration, compiled: CompiledProtocol) -> MediatedConfiguration:
    """Unlock every agent and neutralize every edge side (keeping the live source edge value)."""
    if config.size < 1:
        raise StateNotInSource("cannot translate an empty configuration")
    mediated_source = compiled.source_model == "mpp"
    if mediated_source != isinstance(config, MediatedConfiguration):
        raise StateNotInSource(f"configuration kind does not match source model={compiled.source_model}")
    known = set(compiled.source_states)
    for q in config.diagonal():
        if q not in known:
            raise StateNotInSource(f"agent state {q!r} is not a source state")
    agents = [unlocked(q) for q in config.diagonal()]
    if not mediated_source:
        return MediatedConfiguration.build(agents, lambda i, j: INIT)

    edges = set(compiled.source_edge_states)
    for i, j, s in config.off_diagonal():
        if s not in edges:
            raise StateNotInSource(f"edge state {s!r} at ({i},{j}) is not a source edge state")
    return MediatedConfiguration.build(agents, lambda i, j: paired(INIT, config.side(i, j)))


def is_translated_form(config: MediatedConfiguration) -> bool:
    if any(q.locked for q in config.diagonal()):
        return False
    return all(s.kind is SideKind.INIT for _, _, s in config.off_diagonal())


# ---- normalization ------------------------------------------------------------

def _pending_backup(config: MediatedConfiguration, i: int) -> Optional[Tuple[int, Hashable]]:
    """
    The single partner j whose side from i is a backup not answered by
    Responded, or None when there is no such partner or more than one.
    """
    found = []
    for j in range(1, config.size + 1):
        if j == i:
            continue
        mine = config.side(i, j)
        if mine.kind is SideKind.BACKUP and config.side(j, i).kind is not SideKind.RESPONDED:
            found.append((j, mine))
    return found[0] if len(found) == 1 else None


def normalize(config: MediatedConfiguration, compiled: CompiledProtocol) -> AnyConfiguration:
    """
    Source configuration represented by `config`: agents with exactly one
    unanswered request roll back to their backup, every other agent keeps its
    computation state. Total on well-formed configurations.
    """
    n = config.size
    agents: List[Hashable] = []
    restored: Dict[Tuple[int, int], Hashable] = {}
    for i in range(1, n + 1):
        pending = _pending_backup(config, i)
        if pending is None:
            agents.append(config.agent(i).compute)
            continue
        j, side = pending
        agents.append(side.backup)
        restored[(i, j)] = side.backup_edge

    if compiled.source_model == "pp":
        return Configuration.model_construct(agents=tuple(agents))
    return MediatedConfiguration.build(
        agents, lambda i, j: restored[(i, j)] if (i, j) in restored else config.side(i, j).live,
    )


# ---- cleanup ------------------------------------------------------------------

def step_of_family(
    compiled: CompiledProtocol, config: MediatedConfiguration, family: Family, initiator: int, responder: int,
) -> Optional[StepLabel]:
    spec = compiled.spec
    for k in spec.matching(left_side(spec, config, initiator, responder)):
        if compiled.provenance[k].family is family:
            return StepLabel(k, initiator, responder)
    return None


def _planned(config: MediatedConfiguration, i: int, j: int) -> List[Tuple[Family, int, int]]:
    mine, theirs = config.side(i, j).kind, config.side(j, i).kind
    if mine is SideKind.BACKUP and theirs is SideKind.RESPONDED:
        return [(Family.T3, j, i), (Family.T4, i, j)]
    if mine is SideKind.INIT and theirs is SideKind.RESPONDED:
        return [(Family.T4, i, j)]
    if mine is SideKind.BACKUP:
        return [(Family.T5, j, i)]
    return []


def cleanup_schedule(config: MediatedConfiguration, compiled: CompiledProtocol) -> CleanupSchedule:
    """
    Steps that resolve every open conversation, scanning ordered pairs (i, j)
    ascending; a committed pair concludes with t3 before t4. Raises NotCleanable
    when a needed step is not enabled.
    """
    spec = compiled.spec
    current = config
    steps: List[StepLabel] = []
    n = config.size
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i == j:
                continue
            for family, a, b in _planned(current, i, j):
                label = step_of_family(compiled, current, family, a, b)
                if label is None:
                    raise NotCleanable(
                        f"no enabled {family.value} step for initiator={a} responder={b}",
                        configuration=current,
                        label=(family.value, a, b),
                        steps=tuple(steps),
                    )
                steps.append(label)
                current = fire(spec, current, label)
    return CleanupSchedule(steps=tuple(steps), endpoint=current)


# ---- trace projection -----------------------------------------------------------

def project_trace(source: ProtocolSpec, compiled: CompiledProtocol, trace: Trace) -> List[StepLabel]:
    """
    Source path underlying a compiled trace. Every acknowledge step t2_{i,j}
    becomes the source step t_{j,i} (j initiated it in the source), every
    shortcut step t6_{i,j} becomes t_{i,j}; all other steps leave the normalized
    configuration unchanged. Raises StepNotEnabled when the projection is not a
    valid source path from normalize(start).
    """
    projected: List[StepLabel] = []
    before = normalize(trace.start, compiled)
    for pos, (label, config) in enumerate(trace.steps, start=1):
        after = normalize(config, compiled)
        prov = compiled.provenance[label.transition]
        if prov.family is Family.T2:
            roles = (label.responder, label.initiator)
        elif prov.family is Family.T6:
            roles = (label.initiator, label.responder)
        else:
            if after != before:
                raise StepNotEnabled(f"step {pos} ({prov.family.value}) changes the normalized configuration")
            continue

        for k in prov.sources:
            step = StepLabel(k, *roles)
            if is_enabled(source, before, step) and fire(source, before, step) == after:
                projected.append(step)
                break
        else:
            raise StepNotEnabled(
                f"step {pos} ({prov.family.value}) has no enabled source step "
                f"among {[k + 1 for k in prov.sources]} for agents {roles}"
            )
        before = after
    return projected
