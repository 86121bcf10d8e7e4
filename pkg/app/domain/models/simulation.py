# app/domain/models/simulation.py
"""
Symbols of compiled (IOMPP) protocols and the provenance of generated transitions.

Compiled symbols are tagged tuples, never plain strings, so they can not
collide with the source protocol's own state or edge symbols.
"""
from __future__ import annotations

from enum import Enum
from typing import Hashable, List, NamedTuple, Optional, Tuple

from pydantic import BaseModel, model_validator

from app.domain.models.protocol import ModelName, ProtocolSpec


class Lock(Enum):
    LOCKED = "L"
    UNLOCKED = "U"


class SimAgentState(NamedTuple):
    lock: Lock
    compute: Hashable

    @property
    def locked(self) -> bool:
        return self.lock is Lock.LOCKED


def unlocked(q: Hashable) -> SimAgentState:
    return SimAgentState(Lock.UNLOCKED, q)


def locked(q: Hashable) -> SimAgentState:
    return SimAgentState(Lock.LOCKED, q)


class SideKind(Enum):
    INIT = "eps"
    RESPONDED = "sr"
    BACKUP = "bak"


class SimEdgeState(NamedTuple):
    """
    One agent's side of an edge in a compiled protocol.

    Compiled plain sources use Init, Responded and Backup(q). Compiled mediated
    sources use pairs: the first component is Init, Responded or Backup(q, s)
    and `live` carries the source edge value.
    """
    kind: SideKind
    backup: Optional[Hashable] = None
    backup_edge: Optional[Hashable] = None
    live: Optional[Hashable] = None

    @property
    def is_pair(self) -> bool:
        return self.live is not None

    @property
    def first(self) -> "SimEdgeState":
        return self._replace(live=None)


INIT = SimEdgeState(SideKind.INIT)
RESPONDED = SimEdgeState(SideKind.RESPONDED)


def backup(q: Hashable, s: Optional[Hashable] = None) -> SimEdgeState:
    return SimEdgeState(SideKind.BACKUP, q, s)


def paired(first: SimEdgeState, live: Hashable) -> SimEdgeState:
    return first._replace(live=live)


class Family(str, Enum):
    T1 = "t1"   # request: observer locks, backs up its state
    T2 = "t2"   # acknowledge: original initiator locks and moves
    T3 = "t3"   # conclude on the requesting side
    T4 = "t4"   # conclude on the acknowledging side
    T5 = "t5"   # abort: restore the backup
    T6 = "t6"   # shortcut for an already one-way transition


class Provenance(BaseModel):
    family: Family
    sources: Tuple[int, ...]             # 0-based source transition indices

    model_config = {"frozen": True}


class CompiledProtocol(BaseModel):
    """An IOMPP plus, per generated transition (same order), its provenance."""
    spec: ProtocolSpec
    provenance: Tuple[Provenance, ...]
    use_shortcut: bool = False

    model_config = {"frozen": True}

    @model_validator(mode="after")
    def _check_alignment(self) -> "CompiledProtocol":
        if self.spec.simulation is None:
            raise ValueError("compiled protocol must name its source model")
        if len(self.provenance) != len(self.spec.transitions):
            raise ValueError("every generated transition needs exactly one provenance record")
        if any(not p.sources for p in self.provenance):
            raise ValueError("provenance without originating source transition")
        return self

    @property
    def source_model(self) -> ModelName:
        return self.spec.simulation

    @property
    def source_states(self) -> List[Hashable]:
        return [q.compute for q in self.spec.states if not q.locked]

    @property
    def source_edge_states(self) -> List[Hashable]:
        seen: List[Hashable] = []
        for s in self.spec.edge_states:
            if s.live is not None and s.live not in seen:
                seen.append(s.live)
        return seen

    def family_of(self, k: int) -> Family:
        return self.provenance[k].family

    @property
    def merged_count(self) -> int:
        """Generated instances folded into an identical rule of another source transition."""
        return sum(len(p.sources) - 1 for p in self.provenance)

    def family_counts(self) -> dict:
        counts = {f.value: 0 for f in Family}
        for p in self.provenance:
            counts[p.family.value] += 1
        return counts
