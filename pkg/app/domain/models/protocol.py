# app/domain/models/protocol.py
from __future__ import annotations

from enum import Enum
from typing import Dict, Hashable, List, Literal, NamedTuple, Optional, Tuple

from pydantic import BaseModel, PrivateAttr, model_validator

ModelName = Literal["pp", "mpp"]


class Outcome(str, Enum):
    """Non-binary results of the global semantics."""
    BOTTOM = "bottom"                    # no consensus in a single configuration
    NOT_STABLE = "not-stable"
    NOT_WELL_SPECIFIED = "NWS"


class StepLabel(NamedTuple):
    """
    t_{i,j}: `transition` is the 0-based index into the protocol's transitions,
    `initiator` and `responder` are 1-based agent indices.
    """
    transition: int
    initiator: int
    responder: int


class Transition(BaseModel):
    """
    (p, q) -> (p', q') for plain protocols, (p, r, q, s) -> (p', r', q', s') for
    mediated ones. Index 0 is always the initiator's agent state.
    """
    lhs: Tuple[Hashable, ...]
    rhs: Tuple[Hashable, ...]

    model_config = {"frozen": True}  # immutable = safe

    @model_validator(mode="after")
    def _check_arity(self) -> "Transition":
        if len(self.lhs) not in (2, 4) or len(self.lhs) != len(self.rhs):
            raise ValueError(f"transition arity must be 2 or 4 on both sides, got {len(self.lhs)}/{len(self.rhs)}")
        return self

    @property
    def mediated(self) -> bool:
        return len(self.lhs) == 4

    @property
    def keeps_initiator(self) -> bool:
        if self.mediated:
            return self.lhs[0] == self.rhs[0] and self.lhs[1] == self.rhs[1]
        return self.lhs[0] == self.rhs[0]


class ProtocolSpec(BaseModel):
    """
    A plain (PP) or mediated (MPP / IOMPP) population protocol.

    `transitions` is the set of non-silent records; unlisted left-hand sides are
    silent. Several records may share a left-hand side (relation semantics).
    `simulation` is set on compiled protocols and names the source model.
    """
    model: ModelName
    states: Tuple[Hashable, ...]
    alphabet: Tuple[str, ...]
    edge_states: Tuple[Hashable, ...] = ()
    initial_edge: Optional[Hashable] = None
    input_map: Dict[str, Hashable]
    output_map: Dict[Hashable, Literal[0, 1]]
    transitions: Tuple[Transition, ...] = ()
    simulation: Optional[ModelName] = None
    name: Optional[str] = None

    model_config = {"frozen": True}

    _by_lhs: Dict[Tuple[Hashable, ...], List[int]] = PrivateAttr(default_factory=dict)
    _state_set: frozenset = PrivateAttr(default=frozenset())
    _edge_set: frozenset = PrivateAttr(default=frozenset())

    @model_validator(mode="after")
    def _check_well_formed(self) -> "ProtocolSpec":
        states = set(self.states)
        edges = set(self.edge_states)
        if len(states) != len(self.states):
            raise ValueError("duplicate agent states")
        if not self.alphabet:
            raise ValueError("empty input alphabet")
        missing_in = [s for s in self.alphabet if s not in self.input_map]
        if missing_in:
            raise ValueError(f"input map is not total, missing {missing_in}")
        bad_in = [s for s in self.alphabet if self.input_map[s] not in states]
        if bad_in:
            raise ValueError(f"input map leaves Q for {bad_in}")
        missing_out = [q for q in self.states if q not in self.output_map]
        if missing_out:
            raise ValueError(f"output map is not total, missing {missing_out}")
        if self.model == "pp":
            if self.edge_states or self.initial_edge is not None:
                raise ValueError("plain protocols carry no edge states")
        else:
            if self.initial_edge not in edges:
                raise ValueError("initial edge state must belong to the edge states")
        arity = 2 if self.model == "pp" else 4
        for k, t in enumerate(self.transitions):
            if len(t.lhs) != arity:
                raise ValueError(f"transition {k + 1} has arity {len(t.lhs)}, expected {arity}")
            for side in (t.lhs, t.rhs):
                agents = side[0::2] if arity == 4 else side
                if any(a not in states for a in agents):
                    raise ValueError(f"transition {k + 1} uses an agent state outside Q")
                if arity == 4 and any(e not in edges for e in side[1::2]):
                    raise ValueError(f"transition {k + 1} uses an edge state outside S")
        return self

    def model_post_init(self, __context) -> None:
        index: Dict[Tuple[Hashable, ...], List[int]] = {}
        for k, t in enumerate(self.transitions):
            index.setdefault(t.lhs, []).append(k)
        self._by_lhs = index
        self._state_set = frozenset(self.states)
        self._edge_set = frozenset(self.edge_states)

    # ----- lookups -----------------------------------------------------------

    @property
    def mediated(self) -> bool:
        return self.model == "mpp"

    @property
    def io_flag(self) -> bool:
        return all(t.keeps_initiator for t in self.transitions)

    def matching(self, lhs: Tuple[Hashable, ...]) -> List[int]:
        """Indices of the transitions whose left-hand side is exactly `lhs`."""
        return self._by_lhs.get(lhs, [])

    def has_state(self, q: Hashable) -> bool:
        return q in self._state_set

    def has_edge_state(self, s: Hashable) -> bool:
        return s in self._edge_set

    def index_of(self, t: Transition) -> Optional[int]:
        for k in self.matching(t.lhs):
            if self.transitions[k] == t:
                return k
        return None
