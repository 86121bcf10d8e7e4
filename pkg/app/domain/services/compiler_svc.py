# app/domain/services/compiler_svc.py
"""
Compilation of two-way protocols into immediate-observation mediated ones.

Every source transition t is split into a conversation: t1 (request), t2
(acknowledge), t3/t4 (conclude on both sides) and t5 (abort), or into the
single shortcut t6 when t already leaves its initiator unchanged.
"""
import logging
from typing import Dict, Hashable, List, Optional, Tuple

from app.domain.errors import MalformedSource, UnknownTransition
from app.domain.models.protocol import ProtocolSpec, Transition
from app.domain.models.simulation import (
    INIT,
    RESPONDED,
    CompiledProtocol,
    Family,
    Provenance,
    SideKind,
    backup,
    locked,
    paired,
    unlocked,
)

logger = logging.getLogger(__name__)

Rule = Tuple[Tuple[Hashable, ...], Tuple[Hashable, ...]]


class _Collector:
    """Ordered, deduplicating sink for generated transitions."""

    def __init__(self):
        self.rules: Dict[Rule, Tuple[Family, List[int]]] = {}
        self.generated = 0

    def emit(self, family: Family, source: int, lhs: tuple, rhs: tuple) -> None:
        self.generated += 1
        key = (lhs, rhs)
        if key in self.rules:
            fam, sources = self.rules[key]
            if fam is not family:
                raise MalformedSource(f"generated {family.value} collides with a {fam.value} instance")
            if source not in sources:
                sources.append(source)
            return
        self.rules[key] = (family, [source])

    def transitions(self) -> Tuple[Transition, ...]:
        return tuple(Transition(lhs=lhs, rhs=rhs) for lhs, rhs in self.rules)

    def provenance(self) -> Tuple[Provenance, ...]:
        return tuple(Provenance(family=f, sources=tuple(src)) for f, src in self.rules.values())

    @property
    def merged(self) -> int:
        return self.generated - len(self.rules)


def _agent_states(source: ProtocolSpec) -> list:
    return [unlocked(q) for q in source.states] + [locked(q) for q in source.states]


def _finish(source: ProtocolSpec, sink: _Collector, *, states, edges, s0, use_shortcut: bool) -> CompiledProtocol:
    try:
        spec = ProtocolSpec(
            model="mpp",
            states=tuple(states),
            alphabet=source.alphabet,
            edge_states=tuple(edges),
            initial_edge=s0,
            input_map={sigma: unlocked(q) for sigma, q in source.input_map.items()},
            output_map={st: source.output_map[st.compute] for st in states},
            transitions=sink.transitions(),
            simulation=source.model,
            name=f"{source.name}-iompp" if source.name else None,
        )
    except ValueError as e:
        raise MalformedSource(f"compiled protocol is not well-formed: {e}") from e
    compiled = CompiledProtocol(spec=spec, provenance=sink.provenance(), use_shortcut=use_shortcut)
    logger.info(
        "Compiled %s source=%s transitions=%d generated=%d merged=%d families=%s",
        source.model, source.name or "?", len(spec.transitions), sink.generated, sink.merged,
        compiled.family_counts(),
    )
    return compiled


def compile_pp(source: ProtocolSpec, use_shortcut: bool = False) -> CompiledProtocol:
    """
    Compile a plain protocol. Q' = {L,U} x Q, S' = {Init, Responded} + Backup(Q),
    s0' = Init, iota'(s) = (U, iota(s)), omega'(l, q) = omega(q).
    """
    if source.model != "pp":
        raise MalformedSource(f"compile_pp expects a plain protocol, got model={source.model}")
    states = _agent_states(source)
    edges = [INIT, RESPONDED] + [backup(q) for q in source.states]
    not_responded = [z for z in edges if z.kind is not SideKind.RESPONDED]
    sink = _Collector()

    for k, t in enumerate(source.transitions):
        p, q = t.lhs
        p2, q2 = t.rhs
        U, L = unlocked, locked
        if use_shortcut and p == p2:
            sink.emit(Family.T6, k, (U(p), INIT, U(q), INIT), (U(p), INIT, U(q2), INIT))
            continue
        bq = backup(q)
        sink.emit(Family.T1, k, (U(p), INIT, U(q), INIT), (U(p), INIT, L(q2), bq))
        sink.emit(Family.T2, k, (L(q2), bq, U(p), INIT), (L(q2), bq, L(p2), RESPONDED))
        sink.emit(Family.T3, k, (L(p2), RESPONDED, L(q2), bq), (L(p2), RESPONDED, U(q2), INIT))
        for x in states:
            sink.emit(Family.T4, k, (x, INIT, L(p2), RESPONDED), (x, INIT, U(p2), INIT))
        for x in states:
            for z in not_responded:
                sink.emit(Family.T5, k, (x, z, L(q2), bq), (x, z, U(q), INIT))

    return _finish(source, sink, states=states, edges=edges, s0=INIT, use_shortcut=use_shortcut)


def compile_mpp(source: ProtocolSpec) -> CompiledProtocol:
    """
    Compile a mediated protocol. Edge sides are pairs (first, live): the first
    component is Init, Responded or Backup(q, s); `live` is the source edge value.
    """
    if source.model != "mpp":
        raise MalformedSource(f"compile_mpp expects a mediated protocol, got model={source.model}")
    states = _agent_states(source)
    firsts = [INIT, RESPONDED] + [backup(q, s) for q in source.states for s in source.edge_states]
    edges = [paired(f, s) for f in firsts for s in source.edge_states]
    # a Responded first component always marks a committed conversation
    not_responded = [e for e in edges if e.kind is not SideKind.RESPONDED]
    sink = _Collector()

    for k, t in enumerate(source.transitions):
        p, r, q, s = t.lhs
        p2, r2, q2, s2 = t.rhs
        U, L = unlocked, locked
        bqs = paired(backup(q, s), s2)
        sink.emit(
            Family.T1, k,
            (U(p), paired(INIT, r), U(q), paired(INIT, s)),
            (U(p), paired(INIT, r), L(q2), bqs),
        )
        sink.emit(
            Family.T2, k,
            (L(q2), bqs, U(p), paired(INIT, r)),
            (L(q2), bqs, L(p2), paired(RESPONDED, r2)),
        )
        sink.emit(
            Family.T3, k,
            (L(p2), paired(RESPONDED, r2), L(q2), bqs),
            (L(p2), paired(RESPONDED, r2), U(q2), paired(INIT, s2)),
        )
        for x in states:
            sink.emit(
                Family.T4, k,
                (x, paired(INIT, s2), L(p2), paired(RESPONDED, r2)),
                (x, paired(INIT, s2), U(p2), paired(INIT, r2)),
            )
        for x in states:
            for vw in not_responded:
                sink.emit(Family.T5, k, (x, vw, L(q2), bqs), (x, vw, U(q), paired(INIT, s)))

    return _finish(
        source, sink, states=states, edges=edges, s0=paired(INIT, source.initial_edge), use_shortcut=False,
    )


def compile_protocol(source: ProtocolSpec, use_shortcut: bool = False) -> CompiledProtocol:
    if source.model == "pp":
        return compile_pp(source, use_shortcut=use_shortcut)
    if use_shortcut:
        logger.warning("The t6 shortcut only applies to plain sources; ignoring it for %s", source.name)
    return compile_mpp(source)


def classify(compiled: CompiledProtocol, t: Transition) -> Provenance:
    """Family tag and originating source transitions of a generated transition."""
    k = compiled.spec.index_of(t)
    if k is None:
        raise UnknownTransition(f"transition {t.lhs} -> {t.rhs} was not generated by this compilation")
    return compiled.provenance[k]


def generated_from(compiled: CompiledProtocol, family: Family, source_index: int) -> List[int]:
    """Indices of generated transitions of `family` originating from `source_index`."""
    return [
        k for k, p in enumerate(compiled.provenance)
        if p.family is family and source_index in p.sources
    ]


def without_family(compiled: CompiledProtocol, family: Family, source_index: Optional[int] = None) -> CompiledProtocol:
    """
    Copy of `compiled` with one generated family removed (all of it, or only the
    instances originating from `source_index`). Used for mutation testing of the
    verifier; the result is generally not a correct simulation.
    """
    keep = [
        k for k, p in enumerate(compiled.provenance)
        if not (p.family is family and (source_index is None or source_index in p.sources))
    ]
    fields = {name: getattr(compiled.spec, name) for name in ProtocolSpec.model_fields}
    fields["transitions"] = tuple(compiled.spec.transitions[k] for k in keep)
    spec = ProtocolSpec(**fields)
    return CompiledProtocol(
        spec=spec,
        provenance=tuple(compiled.provenance[k] for k in keep),
        use_shortcut=compiled.use_shortcut,
    )
