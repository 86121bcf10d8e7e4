# app/utils/textfmt.py
"""
Line-oriented text format for protocols, configurations, traces, graphs and
verification reports.

Compiled protocols use a reserved symbol scheme: agents `U:q` / `L:q`, edge
sides `eps`, `sr`, `bak:q` and, for mediated sources, pairs `eps|s`, `sr|s`,
`bak:q:s|s'`. Source symbols therefore may not contain `: | , # ;`.
"""
import re
from typing import Dict, Hashable, Iterable, List, Optional, Sequence, Tuple, Union

from app.domain.errors import ProtocolParseError
from app.domain.models.configuration import AnyConfiguration, Configuration, MediatedConfiguration
from app.domain.models.protocol import Outcome, ProtocolSpec, StepLabel, Transition
from app.domain.models.report import VerificationReport
from app.domain.models.simulation import (
    INIT,
    RESPONDED,
    CompiledProtocol,
    Family,
    Lock,
    Provenance,
    SideKind,
    SimAgentState,
    SimEdgeState,
    backup,
    paired,
)

RESERVED = frozenset(":|,#;")
SECTIONS = (
    "model", "name", "simulation", "shortcut", "states", "alphabet", "edge-states",
    "initial-edge", "input", "output", "transitions", "provenance",
)
_HEADER = re.compile(r"^([a-z-]+):(?:\s+(.*))?$")

Body = List[Tuple[int, str]]  # (1-based line number, content)


# ---- symbols ------------------------------------------------------------------

def encode_symbol(x: Hashable) -> str:
    if isinstance(x, SimAgentState):
        return f"{x.lock.value}:{x.compute}"
    if isinstance(x, SimEdgeState):
        if x.kind is SideKind.BACKUP:
            first = f"bak:{x.backup}" if x.backup_edge is None else f"bak:{x.backup}:{x.backup_edge}"
        else:
            first = x.kind.value
        return first if x.live is None else f"{first}|{x.live}"
    return str(x)


def _source_symbol(tok: str, line: Optional[int]) -> str:
    if not tok or RESERVED & set(tok):
        raise ProtocolParseError(f"invalid symbol {tok!r} (empty or uses one of ': | , # ;')", line)
    return tok


def _agent_symbol(tok: str, line: Optional[int], compiled: bool) -> Hashable:
    if not compiled:
        return _source_symbol(tok, line)
    lock, sep, q = tok.partition(":")
    if not sep or lock not in ("U", "L"):
        raise ProtocolParseError(f"compiled agent state must be U:q or L:q, got {tok!r}", line)
    return SimAgentState(Lock(lock), _source_symbol(q, line))


def _edge_symbol(tok: str, line: Optional[int], compiled: bool) -> Hashable:
    if not compiled:
        return _source_symbol(tok, line)
    first, bar, live = tok.partition("|")
    parts = first.split(":")
    if parts == [SideKind.INIT.value]:
        side = INIT
    elif parts == [SideKind.RESPONDED.value]:
        side = RESPONDED
    elif parts[0] == SideKind.BACKUP.value and len(parts) in (2, 3):
        side = backup(*(_source_symbol(p, line) for p in parts[1:]))
    else:
        raise ProtocolParseError(f"unknown compiled edge side {tok!r}", line)
    if bar:
        side = paired(side, _source_symbol(live, line))
    return side


# ---- sections -----------------------------------------------------------------

def _strip(raw: str) -> str:
    return raw.split("#", 1)[0].strip()


def _sections(text: str) -> Dict[str, Tuple[int, Body]]:
    sections: Dict[str, Tuple[int, Body]] = {}
    current: Optional[Body] = None
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if not line:
            continue
        m = _HEADER.match(line)
        if m and m.group(1) in SECTIONS:
            name = m.group(1)
            if name in sections:
                raise ProtocolParseError(f"duplicate section {name!r}", lineno)
            current = []
            sections[name] = (lineno, current)
            if m.group(2):
                current.append((lineno, m.group(2).strip()))
            continue
        if m and not any(c.isspace() for c in line):
            raise ProtocolParseError(f"unknown section {m.group(1)!r}", lineno)
        if current is None:
            raise ProtocolParseError("content before the first section header", lineno)
        current.append((lineno, line))
    return sections


def _tokens(sections, name: str) -> List[Tuple[int, str]]:
    if name not in sections:
        return []
    return [(ln, tok) for ln, content in sections[name][1] for tok in content.split()]


def _single(sections, name: str, required: bool = False) -> Optional[Tuple[int, str]]:
    if name not in sections:
        if required:
            raise ProtocolParseError(f"missing section {name!r}")
        return None
    toks = _tokens(sections, name)
    if len(toks) != 1:
        raise ProtocolParseError(f"section {name!r} takes exactly one value", sections[name][0])
    return toks[0]


def _arrow(content: str, line: int) -> Tuple[List[str], List[str]]:
    parts = content.split("->")
    if len(parts) != 2:
        raise ProtocolParseError("expected exactly one '->'", line)
    return parts[0].split(), parts[1].split()


# ---- protocols ----------------------------------------------------------------

def parse_protocol(text: str) -> Union[ProtocolSpec, CompiledProtocol]:
    """Parse a protocol file; a `simulation:` section yields a CompiledProtocol."""
    sections = _sections(text)
    model_line, model = _single(sections, "model", required=True)
    if model not in ("pp", "mpp"):
        raise ProtocolParseError(f"model must be pp or mpp, got {model!r}", model_line)

    simulation = _single(sections, "simulation")
    if simulation is not None and simulation[1] not in ("pp", "mpp"):
        raise ProtocolParseError(f"simulation must be pp or mpp, got {simulation[1]!r}", simulation[0])
    compiled = simulation is not None

    def agent(tok, ln):
        return _agent_symbol(tok, ln, compiled)

    def edge(tok, ln):
        return _edge_symbol(tok, ln, compiled)

    states = tuple(agent(tok, ln) for ln, tok in _tokens(sections, "states"))
    alphabet = tuple(_source_symbol(tok, ln) for ln, tok in _tokens(sections, "alphabet"))
    edge_states = tuple(edge(tok, ln) for ln, tok in _tokens(sections, "edge-states"))
    initial = _single(sections, "initial-edge")
    name = _single(sections, "name")

    input_map: Dict[str, Hashable] = {}
    for ln, content in sections.get("input", (0, []))[1]:
        lhs, rhs = _arrow(content, ln)
        if len(lhs) != 1 or len(rhs) != 1:
            raise ProtocolParseError("input lines read `symbol -> state`", ln)
        if lhs[0] in input_map:
            raise ProtocolParseError(f"input symbol {lhs[0]!r} mapped twice", ln)
        input_map[_source_symbol(lhs[0], ln)] = agent(rhs[0], ln)

    output_map: Dict[Hashable, int] = {}
    for ln, content in sections.get("output", (0, []))[1]:
        lhs, rhs = _arrow(content, ln)
        if len(lhs) != 1 or rhs not in (["0"], ["1"]):
            raise ProtocolParseError("output lines read `state -> 0|1`", ln)
        q = agent(lhs[0], ln)
        if q in output_map:
            raise ProtocolParseError(f"output of {lhs[0]!r} given twice", ln)
        output_map[q] = int(rhs[0])

    transitions = []
    for ln, content in sections.get("transitions", (0, []))[1]:
        lhs, rhs = _arrow(content, ln)
        if len(lhs) not in (2, 4) or len(lhs) != len(rhs):
            raise ProtocolParseError("transition needs 2 or 4 symbols on both sides", ln)
        decode = [agent, edge] if len(lhs) == 4 else [agent]
        transitions.append(Transition(
            lhs=tuple(decode[k % len(decode)](tok, ln) for k, tok in enumerate(lhs)),
            rhs=tuple(decode[k % len(decode)](tok, ln) for k, tok in enumerate(rhs)),
        ))

    try:
        spec = ProtocolSpec(
            model=model,
            states=states,
            alphabet=alphabet,
            edge_states=edge_states,
            initial_edge=edge(initial[1], initial[0]) if initial else None,
            input_map=input_map,
            output_map=output_map,
            transitions=tuple(transitions),
            simulation=simulation[1] if simulation else None,
            name=name[1] if name else None,
        )
    except ValueError as e:
        raise ProtocolParseError(f"malformed protocol: {_first_error(e)}", model_line) from e

    if not compiled:
        if "provenance" in sections or "shortcut" in sections:
            raise ProtocolParseError("provenance/shortcut need a `simulation:` section", model_line)
        return spec
    return _parse_compiled(sections, spec, model_line)


def _parse_compiled(sections, spec: ProtocolSpec, model_line: int) -> CompiledProtocol:
    provenance = []
    for ln, content in sections.get("provenance", (0, []))[1]:
        parts = content.split()
        if len(parts) != 3:
            raise ProtocolParseError("provenance lines read `index family source[,source...]`", ln)
        try:
            k = int(parts[0])
            family = Family(parts[1])
            sources = tuple(int(s) - 1 for s in parts[2].split(","))
        except ValueError as e:
            raise ProtocolParseError(f"bad provenance entry: {e}", ln) from e
        if k != len(provenance) + 1:
            raise ProtocolParseError(f"provenance index {k} out of order", ln)
        if any(s < 0 for s in sources):
            raise ProtocolParseError("source transition indices are 1-based", ln)
        provenance.append(Provenance(family=family, sources=sources))

    shortcut = _single(sections, "shortcut")
    if shortcut is not None and shortcut[1] not in ("true", "false"):
        raise ProtocolParseError("shortcut must be true or false", shortcut[0])
    try:
        return CompiledProtocol(
            spec=spec,
            provenance=tuple(provenance),
            use_shortcut=shortcut is not None and shortcut[1] == "true",
        )
    except ValueError as e:
        raise ProtocolParseError(f"malformed compiled protocol: {_first_error(e)}", model_line) from e


def _first_error(e: ValueError) -> str:
    errors = getattr(e, "errors", None)
    if callable(errors):
        return "; ".join(err.get("msg", "") for err in errors())
    return str(e)


def format_protocol(protocol: Union[ProtocolSpec, CompiledProtocol]) -> str:
    compiled = protocol if isinstance(protocol, CompiledProtocol) else None
    spec = compiled.spec if compiled else protocol
    enc = encode_symbol

    lines: List[str] = []
    if compiled:
        counts = " ".join(f"{f}={c}" for f, c in compiled.family_counts().items())
        lines.append(f"# compiled from a {spec.simulation} protocol: {len(spec.transitions)} transitions")
        lines.append(f"# families: {counts} merged={compiled.merged_count}")
    lines.append(f"model: {spec.model}")
    if spec.name:
        lines.append(f"name: {spec.name}")
    if compiled:
        lines.append(f"simulation: {spec.simulation}")
        if compiled.use_shortcut:
            lines.append("shortcut: true")
    lines.append(("states: " + " ".join(enc(q) for q in spec.states)).rstrip())
    lines.append(("alphabet: " + " ".join(spec.alphabet)).rstrip())
    if spec.mediated:
        lines.append(("edge-states: " + " ".join(enc(s) for s in spec.edge_states)).rstrip())
        lines.append(f"initial-edge: {enc(spec.initial_edge)}")
    lines.append("input:")
    lines.extend(f"  {sym} -> {enc(spec.input_map[sym])}" for sym in spec.alphabet)
    lines.append("output:")
    lines.extend(f"  {enc(q)} -> {spec.output_map[q]}" for q in spec.states)
    lines.append("transitions:")
    for t in spec.transitions:
        lines.append(f"  {' '.join(map(enc, t.lhs))} -> {' '.join(map(enc, t.rhs))}")
    if compiled:
        lines.append("provenance:")
        for k, p in enumerate(compiled.provenance, start=1):
            lines.append(f"  {k} {p.family.value} {','.join(str(s + 1) for s in p.sources)}")
    return "\n".join(lines) + "\n"


# ---- configurations -----------------------------------------------------------

def format_configuration(config: AnyConfiguration, inline: bool = False) -> str:
    """Plain: `q1,q2,...`; mediated: n rows of n cells, newline- or `;`-separated."""
    if isinstance(config, Configuration):
        return ",".join(encode_symbol(q) for q in config.agents)
    rows = [",".join(encode_symbol(c) for c in row) for row in config.cells]
    return (";" if inline else "\n").join(rows)


def parse_configuration(text: str, spec: ProtocolSpec) -> AnyConfiguration:
    """
    Inverse of format_configuration for configurations of `spec`. Accepts an
    optional `config:` header and either row separator. Symbols are checked for
    syntax only; membership in Q / S is left to the consumer.
    """
    compiled = spec.simulation is not None
    rows: List[Tuple[Optional[int], str]] = []
    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = _strip(raw)
        if line.startswith("config:"):
            line = line[len("config:"):].strip()
        rows.extend((lineno, part.strip()) for part in line.split(";") if part.strip())
    if not rows:
        raise ProtocolParseError("empty configuration")

    cells = [(ln, [tok.strip() for tok in content.split(",")]) for ln, content in rows]
    if not spec.mediated:
        if len(cells) != 1:
            raise ProtocolParseError("plain configurations are a single row", cells[1][0])
        ln, toks = cells[0]
        return Configuration(agents=tuple(_agent_symbol(tok, ln, compiled) for tok in toks))

    n = len(cells)
    matrix = []
    for i, (ln, toks) in enumerate(cells):
        if len(toks) != n:
            raise ProtocolParseError(f"row {i + 1} has {len(toks)} cells, expected {n}", ln)
        matrix.append(tuple(
            _agent_symbol(tok, ln, compiled) if i == j else _edge_symbol(tok, ln, compiled)
            for j, tok in enumerate(toks)
        ))
    return MediatedConfiguration(cells=tuple(matrix))


# ---- steps, traces, graphs ----------------------------------------------------

def format_step(label: StepLabel) -> str:
    return f"{label.initiator} {label.responder} {label.transition + 1}"


def parse_step(text: str) -> StepLabel:
    parts = text.split()
    if len(parts) != 3 or not all(p.isdigit() for p in parts):
        raise ProtocolParseError(f"step must read `i j transition-index`, got {text!r}")
    i, j, k = (int(p) for p in parts)
    if k < 1:
        raise ProtocolParseError("transition indices are 1-based")
    return StepLabel(k - 1, i, j)


def format_trace(start: AnyConfiguration, steps: Iterable[Tuple[StepLabel, AnyConfiguration]], seed: int) -> str:
    lines = [f"seed: {seed}", f"start: {format_configuration(start, inline=True)}", "steps:"]
    lines.extend(f"  {format_step(label)} -> {format_configuration(c, inline=True)}" for label, c in steps)
    return "\n".join(lines) + "\n"


def format_graph(
    nodes: Sequence[AnyConfiguration], edges: Iterable[Tuple[int, StepLabel, int]], complete: bool = True,
) -> str:
    lines = [f"complete: {'true' if complete else 'false'}", "nodes:"]
    lines.extend(f"  {k} {format_configuration(c, inline=True)}" for k, c in enumerate(nodes))
    lines.append("edges:")
    lines.extend(f"  {src} {dst} {format_step(label)}" for src, label, dst in edges)
    return "\n".join(lines) + "\n"


# ---- results ------------------------------------------------------------------

def format_value(value: Union[int, Outcome]) -> str:
    return value.value if isinstance(value, Outcome) else str(value)


def format_predicate_table(rows: Iterable[Tuple[Sequence[str], Union[int, Outcome]]]) -> str:
    return "".join(f"{','.join(inp)} -> {format_value(v)}\n" for inp, v in rows)


_WITNESS_FIELDS = ("description", "input", "protocol", "start", "steps", "expected", "found")


def format_report(report: VerificationReport) -> str:
    lines = [f"check: {report.check}", f"verdict: {report.verdict.value}", f"checked: {report.checked}"]
    if report.params:
        lines.append("params:")
        lines.extend(f"  {k}: {report.params[k]}" for k in sorted(report.params))
    if report.note:
        lines.append(f"note: {report.note}")
    if report.witness is not None:
        lines.append("witness:")
        for field in _WITNESS_FIELDS:
            value = getattr(report.witness, field)
            if value is None or value == ():
                continue
            if field == "input":
                value = ",".join(value)
            elif field == "steps":
                value = "; ".join(value)
            lines.append(f"  {field}: {value}")
    return "\n".join(lines) + "\n"


def format_reports(reports: Sequence[VerificationReport]) -> str:
    return "\n".join(format_report(r) for r in reports)
