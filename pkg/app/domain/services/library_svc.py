# app/domain/services/library_svc.py
"""
Canonical source protocols with their intended predicates.

Symbols are strings throughout so that every entry round-trips through the
text format unchanged.
"""
import logging
from typing import Callable, Dict, List, Optional, Sequence

from pydantic import BaseModel

from app.domain.errors import InvalidParameter
from app.domain.models.protocol import ProtocolSpec, Transition
from app.domain.models.report import Verdict, VerificationReport, Witness
from app.domain.services.constants import MIN_POPULATION
from app.domain.services.execution_svc import predicate_value
from app.domain.services.semantics_svc import global_input
from app.domain.services.verifier_svc import InputRange
from app.utils.textfmt import format_configuration, format_value

logger = logging.getLogger(__name__)

BINARY = ("0", "1")


class LibraryEntry(BaseModel):
    name: str
    spec: ProtocolSpec
    predicate: Callable[[Sequence[str]], int]   # intended value on an input vector
    description: str
    max_n: int = 3                               # self-test bound
    notes: Optional[str] = None

    model_config = {"frozen": True}  # immutable = safe


def _ones(inp: Sequence[str]) -> int:
    return sum(1 for s in inp if s == "1")


def _pp(name: str, states, transitions, input_map, output_map) -> ProtocolSpec:
    return ProtocolSpec(
        model="pp",
        states=tuple(states),
        alphabet=BINARY,
        input_map=input_map,
        output_map=output_map,
        transitions=tuple(Transition(lhs=lhs, rhs=rhs) for lhs, rhs in transitions),
        name=name,
    )


def detect_one() -> LibraryEntry:
    spec = _pp(
        "detect_one",
        states=BINARY,
        transitions=[(("1", "0"), ("1", "1"))],
        input_map={"0": "0", "1": "1"},
        output_map={"0": 0, "1": 1},
    )
    return LibraryEntry(
        name=spec.name,
        spec=spec,
        predicate=lambda inp: int(_ones(inp) >= 1),
        description="at least one input is 1",
        max_n=4,
        notes="already one-way: compiles to a single t6 transition with the shortcut",
    )


def threshold2() -> LibraryEntry:
    spec = _pp(
        "threshold2",
        states=("0", "1", "2"),
        transitions=[
            (("1", "1"), ("2", "2")),
            (("2", "0"), ("2", "2")),
            (("2", "1"), ("2", "2")),
        ],
        input_map={"0": "0", "1": "1"},
        output_map={"0": 0, "1": 0, "2": 1},
    )
    return LibraryEntry(
        name=spec.name,
        spec=spec,
        predicate=lambda inp: int(_ones(inp) >= 2),
        description="at least two inputs are 1",
        notes="both participants change state in (1,1) -> (2,2)",
    )


def majority() -> LibraryEntry:
    spec = _pp(
        "majority",
        states=("A", "B", "a", "b"),
        transitions=[
            (("A", "B"), ("a", "b")),
            (("A", "b"), ("A", "a")),
            (("B", "a"), ("B", "b")),
            (("a", "b"), ("b", "b")),
        ],
        input_map={"1": "A", "0": "B"},
        output_map={"A": 1, "a": 1, "B": 0, "b": 0},
    )
    return LibraryEntry(
        name=spec.name,
        spec=spec,
        predicate=lambda inp: int(_ones(inp) > len(inp) - _ones(inp)),
        description="strictly more 1s than 0s",
        notes="ties end in the all-b consensus and report 0",
    )


def modulo(m: int, r: int) -> LibraryEntry:
    """Sum of the binary inputs is congruent to r modulo m."""
    if m < 2 or not 0 <= r < m:
        raise InvalidParameter(f"modulo needs m >= 2 and 0 <= r < m, got m={m} r={r}")
    acc = [f"a{x}" for x in range(m)]
    flag = ["p0", "p1"]

    transitions = []
    for x in range(m):
        for y in range(m):
            z = (x + y) % m
            transitions.append(((acc[x], acc[y]), (acc[z], flag[int(z == r)])))
    for x in range(m):
        b = int(x == r)
        transitions.append(((acc[x], flag[1 - b]), (acc[x], flag[b])))

    output_map = {a: int(x == r) for x, a in enumerate(acc)}
    output_map.update({"p0": 0, "p1": 1})
    spec = _pp(
        f"modulo_{m}_{r}",
        states=acc + flag,
        transitions=transitions,
        input_map={"0": "a0", "1": "a1"},
        output_map=output_map,
    )
    return LibraryEntry(
        name=spec.name,
        spec=spec,
        predicate=lambda inp: int(_ones(inp) % m == r),
        description=f"number of 1s is congruent to {r} modulo {m}",
        notes="accumulators merge until one is left; the others become flags copying its verdict",
    )


def detect_one_once() -> LibraryEntry:
    spec = ProtocolSpec(
        model="mpp",
        states=BINARY,
        alphabet=BINARY,
        edge_states=("fresh", "used"),
        initial_edge="fresh",
        input_map={"0": "0", "1": "1"},
        output_map={"0": 0, "1": 1},
        transitions=(Transition(lhs=("1", "fresh", "0", "fresh"), rhs=("1", "used", "1", "used")),),
        name="detect_one_once",
    )
    return LibraryEntry(
        name=spec.name,
        spec=spec,
        predicate=lambda inp: int(_ones(inp) >= 1),
        description="at least one input is 1",
        notes="mediated: each ordered pair fires at most once, after which both sides read `used`",
    )


_BUILDERS: Dict[str, Callable[[], LibraryEntry]] = {
    "detect_one": detect_one,
    "threshold2": threshold2,
    "majority": majority,
    "modulo_2_0": lambda: modulo(2, 0),
    "detect_one_once": detect_one_once,
}


def names() -> List[str]:
    return list(_BUILDERS)


def entries() -> List[LibraryEntry]:
    return [build() for build in _BUILDERS.values()]


def get_entry(name: str) -> LibraryEntry:
    """Look up a library entry; `modulo_<m>_<r>` builds any modulo instance."""
    if name in _BUILDERS:
        return _BUILDERS[name]()
    parts = name.split("_")
    if len(parts) == 3 and parts[0] == "modulo" and parts[1].isdigit() and parts[2].isdigit():
        return modulo(int(parts[1]), int(parts[2]))
    raise InvalidParameter(f"unknown library protocol {name!r}; known: {', '.join(_BUILDERS)}")


def self_test(entry: LibraryEntry, max_n: Optional[int] = None, node_limit: Optional[int] = None) -> VerificationReport:
    """Compare predicate_value with the documented predicate on every input of length 2..max_n."""
    max_n = entry.max_n if max_n is None else max_n
    inputs = InputRange(entry.spec.alphabet, MIN_POPULATION, max_n)
    params = {"source": entry.name, "max_n": str(max_n), "inputs": str(inputs.count)}
    for k, inp in enumerate(inputs):
        found = predicate_value(entry.spec, inp, node_limit=node_limit)
        expected = entry.predicate(inp)
        if found != expected:
            logger.warning("self-test %s failed on input=%s", entry.name, ",".join(inp))
            return VerificationReport(
                check="self-test", params=params, verdict=Verdict.FAIL, checked=k + 1,
                witness=Witness(
                    description="protocol value differs from the documented predicate",
                    input=inp, protocol="source",
                    start=format_configuration(global_input(entry.spec, inp), inline=True),
                    expected=format_value(expected), found=format_value(found),
                ),
            )
    logger.info("self-test %s passed inputs=%d", entry.name, inputs.count)
    return VerificationReport(check="self-test", params=params, verdict=Verdict.PASS, checked=inputs.count)
