# tests/utils/test_textfmt.py
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from app.domain.errors import ProtocolParseError
from app.domain.models.configuration import Configuration, MediatedConfiguration
from app.domain.models.protocol import StepLabel
from app.domain.models.report import Verdict, VerificationReport, Witness
from app.domain.models.simulation import INIT, RESPONDED, backup, locked, paired, unlocked
from app.domain.services import library_svc
from app.domain.services.compiler_svc import compile_protocol
from app.utils import jsonx
from app.utils.textfmt import (
    encode_symbol,
    format_configuration,
    format_protocol,
    format_report,
    parse_configuration,
    parse_protocol,
    parse_step,
)


@pytest.mark.parametrize("name", library_svc.names())
def test_library_files_match_entries(protocols_dir, name):
    text = (protocols_dir / f"{name}.txt").read_text(encoding="utf-8")
    assert parse_protocol(text) == library_svc.get_entry(name).spec


@pytest.mark.parametrize("name", library_svc.names())
def test_protocol_round_trip(name):
    spec = library_svc.get_entry(name).spec
    assert parse_protocol(format_protocol(spec)) == spec


@pytest.mark.parametrize("name", library_svc.names())
@pytest.mark.parametrize("shortcut", [False, True])
def test_compiled_round_trip(name, shortcut):
    compiled = compile_protocol(library_svc.get_entry(name).spec, use_shortcut=shortcut)
    assert parse_protocol(format_protocol(compiled)) == compiled


def test_compiled_header_and_sections(detect_one_c):
    text = format_protocol(detect_one_c)
    assert "# families: t1=1 t2=1 t3=1 t4=4 t5=12 t6=0 merged=0" in text
    assert "simulation: pp" in text
    assert "  U:1 eps U:0 eps -> U:1 eps L:1 bak:0" in text
    assert "provenance:\n  1 t1 1\n" in text


def test_encode_symbols():
    assert encode_symbol(unlocked("q")) == "U:q"
    assert encode_symbol(locked("q")) == "L:q"
    assert encode_symbol(INIT) == "eps"
    assert encode_symbol(RESPONDED) == "sr"
    assert encode_symbol(backup("q")) == "bak:q"
    assert encode_symbol(paired(backup("q", "s"), "t")) == "bak:q:s|t"
    assert encode_symbol(paired(RESPONDED, "s")) == "sr|s"


def test_inline_sections_and_comments():
    text = """
    # two-state
    model: pp   # plain
    states: a
      b
    alphabet: x
    input:
      x -> a
    output: a -> 1
      b -> 0
    transitions: a a -> a b
    """
    spec = parse_protocol(text)
    assert spec.states == ("a", "b")
    assert spec.output_map == {"a": 1, "b": 0}
    assert len(spec.transitions) == 1


@pytest.mark.parametrize("text, line", [
    ("model: xx\n", 1),
    ("model: pp\nstates: a\nalphabet: x\ninput:\n  x -> a\noutput:\n  a -> 2\n", 7),
    ("model: pp\nstates: a\nalphabet: x\ninput:\n  x -> a\noutput:\n  a -> 1\ntransitions:\n  a -> a\n", 9),
    ("model: pp\nstates: a:b\n", 2),
    ("model: pp\nmodel: pp\n", 2),
    ("a a -> a a\n", 1),
    ("model: pp\nstates: a\nalphabet: x\ninput:\n  x => a\n", 5),
])
def test_parse_errors_carry_line(text, line):
    with pytest.raises(ProtocolParseError) as e:
        parse_protocol(text)
    assert e.value.line == line


def test_parse_error_for_incomplete_protocol():
    with pytest.raises(ProtocolParseError):
        parse_protocol("model: pp\nstates: a\nalphabet: x\noutput:\n  a -> 1\n")


def test_provenance_requires_simulation():
    text = format_protocol(library_svc.detect_one().spec) + "provenance:\n  1 t6 1\n"
    with pytest.raises(ProtocolParseError):
        parse_protocol(text)


def test_configuration_formats(detect_one_c):
    d = MediatedConfiguration(cells=((unlocked("0"), INIT), (backup("1"), locked("0"))))
    assert format_configuration(d) == "U:0,eps\nbak:1,L:0"
    assert format_configuration(d, inline=True) == "U:0,eps;bak:1,L:0"
    assert parse_configuration("config:\nU:0,eps\nbak:1,L:0\n", detect_one_c.spec) == d
    assert parse_configuration("U:0, eps; bak:1, L:0", detect_one_c.spec) == d


def test_parse_configuration_shapes(detect_one, detect_one_once):
    assert parse_configuration("1,0", detect_one) == Configuration(agents=("1", "0"))
    with pytest.raises(ProtocolParseError):
        parse_configuration("1,0;0,1", detect_one)
    with pytest.raises(ProtocolParseError):
        parse_configuration("1,fresh;fresh", detect_one_once)
    with pytest.raises(ProtocolParseError):
        parse_configuration("", detect_one)


def test_parse_step():
    assert parse_step("1 2 3") == StepLabel(2, 1, 2)
    with pytest.raises(ProtocolParseError):
        parse_step("1 2")
    with pytest.raises(ProtocolParseError):
        parse_step("1 2 0")


def test_report_text_block():
    report = VerificationReport(
        check="soundness", params={"source": "detect_one", "inputs": "4"}, verdict=Verdict.FAIL, checked=3,
        witness=Witness(description="cleanup blocked", input=("1", "0"), start="U:1,eps;eps,U:0", steps=("1 2 1",)),
    )
    assert format_report(report) == (
        "check: soundness\n"
        "verdict: fail\n"
        "checked: 3\n"
        "params:\n"
        "  inputs: 4\n"
        "  source: detect_one\n"
        "witness:\n"
        "  description: cleanup blocked\n"
        "  input: 1,0\n"
        "  protocol: target\n"
        "  start: U:1,eps;eps,U:0\n"
        "  steps: 1 2 1\n"
    )


def test_report_json_is_stable():
    report = VerificationReport(check="io", verdict=Verdict.PASS, checked=2)
    text = jsonx.dumps([report.model_dump(mode="json")])
    assert jsonx.loads(text)[0]["verdict"] == "pass"
    assert text == jsonx.dumps([report.model_dump(mode="json")])


THRESHOLD2 = library_svc.threshold2().spec
THRESHOLD2_C = compile_protocol(THRESHOLD2)

agent_states = st.sampled_from(THRESHOLD2_C.spec.states)
edge_states = st.sampled_from(THRESHOLD2_C.spec.edge_states)


@st.composite
def compiled_configurations(draw):
    n = draw(st.integers(min_value=1, max_value=4))
    rows = tuple(
        tuple(draw(agent_states) if i == j else draw(edge_states) for j in range(n))
        for i in range(n)
    )
    return MediatedConfiguration(cells=rows)


@settings(max_examples=80, deadline=None)
@given(d=compiled_configurations(), inline=st.booleans())
def test_configuration_round_trip(d, inline):
    assert parse_configuration(format_configuration(d, inline=inline), THRESHOLD2_C.spec) == d
